"""Minimal column-ordered table passed from computations to the exporters."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DomainError


@dataclass(frozen=True)
class Table:
    """Ordered columns and one dict per row; every row must supply every
    column. Values are floats or strings, already in output units."""

    columns: tuple[str, ...]
    rows: tuple[dict, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if len(set(self.columns)) != len(self.columns):
            raise DomainError(f"duplicate column names in {self.columns}")
        object.__setattr__(self, "rows", tuple(self.rows))
        for i, row in enumerate(self.rows):
            missing = [c for c in self.columns if c not in row]
            if missing:
                raise DomainError(f"row {i} is missing columns {missing}")

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list:
        if name not in self.columns:
            raise DomainError(f"no column named {name!r}")
        return [row[name] for row in self.rows]
