"""Two-axis parameter grids over model dataclasses."""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, field
from typing import Any, Iterator, Sequence

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    axis1: tuple[str, tuple[float, ...]]
    axis2: tuple[str, tuple[float, ...]]
    fixed: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        axes = []
        for name, values in (self.axis1, self.axis2):
            values = tuple(float(v) for v in values)
            if not values:
                raise ValueError(f"axis {name!r} has no values")
            d = np.diff(values)
            if len(values) > 1 and not (np.all(d > 0) or np.all(d < 0)):
                raise ValueError(f"axis {name!r} values must be strictly monotone")
            axes.append((str(name), values))
        if axes[0][0] == axes[1][0]:
            raise ValueError("grid axes must be distinct fields")
        object.__setattr__(self, "axis1", axes[0])
        object.__setattr__(self, "axis2", axes[1])

    @classmethod
    def linspace(cls, name1, lo1, hi1, n1, name2, lo2, hi2, n2, **fixed) -> "GridSpec":
        return cls(
            (name1, tuple(np.round(np.linspace(lo1, hi1, n1), 12))),
            (name2, tuple(np.round(np.linspace(lo2, hi2, n2), 12))),
            dict(fixed),
        )

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.axis1[1]), len(self.axis2[1])

    def points(self) -> list[tuple[float, float]]:
        """All coordinates, axis1-major."""
        return [(a, b) for a in self.axis1[1] for b in self.axis2[1]]

    def index(self, point: Sequence[float]) -> tuple[int, int]:
        """Grid indices of ``point``; raises if it is not on the grid."""
        out = []
        for (name, values), v in zip((self.axis1, self.axis2), point):
            hits = [k for k, x in enumerate(values) if abs(x - float(v)) < 1e-9]
            if not hits:
                raise ValueError(f"{v} is not on axis {name!r}")
            out.append(hits[0])
        return tuple(out)

    def snap(self, point: Sequence[float]) -> tuple[float, float]:
        i, j = self.index(point)
        return self.axis1[1][i], self.axis2[1][j]

    def nearest(self, point: Sequence[float]) -> tuple[float, float]:
        a = min(self.axis1[1], key=lambda x: abs(x - point[0]))
        b = min(self.axis2[1], key=lambda x: abs(x - point[1]))
        return a, b

    def serpentine(self) -> Iterator[tuple[float, float]]:
        """Traverse axis1 lines back and forth, stepping along axis2 between lines."""
        v1 = self.axis1[1]
        for j, b in enumerate(self.axis2[1]):
            for a in (v1 if j % 2 == 0 else v1[::-1]):
                yield a, b

    def model_at(self, template, point: Sequence[float]):
        """Copy of the model dataclass ``template`` with axis and fixed fields replaced."""
        names = {f.name for f in dataclasses.fields(template)}
        updates = dict(self.fixed)
        updates[self.axis1[0]] = point[0]
        updates[self.axis2[0]] = point[1]
        unknown = set(updates) - names
        if unknown:
            raise ValueError(f"unknown model field(s) {sorted(unknown)} for {type(template).__name__}")
        return dataclasses.replace(template, **updates)

    def to_json(self) -> dict:
        return {
            "axis1": [self.axis1[0], list(self.axis1[1])],
            "axis2": [self.axis2[0], list(self.axis2[1])],
            "fixed": dict(self.fixed),
        }

    @classmethod
    def from_json(cls, obj) -> "GridSpec":
        return cls(tuple(obj["axis1"]), tuple(obj["axis2"]), dict(obj.get("fixed", {})))


def point_seed(master: int, point: Sequence[float], tag: str = "") -> int:
    """Per-point seed derived from the master seed and the coordinates (process independent)."""
    text = f"{int(master)}|{tag}|" + "|".join(repr(round(float(v), 12)) for v in point)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "little")
