"""Continuous piecewise-linear functions determined by node values."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import SchemaError
from .setmap import CellComplex


@dataclass(frozen=True)
class PLFunction:
    complex: CellComplex
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != self.complex.n_nodes:
            raise SchemaError("value count must match node count")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @staticmethod
    def constant(complex_: CellComplex, v: float) -> "PLFunction":
        return PLFunction(complex_, tuple(v for _ in range(complex_.n_nodes)))

    def __call__(self, t: float) -> float:
        nodes = self.complex.nodes
        if t == nodes[0]:
            return self.values[0]
        if t == nodes[-1]:
            return self.values[-1]
        i = self.complex.cell_of(t)
        c, d = self.complex.cell(i)
        w = (t - c) / (d - c)
        return self.values[i] + (self.values[i + 1] - self.values[i]) * w

    def sup_norm(self) -> float:
        return max(abs(v) for v in self.values)

    def refined(self, per_cell: int) -> "PLFunction":
        fine = self.complex.refined(per_cell)
        vals = []
        for i in range(self.complex.n_cells):
            vl, vr = self.values[i], self.values[i + 1]
            vals.append(vl)
            for j in range(1, per_cell):
                vals.append(vl + (j * (vr - vl)) / per_cell)
        vals.append(self.values[-1])
        return PLFunction(fine, tuple(vals))

    def with_value(self, i: int, v: float) -> "PLFunction":
        vals = list(self.values)
        vals[i] = v
        return PLFunction(self.complex, tuple(vals))
