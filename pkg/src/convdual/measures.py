"""Signed regular measures on the complex: piecewise-constant densities with
respect to a strictly positive atomless base measure, plus finite node atoms.

Every pairing and total-variation computation is a finite closed form, so the
duality experiments downstream never see quadrature error from this layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import SchemaError
from .plfun import PLFunction
from .setmap import CellComplex


@dataclass(frozen=True)
class BaseMeasure:
    """Strictly positive piecewise-constant density; atomless by construction."""

    complex: CellComplex
    densities: tuple[float, ...]

    def __post_init__(self):
        if len(self.densities) != self.complex.n_cells:
            raise SchemaError("density count must match cell count")
        ds = tuple(float(d) for d in self.densities)
        if any(not math.isfinite(d) or d <= 0.0 for d in ds):
            raise SchemaError("base measure density must be finite and > 0")
        object.__setattr__(self, "densities", ds)

    @staticmethod
    def lebesgue(complex_: CellComplex) -> "BaseMeasure":
        return BaseMeasure(complex_, tuple(1.0 for _ in range(complex_.n_cells)))

    def cell_mass(self, i: int) -> float:
        c, d = self.complex.cell(i)
        return self.densities[i] * (d - c)

    def total(self) -> float:
        out = 0.0
        for i in range(self.complex.n_cells):
            out += self.cell_mass(i)
        return out

    def refined(self, per_cell: int) -> "BaseMeasure":
        fine = self.complex.refined(per_cell)
        dens = tuple(d for d in self.densities for _ in range(per_cell))
        return BaseMeasure(fine, dens)


@dataclass(frozen=True)
class SignedMeasure:
    """Cell densities relative to the base measure plus node atoms.

    Atoms are (node_index, weight) with nonzero weight, at most one per node;
    atoms at arbitrary locations are handled upstream by refining the complex
    so the location becomes a node.
    """

    base: BaseMeasure
    densities: tuple[float, ...]
    atoms: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        if len(self.densities) != self.base.complex.n_cells:
            raise SchemaError("density count must match cell count")
        object.__setattr__(self, "densities", tuple(float(d) for d in self.densities))
        seen = set()
        atoms = []
        for j, w in self.atoms:
            j = int(j)
            w = float(w)
            if not 0 <= j < self.base.complex.n_nodes:
                raise SchemaError("atom node index out of range")
            if w == 0.0:
                raise SchemaError("atom weight must be nonzero")
            if j in seen:
                raise SchemaError("at most one atom per node")
            seen.add(j)
            atoms.append((j, w))
        object.__setattr__(self, "atoms", tuple(sorted(atoms)))

    @property
    def complex(self) -> CellComplex:
        return self.base.complex

    def refined(self, per_cell: int) -> "SignedMeasure":
        base = self.base.refined(per_cell)
        dens = tuple(d for d in self.densities for _ in range(per_cell))
        atoms = tuple((j * per_cell, w) for j, w in self.atoms)
        return SignedMeasure(base, dens, atoms)


def total_variation(theta: SignedMeasure) -> tuple[float, SignedMeasure]:
    """Total variation |theta|(T) together with the variation measure."""
    value = 0.0
    for i in range(theta.complex.n_cells):
        value += abs(theta.densities[i]) * theta.base.cell_mass(i)
    for _, w in theta.atoms:
        value += abs(w)
    tv = SignedMeasure(
        theta.base,
        tuple(abs(d) for d in theta.densities),
        tuple((j, abs(w)) for j, w in theta.atoms),
    )
    return value, tv


def lebesgue_decompose(
    theta: SignedMeasure, base: BaseMeasure | None = None
) -> tuple[SignedMeasure, SignedMeasure]:
    """Absolutely continuous / singular split w.r.t. the base measure.

    The singular part of this measure class is purely atomic, so the split is
    exact: densities on one side, atoms on the other.
    """
    if base is not None and base != theta.base:
        raise SchemaError("decomposition base differs from the measure's base")
    ac = SignedMeasure(theta.base, theta.densities, ())
    zero = tuple(0.0 for _ in theta.densities)
    sing = SignedMeasure(theta.base, zero, theta.atoms)
    return ac, sing


def rn_derivative(theta: SignedMeasure, wrt: str = "base"):
    """Radon-Nikodym data: cell densities w.r.t. the base, or atom signs
    w.r.t. the singular variation."""
    if wrt == "base":
        if theta.atoms:
            raise SchemaError("measure with atoms has no density w.r.t. the base")
        return theta.densities
    if wrt == "singular":
        return tuple((j, math.copysign(1.0, w)) for j, w in theta.atoms)
    raise ValueError("wrt must be 'base' or 'singular'")


def pair(y: PLFunction, theta: SignedMeasure) -> float:
    """Exact integral of y against theta (trapezoid is exact for affine y)."""
    if y.complex.nodes != theta.complex.nodes:
        raise SchemaError("pairing requires a shared complex")
    total = 0.0
    for i in range(theta.complex.n_cells):
        c, d = theta.complex.cell(i)
        rho = theta.densities[i] * theta.base.densities[i]
        total += rho * (d - c) * 0.5 * (y.values[i] + y.values[i + 1])
    for j, w in theta.atoms:
        total += w * y.values[j]
    return total
