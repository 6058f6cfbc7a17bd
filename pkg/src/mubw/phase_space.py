"""The d x d discrete phase space F_d^2: points, lines, striations, circles.

Grid arrays are indexed ``[q_index, p_index]`` with field-element indices.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np

from .finite_field import FieldElement, FieldError, FieldSpec

__all__ = [
    "INFINITY",
    "PhasePoint",
    "Line",
    "Striation",
    "Circle",
    "enumerate_striations",
    "line_points",
    "circle_of",
    "circle",
    "apply_linear",
    "check_unit_determinant",
    "striation_labels",
    "circle_grid",
    "linear_grid_indices",
]


class Slope(enum.Enum):
    INFINITY = "inf"

    def __repr__(self):
        return "INFINITY"


INFINITY = Slope.INFINITY


@dataclass(frozen=True)
class PhasePoint:
    q: FieldElement
    p: FieldElement

    def __post_init__(self):
        if self.q.field != self.p.field:
            raise FieldError("q and p belong to different fields")

    @property
    def index(self) -> tuple[int, int]:
        return self.q.index, self.p.index


@dataclass(frozen=True)
class Line:
    """``p = slope * q + b``, or ``q = b`` when the slope is INFINITY."""

    slope: FieldElement | Slope
    b: FieldElement

    @property
    def field(self) -> FieldSpec:
        return self.b.field

    @property
    def coefficients(self) -> tuple[FieldElement, FieldElement, FieldElement]:
        """``(a, b, c)`` with the line being ``a q + b p = c``."""
        f = self.field
        one, zero = f.element(1), f.element(0)
        if self.slope is INFINITY:
            return one, zero, self.b
        return -self.slope, one, self.b

    def contains(self, point: PhasePoint) -> bool:
        a, b, c = self.coefficients
        return a * point.q + b * point.p == c

    def is_parallel(self, other: "Line") -> bool:
        return self.slope == other.slope


@dataclass(frozen=True)
class Striation:
    slope: FieldElement | Slope
    lines: tuple[Line, ...]


@dataclass(frozen=True)
class Circle:
    """Solutions of ``q^2 + p^2 = c``."""

    c: FieldElement
    points: tuple[PhasePoint, ...]


def enumerate_striations(spec: FieldSpec) -> list[Striation]:
    """All d+1 striations: finite slopes in element order, then INFINITY."""
    slopes = [*spec.elements(), INFINITY]
    return [Striation(m, tuple(Line(m, b) for b in spec.elements())) for m in slopes]


def line_points(line: Line) -> list[PhasePoint]:
    f = line.field
    if line.slope is INFINITY:
        return [PhasePoint(line.b, p) for p in f.elements()]
    return [PhasePoint(q, line.slope * q + line.b) for q in f.elements()]


def circle_of(point: PhasePoint) -> FieldElement:
    return point.q * point.q + point.p * point.p


def circle(spec: FieldSpec, c) -> Circle:
    c = spec.element(c)
    labels = circle_grid(spec)
    qs, ps = np.nonzero(labels == c.index)
    pts = tuple(PhasePoint(spec.element(int(q)), spec.element(int(p))) for q, p in zip(qs, ps))
    return Circle(c, pts)


def check_unit_determinant(L) -> tuple[tuple[FieldElement, FieldElement], tuple[FieldElement, FieldElement]]:
    (a, b), (c, e) = L
    det = a * e - b * c
    if det.index != 1:
        raise FieldError(f"matrix determinant is {det!r}, expected 1")
    return (a, b), (c, e)


def apply_linear(L, point: PhasePoint) -> PhasePoint:
    """``(q', p') = L (q, p)`` for a 2x2 unit-determinant matrix of elements."""
    (a, b), (c, e) = check_unit_determinant(L)
    return PhasePoint(a * point.q + b * point.p, c * point.q + e * point.p)


# --- grid-level (vectorized) helpers ---------------------------------------


@functools.lru_cache(maxsize=32)
def circle_grid(spec: FieldSpec) -> np.ndarray:
    """``c[q, p] = q^2 + p^2`` as element indices."""
    sq = spec.square(spec.all)
    return spec.add(sq[:, None], sq[None, :])


def striation_labels(spec: FieldSpec, slope) -> np.ndarray:
    """Displacement index ``b`` of the line through each grid point.

    For a finite slope ``m`` that is ``b = p - m q``; for INFINITY, ``b = q``.
    """
    q = spec.all[:, None]
    p = spec.all[None, :]
    if slope is INFINITY:
        return np.broadcast_to(q, (spec.d, spec.d)).copy()
    m = slope.index if isinstance(slope, FieldElement) else int(slope)
    return spec.sub(p, spec.mul(m, q))


def linear_grid_indices(spec: FieldSpec, L) -> tuple[np.ndarray, np.ndarray]:
    """Index arrays ``(q', p')`` of ``L (q, p)`` over the whole grid."""
    (a, b), (c, e) = check_unit_determinant(L)
    q = spec.all[:, None]
    p = spec.all[None, :]
    q2 = spec.add(spec.mul(a.index, q), spec.mul(b.index, p))
    p2 = spec.add(spec.mul(c.index, q), spec.mul(e.index, p))
    return q2, p2
