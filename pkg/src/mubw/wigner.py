"""Discrete Wigner transform on F_d^2 with the kernel

    [A(q, p)]_{jk} = delta(j, 2q - k) * omega^tr((j - k) p)

Operators are plain complex ``numpy`` arrays indexed by field-element index.
The forward and inverse transforms exploit the permutation structure of A and
cost O(d^3) (one d x d matrix product) rather than O(d^4).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .finite_field import FieldSpec
from .phase_space import Line, striation_labels

__all__ = [
    "WignerError",
    "WignerFunction",
    "kernel_A",
    "kernel_stack",
    "to_wigner",
    "from_wigner",
    "hs_inner",
    "moyal_point",
    "moyal_product",
    "line_sum",
    "striation_sums",
    "line_indicator",
    "check_hermitian",
    "operator_to_json",
    "operator_from_json",
    "MOYAL_FULL_MAX_D",
    "MOYAL_POINT_MAX_D",
]

MOYAL_FULL_MAX_D = 11
MOYAL_POINT_MAX_D = 27
HERMITIAN_TOL = 1e-12
REAL_TOL = 1e-12


class WignerError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class WignerFunction:
    """Real d x d grid ``values[q, p]``."""

    field: FieldSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        d = self.field.d
        if v.shape != (d, d):
            raise WignerError(f"grid shape {v.shape} does not match d = {d}")
        if np.iscomplexobj(v):
            scale = max(1.0, float(np.abs(v).max()))
            if np.abs(v.imag).max() > REAL_TOL * scale:
                raise WignerError(f"Wigner values have imaginary part {np.abs(v.imag).max():.3e}")
            v = v.real
        v = np.ascontiguousarray(v, dtype=float)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def d(self) -> int:
        return self.field.d

    def total(self) -> float:
        return float(self.values.sum())

    def __call__(self, q, p) -> float:
        return float(self.values[_idx(q), _idx(p)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["q"] + [f"p{j}" for j in range(self.d)])
        for i, row in enumerate(self.values):
            w.writerow([i] + [repr(float(x)) for x in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, spec: FieldSpec, text: str) -> "WignerFunction":
        rows = list(csv.reader(io.StringIO(text)))[1:]
        return cls(spec, np.array([[float(x) for x in row[1:]] for row in rows]))

    def to_json(self) -> dict:
        return {**self.field.to_json(), "values": self.values.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "WignerFunction":
        return cls(FieldSpec.from_json(obj), np.array(obj["values"], dtype=float))


def _idx(x) -> int:
    return x.index if hasattr(x, "index") and not isinstance(x, (int, np.integer)) else int(x)


def check_hermitian(R: np.ndarray, tol: float = HERMITIAN_TOL) -> float:
    """Return ``max |R - R^dagger|``; raise if it exceeds ``tol * max(1, |R|)``."""
    R = np.asarray(R)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise WignerError(f"expected a square matrix, got shape {R.shape}")
    dev = float(np.abs(R - R.conj().T).max())
    if dev > tol * max(1.0, float(np.abs(R).max())):
        raise WignerError(f"operator is not Hermitian (deviation {dev:.3e})")
    return dev


def kernel_A(q, p, spec: FieldSpec) -> np.ndarray:
    q, p = _idx(q), _idx(p)
    d = spec.d
    j = spec.all
    k = spec.sub(spec.scale(2, q), j)  # column with j = 2q - k
    A = np.zeros((d, d), dtype=complex)
    A[j, k] = spec.omega_tr(spec.mul(spec.sub(j, k), p))
    return A


def kernel_stack(spec: FieldSpec) -> np.ndarray:
    """All kernels as an array ``[q, p, j, k]``.  Memory is d^4 complex."""
    d = spec.d
    out = np.zeros((d, d, d, d), dtype=complex)
    for q in range(d):
        for p in range(d):
            out[q, p] = kernel_A(q, p, spec)
    return out


def _diff_halves(spec: FieldSpec) -> tuple[np.ndarray, np.ndarray]:
    """For grid ``(q, y)``: ``k = q - y/2`` and ``j = 2q - k = q + y/2``."""
    q = spec.all[:, None]
    y_half = spec.mul(spec.all, spec.half)[None, :]
    return spec.sub(q, y_half), spec.add(q, y_half)


def to_wigner(R: np.ndarray, spec: FieldSpec) -> WignerFunction:
    """``W(q, p) = Tr[R A(q, p)] / d``."""
    R = np.asarray(R, dtype=complex)
    if R.shape != (spec.d, spec.d):
        raise WignerError(f"operator shape {R.shape} does not match d = {spec.d}")
    check_hermitian(R)
    # Tr[R A] = sum_k R[k, j] A[j, k] with j = 2q - k; re-index by y = j - k
    k, j = _diff_halves(spec)
    U = R[k, j]
    W = U @ spec.characters / spec.d
    return WignerFunction(spec, W)


def from_wigner(W: WignerFunction) -> np.ndarray:
    """``R = sum_{q,p} W(q, p) A(q, p)``."""
    spec = W.field
    # R[j, k] = sum_p W((j + k)/2, p) omega^tr((j - k) p) = M[(j + k)/2, j - k]
    M = W.values @ spec.characters
    j = spec.all[:, None]
    k = spec.all[None, :]
    mid = spec.mul(spec.add(j, k), spec.half)
    return M[mid, spec.sub(j, k)]


def hs_inner(W_R: WignerFunction, W_S: WignerFunction) -> float:
    """``Tr(R S) = d * sum W_R W_S``."""
    if W_R.field != W_S.field:
        raise WignerError("Wigner functions live on different fields")
    return W_R.d * float(np.sum(W_R.values * W_S.values))


def moyal_point(W_R: WignerFunction, W_S: WignerFunction, q1, p1, max_d: int = MOYAL_POINT_MAX_D) -> complex:
    """One value of ``W_{RS}`` from the three-point product kernel

        Gamma = omega^tr{2[(q3 - q2) p1 + (q1 - q3) p2 + (q2 - q1) p3]} / d.

    The phase splits into three two-index factors, so the four-fold sum is
    evaluated as a tensor contraction in O(d^3).
    """
    spec = W_R.field
    if W_S.field != spec:
        raise WignerError("Wigner functions live on different fields")
    if spec.d > max_d:
        raise WignerError(f"moyal_point is capped at d <= {max_d} (got {spec.d})")
    q1, p1 = _idx(q1), _idx(p1)
    x = spec.all
    two = lambda a: spec.scale(2, a)  # noqa: E731
    # [q2, q3]: (q3 - q2) p1 ; [p2, q3]: (q1 - q3) p2 ; [q2, p3]: (q2 - q1) p3
    f1 = spec.omega_tr(two(spec.mul(spec.sub(x[None, :], x[:, None]), p1)))
    f2 = spec.omega_tr(two(spec.mul(spec.sub(q1, x[None, :]), x[:, None])))
    f3 = spec.omega_tr(two(spec.mul(spec.sub(x[:, None], q1), x[None, :])))
    val = np.einsum("ab,cb,ad,ac,bd->", f1, f2, f3, W_R.values, W_S.values, optimize=True) / spec.d
    return complex(val)


def moyal_product(W_R: WignerFunction, W_S: WignerFunction, max_d: int = MOYAL_FULL_MAX_D) -> WignerFunction:
    """Wigner function of ``R S`` computed entirely in phase space."""
    spec = W_R.field
    if W_S.field != spec:
        raise WignerError("Wigner functions live on different fields")
    if spec.d > max_d:
        raise WignerError(f"moyal_product is capped at d <= {max_d} (got {spec.d})")
    d = spec.d
    out = np.empty((d, d), dtype=complex)
    for q in range(d):
        for p in range(d):
            out[q, p] = moyal_point(W_R, W_S, q, p, max_d=max_d)
    # W_{RS} is complex unless R and S commute; keep it as an array in that case
    if np.abs(out.imag).max() > REAL_TOL * max(1.0, np.abs(out).max()):
        return out
    return WignerFunction(spec, out.real)


def line_indicator(line: Line) -> WignerFunction:
    """``1/d`` on the points of ``line``, zero elsewhere."""
    spec = line.field
    labels = striation_labels(spec, line.slope)
    return WignerFunction(spec, (labels == line.b.index) / spec.d)


def striation_sums(W: WignerFunction | np.ndarray, slope, spec: FieldSpec | None = None) -> np.ndarray:
    """Sums of W over the d lines of a striation, in displacement order."""
    if isinstance(W, WignerFunction):
        spec, values = W.field, W.values
    else:
        values = np.asarray(W)
    labels = striation_labels(spec, slope)
    if np.iscomplexobj(values):
        return np.bincount(labels.ravel(), weights=values.real.ravel(), minlength=spec.d) + 1j * np.bincount(
            labels.ravel(), weights=values.imag.ravel(), minlength=spec.d
        )
    return np.bincount(labels.ravel(), weights=values.ravel(), minlength=spec.d)


def line_sum(W: WignerFunction, line: Line) -> float:
    return float(striation_sums(W, line.slope)[line.b.index])


def operator_to_json(R: np.ndarray) -> dict:
    R = np.asarray(R, dtype=complex)
    return {"d": R.shape[0], "entries": [[[float(z.real), float(z.imag)] for z in row] for row in R]}


def operator_from_json(obj: dict) -> np.ndarray:
    arr = np.array(obj["entries"], dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]
