"""The circularly symmetric MUB-balanced state for prime powers d = 3 (mod 4).

Its Wigner function is

    W(q, p) = [1 - d delta(q,0) delta(p,0)
               + sum_{x != 0} eta(x^2 + 1) omega^tr(x (q^2 + p^2))] / (d (d + 1))

so it depends on (q, p) only through c = q^2 + p^2.  Small dimensions are
handled through the full d x d density matrix; large ones (the d = 22307
histogram) only ever touch single columns of the density matrix via the
closed form

    rho_jk = [delta(j,k) - delta(j,-k)
              + i^n / sqrt(d) sum_x eta(x) eta(x^2+1)
                omega^tr{(1/4) [x (j+k)^2 - (j-k)^2 / x]}] / (d + 1)

where 1/4 is the field inverse of 4.
"""

from __future__ import annotations

import concurrent.futures
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .finite_field import FieldElement, FieldError, FieldSpec, eta_quad_sum, gauss_sum_expected
from .mub import MubSet, hilbert_probs
from .phase_space import INFINITY, circle_grid, enumerate_striations, linear_grid_indices
from .report import Check, VerificationReport
from .wigner import WignerFunction, from_wigner, moyal_product, striation_sums

__all__ = [
    "ScopeError",
    "BalancedState",
    "Histogram",
    "SemicircleFit",
    "check_scope",
    "circle_values",
    "build_wigner",
    "density_column",
    "density_diagonal",
    "state_vector",
    "build_state",
    "state_from_wigner",
    "verify_purity",
    "verify_balanced",
    "verify_min_uncertainty",
    "verify_state",
    "symplectic_image",
    "translated_image",
    "povm_from_orbit",
    "component_histogram",
    "semicircle_fit",
    "default_tolerance",
    "field_checks",
    "GRID_LIMIT",
]

# the full-matrix route is used up to this dimension
GRID_LIMIT = 1024
COLUMN_CANDIDATES = 8
ZERO_TOL = 1e-10
_BLOCK_ELEMS = 1 << 21


class ScopeError(FieldError):
    """Dimension outside the d = 3 (mod 4) scope of the construction."""


def check_scope(spec: FieldSpec) -> None:
    if spec.d % 4 != 3:
        raise ScopeError(f"d = {spec.d} ≡ {spec.d % 4} (mod 4) not supported by this construction (needs d ≡ 3 mod 4)")


def default_tolerance(d: int) -> float:
    return 1e-9 * max(1.0, d / 27)


def _threads(threads: int | None) -> int:
    if threads:
        return max(1, int(threads))
    env = os.environ.get("MUBW_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _map_blocks(fn, blocks, threads: int | None):
    n = _threads(threads)
    if n == 1 or len(blocks) == 1:
        return [fn(b) for b in blocks]
    with concurrent.futures.ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, blocks))


def _blocks(total: int, width: int) -> list[slice]:
    step = max(1, _BLOCK_ELEMS // max(1, width))
    return [slice(i, min(total, i + step)) for i in range(0, total, step)]


def _character_sums(spec: FieldSpec, coef: np.ndarray, args: np.ndarray, threads=None) -> np.ndarray:
    """``sum_x coef[x] omega^tr(x * arg)`` for each ``arg``."""
    x = spec.all

    def run(sl):
        return spec.omega_tr(spec.mul(args[sl, None], x[None, :])) @ coef

    return np.concatenate(_map_blocks(run, _blocks(len(args), spec.d), threads))


def circle_values(spec: FieldSpec, threads=None) -> tuple[np.ndarray, float]:
    """``f[c]`` for every c (without the origin's delta term) and the largest
    imaginary part dropped from the character sums."""
    check_scope(spec)
    coef = np.zeros(spec.d)
    x = spec.nonzero
    coef[1:] = spec.eta(spec.add(spec.square(x), 1))
    sums = _character_sums(spec, coef, spec.all, threads)
    d = spec.d
    return (1.0 + sums.real) / (d * (d + 1)), float(np.abs(sums.imag).max()) / (d * (d + 1))


def build_wigner(spec: FieldSpec, threads=None) -> WignerFunction:
    f, imag = circle_values(spec, threads)
    if imag > 1e-12:
        raise RuntimeError(f"circle values have imaginary residue {imag:.3e}")
    W = f[circle_grid(spec)]
    W[0, 0] -= 1.0 / (spec.d + 1)
    return WignerFunction(spec, W)


def _column_coef(spec: FieldSpec) -> np.ndarray:
    x = spec.nonzero
    return (spec.eta(x) * spec.eta(spec.add(spec.square(x), 1))).astype(float)


def _closed_form_entries(spec: FieldSpec, j: np.ndarray, k: np.ndarray, threads=None) -> np.ndarray:
    """rho[j, k] for paired index arrays ``j`` and ``k``."""
    check_scope(spec)
    d = spec.d
    x = spec.nonzero
    xinv = spec.inv(x)
    coef = _column_coef(spec)
    # (1/4)(j+k)^2 and (1/4)(j-k)^2, scaled up front
    s = spec.scale(spec.quarter, spec.square(spec.add(j, k)))
    t = spec.scale(spec.quarter, spec.square(spec.sub(j, k)))
    if spec.n == 1:
        cos_t = np.cos(2 * np.pi * np.arange(d) / d)
        sin_t = np.sin(2 * np.pi * np.arange(d) / d)

        def run(sl):
            e = (s[sl, None] * x[None, :] - t[sl, None] * xinv[None, :]) % d
            return cos_t[e] @ coef + 1j * (sin_t[e] @ coef)
    else:

        def run(sl):
            e = spec.sub(spec.mul(s[sl, None], x[None, :]), spec.mul(t[sl, None], xinv[None, :]))
            return spec.omega_tr(e) @ coef

    sums = np.concatenate(_map_blocks(run, _blocks(len(j), d), threads))
    delta = (j == k).astype(float) - (j == spec.neg(k)).astype(float)
    return (delta + (1j**spec.n) * sums / math.sqrt(d)) / (d + 1)


def density_column(spec: FieldSpec, k, threads=None) -> np.ndarray:
    """Column ``k`` of the density matrix from the closed form, O(d^2)."""
    k = k.index if isinstance(k, FieldElement) else int(k)
    j = spec.all
    return _closed_form_entries(spec, j, np.full_like(j, k), threads)


def density_diagonal(spec: FieldSpec, ks, threads=None) -> np.ndarray:
    ks = np.asarray(ks, dtype=np.int64)
    return _closed_form_entries(spec, ks, ks, threads)


def _sign_fix(v: np.ndarray) -> np.ndarray:
    big = np.flatnonzero(np.abs(v) > 1e-8 * np.abs(v).max())
    return -v if v[big[0]] < 0 else v


def state_vector(spec: FieldSpec, threads=None, return_column: bool = False):
    """Real unit vector psi with rho = |psi><psi|.

    The column of rho with largest norm among the first few nonzero indices
    is normalized.  For a rank-1 projector the squared norm of column k is
    rho_kk, so only the diagonal entries are needed to choose it.
    """
    check_scope(spec)
    ks = np.arange(1, min(spec.d, COLUMN_CANDIDATES + 1))
    diag = density_diagonal(spec, ks, threads).real
    k = int(ks[int(np.argmax(diag))])  # argmax takes the first on ties
    col = density_column(spec, k, threads)
    norm = float(np.linalg.norm(col))
    if norm < 1e-8:
        raise RuntimeError(f"all candidate columns of rho vanish (d = {spec.d})")
    psi = _sign_fix(col.real / norm)
    if return_column:
        return psi, col, k
    return psi


@dataclass(frozen=True, eq=False)
class BalancedState:
    """A pure state given by its Wigner function and state vector.

    ``wigner`` is None when d exceeds GRID_LIMIT.  ``psi`` is real for the
    base state and complex for images under translations/linear maps.
    """

    field: FieldSpec
    wigner: WignerFunction | None
    rho_column: np.ndarray
    column_index: int
    psi: np.ndarray
    prob_multiset: np.ndarray
    info: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.field.d

    def density_matrix(self) -> np.ndarray:
        if self.wigner is None:
            raise ValueError(f"d = {self.d} is above the full-matrix limit {GRID_LIMIT}")
        return from_wigner(self.wigner)

    def to_json(self) -> dict:
        psi = self.psi
        out = {"d": self.d, **self.field.to_json()}
        if np.iscomplexobj(psi):
            out["psi"] = [[float(z.real) + 0.0, float(z.imag) + 0.0] for z in psi]
        else:
            # + 0.0 turns -0.0 into 0.0
            out["psi"] = [float(v) + 0.0 for v in psi]
        out["prob_multiset"] = [float(v) + 0.0 for v in self.prob_multiset]
        return out


def build_state(spec: FieldSpec, threads=None, with_grid: bool | None = None) -> BalancedState:
    check_scope(spec)
    if with_grid is None:
        with_grid = spec.d <= GRID_LIMIT
    W = build_wigner(spec, threads) if with_grid else None
    psi, col, k = state_vector(spec, threads, return_column=True)
    probs = np.sort(psi**2)
    return BalancedState(spec, W, col, k, psi, probs)


def state_from_wigner(W: WignerFunction) -> BalancedState:
    """State object for an arbitrary pure-state Wigner function (full-matrix route)."""
    rho = from_wigner(W)
    norms = np.linalg.norm(rho, axis=0)
    k = int(np.argmax(norms))
    col = rho[:, k]
    psi = col / norms[k]
    lead = psi[np.flatnonzero(np.abs(psi) > 1e-8)[0]]
    psi = psi * (abs(lead) / lead)
    probs = np.sort(striation_sums(W, INFINITY))
    return BalancedState(W.field, W, col, k, psi, probs)


# --- verification ----------------------------------------------------------


def verify_purity(state: BalancedState, tol: float | None = None, moyal_max_d: int = 11) -> list[Check]:
    d = state.d
    tol = default_tolerance(d) if tol is None else tol
    rho = state.density_matrix()
    checks = [
        Check("trace", abs(np.trace(rho).real - 1.0), 1e-10),
        Check("purity rho^2 = rho", float(np.abs(rho @ rho - rho).max()), tol),
    ]
    ev = np.linalg.eigvalsh(rho)
    expect = np.zeros(d)
    expect[-1] = 1.0
    checks.append(Check("eigenvalues {1, 0...}", float(np.abs(ev - expect).max()), max(tol, 1e-10)))
    if d <= moyal_max_d:
        WW = moyal_product(state.wigner, state.wigner, max_d=moyal_max_d)
        vals = WW.values if isinstance(WW, WignerFunction) else WW
        checks.append(Check("phase-space idempotence", float(np.abs(vals - state.wigner.values).max()), 1e-10))
    return checks


def striation_probabilities(state: BalancedState) -> list[tuple[object, np.ndarray]]:
    """Line sums for every striation (in enumeration order); cached on the state."""
    cached = state.info.get("_striation_probs")
    if cached is None:
        W = state.wigner
        cached = [(st.slope, striation_sums(W, st.slope)) for st in enumerate_striations(state.field)]
        state.info["_striation_probs"] = cached
    return cached


def verify_balanced(state: BalancedState, mubs: MubSet | None = None, tol: float = 1e-10):
    """Sorted outcome lists per striation, plus the checks on them.

    When ``mubs`` is given the phase-space probabilities are compared with
    ``|<b|psi>|^2`` computed in Hilbert space.
    """
    per = striation_probabilities(state)
    sorted_lists = np.array([np.sort(p) for _, p in per])
    ref = sorted_lists[0]
    checks = [
        Check("balanced (sorted lists equal)", float(np.abs(sorted_lists - ref).max()), tol),
        Check("probabilities sum to 1", float(np.abs(sorted_lists.sum(axis=1) - 1).max()), tol),
        Check("probabilities nonnegative", float(max(0.0, -sorted_lists.min())), tol),
    ]
    zeros = (np.abs(sorted_lists) < ZERO_TOL).sum(axis=1)
    checks.append(Check("zero count equal across striations", float(zeros.max() - zeros.min()), 0.0))
    # exactly one zero for most d; powers of 3 above 3 have (d - 1)/2 of them
    checks.append(Check("at least one zero", float(zeros.min() < 1), 0.0))
    if mubs is not None:
        by_slope = {b.slope_label(): b for b in mubs}
        worst = 0.0
        for slope, p in per:
            label = "inf" if slope is INFINITY else str(slope.index)
            worst = max(worst, float(np.abs(hilbert_probs(state.psi, by_slope[label]) - p).max()))
        checks.append(Check("phase-space vs Hilbert probabilities", worst, tol))
    return sorted_lists, checks


def verify_origin_line(state: BalancedState, tol: float = 1e-10) -> Check:
    """Probability of the line through the origin, for every striation."""
    per = striation_probabilities(state)
    return Check("origin-line probability = 0", float(max(abs(p[0]) for _, p in per)), tol)


def verify_min_uncertainty(state: BalancedState, tol: float = 1e-9) -> tuple[float, list[Check]]:
    d = state.d
    per = [p for _, p in striation_probabilities(state)]
    p2 = np.array([float(np.sum(p**2)) for p in per])
    avg_h2 = float(np.mean(-np.log2(p2)))
    bound = -math.log2(2 / (d + 1))
    return avg_h2, [
        Check("average Renyi-2 entropy at bound", abs(avg_h2 - bound), tol),
        Check("sum of squared probabilities = 2", abs(p2.sum() - 2.0), tol),
    ]


def verify_state(
    state: BalancedState, mubs: MubSet | None = None, tol: float | None = None, moyal_max_d: int = 11
) -> VerificationReport:
    """Purity, realness, balancedness and entropy checks for a gridded state."""
    d = state.d
    tol = default_tolerance(d) if tol is None else tol
    rep = VerificationReport(d)
    rep.extend(verify_purity(state, tol, moyal_max_d))
    rho = state.density_matrix()
    if not np.iscomplexobj(state.psi):
        rep.add("rho real", float(np.abs(rho.imag).max()), 1e-12)
        rep.add("psi_0 = 0", abs(float(state.psi[0])), 1e-12)
    rep.add("psi reproduces rho", float(np.abs(np.outer(state.psi, state.psi.conj()) - rho).max()), tol)
    k = state.column_index
    rep.add("stored column vs matrix", float(np.abs(state.rho_column - rho[:, k]).max()), 1e-10)
    lists, checks = verify_balanced(state, mubs)
    rep.extend(checks)
    rep.checks.append(verify_origin_line(state))
    _, checks = verify_min_uncertainty(state)
    rep.extend(checks)
    rep.info["sorted_probabilities"] = [float(v) for v in lists[0]]
    rep.info["zero_probabilities"] = int((np.abs(lists[0]) < ZERO_TOL).sum())
    return rep


# --- orbit -----------------------------------------------------------------


def _as_matrix(spec: FieldSpec, L):
    return tuple(tuple(spec.element(v) for v in row) for row in L)


def symplectic_image(state: BalancedState, L) -> BalancedState:
    """State with ``W'(q, p) = W(L (q, p))`` for a unit-determinant L."""
    spec = state.field
    qi, pi = linear_grid_indices(spec, _as_matrix(spec, L))
    return state_from_wigner(WignerFunction(spec, state.wigner.values[qi, pi]))


def translated_image(state: BalancedState, a, b) -> BalancedState:
    """State with ``W'(q, p) = W(q + a, p + b)``."""
    spec = state.field
    a = spec.element(a).index
    b = spec.element(b).index
    qi = spec.add(spec.all, a)
    pi = spec.add(spec.all, b)
    return state_from_wigner(WignerFunction(spec, state.wigner.values[np.ix_(qi, pi)]))


def povm_from_orbit(state: BalancedState) -> np.ndarray:
    """``E[a, b] = rho_{a,b} / d`` for all d^2 translations, shape (d, d, d, d)."""
    spec = state.field
    d = spec.d
    out = np.empty((d, d, d, d), dtype=complex)
    for a in range(d):
        for b in range(d):
            W = translated_image(state, a, b).wigner
            out[a, b] = from_wigner(W) / d
    return out


# --- histogram -------------------------------------------------------------


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    def to_csv(self) -> str:
        rows = ["bin_center,count"]
        rows += [f"{c!r},{int(n)}" for c, n in zip(self.centers.tolist(), self.counts.tolist())]
        return "\n".join(rows) + "\n"


@dataclass(frozen=True)
class SemicircleFit:
    d: int
    radius: float  # fitted radius in the rescaled sqrt(d) * psi units
    misfit: float  # L2 norm of count residuals, divided by d

    @property
    def beta(self) -> float:
        return self.radius / math.sqrt(self.d)

    @property
    def alpha(self) -> float:
        # total count d fixes alpha = 2 d / (pi beta^2)
        return 2 * self.d / (math.pi * self.beta**2)

    @property
    def beta_expected(self) -> float:
        return 2 / math.sqrt(self.d)

    @property
    def alpha_expected(self) -> float:
        return self.d**2 / (2 * math.pi)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "beta_hat": self.beta,
            "beta_expected": self.beta_expected,
            "beta_rel_error": abs(self.beta / self.beta_expected - 1),
            "alpha_hat": self.alpha,
            "alpha_expected": self.alpha_expected,
            "misfit": self.misfit,
        }


def component_histogram(psi: np.ndarray, bins: int = 100, lo: float = -2.1, hi: float = 2.1) -> Histogram:
    """Histogram of ``sqrt(d) * psi_j``."""
    x = math.sqrt(len(psi)) * np.asarray(psi, dtype=float)
    # analytically-zero components must not straddle the bin edge at 0
    x = np.where(np.abs(x) < 1e-12, 0.0, x)
    counts, edges = np.histogram(x, bins=bins, range=(lo, hi))
    return Histogram(edges, counts)


def _semicircle_cdf(x: np.ndarray, R: float) -> np.ndarray:
    u = np.clip(x / R, -1.0, 1.0)
    return 0.5 + (u * np.sqrt(1 - u**2) + np.arcsin(u)) / np.pi


def semicircle_fit(hist: Histogram, d: int) -> SemicircleFit:
    """Least-squares semicircle radius; the prefactor is fixed by the total count."""
    counts = hist.counts.astype(float)
    total = counts.sum()

    def sse(R):
        expected = total * np.diff(_semicircle_cdf(hist.edges, R))
        return float(np.sum((counts - expected) ** 2))

    res = minimize_scalar(sse, bounds=(0.2, 5.0), method="bounded", options={"xatol": 1e-8})
    return SemicircleFit(d, float(res.x), math.sqrt(res.fun) / d)


def field_checks(spec: FieldSpec) -> list[Check]:
    """The character-sum identities the construction relies on."""
    x = spec.nonzero
    G = spec.omega_tr(spec.mul(x[:, None], spec.square(spec.all)[None, :])).sum(axis=1)
    expected = np.array([gauss_sum_expected(spec.element(int(v))) for v in x])
    eta_m1 = int(spec.eta(spec.minus_one))
    return [
        Check("sum eta(x^2+1) = -2", abs(eta_quad_sum(spec) + 2), 0.0),
        Check("Gauss sums i^n eta(x) sqrt(d) (rel)", float(np.abs(G / expected - 1).max()), 1e-10),
        Check("eta(-1) = -1", abs(eta_m1 + 1), 0.0),
    ]
