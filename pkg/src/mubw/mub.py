"""Complete sets of mutually unbiased bases built from phase-space striations.

Each line's indicator function (value 1/d on the line) is the Wigner function
of a rank-1 projector; its range vector is the basis vector for that line.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .finite_field import FieldElement, FieldSpec
from .phase_space import INFINITY, Line, Slope, enumerate_striations, striation_labels
from .wigner import WignerFunction, from_wigner, striation_sums, to_wigner

__all__ = [
    "MubError",
    "MubBasis",
    "MubSet",
    "build_mubs",
    "projector_vector",
    "measurement_probs",
    "hilbert_probs",
    "random_pure_state",
    "pure_state_wigner",
]

EIG_TOL = 1e-10
PHASE_EPS = 1e-8


class MubError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class MubBasis:
    mu: int
    slope: FieldElement | Slope
    vectors: np.ndarray  # rows are the basis vectors, indexed by displacement b
    lines: tuple[Line, ...]

    @property
    def d(self) -> int:
        return self.vectors.shape[0]

    def slope_label(self) -> str:
        return "inf" if self.slope is INFINITY else str(self.slope.index)

    def to_json(self) -> dict:
        return {
            "mu": self.mu,
            "slope": self.slope_label(),
            "vectors": [[[float(z.real), float(z.imag)] for z in v] for v in self.vectors],
        }


@dataclass(frozen=True, eq=False)
class MubSet:
    field: FieldSpec
    bases: tuple[MubBasis, ...]

    def __len__(self):
        return len(self.bases)

    def __getitem__(self, mu: int) -> MubBasis:
        return self.bases[mu]

    def __iter__(self):
        return iter(self.bases)

    def to_json(self) -> dict:
        return {**self.field.to_json(), "bases": [b.to_json() for b in self.bases]}

    def overlaps(self) -> np.ndarray:
        """``|<b_j^mu | b_k^nu>|^2`` as an array ``[mu, j, nu, k]``."""
        V = np.stack([b.vectors for b in self.bases])
        G = np.einsum("mjx,nkx->mjnk", V.conj(), V)
        return np.abs(G) ** 2


def projector_vector(P: np.ndarray, tol: float = EIG_TOL) -> np.ndarray:
    """Unit vector spanning the range of a rank-1 projector.

    The largest-norm column is normalized; the global phase is fixed so the
    first non-negligible component is real and positive.
    """
    norms = np.linalg.norm(P, axis=0)
    v = P[:, int(np.argmax(norms))]
    v = v / np.linalg.norm(v)
    lead = v[np.flatnonzero(np.abs(v) > PHASE_EPS)[0]]
    v = v * (abs(lead) / lead)
    resid = float(np.linalg.norm(P @ v - v))
    if resid > tol:
        raise MubError(f"projector eigenvector residual {resid:.3e} exceeds {tol:.1e}")
    return v


def build_mubs(spec: FieldSpec) -> MubSet:
    """The d+1 bases; basis 0 comes from the vertical (INFINITY) striation."""
    striations = enumerate_striations(spec)
    ordered = [striations[-1], *striations[:-1]]
    bases = []
    for mu, st in enumerate(ordered):
        labels = striation_labels(spec, st.slope)
        vecs = np.empty((spec.d, spec.d), dtype=complex)
        for line in st.lines:
            P = from_wigner(WignerFunction(spec, (labels == line.b.index) / spec.d))
            vecs[line.b.index] = projector_vector(P)
        bases.append(MubBasis(mu, st.slope, vecs, st.lines))
    if not np.allclose(np.abs(bases[0].vectors), np.eye(spec.d), atol=EIG_TOL):
        raise MubError("vertical striation did not produce the standard basis")
    return MubSet(spec, tuple(bases))


def measurement_probs(state: WignerFunction, basis: MubBasis) -> np.ndarray:
    """Outcome probabilities for ``basis`` as line sums of ``state``."""
    return striation_sums(state, basis.slope)


def hilbert_probs(psi: np.ndarray, basis: MubBasis) -> np.ndarray:
    return np.abs(basis.vectors.conj() @ psi) ** 2


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def pure_state_wigner(psi: np.ndarray, spec: FieldSpec) -> WignerFunction:
    return to_wigner(np.outer(psi, psi.conj()), spec)
