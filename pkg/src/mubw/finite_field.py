"""Arithmetic in GF(r^n) for odd primes r.

Elements are addressed by an integer index ``sum(c_j * r**j)`` where ``c_j``
is the coefficient of ``beta**j`` and ``beta`` is the class of the polynomial
variable modulo the field's irreducible modulus.  Index 0 is the zero element
and index 1 is the unit.

Two layers are provided.  :class:`FieldElement` is a small value type with
operator overloading, convenient for scalar work and tests.  The
:class:`FieldSpec` methods (``add``, ``mul``, ``tr`` ...) act elementwise on
integer index arrays and are what the O(d^2) phase-space loops use.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FieldError",
    "NotPrimePowerError",
    "FieldSpec",
    "FieldElement",
    "TABLE_LIMIT",
    "is_prime",
    "factor_prime_power",
    "is_irreducible",
    "field_build",
    "field_for_order",
    "trace",
    "eta",
    "eta_quad_sum",
    "gauss_sum",
    "gauss_sum_expected",
    "omega_orthogonality",
]

# exp/log tables are built only up to this order
TABLE_LIMIT = 2**20
# full d x d addition table for extension fields
ADD_TABLE_LIMIT = 2048


class FieldError(ValueError):
    """Invalid field parameters or an undefined field operation."""


class NotPrimePowerError(FieldError):
    pass


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m % 2 == 0:
        return m == 2
    for f in range(3, math.isqrt(m) + 1, 2):
        if m % f == 0:
            return False
    return True


def factor_prime_power(d: int) -> tuple[int, int]:
    """Return ``(r, n)`` with ``d == r**n`` and ``r`` prime."""
    if d < 2:
        raise NotPrimePowerError(f"d = {d} is not a prime power")
    r = next(f for f in itertools.chain([2], range(3, d + 1, 2)) if d % f == 0)
    n, rest = 0, d
    while rest % r == 0:
        rest //= r
        n += 1
    if rest != 1:
        raise NotPrimePowerError(f"d = {d} is not a prime power")
    return r, n


def _prime_factors(m: int) -> list[int]:
    out = []
    f = 2
    while f * f <= m:
        if m % f == 0:
            out.append(f)
            while m % f == 0:
                m //= f
        f += 1
    if m > 1:
        out.append(m)
    return out


# --- polynomials over Z_r, coefficient lists low-to-high -------------------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_rem(a: list[int], m: list[int], r: int) -> list[int]:
    """Remainder of ``a`` modulo the monic polynomial ``m``."""
    a = _trim([c % r for c in a])
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        lead = a[-1]
        shift = len(a) - 1 - dm
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - lead * c) % r
        _trim(a)
    return a


def _poly_mul(a: list[int], b: list[int], r: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % r
    return out


def is_irreducible(poly: list[int], r: int) -> bool:
    """Brute-force irreducibility test for a monic polynomial over Z_r.

    Checks that no monic polynomial of degree ``1 .. n//2`` divides it.
    """
    n = len(poly) - 1
    if n < 1 or poly[-1] % r != 1:
        return False
    for k in range(1, n // 2 + 1):
        for low in itertools.product(range(r), repeat=k):
            if not _poly_rem(list(poly), list(low) + [1], r):
                return False
    return True


def _find_modulus(r: int, n: int) -> tuple[int, ...]:
    # itertools.product varies the last position fastest, so c0 is compared first
    for low in itertools.product(range(r), repeat=n):
        cand = list(low) + [1]
        if is_irreducible(cand, r):
            return tuple(cand)
    raise FieldError(f"no irreducible polynomial of degree {n} over Z_{r}")  # pragma: no cover


# --- the field -------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    """GF(r^n) defined by a monic irreducible ``modulus`` (low-to-high)."""

    r: int
    n: int
    modulus: tuple[int, ...]
    _exp: np.ndarray | None = field(default=None, repr=False, compare=False)
    _log: np.ndarray | None = field(default=None, repr=False, compare=False)
    _tr_basis: np.ndarray = field(default=None, repr=False, compare=False)
    _powers: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        r, n = self.r, self.n
        if not is_prime(r):
            raise FieldError(f"r = {r} is not prime")
        if r == 2:
            raise FieldError("characteristic 2 is not supported (r must be odd)")
        if n < 1:
            raise FieldError(f"extension degree n = {n} must be >= 1")
        if len(self.modulus) != n + 1 or not is_irreducible(list(self.modulus), r):
            raise FieldError(f"modulus {list(self.modulus)} is not a monic irreducible of degree {n} over Z_{r}")
        object.__setattr__(self, "_powers", r ** np.arange(n, dtype=np.int64))
        tr_basis = [self._poly_trace(_basis_poly(j, n)) for j in range(n)]
        object.__setattr__(self, "_tr_basis", np.array(tr_basis, dtype=np.int64))
        if self.d <= TABLE_LIMIT:
            self._build_tables()

    # -- plumbing --

    @property
    def d(self) -> int:
        return self.r**self.n

    @property
    def has_tables(self) -> bool:
        return self._log is not None

    @functools.cached_property
    def omega(self) -> np.ndarray:
        """``omega**k`` for ``k`` in ``0..r-1``, ``omega = exp(2 pi i / r)``."""
        return np.exp(2j * np.pi * np.arange(self.r) / self.r)

    def to_json(self) -> dict:
        return {"r": self.r, "n": self.n, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, obj: dict) -> "FieldSpec":
        return field_build(obj["r"], obj["n"], modulus=obj["modulus"])

    def coeffs_of(self, index: int) -> tuple[int, ...]:
        return tuple((int(index) // self.r**j) % self.r for j in range(self.n))

    def index_of(self, coeffs) -> int:
        return sum((int(c) % self.r) * self.r**j for j, c in enumerate(coeffs))

    def element(self, value) -> "FieldElement":
        """Element from an index (int) or a coefficient sequence."""
        if isinstance(value, FieldElement):
            return value
        if isinstance(value, (int, np.integer)):
            if not 0 <= value < self.d:
                raise FieldError(f"index {value} out of range for GF({self.d})")
            return FieldElement(self, int(value))
        return FieldElement(self, self.index_of(value))

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(self, i) for i in range(self.d)]

    def _poly_mulmod(self, a: list[int], b: list[int]) -> list[int]:
        return _poly_rem(_poly_mul(a, b, self.r), list(self.modulus), self.r)

    def _poly_pow(self, a: list[int], e: int) -> list[int]:
        result, base = [1], list(a)
        while e:
            if e & 1:
                result = self._poly_mulmod(result, base)
            base = self._poly_mulmod(base, base)
            e >>= 1
        return result

    def _poly_trace(self, a: list[int]) -> int:
        total, y = [], _poly_rem(list(a), list(self.modulus), self.r)
        for _ in range(self.n):
            total = _poly_add(total, y, self.r)
            y = self._poly_pow(y, self.r)
        if len(total) > 1:
            raise FieldError("trace left Z_r; modulus is not irreducible")  # pragma: no cover
        return total[0] if total else 0

    def _build_tables(self) -> None:
        d, r = self.d, self.r
        if self.n == 1:
            g = next(g for g in range(2, d) if _is_generator(g, d))
            exp = np.empty(d - 1, dtype=np.int64)
            acc = 1
            for k in range(d - 1):
                exp[k] = acc
                acc = acc * g % d
        else:
            facs = _prime_factors(d - 1)
            for gi in range(2, d):
                gp = _index_poly(gi, r, self.n)
                if all(self._poly_pow(gp, (d - 1) // f) != [1] for f in facs):
                    break
            exp = np.empty(d - 1, dtype=np.int64)
            acc = [1]
            for k in range(d - 1):
                exp[k] = self.index_of(acc)
                acc = self._poly_mulmod(acc, gp)
        log = np.full(d, -1, dtype=np.int64)
        log[exp] = np.arange(d - 1, dtype=np.int64)
        object.__setattr__(self, "_exp", exp)
        object.__setattr__(self, "_log", log)

    # -- vectorized operations on index arrays --

    def digits(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._powers) % self.r

    def _undigits(self, dg: np.ndarray) -> np.ndarray:
        return dg @ self._powers

    @functools.cached_property
    def _add_table(self) -> np.ndarray | None:
        if self.n == 1 or self.d > ADD_TABLE_LIMIT:
            return None
        a = self.all
        return self._undigits((self.digits(a)[:, None, :] + self.digits(a)[None, :, :]) % self.r)

    @functools.cached_property
    def _neg_table(self) -> np.ndarray:
        return self._undigits((-self.digits(self.all)) % self.r)

    def add(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.n == 1:
            return (a + b) % self.r
        if self._add_table is not None:
            return self._add_table[a, b]
        return self._undigits((self.digits(a) + self.digits(b)) % self.r)

    def neg(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.n == 1:
            return (-a) % self.r
        if self.d <= TABLE_LIMIT:
            return self._neg_table[a]
        return self._undigits((-self.digits(a)) % self.r)

    def sub(self, a, b) -> np.ndarray:
        return self.add(a, self.neg(b))

    def scale(self, k: int, a) -> np.ndarray:
        """Multiply by the integer ``k`` (an element of the prime subfield)."""
        a = np.asarray(a, dtype=np.int64)
        if self.n == 1:
            return (k * a) % self.r
        return self._undigits((k * self.digits(a)) % self.r)

    def mul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.n == 1:
            return (a * b) % self.r
        self._need_tables()
        out = self._exp[(self._log[a] + self._log[b]) % (self.d - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def square(self, a) -> np.ndarray:
        return self.mul(a, a)

    def inv(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise FieldError("inverse of zero")
        self._need_tables()
        return self._exp[(-self._log[a]) % (self.d - 1)]

    def tr(self, a) -> np.ndarray:
        """Field trace of each element, as integers in ``0..r-1``."""
        a = np.asarray(a, dtype=np.int64)
        if self.n == 1:
            return a % self.r
        return (self.digits(a) @ self._tr_basis) % self.r

    def eta(self, a) -> np.ndarray:
        """Quadratic character (+1/-1) of each nonzero element."""
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise FieldError("eta(0) is undefined")
        self._need_tables()
        return np.where(self._log[a] % 2 == 0, 1, -1)

    def log(self, a) -> np.ndarray:
        self._need_tables()
        return self._log[np.asarray(a, dtype=np.int64)]

    def exp(self, k) -> np.ndarray:
        self._need_tables()
        return self._exp[np.asarray(k, dtype=np.int64) % (self.d - 1)]

    def omega_tr(self, a) -> np.ndarray:
        """``omega ** tr(a)`` elementwise."""
        return self.omega[self.tr(a)]

    def _need_tables(self):
        if self._log is None:
            raise FieldError(f"vectorized multiplicative ops need exp/log tables (d <= {TABLE_LIMIT})")

    # -- convenience --

    @functools.cached_property
    def all(self) -> np.ndarray:
        return np.arange(self.d, dtype=np.int64)

    @functools.cached_property
    def nonzero(self) -> np.ndarray:
        return np.arange(1, self.d, dtype=np.int64)

    @functools.cached_property
    def two(self) -> int:
        return 2 % self.r

    @functools.cached_property
    def half(self) -> int:
        """Index of the field inverse of 2."""
        return (self.r + 1) // 2

    @functools.cached_property
    def quarter(self) -> int:
        """Index of the field inverse of 4 (an element of the prime subfield)."""
        return pow(4, -1, self.r)

    @functools.cached_property
    def minus_one(self) -> int:
        return self.r - 1

    @functools.cached_property
    def characters(self) -> np.ndarray:
        """``chi[y, p] = omega ** tr(y p)``, a symmetric d x d complex matrix."""
        a = self.all
        return self.omega_tr(self.mul(a[:, None], a[None, :]))


def _basis_poly(j: int, n: int) -> list[int]:
    return [0] * j + [1]


def _index_poly(i: int, r: int, n: int) -> list[int]:
    return _trim([(i // r**j) % r for j in range(n)])


def _poly_add(a: list[int], b: list[int], r: int) -> list[int]:
    m = max(len(a), len(b))
    a = a + [0] * (m - len(a))
    b = b + [0] * (m - len(b))
    return _trim([(x + y) % r for x, y in zip(a, b)])


def _is_generator(g: int, p: int) -> bool:
    return all(pow(g, (p - 1) // f, p) != 1 for f in _prime_factors(p - 1))


@functools.lru_cache(maxsize=64)
def _field_build_cached(r: int, n: int, modulus: tuple[int, ...] | None) -> FieldSpec:
    if modulus is None and is_prime(r) and r != 2 and n >= 1:
        modulus = _find_modulus(r, n)
    return FieldSpec(r, n, tuple(int(c) % r for c in modulus or ()))


def field_build(r: int, n: int = 1, modulus=None) -> FieldSpec:
    """Construct GF(r^n).

    Without ``modulus`` the lexicographically smallest monic irreducible of
    degree ``n`` is used (coefficients compared from the constant term up),
    so the result is deterministic.
    """
    return _field_build_cached(int(r), int(n), None if modulus is None else tuple(modulus))


def field_for_order(d: int, modulus=None) -> FieldSpec:
    r, n = factor_prime_power(d)
    return field_build(r, n, modulus)


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    index: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.coeffs_of(self.index)

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("elements belong to different fields")
            return other
        if isinstance(other, (int, np.integer)):
            return FieldElement(self.field, int(other) % self.field.r)
        return NotImplemented

    def _poly(self) -> list[int]:
        return _index_poly(self.index, self.field.r, self.field.n)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.field, int(self.field.add(self.index, other.index)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, int(self.field.neg(self.index)))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        f = self.field
        if f.has_tables or f.n == 1:
            return FieldElement(f, int(f.mul(self.index, other.index)))
        return FieldElement(f, f.index_of(f._poly_mulmod(self._poly(), other._poly())))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        f = self.field
        if self.index == 0:
            raise FieldError("inverse of zero")
        if f.has_tables:
            return FieldElement(f, int(f.inv(self.index)))
        return FieldElement(f, f.index_of(f._poly_pow(self._poly(), f.d - 2)))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __pow__(self, e: int):
        f = self.field
        if e < 0:
            return self.inverse() ** (-e)
        return FieldElement(f, f.index_of(f._poly_pow(self._poly(), e)))

    def __bool__(self):
        return self.index != 0

    def __repr__(self):
        if self.field.n == 1:
            return f"F{self.field.d}({self.index})"
        return f"F{self.field.d}{list(self.coeffs)}"


# --- named operations ------------------------------------------------------


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def neg(a: FieldElement) -> FieldElement:
    return -a


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def trace(y: FieldElement) -> int:
    """``y + y^r + ... + y^(r^(n-1))``, computed from the definition."""
    return y.field._poly_trace(y._poly())


def eta(y: FieldElement) -> int:
    if y.index == 0:
        raise FieldError("eta(0) is undefined")
    f = y.field
    if f.has_tables:
        return int(f.eta(y.index))
    # Euler's criterion
    return 1 if (y ** ((f.d - 1) // 2)).index == 1 else -1


def eta_quad_sum(spec: FieldSpec) -> int:
    """``sum over x != 0 of eta(x^2 + 1)``; equals -2 for every odd field."""
    x = spec.nonzero
    y = spec.add(spec.square(x), 1)
    if np.any(y == 0):
        # -1 is a square here; those terms have eta(0) and are skipped
        y = y[y != 0]
    return int(spec.eta(y).sum())


def gauss_sum(x: FieldElement) -> complex:
    """``sum over q of omega^tr(x q^2)``."""
    if x.index == 0:
        raise FieldError("gauss_sum is only defined for x != 0")
    f = x.field
    q = f.all
    return complex(f.omega_tr(f.mul(x.index, f.square(q))).sum())


def gauss_sum_expected(x: FieldElement) -> complex:
    """Closed form ``i^n eta(x) sqrt(d)``, valid for d = 3 (mod 4)."""
    f = x.field
    return (1j) ** f.n * eta(x) * math.sqrt(f.d)


def omega_orthogonality(y: FieldElement) -> complex:
    """``sum over x of omega^tr(x y)``: ``d`` at zero, 0 elsewhere."""
    f = y.field
    return complex(f.omega_tr(f.mul(f.all, y.index)).sum())
