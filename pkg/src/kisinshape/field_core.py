"""Coefficient field F_{p^m}, truncated series k_E[u]/(u^N) and the u -> u^p twist.

Field elements are plain ints: the element with coordinates (c_0, ..., c_{m-1})
in the basis 1, x, ..., x^{m-1} of F_p[x]/(field_poly) is stored as
sum(c_k * p**k).  For m = 1 this is just the residue itself.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from .errors import DomainError, InvalidInput

INF = math.inf

_TABLE_LIMIT = 81  # full addition / multiplication tables
_LOG_TABLE_LIMIT = 1 << 16  # discrete-log tables for multiplication


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for k in range(2, math.isqrt(n) + 1):
        if n % k == 0:
            return False
    return True


# --- polynomials over F_p, little-endian coefficient lists -------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    inv_lead = pow(b[-1], -1, p)
    while len(a) >= len(b):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        for k, bk in enumerate(b):
            a[shift + k] = (a[shift + k] - c * bk) % p
        _trim(a)
    return a


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    m = len(poly) - 1
    if m < 1 or poly[-1] % p == 0:
        return False
    for deg in range(1, m // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            if not _polymod(poly, list(low) + [1], p):
                return False
    return True


@lru_cache(maxsize=None)
def default_field_poly(p: int, m: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree m over F_p.

    Candidates are ordered by reading (c_{m-1}, ..., c_0) as a base-p number,
    i.e. by the integer encoding of the non-leading part.
    """
    if m == 1:
        return (0, 1)
    for k in range(p**m):
        low = [(k // p**j) % p for j in range(m)]
        poly = tuple(low + [1])
        if is_irreducible(poly, p):
            return poly
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class GF:
    """The finite field F_p[x]/(poly) with int-encoded elements."""

    def __init__(self, p: int, m: int = 1, poly: Sequence[int] | None = None):
        if not is_prime(p):
            raise InvalidInput(f"p={p} is not prime")
        if m < 1:
            raise InvalidInput("m must be positive")
        if poly is None:
            poly = default_field_poly(p, m)
        poly = tuple(int(c) % p for c in poly)
        if len(poly) != m + 1 or poly[-1] != 1:
            raise InvalidInput(f"field_poly must be monic of degree {m}")
        if not is_irreducible(poly, p):
            raise InvalidInput(f"field_poly {list(poly)} is reducible over F_{p}")
        self.p = p
        self.m = m
        self.poly = poly
        self.q = p**m
        self._add = self._mul = self._exp = self._log = self._inv = None
        if m > 1 and self.q <= _TABLE_LIMIT:
            self._build_tables()
        elif m > 1 and self.q <= _LOG_TABLE_LIMIT:
            self._build_log_tables()
        if self._inv is None and self.q <= _LOG_TABLE_LIMIT:
            self._inv = [0] + [self._slow_inv(x) for x in range(1, self.q)]

    # identity / hashing so Series and matrices compare sanely
    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.poly) == (other.p, other.poly)

    def __hash__(self):
        return hash((self.p, self.poly))

    def __repr__(self):
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m}, poly={list(self.poly)})"

    # --- coordinates ---------------------------------------------------------
    def coords(self, x: int) -> list[int]:
        return [(x // self.p**k) % self.p for k in range(self.m)]

    def from_coords(self, cs: Iterable[int]) -> int:
        cs = list(cs)
        if len(cs) > self.m:
            raise InvalidInput(f"expected at most {self.m} coordinates, got {len(cs)}")
        return sum((int(c) % self.p) * self.p**k for k, c in enumerate(cs))

    def __call__(self, value) -> int:
        """Coerce an int (read mod p, i.e. in the prime field) or a coordinate list."""
        if isinstance(value, (list, tuple)):
            return self.from_coords(value)
        return int(value) % self.p

    def elements(self) -> range:
        return range(self.q)

    def units(self) -> range:
        return range(1, self.q)

    @cached_property
    def generator(self) -> int:
        """Smallest-encoded element of multiplicative order q - 1."""
        order = self.q - 1
        primes = [r for r in range(2, order + 1) if order % r == 0 and is_prime(r)]
        for g in range(1, self.q):
            if all(self.pow(g, order // r) != 1 for r in primes):
                return g
        raise AssertionError("field has no generator")  # pragma: no cover

    # --- slow coordinate arithmetic -------------------------------------------
    def _slow_add(self, a: int, b: int) -> int:
        p = self.p
        out, k = 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * k
            a //= p
            b //= p
            k *= p
        return out

    def _slow_mul(self, a: int, b: int) -> int:
        p = self.p
        ca, cb = self.coords(a), self.coords(b)
        prod = [0] * (2 * self.m - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] = (prod[i + j] + x * y) % p
        return self.from_coords(_polymod(prod, self.poly, p) if len(prod) > self.m else prod)

    def _slow_pow(self, a: int, n: int) -> int:
        result = 1
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def _slow_inv(self, a: int) -> int:
        if self.m == 1:
            return pow(a, -1, self.p)
        return self._slow_pow(a, self.q - 2)

    def _build_tables(self):
        q = self.q
        self._add = [[self._slow_add(a, b) for b in range(q)] for a in range(q)]
        self._mul = [[0] * q for _ in range(q)]
        for a in range(1, q):
            row = self._mul[a]
            for b in range(a, q):
                row[b] = self._mul[b][a] = self._slow_mul(a, b)

    def _build_log_tables(self):
        q = self.q
        for g in range(2, q):
            exp = [1]
            x = g
            while x != 1:
                exp.append(x)
                x = self._slow_mul(x, g)
            if len(exp) == q - 1:
                break
        self._exp = exp
        self._log = [0] * q
        for k, x in enumerate(exp):
            self._log[x] = k
        self._inv = [0] + [exp[-self._log[x] % (q - 1)] for x in range(1, q)]

    # --- public arithmetic ------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self._add is not None:
            return self._add[a][b]
        return self._slow_add(a, b)

    def neg(self, a: int) -> int:
        if self.m == 1:
            return -a % self.p
        p = self.p
        return sum((-c % p) * p**k for k, c in enumerate(self.coords(a)))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return a * b % self.p
        if self._mul is not None:
            return self._mul[a][b]
        if self._exp is not None:
            if a == 0 or b == 0:
                return 0
            return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return self._slow_mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DomainError("inverse of zero in the coefficient field")
        if self._inv is not None:
            return self._inv[a]
        return self._slow_inv(a)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self._slow_pow(self.inv(a), -n)
        if self.m == 1:
            return pow(a, n, self.p)
        return self._slow_pow(a, n)

    def frobenius(self, a: int) -> int:
        """x -> x^p."""
        return self.pow(a, self.p)


@lru_cache(maxsize=64)
def get_field(p: int, m: int = 1, poly: tuple[int, ...] | None = None) -> GF:
    return GF(p, m, poly)


# --- global parameters ------------------------------------------------------------

_PARAM_KEYS = {"p", "f", "m", "N", "field_poly"}


@dataclass(frozen=True)
class GlobalParams:
    p: int
    f: int
    m: int = 0
    N: int = 0
    field_poly: tuple[int, ...] | None = None

    def __post_init__(self):
        # m and N default to f and p + 1 when left unset
        if self.m == 0:
            object.__setattr__(self, "m", self.f)
        if self.N == 0:
            object.__setattr__(self, "N", self.p + 1)
        if not is_prime(self.p) or self.p < 3:
            raise InvalidInput(f"p must be an odd prime, got {self.p}")
        if self.f < 1 or self.m < 1:
            raise InvalidInput("f and m must be positive")
        if self.m % self.f:
            raise InvalidInput(f"f={self.f} must divide m={self.m}")
        if self.N < self.p + 1:
            raise InvalidInput(f"N={self.N} must be at least p+1={self.p + 1}")
        if self.field_poly is not None:
            object.__setattr__(self, "field_poly", tuple(self.field_poly))
        self.field  # validates field_poly eagerly

    @property
    def field(self) -> GF:
        return get_field(self.p, self.m, self.field_poly)

    @property
    def modulus(self) -> int:
        """p^f - 1, the modulus of inertia exponents."""
        return self.p**self.f - 1

    @classmethod
    def from_record(cls, rec: dict) -> "GlobalParams":
        unknown = set(rec) - _PARAM_KEYS
        if unknown:
            raise InvalidInput(f"unknown params fields: {sorted(unknown)}")
        for key in ("p", "f"):
            if key not in rec:
                raise InvalidInput(f"params missing required field {key!r}")
        poly = rec.get("field_poly")
        return cls(p=int(rec["p"]), f=int(rec["f"]), m=int(rec.get("m", 0)),
                   N=int(rec.get("N", 0)),
                   field_poly=tuple(int(c) for c in poly) if poly is not None else None)

    def to_record(self) -> dict:
        return {"p": self.p, "f": self.f, "m": self.m, "N": self.N,
                "field_poly": list(self.field.poly)}


# --- truncated power series ------------------------------------------------------

@dataclass(frozen=True)
class Series:
    """An element of k_E[u]/(u^N); ``coeffs[k]`` is the coefficient of u^k."""

    field: GF = field(repr=False)
    coeffs: tuple[int, ...]

    @property
    def N(self) -> int:
        return len(self.coeffs)

    # constructors
    @classmethod
    def zero(cls, F: GF, N: int) -> "Series":
        return cls(F, (0,) * N)

    @classmethod
    def one(cls, F: GF, N: int) -> "Series":
        return cls.monomial(F, N, 0, 1)

    @classmethod
    def monomial(cls, F: GF, N: int, k: int, c: int = 1) -> "Series":
        cs = [0] * N
        if 0 <= k < N:
            cs[k] = c
        return cls(F, tuple(cs))

    @classmethod
    def from_list(cls, F: GF, N: int, cs: Sequence[int]) -> "Series":
        cs = list(cs)[:N]
        return cls(F, tuple(cs) + (0,) * (N - len(cs)))

    def _check(self, other: "Series"):
        if self.N != other.N or self.field != other.field:
            raise InvalidInput("series over different fields or precisions")

    # ring operations
    def __add__(self, other: "Series") -> "Series":
        self._check(other)
        add = self.field.add
        return Series(self.field, tuple(add(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "Series":
        return Series(self.field, tuple(self.field.neg(a) for a in self.coeffs))

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def scale(self, c: int) -> "Series":
        mul = self.field.mul
        return Series(self.field, tuple(mul(c, a) for a in self.coeffs))

    def __mul__(self, other) -> "Series":
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        F, N = self.field, self.N
        out = [0] * N
        a, b = self.coeffs, other.coeffs
        for i, x in enumerate(a):
            if x:
                for j in range(N - i):
                    y = b[j]
                    if y:
                        out[i + j] = F.add(out[i + j], F.mul(x, y))
        return Series(F, tuple(out))

    __rmul__ = __mul__

    def shift(self, k: int) -> "Series":
        """Multiply by u^k (k >= 0), dropping terms of degree >= N."""
        if k < 0:
            raise InvalidInput("use divide_u for negative shifts")
        return Series(self.field, ((0,) * k + self.coeffs)[: self.N])

    def divide_u(self, k: int) -> "Series":
        """Exact division by u^k; the top k coefficients become unknown and are set to 0."""
        if self.val() < k:
            raise DomainError(f"series not divisible by u^{k}")
        return Series(self.field, self.coeffs[k:] + (0,) * k)

    def inverse(self) -> "Series":
        """Unit inverse modulo u^N."""
        F, N = self.field, self.N
        if self.coeffs[0] == 0:
            raise DomainError("series with positive valuation is not a unit")
        inv0 = F.inv(self.coeffs[0])
        out = [0] * N
        out[0] = inv0
        for n in range(1, N):
            acc = 0
            for k in range(1, n + 1):
                if self.coeffs[k]:
                    acc = F.add(acc, F.mul(self.coeffs[k], out[n - k]))
            out[n] = F.neg(F.mul(acc, inv0))
        return Series(F, tuple(out))

    def phi(self) -> "Series":
        return phi_twist(self)

    # inspection
    def val(self):
        """Least index of a nonzero coefficient, INF for the zero series (zero mod u^N)."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return INF

    def degree(self) -> int:
        """Largest index with nonzero coefficient, -1 for zero."""
        for k in range(self.N - 1, -1, -1):
            if self.coeffs[k]:
                return k
        return -1

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k]

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                mono = "" if k == 0 else ("u" if k == 1 else f"u^{k}")
                coef = str(c) if (c != 1 or k == 0) else ""
                terms.append(f"{coef}{'*' if coef and mono else ''}{mono}")
        return " + ".join(terms) if terms else "0"

    def to_record(self) -> list[list[int]]:
        """Coefficients up to the degree, each as a coordinate list."""
        return [self.field.coords(c) for c in self.coeffs[: self.degree() + 1]]


def phi_twist(a: Series) -> Series:
    """u -> u^p with coefficients fixed; terms landing at degree >= N are dropped."""
    p, N = a.field.p, a.N
    out = [0] * N
    for k, c in enumerate(a.coeffs):
        if p * k >= N:
            break
        out[p * k] = c
    return Series(a.field, tuple(out))


def val_of(a: Series):
    return a.val()


def series_from_record(F: GF, N: int, rec: Sequence) -> Series:
    """Inverse of ``Series.to_record``; plain ints are read as prime-field residues."""
    return Series.from_list(F, N, [F(c) for c in rec])
