"""Rank-one torsion Kisin modules M(t_0, ..., t_{f-1}; a).

phi(e_{s-1}) = (a)_s u^{t_s} e_s with (a)_0 = a and (a)_s = 1 otherwise.
Everything here is exponent arithmetic: alpha invariants are exact
``Fraction`` values and characters on inertia are residues mod p^f - 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import ClassificationError, InvalidInput


@dataclass(frozen=True)
class Rank1Kisin:
    t: tuple[int, ...]
    a: int = 1

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(int(x) for x in self.t))
        if any(x < 0 for x in self.t):
            raise InvalidInput(f"weights must be nonnegative: {self.t}")
        if self.a == 0:
            raise InvalidInput("the unit a must be nonzero")

    @property
    def f(self) -> int:
        return len(self.t)

    def to_record(self, F=None) -> dict:
        return {"t": list(self.t), "a": F.coords(self.a) if F else [self.a]}

    @classmethod
    def from_record(cls, rec: dict, F=None) -> "Rank1Kisin":
        a = rec.get("a", [1])
        if isinstance(a, list):
            a = F.from_coords(a) if F else int(a[0])
        return cls(tuple(rec["t"]), int(a))


def weight_residue(t: Sequence[int], p: int) -> int:
    """sum_s p^{f-1-s} t_s mod p^f - 1, the inertia exponent of M(t; a)."""
    f = len(t)
    return sum(p ** (f - 1 - s) * x for s, x in enumerate(t)) % (p**f - 1)


def alpha_invariant(n: Rank1Kisin, p: int) -> tuple[Fraction, ...]:
    """alpha_s = (1/(p^f-1)) sum_{j=1}^{f} p^{f-j} t_{j+s}, indices mod f."""
    f = n.f
    denom = p**f - 1
    return tuple(
        Fraction(sum(p ** (f - j) * n.t[(j + s) % f] for j in range(1, f + 1)), denom)
        for s in range(f)
    )


def iso_as_Ginf(n: Rank1Kisin, n2: Rank1Kisin, p: int) -> bool:
    """Weighted-congruence criterion for isomorphic G_infinity characters."""
    _same_f(n, n2)
    return n.a == n2.a and weight_residue(n.t, p) == weight_residue(n2.t, p)


def iso_via_alpha(n: Rank1Kisin, n2: Rank1Kisin, p: int) -> bool:
    """The alpha-integrality form of the same criterion, computed independently."""
    _same_f(n, n2)
    diff = alpha_invariant(n, p)[0] - alpha_invariant(n2, p)[0]
    return n.a == n2.a and diff.denominator == 1


def hom_exists(n: Rank1Kisin, n2: Rank1Kisin, p: int) -> bool:
    """True iff a nonzero morphism n -> n2 exists."""
    _same_f(n, n2)
    if n.a != n2.a:
        return False
    for x, y in zip(alpha_invariant(n, p), alpha_invariant(n2, p)):
        d = x - y
        if d.denominator != 1 or d < 0:
            return False
    return True


def _same_f(n, n2):
    if n.f != n2.f:
        raise InvalidInput("rank-one modules over different f")


# --- decomposition of weight differences into strings -----------------------

@dataclass(frozen=True)
class GLSString:
    start: int
    length: int
    sign: int  # +1, -1, or 0 for a zero string

    def values(self, p: int) -> tuple[int, ...]:
        if self.sign == 0:
            return (0,) * self.length
        body = (-1,) + (p - 1,) * (self.length - 2) + (p,)
        return tuple(self.sign * x for x in body)


@dataclass(frozen=True)
class GLSDecomposition:
    kind: str  # "all_p_minus_one+", "all_p_minus_one-", "strings"
    strings: tuple[GLSString, ...] = ()
    multiplicity: int = 1

    def reassemble(self, f: int, p: int) -> tuple[int, ...]:
        if self.kind == "all_p_minus_one+":
            return (p - 1,) * f
        if self.kind == "all_p_minus_one-":
            return (1 - p,) * f
        out = [None] * f
        for st in self.strings:
            for k, v in enumerate(st.values(p)):
                pos = (st.start + k) % f
                if out[pos] is not None:
                    raise ClassificationError("overlapping strings")
                out[pos] = v
        if any(v is None for v in out):
            raise ClassificationError("strings do not cover the cycle")
        return tuple(out)

    def to_record(self) -> dict:
        return {
            "kind": self.kind,
            "multiplicity": self.multiplicity,
            "strings": [{"start": s.start, "length": s.length, "sign": s.sign}
                        for s in self.strings],
        }


def _parse_from(diff: Sequence[int], p: int, start: int):
    f = len(diff)
    strings = []
    k = 0
    while k < f:
        pos = (start + k) % f
        v = diff[pos]
        if v == 0:
            run = 1
            while k + run < f and diff[(start + k + run) % f] == 0:
                run += 1
            strings.append(GLSString(pos, run, 0))
            k += run
            continue
        if v not in (-1, 1):
            return None
        sign = -v  # a leading -1 means a positive string
        length = 1
        while True:
            if k + length >= f:
                return None
            w = sign * diff[(start + k + length) % f]
            length += 1
            if w == p:
                break
            if w != p - 1:
                return None
        strings.append(GLSString(pos, length, sign))
        k += length
    return tuple(strings)


def classify_gls(diff: Sequence[int], p: int) -> GLSDecomposition:
    """Split a weight-difference vector whose weighted sum vanishes mod p^f - 1.

    Either the vector is +-(p-1, ..., p-1), or read cyclically it breaks into
    strings +-(-1, p-1, ..., p-1, p) and runs of zeros.  Among several valid
    cyclic parses the one starting at the smallest index is returned and the
    number of distinct parses is recorded in ``multiplicity``.
    """
    diff = tuple(int(x) for x in diff)
    f = len(diff)
    if f == 0 or any(abs(x) > p for x in diff):
        raise InvalidInput(f"entries must lie in [-p, p]: {diff}")
    if weight_residue([x % (p**f - 1) for x in diff], p) != 0:
        raise InvalidInput(f"weighted sum of {diff} is not 0 mod p^f-1")
    if diff == (p - 1,) * f:
        return GLSDecomposition("all_p_minus_one+")
    if diff == (1 - p,) * f:
        return GLSDecomposition("all_p_minus_one-")
    if not any(diff):
        return GLSDecomposition("strings", (GLSString(0, f, 0),))
    found = []
    for start in range(f):
        prev = diff[(start - 1) % f]
        if diff[start] == 0 and prev == 0:
            continue  # inside a zero run
        parsed = _parse_from(diff, p, start)
        if parsed is not None:
            found.append(parsed)
    distinct = {frozenset(x) for x in found}
    if not found:
        raise ClassificationError(f"no string decomposition of {diff} (p={p})")
    best = tuple(sorted(found[0], key=lambda s: s.start))
    return GLSDecomposition("strings", best, len(distinct))


def admissible_diffs(p: int, f: int):
    """Every vector in [-p, p]^f whose weighted sum vanishes mod p^f - 1."""
    mod = p**f - 1
    weights = [p ** (f - 1 - s) for s in range(f)]
    for diff in itertools.product(range(-p, p + 1), repeat=f):
        if sum(w * x for w, x in zip(weights, diff)) % mod == 0:
            yield diff


def chars_with_weight_string(target_residue: int, range_max: int, p: int, f: int) -> list[tuple[int, ...]]:
    """All t in [0, range_max]^f with the given inertia residue, lexicographically."""
    if range_max < 0:
        raise InvalidInput("range_max must be nonnegative")
    mod = p**f - 1
    target = target_residue % mod
    return [t for t in itertools.product(range(range_max + 1), repeat=f)
            if weight_residue(t, p) == target]
