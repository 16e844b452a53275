"""Decidable gates on character and weight data.

Characters enter as ``CharClass`` (inertia exponent mod p^f - 1 plus an
unramified unit).  Weight-set predicates work on templates whose columns are
shifted to minimum 0, the normalisation under which the crystalline weights
are taken in [0, p].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidInput
from .field_core import GF
from .models import CharClass, WeightTemplate, c1_sufficient, check_C1, enumerate_models
from .rank1 import Rank1Kisin


@dataclass(frozen=True)
class CycloClass:
    """The reduced cyclotomic character: exponent sum_s p^{f-1-s} and unit a_cyc."""

    p: int
    f: int
    a_cyc: int = 1

    @property
    def e_cyc(self) -> int:
        return ((self.p**self.f - 1) // (self.p - 1)) % (self.p**self.f - 1)


@dataclass(frozen=True)
class SerreWeight:
    a: tuple[tuple[int, ...], ...]  # one weakly decreasing row per embedding

    def __post_init__(self):
        a = tuple(tuple(int(x) for x in row) for row in self.a)
        object.__setattr__(self, "a", a)
        if not a or not a[0]:
            raise InvalidInput("empty weight")
        d = len(a[0])
        for s, row in enumerate(a):
            if len(row) != d:
                raise InvalidInput(f"row {s} has length {len(row)}, expected {d}")
            if any(x < y for x, y in zip(row, row[1:])):
                raise InvalidInput(f"row {s} is not weakly decreasing: {row}")

    @property
    def f(self) -> int:
        return len(self.a)

    @property
    def d(self) -> int:
        return len(self.a[0])

    def is_serre(self, p: int) -> bool:
        """Consecutive gaps at most p - 1."""
        return all(x - y <= p - 1 for row in self.a for x, y in zip(row, row[1:]))

    def bound_ok(self, p: int) -> bool:
        """The standing range hypothesis a_{s,1} - a_{s,d} <= p - d + 1."""
        return all(row[0] - row[-1] <= p - self.d + 1 for row in self.a)


def ratio(F: GF, ci: CharClass, cj: CharClass, mod: int) -> tuple[int, int]:
    """The class of chi_i^{-1} chi_j."""
    return (cj.e - ci.e) % mod, F.div(cj.a, ci.a)


def check_C2A(chars: Sequence[CharClass], cyc: CycloClass, F: GF) -> tuple[bool, list[tuple[int, int]]]:
    """chi_i^{-1} chi_j is neither trivial nor cyclotomic for every i < j."""
    mod = cyc.p**cyc.f - 1
    trivial = (0, 1)
    cyclo = (cyc.e_cyc, cyc.a_cyc)
    bad = [(i, j) for i, j in itertools.combinations(range(len(chars)), 2)
           if ratio(F, chars[i], chars[j], mod) in (trivial, cyclo)]
    return not bad, bad


def check_C2B(seq: Sequence[Rank1Kisin], p: int) -> tuple[bool, tuple[int, int] | None]:
    """No i < j with n_i of weights all 0 and n_j of weights all p."""
    for i, j in itertools.combinations(range(len(seq)), 2):
        if all(x == 0 for x in seq[i].t) and all(x == p for x in seq[j].t):
            return False, (i, j)
    return True, None


def _diffs(col) -> set[int]:
    return {abs(x - y) for x, y in itertools.combinations(col, 2)}


def corollary_weight_clauses(template: WeightTemplate, p: int) -> dict[int, bool]:
    """The weight parts of the four corollary cases on the normalised template."""
    h = template.normalized().h
    never_one = all(1 not in _diffs(col) for col in h)
    some_no_p1 = any(p - 1 not in col for col in h)
    return {
        1: template.f == 1 and (p - 1) not in _diffs(h[0]),
        2: never_one and some_no_p1,
        3: never_one and some_no_p1 and any(p not in col for col in h),
        4: all(col[-1] <= p - 1 for col in h) and some_no_p1,
    }


def corollary_cases(template: WeightTemplate, p: int, chars: Sequence[CharClass] | None = None,
                    cyc: CycloClass | None = None, F: GF | None = None) -> set[int]:
    """Satisfied cases; 1 and 2 also need (C-2A), so they drop out without characters."""
    clauses = corollary_weight_clauses(template, p)
    c2a = None
    if chars is not None:
        cyc = cyc or CycloClass(p, template.f)
        c2a = check_C2A(chars, cyc, F or GF(p))[0]
    out = set()
    for case, ok in clauses.items():
        if not ok:
            continue
        if case in (1, 2) and not c2a:
            continue
        out.add(case)
    return out


def serre_to_hodge(w: SerreWeight) -> WeightTemplate:
    """h_s = {a_{s,i} + d - i : 1 <= i <= d}."""
    d = w.d
    return WeightTemplate(tuple(tuple(row[i] + d - 1 - i for i in range(d)) for row in w.a))


def application_weight_clauses(w: SerreWeight, p: int) -> dict[int, bool]:
    d = w.d

    def shifted(row, i):
        return row[i] + d - 1 - i

    def no_gap(row):
        return all(shifted(row, i) - shifted(row, j) != p - 1 for i, j in itertools.combinations(range(d), 2))

    distinct = all(len(set(row)) == d for row in w.a)
    spread = [row[0] + d - 1 - row[-1] for row in w.a]
    some_no_gap = any(no_gap(row) for row in w.a)
    return {
        1: w.f == 1 and no_gap(w.a[0]),
        2: distinct and some_no_gap,
        3: distinct and some_no_gap and any(x != p for x in spread),
        4: all(x <= p - 1 for x in spread) and any(x <= p - 2 for x in spread),
    }


def application_conditions(w: SerreWeight, p: int, chars: Sequence[CharClass] | None = None,
                           cyc: CycloClass | None = None, F: GF | None = None) -> set[int]:
    clauses = application_weight_clauses(w, p)
    c2a = None
    if chars is not None:
        cyc = cyc or CycloClass(p, w.f)
        c2a = check_C2A(chars, cyc, F or GF(p))[0]
    return {case for case, ok in clauses.items() if ok and (case not in (1, 2) or c2a)}


def witness_embedding(template: WeightTemplate, p: int, value: int) -> int | None:
    """First s whose normalised column avoids ``value``."""
    for s, col in enumerate(template.normalized().h):
        if value not in col:
            return s
    return None


def gate_report(template: WeightTemplate, p: int, chars: Sequence[CharClass] | None = None,
                cyc: CycloClass | None = None, F: GF | None = None,
                serre: SerreWeight | None = None) -> dict:
    """(C-1), (C-2A), (C-2B), corollary / application cases and the combined gate."""
    F = F or GF(p)
    cyc = cyc or CycloClass(p, template.f)
    c1, c2a, c2b, models = None, None, None, []
    if chars is not None:
        c1, models = check_C1(chars, template, p)
        c2a = check_C2A(chars, cyc, F)[0]
        if c1:
            rows = [Rank1Kisin(r, c.a) for r, c in zip(models[0], chars)]
            c2b = check_C2B(rows, p)[0]
    cor = corollary_cases(template, p, chars, cyc, F)
    app = sorted(application_conditions(serre, p, chars, cyc, F)) if serre is not None else []
    report = {
        "c1": c1,
        "c1_sufficient_cases": sorted(c1_sufficient(template, p)),
        "c2a": c2a,
        "c2b": c2b,
        "corollary_cases": sorted(cor),
        "application_cases": app,
        "serre_bound_ok": serre.bound_ok(p) if serre is not None else None,
        "theorem_main_gate": bool(c1) and bool(c2a or c2b),
        "witness_s0": witness_embedding(template, p, p - 1),
        "witness_s0_prime": witness_embedding(template, p, p),
    }
    return report
