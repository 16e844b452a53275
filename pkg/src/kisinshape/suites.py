"""Registered property suites run by ``kisinshape sweep`` and the acceptance tests.

Each suite returns a ``SuiteResult``; a suite whose planned work exceeds the
budget raises ``BudgetError`` and is reported as inconclusive by the runner.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .conditions import (CycloClass, SerreWeight, application_conditions, application_weight_clauses,
                         check_C2A, corollary_cases, corollary_weight_clauses, serre_to_hodge)
from .errors import BudgetError, ClassificationError
from .ext import (ExtProblem, block_basis_change, bound_instances, check_upper_bound,
                  conjugation_oracle, random_matrices, random_triangular)
from .field_core import get_field
from .models import (CharClass, WeightTemplate, c1_sufficient, check_C3, enumerate_models,
                     models_by_residues, pls_components)
from .rank1 import (Rank1Kisin, admissible_diffs, alpha_invariant, classify_gls, iso_as_Ginf,
                    iso_via_alpha)
from .shape import normalize_to_diagonal, random_p_shape, replay, shapelemma_verify, undo

MAX_LISTED_FAILURES = 20


@dataclass
class SuiteContext:
    seed: int = 0
    budget: int | None = None  # cap on checks per suite
    scale: str = "desk"  # "desk" runs acceptance sizes, "quick" shrinks them

    def plan(self, name: str, planned: int):
        if self.budget is not None and planned > self.budget:
            raise BudgetError(f"{name}: {planned} checks exceed the budget of {self.budget}",
                              coverage={"planned": planned, "checked": 0, "budget": self.budget})

    @property
    def quick(self) -> bool:
        return self.scale == "quick"


@dataclass
class SuiteResult:
    name: str
    status: str  # pass | fail | inconclusive
    checked: int = 0
    failures: list = field(default_factory=list)
    failure_count: int = 0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def fail(self, item):
        self.failure_count += 1
        if len(self.failures) < MAX_LISTED_FAILURES:
            self.failures.append(item)

    def close(self) -> "SuiteResult":
        self.status = "fail" if self.failure_count else "pass"
        return self

    def to_record(self) -> dict:
        return {"name": self.name, "status": self.status, "checked": self.checked,
                "failure_count": self.failure_count, "failures": self.failures,
                "details": self.details}


# --- individual suites --------------------------------------------------------

def alpha_recurrence(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("alpha_recurrence", "pass")
    configs = [(p, f) for p in ((3,) if ctx.quick else (3, 5)) for f in (1, 2, 3)]
    ctx.plan(res.name, sum((p + 1) ** f for p, f in configs))
    for p, f in configs:
        for t in itertools.product(range(p + 1), repeat=f):
            al = alpha_invariant(Rank1Kisin(t), p)
            res.checked += 1
            for s in range(f):
                if p * al[s - 1] - al[s] != t[s] or al[s].denominator not in _divisors(p**f - 1):
                    res.fail({"p": p, "t": list(t), "s": s})
    return res.close()


def _divisors(n: int) -> set[int]:
    return {k for k in range(1, n + 1) if n % k == 0}


def string_decomposition(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("string_decomposition", "pass")
    fmax = 3 if ctx.quick else 4
    configs = [(p, f) for p in (3, 5) for f in range(1, fmax + 1)]
    ctx.plan(res.name, sum((2 * p + 1) ** f for p, f in configs))
    ambiguous = 0
    for p, f in configs:
        for diff in admissible_diffs(p, f):
            res.checked += 1
            try:
                dec = classify_gls(diff, p)
            except ClassificationError:
                res.fail({"p": p, "diff": list(diff), "error": "no decomposition"})
                continue
            if dec.reassemble(f, p) != tuple(diff):
                res.fail({"p": p, "diff": list(diff), "error": "reassembly differs"})
            ambiguous += dec.multiplicity > 1
    res.details["ambiguous_vectors"] = ambiguous
    return res.close()


def iso_criteria(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("iso_criteria", "pass")
    p = 3
    F = get_field(p)
    units = list(F.units())
    fmax = 2 if ctx.quick else 3
    ctx.plan(res.name, sum(((p + 1) ** f * len(units)) ** 2 for f in range(1, fmax + 1)))
    for f in range(1, fmax + 1):
        mods = [Rank1Kisin(t, a) for t in itertools.product(range(p + 1), repeat=f) for a in units]
        for n, n2 in itertools.product(mods, repeat=2):
            res.checked += 1
            if iso_as_Ginf(n, n2, p) != iso_via_alpha(n, n2, p):
                res.fail({"n": n.to_record(F), "n2": n2.to_record(F)})
    return res.close()


def c1_sufficiency(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("c1_sufficiency", "pass")
    p = 3
    templates = 0
    for f in (1, 2):
        for d in (1, 2, 3):
            for cols in itertools.product(itertools.combinations(range(p + 1), d), repeat=f):
                template = WeightTemplate(cols)
                if not c1_sufficient(template, p):
                    continue
                templates += 1
                for residues in models_by_residues(template, p):
                    res.checked += 1
                    models = enumerate_models([CharClass(e) for e in residues], template, p)
                    if len(models) != 1:
                        res.fail({"template": [list(c) for c in cols], "residues": list(residues),
                                  "models": len(models)})
    res.details["templates"] = templates
    return res.close()


def shape_lemma(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("shape_lemma", "pass")
    trials = 1000 if ctx.quick else 10_000
    fields = (3,) if ctx.quick else (3, 5)
    planned = sum(p ** max(t) for p in fields for t in itertools.permutations(range(p + 1), 2)) + trials
    ctx.plan(res.name, planned)
    tags, hits = set(), 0
    for p in fields:
        F = get_field(p)
        for t in itertools.permutations(range(p + 1), 2):
            rep = shapelemma_verify(F, t, "exhaustive")
            res.checked += rep.trials
            hits += rep.hypothesis_hits
            tags.update(rep.tags)
            for cx in rep.counterexamples:
                res.fail({"t": list(t), "p": p, **cx})
    F = get_field(3)
    triples = list(itertools.permutations(range(4), 3))
    rng = random.Random(ctx.seed)
    per, extra = divmod(trials, len(triples))
    random_hits = 0
    for k, t in enumerate(triples):
        n = per + (1 if k < extra else 0)
        rep = shapelemma_verify(F, t, "random", trials=n, seed=rng.randrange(2**31))
        res.checked += rep.trials
        random_hits += rep.hypothesis_hits
        tags.update(rep.tags)
        for cx in rep.counterexamples:
            res.fail({"t": list(t), "p": 3, **cx})
    res.details.update({"hypothesis_hits_exhaustive": hits, "hypothesis_hits_random": random_hits,
                        "random_trials": trials, "tags": sorted(tags)})
    return res.close()


def allowable_round_trip(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("allowable_round_trip", "pass")
    n = 100 if ctx.quick else 1000
    ctx.plan(res.name, n)
    F = get_field(3)
    rng = random.Random(ctx.seed)
    moves_total = 0
    for _ in range(n):
        d, f = rng.randint(1, 4), rng.randint(1, 2)
        M = random_p_shape(rng, F, 16, d, f, 3)
        D, moves = normalize_to_diagonal(M, 3)
        moves_total += len(moves)
        res.checked += 1
        diagonal = all(D.A[s][i][j].is_zero() for s in range(f) for i in range(d) for j in range(d) if i != j)
        if not diagonal or undo(D, moves) != M or replay(M, moves) != D:
            res.fail({"module": M.to_record()})
    res.details["moves"] = moves_total
    return res.close()


def ext_conjugation(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("ext_conjugation", "pass")
    n = 100 if ctx.quick else 1000
    ctx.plan(res.name, n)
    F = get_field(3)
    rng = random.Random(ctx.seed)
    N = 16
    for _ in range(n):
        f, k, k2 = rng.randint(1, 2), rng.randint(1, 2), rng.randint(1, 2)
        pb = ExtProblem(random_triangular(rng, F, N, k, f, 3), random_triangular(rng, F, N, k2, f, 3))
        C = random_matrices(rng, F, N, f, k, k2, 3)
        W = random_matrices(rng, F, N, f, k, k2, 3)
        res.checked += 1
        if block_basis_change(pb, C, W) != conjugation_oracle(pb, C, W):
            res.fail({"problem": pb.to_record()})
    return res.close()


def ext_dimension_bound(ctx: SuiteContext, N: int = 12, precision_step: int | None = None) -> SuiteResult:
    """Every rank-one-sub problem over F_3 with f <= 2, d <= 3 and no row homs."""
    res = SuiteResult("ext_dimension_bound", "pass")
    F = get_field(3)
    configs = [(1, 2), (1, 3), (2, 2)] if ctx.quick else [(1, 2), (1, 3), (2, 2), (2, 3)]
    ctx.plan(res.name, sum(1 for f, d in configs for _ in bound_instances(F, 3, f, d, N)))
    hist: dict = {}
    for f, d in configs:
        for pb in bound_instances(F, 3, f, d, N):
            res.checked += 1
            rep = check_upper_bound(pb, N=N, precision_step=precision_step)
            key = f"{rep.ext_dim}/{rep.d_nek}"
            hist[key] = hist.get(key, 0) + 1
            if not rep.holds or not rep.certificate["stable"]:
                res.fail({"problem": pb.to_record(), "report": rep.to_record()})
    res.details.update({"N": N, "ext_dim/d_nek": dict(sorted(hist.items()))})
    return res.close()


def counterexample_pairs(p: int = 5):
    """The two model pairs with no swap path between them, for every admissible (a, b)."""
    yield "two_column", ((1, 1), (p - 1, p), (0, 0), (p, p - 1)), ((p, p), (0, 1), (p - 1, p - 1), (1, 0))
    for a in range(p + 1):
        for b in range(p + 1):
            if a in (0, p - 1) or b in (1, p):
                continue
            N = ((0, 0, p, 1), (p - 1, p - 1, p - 1, p), (a, p, 0, b))
            N2 = ((p - 1, p, p - 1, p), (0, 0, 0, 1), (a, p - 1, p, b))
            yield f"three_row a={a} b={b}", N, N2


def pls_regression(ctx: SuiteContext) -> SuiteResult:
    from .models import chars_from_matrix
    res = SuiteResult("pls_regression", "pass")
    p0 = 5
    connected_pairs = []
    for label, N, N2 in counterexample_pairs(p0):
        template = WeightTemplate.of_matrix(N)
        chars = chars_from_matrix(N, p0)
        models = enumerate_models(chars, template, p0)
        res.checked += 1
        if N not in models or N2 not in models:
            res.fail({"pair": label, "error": "not both models"})
            continue
        comps = pls_components(models, p0)
        if comps.component_of(N) == comps.component_of(N2):
            connected_pairs.append(label)
            res.fail({"pair": label, "error": "connected by swaps"})
    res.details["connected_counterexample_pairs"] = connected_pairs
    primes = (3,) if ctx.quick else (3, 5)
    dmax = 3 if ctx.quick else 4
    instances = multi = 0
    for p in primes:
        for f in (1, 2):
            for d in range(1, dmax + 1):
                for cols in itertools.product(itertools.combinations(range(p + 1), d), repeat=f):
                    template = WeightTemplate(cols)
                    if not check_C3(template, p):
                        continue
                    for residues, models in models_by_residues(template, p).items():
                        instances += 1
                        res.checked += 1
                        if len(models) < 2:
                            continue
                        multi += 1
                        comps = pls_components(models, p)
                        if comps.count != 1:
                            res.fail({"p": p, "template": [list(c) for c in cols],
                                      "residues": list(residues), "components": comps.count})
    res.details.update({"c3_instances": instances, "c3_instances_with_several_models": multi})
    return res.close()


def gate_consistency(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("gate_consistency", "pass")
    p = 5
    F = get_field(p)
    excluded = excluded_disagree = 0
    for f in (1, 2):
        cyc = CycloClass(p, f)
        for d in (1, 2, 3):
            rows = [r for r in itertools.product(range(p), repeat=d)
                    if all(x >= y for x, y in zip(r, r[1:]))]
            char_lists = _char_lists(F, p, f, d, cyc)
            for a in itertools.product(rows, repeat=f):
                w = SerreWeight(a)
                if not w.is_serre(p):
                    continue
                template = serre_to_hodge(w)
                if not w.bound_ok(p):
                    # Hodge weights leave [0, p]: outside the range of both statements
                    excluded += 1
                    if any(application_conditions(w, p, chars, cyc, F) != corollary_cases(template, p, chars, cyc, F)
                           for chars in char_lists):
                        excluded_disagree += 1
                    continue
                res.checked += 1
                if application_weight_clauses(w, p) != corollary_weight_clauses(template, p):
                    res.fail({"a": [list(r) for r in a], "clauses": "weight clauses differ"})
                for chars in char_lists:
                    lhs = application_conditions(w, p, chars, cyc, F)
                    rhs = corollary_cases(template, p, chars, cyc, F)
                    if lhs != rhs:
                        res.fail({"a": [list(r) for r in a], "application": sorted(lhs),
                                  "corollary": sorted(rhs)})
    res.details.update({"excluded_out_of_range": excluded,
                        "excluded_that_disagree": excluded_disagree})
    return res.close()


def _char_lists(F, p, f, d, cyc):
    """No characters, one list passing (C-2A) and one failing it."""
    mod = p**f - 1
    good = [CharClass((2 * i) % mod, F.pow(F.generator, i)) for i in range(d)]
    lists = [None, good]
    if d >= 2:
        lists.append([CharClass(0, 1)] * d)
        assert not check_C2A(lists[-1], cyc, F)[0]
    return lists


def falsified_fixture(ctx: SuiteContext) -> SuiteResult:
    """Harness self-test: checks a deliberately wrong identity and must fail."""
    res = SuiteResult("falsified_fixture", "pass")
    for t in itertools.product(range(4), repeat=2):
        al = alpha_invariant(Rank1Kisin(t), 3)
        res.checked += 1
        if al[0] - al[1] != Fraction(t[0], 1):  # wrong on purpose
            res.fail({"t": list(t)})
    return res.close()


REGISTRY: dict[str, Callable[[SuiteContext], SuiteResult]] = {
    "alpha_recurrence": alpha_recurrence,
    "string_decomposition": string_decomposition,
    "iso_criteria": iso_criteria,
    "c1_sufficiency": c1_sufficiency,
    "shape_lemma": shape_lemma,
    "allowable_round_trip": allowable_round_trip,
    "ext_conjugation": ext_conjugation,
    "ext_dimension_bound": ext_dimension_bound,
    "pls_regression": pls_regression,
    "gate_consistency": gate_consistency,
}

PROFILES: dict[str, list[str]] = {
    "desk": list(REGISTRY),
    "quick": list(REGISTRY),
    "selftest": ["alpha_recurrence", "falsified_fixture"],
    "empty": [],
}

SUITE_FUNCS = dict(REGISTRY, falsified_fixture=falsified_fixture)


def run_suites(names, ctx: SuiteContext) -> list[SuiteResult]:
    out = []
    for name in names:
        try:
            out.append(SUITE_FUNCS[name](ctx))
        except BudgetError as exc:
            out.append(SuiteResult(name, "inconclusive", details={"reason": str(exc), "coverage": exc.coverage}))
    return out
