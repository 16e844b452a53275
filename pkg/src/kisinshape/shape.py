"""Upper-triangular Frobenius data, the (DEG) and (P) shape predicates,
allowable procedures, and brute-force checks of the structural lemmas.

Row and column indices are 0-based throughout.  Component s carries the
matrix A_s whose diagonal entry (i, i) is (a_i)_s u^{t_{i,s}}, where
(a_i)_0 = a_i and (a_i)_s = 1 for s > 0.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from . import smat
from .errors import BudgetError, InvalidInput, InvalidMove, PrecisionError, ShapeError
from .field_core import GF, INF, Series
from .linalg import mat_rank, nullspace
from .rank1 import Rank1Kisin, alpha_invariant, hom_exists


def component_unit(a: int, s: int) -> int:
    return a if s == 0 else 1


@dataclass(frozen=True)
class TriangularKisin:
    """f upper-triangular d x d Frobenius matrices over k_E[u]/(u^N).

    ``t[i][s]`` is the weight of row i at component s and ``A[s]`` the matrix
    of component s.
    """

    F: GF = field(repr=False)
    t: tuple[tuple[int, ...], ...]
    a: tuple[int, ...]
    A: tuple = field(repr=False)

    def __post_init__(self):
        d, f = self.d, self.f
        if len(self.a) != d or len(self.A) != f:
            raise InvalidInput("inconsistent rank or number of components")
        for s, X in enumerate(self.A):
            if smat.shape(X) != (d, d):
                raise InvalidInput(f"A_{s} is not {d}x{d}")
            for i in range(d):
                for j in range(i):
                    if not X[i][j].is_zero():
                        raise InvalidInput(f"A_{s} has a nonzero entry below the diagonal at ({i},{j})")
                want = Series.monomial(self.F, self.N, self.t[i][s], component_unit(self.a[i], s))
                if X[i][i] != want:
                    raise InvalidInput(f"A_{s}[{i}][{i}] must be (a_{i})_{s} u^{self.t[i][s]}")

    @property
    def d(self) -> int:
        return len(self.t)

    @property
    def f(self) -> int:
        return len(self.t[0])

    @property
    def N(self) -> int:
        return self.A[0][0][0].N

    @classmethod
    def build(cls, F: GF, N: int, t: Sequence[Sequence[int]], a: Sequence[int],
              entries: dict | None = None) -> "TriangularKisin":
        """Diagonal from (t, a); ``entries`` maps (s, i, j) with i < j to a Series or coefficient list."""
        t = tuple(tuple(int(x) for x in row) for row in t)
        d, f = len(t), len(t[0])
        if any(x < 0 for row in t for x in row):
            raise InvalidInput("weights must be nonnegative")
        if max(x for row in t for x in row) >= N:
            raise InvalidInput(f"precision N={N} cannot hold weights {t}")
        entries = entries or {}
        mats = []
        for s in range(f):
            rows = []
            for i in range(d):
                row = []
                for j in range(d):
                    if i == j:
                        row.append(Series.monomial(F, N, t[i][s], component_unit(a[i], s)))
                    elif (s, i, j) in entries:
                        if i > j:
                            raise InvalidInput("entries below the diagonal are not allowed")
                        x = entries[(s, i, j)]
                        row.append(x if isinstance(x, Series) else Series.from_list(F, N, x))
                    else:
                        row.append(Series.zero(F, N))
                rows.append(tuple(row))
            mats.append(tuple(rows))
        return cls(F, t, tuple(a), tuple(mats))

    def rank1_rows(self) -> list[Rank1Kisin]:
        return [Rank1Kisin(self.t[i], self.a[i]) for i in range(self.d)]

    def entry(self, s: int, i: int, j: int) -> Series:
        return self.A[s][i][j]

    def with_matrices(self, mats) -> "TriangularKisin":
        return TriangularKisin(self.F, self.t, self.a, tuple(mats))

    def to_record(self) -> dict:
        return {"t": [list(r) for r in self.t], "a": [self.F.coords(x) for x in self.a],
                "A": [smat.to_record(X) for X in self.A]}


# --- shape predicates ---------------------------------------------------------------

@dataclass(frozen=True)
class ShapeClass:
    deg_ok: dict  # (s, i, j) -> bool, for i < j
    p_shape: dict  # (s, i, j) -> bool
    y_slots: tuple  # (s, i, j) with t_{j,s} > t_{i,s}: the free constants of (P)
    extra_term_slots: tuple  # (i, j, s0, degree) for i < j with a hom from row j to row i

    @property
    def all_deg(self) -> bool:
        return all(self.deg_ok.values())

    @property
    def all_p(self) -> bool:
        return all(self.p_shape.values())

    def to_record(self) -> dict:
        def flat(m):
            return [[s, i, j, v] for (s, i, j), v in sorted(m.items())]
        return {"deg_ok": flat(self.deg_ok), "p_shape": flat(self.p_shape),
                "all_deg": self.all_deg, "all_p": self.all_p,
                "y_slots": [list(x) for x in self.y_slots],
                "extra_term_slots": [[i, j, s, str(deg)] for i, j, s, deg in self.extra_term_slots]}


def entry_has_p_shape(x: Series, ti: int, tj: int, unit: int = 1) -> bool:
    """x = u^{ti} y with y constant when tj > ti; x = 0 otherwise."""
    if x.is_zero():
        return True
    if tj <= ti:
        return False
    return x.val() == ti and x.degree() == ti


def classify_shape(M: TriangularKisin, p: int) -> ShapeClass:
    deg_ok, p_shape, slots = {}, {}, []
    for s in range(M.f):
        for i, j in itertools.combinations(range(M.d), 2):
            x = M.entry(s, i, j)
            ti, tj = M.t[i][s], M.t[j][s]
            deg_ok[(s, i, j)] = x.degree() < tj
            p_shape[(s, i, j)] = entry_has_p_shape(x, ti, tj)
            if tj > ti:
                slots.append((s, i, j))
    rows = M.rank1_rows()
    extra = []
    for i, j in itertools.combinations(range(M.d), 2):
        if hom_exists(rows[j], rows[i], p):
            aj, ai = alpha_invariant(rows[j], p), alpha_invariant(rows[i], p)
            for s0 in range(M.f):
                extra.append((i, j, s0, M.t[j][s0] + aj[s0] - ai[s0]))
    return ShapeClass(deg_ok, p_shape, tuple(slots), tuple(extra))


def p_shape_constants(M: TriangularKisin) -> dict:
    """The constants y_{s,i,j} with x_{s,i,j} = (a_i)_s u^{t_{i,s}} y_{s,i,j}."""
    F = M.F
    out = {}
    for s in range(M.f):
        for i, j in itertools.combinations(range(M.d), 2):
            x = M.entry(s, i, j)
            if not x.is_zero():
                out[(s, i, j)] = F.div(x[M.t[i][s]], component_unit(M.a[i], s))
    return out


# --- allowable procedures ---------------------------------------------------------

@dataclass(frozen=True)
class AllowableMove:
    """Replace A_s by A_s (Id - c_s E_{ij}) in every component s."""

    i: int
    j: int
    c: tuple[int, ...]  # one scalar per component

    def inverse(self, F: GF) -> "AllowableMove":
        return AllowableMove(self.i, self.j, tuple(F.neg(x) for x in self.c))

    def to_record(self, F: GF) -> dict:
        return {"i": self.i, "j": self.j, "c": [F.coords(x) for x in self.c]}


def allowable_procedure(M: TriangularKisin, move: AllowableMove) -> TriangularKisin:
    """Column j of A_s loses c_s times column i; legal where t_{i,s} < t_{j,s}."""
    i, j = move.i, move.j
    if not (0 <= i < j < M.d) or len(move.c) != M.f:
        raise InvalidMove(f"bad indices or scalar count in {move}")
    F = M.F
    mats = []
    for s, X in enumerate(M.A):
        c = move.c[s]
        if c == 0:
            mats.append(X)
            continue
        if not M.t[i][s] < M.t[j][s]:
            raise InvalidMove(f"component {s}: need t_{i} < t_{j}, have {M.t[i][s]} >= {M.t[j][s]}")
        rows = [list(r) for r in X]
        for k in range(M.d):
            if not X[k][i].is_zero():
                rows[k][j] = rows[k][j] - X[k][i].scale(c)
        mats.append(tuple(tuple(r) for r in rows))
    return M.with_matrices(mats)


def normalize_to_diagonal(M: TriangularKisin, p: int) -> tuple[TriangularKisin, list[AllowableMove]]:
    """Clear column d-1 bottom-up, then column d-2, and so on, by allowable moves."""
    if not classify_shape(M, p).all_p:
        raise ShapeError("matrix does not have the (P) shape")
    F = M.F
    moves = []
    for j in range(M.d - 1, 0, -1):
        for i in range(j - 1, -1, -1):
            cs = []
            for s in range(M.f):
                x = M.entry(s, i, j)
                cs.append(0 if x.is_zero() else F.div(x[M.t[i][s]], component_unit(M.a[i], s)))
            if any(cs):
                mv = AllowableMove(i, j, tuple(cs))
                M = allowable_procedure(M, mv)
                moves.append(mv)
    return M, moves


def replay(M: TriangularKisin, moves: Sequence[AllowableMove]) -> TriangularKisin:
    for mv in moves:
        M = allowable_procedure(M, mv)
    return M


def undo(M: TriangularKisin, moves: Sequence[AllowableMove]) -> TriangularKisin:
    for mv in reversed(moves):
        M = allowable_procedure(M, mv.inverse(M.F))
    return M


def random_p_shape(rng: random.Random, F: GF, N: int, d: int, f: int, p: int) -> TriangularKisin:
    """A random module of (P) shape with weights in [0, p]."""
    t = [[rng.randint(0, p) for _ in range(f)] for _ in range(d)]
    a = [rng.choice(list(F.units())) for _ in range(d)]
    entries = {}
    for s in range(f):
        for i, j in itertools.combinations(range(d), 2):
            if t[j][s] > t[i][s]:
                y = rng.randrange(F.q)
                if y:
                    entries[(s, i, j)] = Series.monomial(F, N, t[i][s], F.mul(component_unit(a[i], s), y))
    return TriangularKisin.build(F, N, t, a, entries)


# --- column divisibility and the shape lemma ----------------------------------

def column_divisibility(X, A: Sequence[Sequence[int]], t: Sequence[int]) -> list[bool]:
    """Entry i is True iff every entry of column i of X A has valuation >= t_i."""
    d = len(X)
    F, N = X[0][0].field, X[0][0].N
    if mat_rank(F, A) < d:
        raise InvalidInput("A is singular")
    XA = smat.mul(X, smat.scalar_matrix(F, N, A))
    return [all(XA[k][i].val() >= t[i] for k in range(d)) for i in range(d)]


def _lemma_matrix(F: GF, N: int, t: Sequence[int], coeffs: dict) -> tuple:
    d = len(t)
    rows = []
    for i in range(d):
        row = []
        for j in range(d):
            if i == j:
                row.append(Series.monomial(F, N, t[i], 1))
            elif i < j:
                row.append(Series.from_list(F, N, coeffs.get((i, j), ())))
            else:
                row.append(Series.zero(F, N))
        rows.append(tuple(row))
    return tuple(rows)


def lemma_matrix_has_p(X, t: Sequence[int]) -> bool:
    d = len(t)
    return all(entry_has_p_shape(X[i][j], t[i], t[j]) for i, j in itertools.combinations(range(d), 2))


def divisibility_subspaces(F: GF, X, t: Sequence[int]) -> list[list[dict]]:
    """For each i a basis of V_i = {v in k_E^d : val(X v) >= t_i}."""
    d = len(t)
    out = []
    for ti in t:
        images = []
        for c in range(d):
            vec = {}
            for k in range(d):
                x = X[k][c]
                for deg in range(min(ti, x.N)):
                    if x[deg]:
                        vec[(k, deg)] = x[deg]
            images.append(vec)
        out.append(nullspace(F, images))
    return out


def _span_rank(F: GF, vectors: list[dict]) -> int:
    from .linalg import rank
    return rank(F, vectors)


def transversal_exists(F: GF, spaces: list[list[dict]]) -> bool:
    """Can one pick v_i in V_i forming a basis?  Rado: dim(sum_{i in S} V_i) >= |S| for all S."""
    d = len(spaces)
    for size in range(1, d + 1):
        for S in itertools.combinations(range(d), size):
            vecs = [v for i in S for v in spaces[i]]
            if _span_rank(F, vecs) < size:
                return False
    return True


def find_transversal(F: GF, spaces: list[list[dict]], d: int) -> list[list[int]] | None:
    """An invertible A whose column i lies in V_i, by enumerating each V_i."""
    def members(basis):
        for coeffs in itertools.product(range(F.q), repeat=len(basis)):
            v = [0] * d
            for c, b in zip(coeffs, basis):
                for k, x in b.items():
                    v[k] = F.add(v[k], F.mul(c, x))
            if any(v):
                yield v
    for cols in itertools.product(*(list(members(b)) for b in spaces)):
        A = [[cols[c][r] for c in range(d)] for r in range(d)]
        if mat_rank(F, A) == d:
            return A
    return None


def general_linear_group(F: GF, d: int):
    for entries in itertools.product(range(F.q), repeat=d * d):
        A = [list(entries[r * d:(r + 1) * d]) for r in range(d)]
        if mat_rank(F, A) == d:
            yield A


@dataclass
class ShapeLemmaReport:
    config: dict
    mode: str
    trials: int = 0
    hypothesis_hits: int = 0  # X for which some A satisfies the divisibility hypothesis
    pairs_checked: int = 0  # (X, A) pairs examined directly (brute / random modes)
    counterexamples: list = field(default_factory=list)
    tags: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def to_record(self) -> dict:
        return {"config": self.config, "mode": self.mode, "trials": self.trials,
                "hypothesis_hits": self.hypothesis_hits, "pairs_checked": self.pairs_checked,
                "counterexamples": self.counterexamples, "tags": sorted(self.tags)}


def sublemma_tags(t: Sequence[int]) -> list[str]:
    tags = []
    if len(t) > 1 and t[-1] == max(t):
        tags.append("last_weight_maximal")
    if len(t) > 1 and t[0] == max(t):
        tags.append("first_weight_maximal")
    return tags


def _coefficient_slots(t: Sequence[int]) -> list[tuple[int, int, int]]:
    return [(i, j, k) for i, j in itertools.combinations(range(len(t)), 2) for k in range(t[j])]


def _deg_matrices(F: GF, N: int, t: Sequence[int]):
    slots = _coefficient_slots(t)
    for values in itertools.product(range(F.q), repeat=len(slots)):
        coeffs: dict = {}
        for (i, j, k), v in zip(slots, values):
            coeffs.setdefault((i, j), [0] * t[j])[k] = v
        yield coeffs


def _record_x(F: GF, coeffs: dict) -> dict:
    return {f"{i},{j}": [F.coords(c) for c in cs] for (i, j), cs in sorted(coeffs.items())}


def shapelemma_verify(F: GF, t: Sequence[int], mode: str = "exhaustive", *, trials: int = 10_000,
                      seed: int = 0, budget: int = 1_000_000) -> ShapeLemmaReport:
    """Search for (X, A) meeting the divisibility hypothesis while X lacks the (P) shape.

    exhaustive: every X with (DEG); for each, the A with u^{t_i} | col_i(XA) are
        exactly the invertible matrices whose column i lies in the linear space V_i,
        so a counterexample exists iff X lacks (P) and such a transversal exists.
    brute: every X with (DEG) against every A in GL_d(k_E), checked directly.
    random: ``trials`` random X (half with a perturbed (P) shape, half with free
        (DEG) coefficients), each tested by the subspace criterion and against
        one random A directly.
    """
    t = tuple(int(x) for x in t)
    d, p = len(t), F.p
    if len(set(t)) != d or min(t, default=0) < 0 or max(t, default=0) > p:
        raise InvalidInput(f"weights must be distinct integers in [0, {p}]: {t}")
    N = p * d + 1
    report = ShapeLemmaReport({"p": p, "q": F.q, "d": d, "t": list(t)}, mode, tags=sublemma_tags(t))
    if d <= 1:
        return report

    def check(coeffs: dict, direct_A=None):
        X = _lemma_matrix(F, N, t, coeffs)
        has_p = lemma_matrix_has_p(X, t)
        spaces = divisibility_subspaces(F, X, t)
        exists = transversal_exists(F, spaces)
        if exists:
            report.hypothesis_hits += 1
        if direct_A is not None:
            for A in direct_A:
                report.pairs_checked += 1
                if all(column_divisibility(X, A, t)):
                    if not exists:
                        raise AssertionError("subspace criterion missed a valid A")
                    if not has_p:
                        report.counterexamples.append({"X": _record_x(F, coeffs), "A": A})
            return
        if exists and not has_p:
            A = find_transversal(F, spaces, d)
            report.counterexamples.append({"X": _record_x(F, coeffs), "A": A})

    if mode in ("exhaustive", "brute"):
        size = F.q ** len(_coefficient_slots(t))
        group = list(general_linear_group(F, d)) if mode == "brute" else None
        cost = size * (len(group) if group else 1)
        if cost > budget:
            raise BudgetError(f"{cost} checks exceed the budget of {budget}",
                              coverage={"planned": cost, "checked": 0, "budget": budget})
        if group is not None:
            report.config["group_order"] = len(group)
        for coeffs in _deg_matrices(F, N, t):
            report.trials += 1
            check(coeffs, group)
        return report

    if mode != "random":
        raise InvalidInput(f"unknown mode {mode!r}")
    if trials > budget:
        raise BudgetError(f"{trials} trials exceed the budget of {budget}",
                          coverage={"planned": trials, "checked": 0, "budget": budget})
    rng = random.Random(seed)
    report.config["seed"] = seed
    units = list(F.units())
    for n in range(trials):
        coeffs: dict = {}
        for i, j in itertools.combinations(range(d), 2):
            cs = [0] * t[j]
            if n % 2 == 0:
                cs = [rng.randrange(F.q) for _ in range(t[j])]
            elif t[j] > t[i]:
                cs[t[i]] = rng.randrange(F.q)
            coeffs[(i, j)] = cs
        if n % 2 == 1:
            # perturb one coefficient of the (P)-shaped matrix
            slots = _coefficient_slots(t)
            if slots:
                i, j, k = rng.choice(slots)
                coeffs[(i, j)][k] = F.add(coeffs[(i, j)][k], rng.choice(units))
        while True:
            A = [[rng.randrange(F.q) for _ in range(d)] for _ in range(d)]
            if mat_rank(F, A) == d:
                break
        report.trials += 1
        check(coeffs, None)
        X = _lemma_matrix(F, N, t, coeffs)
        report.pairs_checked += 1
        if all(column_divisibility(X, A, t)) and not lemma_matrix_has_p(X, t):
            report.counterexamples.append({"X": _record_x(F, coeffs), "A": A})
    return report


# --- diagonal recovery from M = B D A ------------------------------------------------

def upper_triangularize(M) -> tuple[tuple, list[int]]:
    """Row operations over k_E[[u]] making M upper triangular.

    Returns the reduced matrix and its diagonal valuations.  Each elimination
    divides by a pivot of valuation v, which leaves only N - v coefficients
    trusted afterwards; a pivot whose valuation reaches the trusted precision
    raises PrecisionError.
    """
    d = len(M)
    rows = [list(r) for r in M]
    prec = M[0][0].N
    diag = []
    for c in range(d):
        best, best_val = None, INF
        for r in range(c, d):
            v = rows[r][c].val()
            if v < best_val:
                best, best_val = r, v
        if best is None or best_val >= prec:
            raise PrecisionError(f"column {c} is zero to the trusted precision {prec}")
        diag.append(best_val)
        rows[c], rows[best] = rows[best], rows[c]
        unit_inv = rows[c][c].divide_u(best_val).inverse()
        eliminated = False
        for r in range(c + 1, d):
            x = rows[r][c]
            if x.is_zero():
                continue
            factor = x.divide_u(best_val) * unit_inv
            rows[r] = [y - factor * z for y, z in zip(rows[r], rows[c])]
            eliminated = True
        if eliminated:
            prec -= best_val
    return tuple(tuple(r) for r in rows), diag


def _check_phi_image(A, p: int) -> bool:
    return all(x[k] == 0 for row in A for x in row for k in range(x.N) if k % p)


def diag_recovery_check(B, r: Sequence[int], A, p: int) -> bool:
    """M = B diag(u^{r_i}) A; the diagonal exponents of a triangular form of M are the r_i.

    If M is already upper triangular its own diagonal is read; otherwise M is
    brought to triangular form by invertible row operations, which keeps the
    shape M = B' D A.
    """
    d = len(B)
    F, N = B[0][0].field, B[0][0].N
    r = tuple(int(x) for x in r)
    if list(r) != sorted(r) or (r and (r[0] < 0 or r[-1] > p)):
        raise InvalidInput(f"r must satisfy 0 <= r_1 <= ... <= r_d <= p: {r}")
    if smat.det(B).val() != 0:
        raise InvalidInput("B is not invertible over k_E[[u]]")
    if smat.det(A).val() != 0 or not _check_phi_image(A, p):
        raise InvalidInput("A must be invertible with entries in k_E[[u^p]]")
    D = tuple(tuple(Series.monomial(F, N, r[i], 1) if i == j else Series.zero(F, N)
                    for j in range(d)) for i in range(d))
    M = smat.mul(smat.mul(B, D), A)
    if smat.is_upper_triangular(M):
        diag = [M[i][i].val() for i in range(d)]
        if any(v >= N for v in diag):
            raise PrecisionError(f"diagonal valuations {diag} reach the precision {N}")
    else:
        _, diag = upper_triangularize(M)
    return sorted(diag) == list(r)


def random_unit_matrix(rng: random.Random, F: GF, N: int, d: int, p: int | None = None):
    """Random matrix with unit determinant; with p given, entries lie in k_E[[u^p]]."""
    while True:
        rows = []
        for _ in range(d):
            row = []
            for _ in range(d):
                cs = [0] * N
                for k in range(N):
                    if p is None or k % p == 0:
                        cs[k] = rng.randrange(F.q)
                row.append(Series(F, tuple(cs)))
            rows.append(tuple(row))
        M = tuple(rows)
        if smat.det(M).val() == 0:
            return M
