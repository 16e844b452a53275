"""Extensions of torsion Kisin modules at the level of Frobenius matrices.

An extension of ``quot`` (rank k') by ``sub`` (rank k) has Frobenius matrices
[[A_s, C_s], [0, A'_s]].  Two choices C, C' give the same class when
C - C' = L(W) with L(W)_s = W_s A'_s - A_s phi(W_{s-1}) for some W over
k_E[[u]].  All computations run modulo u^N; dimensions are certified by
repeating them at a larger precision.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from . import smat
from .errors import HypothesisError, InvalidInput, PrecisionError, ShapeError
from .field_core import GF, Series
from .linalg import Echelon, TrackedEchelon, nullspace
from .rank1 import Rank1Kisin, hom_exists
from .shape import TriangularKisin, classify_shape

SHAPE_TAGS = ("raw", "ext_shape", "phi_shape")


@dataclass(frozen=True)
class ExtProblem:
    sub: TriangularKisin
    quot: TriangularKisin
    r: int | None = None  # height; defaults to p

    def __post_init__(self):
        if self.sub.F != self.quot.F or self.sub.f != self.quot.f:
            raise InvalidInput("sub and quotient live over different data")
        if self.r is None:
            object.__setattr__(self, "r", self.F.p)

    @property
    def F(self) -> GF:
        return self.sub.F

    @property
    def p(self) -> int:
        return self.F.p

    @property
    def f(self) -> int:
        return self.sub.f

    @property
    def k(self) -> int:
        return self.sub.d

    @property
    def k2(self) -> int:
        return self.quot.d

    @property
    def d(self) -> int:
        return self.k + self.k2

    def default_N(self) -> int:
        return self.p * self.d * (self.p + 1)

    def to_record(self) -> dict:
        return {"sub": self.sub.to_record(), "quot": self.quot.to_record(), "r": self.r}


@dataclass(frozen=True)
class ExtClass:
    C: tuple  # one k x k' SMatrix per component
    shape_tag: str = "raw"

    def __post_init__(self):
        if self.shape_tag not in SHAPE_TAGS:
            raise InvalidInput(f"unknown shape tag {self.shape_tag!r}")

    def to_record(self) -> dict:
        return {"shape_tag": self.shape_tag, "C": [smat.to_record(X) for X in self.C]}


@dataclass(frozen=True)
class EquivWitness:
    W: tuple
    precision: int

    def to_record(self) -> dict:
        return {"precision": self.precision, "W": [smat.to_record(X) for X in self.W]}


def _check_dims(problem: ExtProblem, mats: Sequence, what: str):
    if len(mats) != problem.f:
        raise InvalidInput(f"{what} needs {problem.f} components, got {len(mats)}")
    for s, X in enumerate(mats):
        if smat.shape(X) != (problem.k, problem.k2):
            raise InvalidInput(f"{what}_{s} has shape {smat.shape(X)}, expected {(problem.k, problem.k2)}")


def _at_precision(X, N: int):
    F = X[0][0].field if X and X[0] else None
    return tuple(tuple(Series.from_list(F, N, x.coeffs) for x in row) for row in X)


def block_basis_change(problem: ExtProblem, C: Sequence, W: Sequence) -> tuple:
    """C_s + A_s phi(W_{s-1}) - W_s A'_s for every component s."""
    _check_dims(problem, C, "C")
    _check_dims(problem, W, "W")
    f = problem.f
    N = C[0][0][0].N
    out = []
    for s in range(f):
        A = _at_precision(problem.sub.A[s], N)
        A2 = _at_precision(problem.quot.A[s], N)
        term = smat.add(C[s], smat.mul(A, smat.phi(W[(s - 1) % f])))
        out.append(smat.sub(term, smat.mul(W[s], A2)))
    return tuple(out)


def block_matrix(problem: ExtProblem, C: Sequence, s: int, N: int):
    k, k2 = problem.k, problem.k2
    F = problem.F
    A = _at_precision(problem.sub.A[s], N)
    A2 = _at_precision(problem.quot.A[s], N)
    z = Series.zero(F, N)
    rows = []
    for i in range(k + k2):
        row = []
        for j in range(k + k2):
            if i < k and j < k:
                row.append(A[i][j])
            elif i < k:
                row.append(C[s][i][j - k])
            elif j >= k:
                row.append(A2[i - k][j - k])
            else:
                row.append(z)
        rows.append(tuple(row))
    return tuple(rows)


def conjugation_oracle(problem: ExtProblem, C: Sequence, W: Sequence) -> tuple:
    """Upper-right block of [[Id, -W_s], [0, Id]] [[A_s, C_s], [0, A'_s]] [[Id, phi(W_{s-1})], [0, Id]]."""
    f, k, k2 = problem.f, problem.k, problem.k2
    F = problem.F
    N = C[0][0][0].N
    one, z = Series.one(F, N), Series.zero(F, N)
    out = []
    for s in range(f):
        left, right = [], []
        phiW = smat.phi(W[(s - 1) % f])
        for i in range(k + k2):
            lrow, rrow = [], []
            for j in range(k + k2):
                if i == j:
                    lrow.append(one)
                    rrow.append(one)
                elif i < k <= j:
                    lrow.append(-W[s][i][j - k])
                    rrow.append(phiW[i][j - k])
                else:
                    lrow.append(z)
                    rrow.append(z)
            left.append(tuple(lrow))
            right.append(tuple(rrow))
        P = smat.mul(smat.mul(tuple(left), block_matrix(problem, C, s, N)), tuple(right))
        out.append(tuple(tuple(P[i][k + j] for j in range(k2)) for i in range(k)))
    return tuple(out)


# --- coordinates -----------------------------------------------------------------

class _Coords:
    """Index (s, i, j, deg) <-> int for k x k' matrices with entries mod u^N."""

    def __init__(self, f: int, k: int, k2: int, N: int):
        self.f, self.k, self.k2, self.N = f, k, k2, N

    def index(self, s: int, i: int, j: int, deg: int) -> int:
        return ((s * self.k + i) * self.k2 + j) * self.N + deg

    def unpack(self, idx: int) -> tuple[int, int, int, int]:
        idx, deg = divmod(idx, self.N)
        idx, j = divmod(idx, self.k2)
        s, i = divmod(idx, self.k)
        return s, i, j, deg

    def vector(self, C: Sequence) -> dict:
        out = {}
        for s, X in enumerate(C):
            for i, row in enumerate(X):
                for j, x in enumerate(row):
                    for deg in range(min(self.N, x.N)):
                        if x[deg]:
                            out[self.index(s, i, j, deg)] = x[deg]
        return out

    def matrices(self, F: GF, vec: dict, N: int | None = None) -> tuple:
        N = N or self.N
        cs = [[[[0] * N for _ in range(self.k2)] for _ in range(self.k)] for _ in range(self.f)]
        for idx, c in vec.items():
            s, i, j, deg = self.unpack(idx)
            if deg < N:
                cs[s][i][j][deg] = c
        return tuple(tuple(tuple(Series(F, tuple(e)) for e in row) for row in X) for X in cs)


def _poly(x: Series) -> list[tuple[int, int]]:
    return [(deg, c) for deg, c in enumerate(x.coeffs) if c]


class _ImageMap:
    """The linear map W -> L(W) on coefficient vectors modulo u^N."""

    def __init__(self, problem: ExtProblem, N: int):
        self.problem = problem
        self.N = N
        self.coords = _Coords(problem.f, problem.k, problem.k2, N)
        self.A = [[[_poly(x) for x in row] for row in X] for X in problem.sub.A]
        self.A2 = [[[_poly(x) for x in row] for row in X] for X in problem.quot.A]

    def image_of_unit(self, s: int, i: int, j: int, e: int) -> dict:
        """L(W) for W equal to u^e at entry (i, j) of component s and zero elsewhere."""
        pb = self.problem
        F, N, p, f = pb.F, self.N, pb.p, pb.f
        idx = self.coords.index
        out: dict = {}

        def put(key, c):
            v = F.add(out.get(key, 0), c)
            if v:
                out[key] = v
            else:
                out.pop(key, None)

        # W_s A'_s: row i of the result gains u^e times row j of A'_s
        for j2 in range(pb.k2):
            for deg, c in self.A2[s][j][j2]:
                if e + deg < N:
                    put(idx(s, i, j2, e + deg), c)
        # - A_{s+1} phi(W_s): column j gains -u^{pe} times column i of A_{s+1}
        s1 = (s + 1) % f
        for i2 in range(pb.k):
            for deg, c in self.A[s1][i2][i]:
                if p * e + deg < N:
                    put(idx(s1, i2, j, p * e + deg), F.neg(c))
        return out

    def generators(self, degree_bound: int | None = None):
        pb = self.problem
        bound = min(self.N, degree_bound or self.N)
        for s in range(pb.f):
            for i in range(pb.k):
                for j in range(pb.k2):
                    for e in range(bound):
                        yield (s, i, j, e), self.image_of_unit(s, i, j, e)

    def apply(self, W: Sequence) -> dict:
        F = self.problem.F
        out: dict = {}
        for s, X in enumerate(W):
            for i, row in enumerate(X):
                for j, x in enumerate(row):
                    for e in range(min(x.N, self.N)):
                        if x[e]:
                            img = self.image_of_unit(s, i, j, e)
                            for key, c in img.items():
                                v = F.add(out.get(key, 0), F.mul(x[e], c))
                                if v:
                                    out[key] = v
                                else:
                                    out.pop(key, None)
        return out


def image_map(problem: ExtProblem, W: Sequence, N: int) -> tuple:
    """L(W) as matrices modulo u^N."""
    m = _ImageMap(problem, N)
    return m.coords.matrices(problem.F, m.apply(W))


# --- solving --------------------------------------------------------------------

def semilinear_solve(problem: ExtProblem, C_target: Sequence, W_degree_bound: int,
                     N: int | None = None) -> EquivWitness | None:
    """W with entry degrees < bound and C_target = W_s A'_s - A_s phi(W_{s-1}) mod u^N.

    Returns None if no such W exists at the bound nor at twice the bound;
    raises PrecisionError if one appears only at the larger bound.
    """
    _check_dims(problem, C_target, "C")
    N = N or problem.default_N()
    if W_degree_bound > N:
        raise InvalidInput(f"degree bound {W_degree_bound} exceeds the precision {N}")
    m = _ImageMap(problem, N)
    target = m.coords.vector(C_target)

    def attempt(bound: int):
        ech = TrackedEchelon(problem.F)
        for label, vec in m.generators(bound):
            ech.insert_labelled(vec, label)
        return ech.solve(target)

    combo = attempt(W_degree_bound)
    if combo is None:
        wider = min(2 * W_degree_bound, N)
        if wider > W_degree_bound and attempt(wider) is not None:
            raise PrecisionError(
                f"target becomes reachable only with degree bound {wider} (asked {W_degree_bound})")
        return None
    F = problem.F
    cs = [[[[0] * N for _ in range(problem.k2)] for _ in range(problem.k)] for _ in range(problem.f)]
    for (s, i, j, e), c in combo.items():
        cs[s][i][j][e] = c
    W = tuple(tuple(tuple(Series(F, tuple(x)) for x in row) for row in X) for X in cs)
    return EquivWitness(W, N)


def equivalent(problem: ExtProblem, C1: Sequence, C2: Sequence, W_degree_bound: int | None = None,
               N: int | None = None) -> EquivWitness | None:
    """A witness W with C1 - C2 = W A' - A phi(W), or None."""
    N = N or problem.default_N()
    diff = tuple(smat.sub(_at_precision(x, N), _at_precision(y, N)) for x, y in zip(C1, C2))
    return semilinear_solve(problem, diff, W_degree_bound or N, N)


# --- shaped class spaces ------------------------------------------------------------

def raw_degree(problem: ExtProblem) -> int:
    tmax = max(max(r) for r in problem.sub.t + problem.quot.t)
    return tmax + problem.p


def _shape_basis(problem: ExtProblem, tag: str, coords: _Coords, raw_deg: int | None) -> list[dict]:
    pb = problem
    out = []
    for s in range(pb.f):
        for i in range(pb.k):
            for j in range(pb.k2):
                ti, tj = pb.sub.t[i][s], pb.quot.t[j][s]
                if tag == "phi_shape":
                    degs = [ti] if tj > ti else []
                elif tag == "ext_shape":
                    degs = range(tj)
                else:
                    degs = range(raw_deg if raw_deg is not None else raw_degree(pb))
                for deg in degs:
                    if deg >= coords.N:
                        raise PrecisionError(f"precision {coords.N} cannot hold degree {deg}")
                    out.append({coords.index(s, i, j, deg): 1})
    return out


def _height_constraints(problem: ExtProblem, coords: _Coords, basis: list[dict]) -> list[dict]:
    """Images of the basis under C -> low coefficients of adj(A) C adj(A')."""
    pb = problem
    F, N = pb.F, coords.N
    adjA, adjA2, thresholds = [], [], []
    for s in range(pb.f):
        A = _at_precision(pb.sub.A[s], N)
        A2 = _at_precision(pb.quot.A[s], N)
        adjA.append(smat.adjugate(A))
        adjA2.append(smat.adjugate(A2))
        T = sum(pb.sub.t[i][s] for i in range(pb.k))
        T2 = sum(pb.quot.t[j][s] for j in range(pb.k2))
        thresholds.append(T + T2 - pb.r)
    out = []
    for vec in basis:
        C = coords.matrices(F, vec)
        img = {}
        for s in range(pb.f):
            if thresholds[s] <= 0:
                continue
            P = smat.mul(smat.mul(adjA[s], C[s]), adjA2[s])
            for i in range(pb.k):
                for j in range(pb.k2):
                    x = P[i][j]
                    for deg in range(min(thresholds[s], N)):
                        if x[deg]:
                            img[(s, i, j, deg)] = x[deg]
        out.append(img)
    return out


def check_height(problem: ExtProblem):
    """The sub and quotient themselves must have height <= r."""
    for name, M in (("sub", problem.sub), ("quot", problem.quot)):
        N = M.N
        for s, A in enumerate(M.A):
            T = sum(M.t[i][s] for i in range(M.d))
            adj = smat.adjugate(A)
            if any(x.val() < T - problem.r for row in adj for x in row):
                raise InvalidInput(f"{name} component {s} has height above r={problem.r}")


def class_space(problem: ExtProblem, tag: str, N: int, raw_deg: int | None = None) -> list[dict]:
    """Basis (as coefficient vectors mod u^N) of the shaped C space meeting the height condition."""
    if tag not in SHAPE_TAGS:
        raise InvalidInput(f"unknown shape tag {tag!r}")
    if tag == "phi_shape":
        for M in (problem.sub, problem.quot):
            if not classify_shape(M, problem.p).all_p:
                raise ShapeError("phi_shape classes need sub and quotient of (P) shape")
    coords = _Coords(problem.f, problem.k, problem.k2, N)
    basis = _shape_basis(problem, tag, coords, raw_deg)
    constraints = _height_constraints(problem, coords, basis)
    kernel = nullspace(problem.F, constraints)
    F = problem.F
    out = []
    for combo in kernel:
        v: dict = {}
        for idx, c in combo.items():
            for key, x in basis[idx].items():
                w = F.add(v.get(key, 0), F.mul(c, x))
                if w:
                    v[key] = w
                else:
                    v.pop(key, None)
        out.append(v)
    return out


@dataclass
class ExtDimResult:
    dim: int
    shape_tag: str
    N: int
    N_check: int
    dim_check: int
    space_dim: int
    representatives: list = field(default_factory=list)  # ExtClass list

    @property
    def stable(self) -> bool:
        return self.dim == self.dim_check

    def to_record(self) -> dict:
        return {"dim": self.dim, "shape_tag": self.shape_tag, "space_dim": self.space_dim,
                "certificate": {"N": self.N, "N_check": self.N_check, "dim_check": self.dim_check,
                                "stable": self.stable},
                "representatives": [c.to_record() for c in self.representatives]}


def _dim_at(problem: ExtProblem, tag: str, N: int, raw_deg: int | None):
    space = class_space(problem, tag, N, raw_deg)
    if not space:
        return 0, [], 0
    ech = Echelon(problem.F)
    for _, vec in _ImageMap(problem, N).generators():
        ech.insert(vec)
    reps = []
    for v in space:
        if ech.insert(v) is not None:
            reps.append(v)
    return len(reps), reps, len(space)


def ext_dim(problem: ExtProblem, shape_tag: str = "phi_shape", N: int | None = None,
            precision_step: int | None = None, raw_deg: int | None = None) -> ExtDimResult:
    """dim of (shaped C space) / (its intersection with the image of L), certified.

    The dimension is computed at N and again at N + precision_step (default 2N);
    disagreement raises PrecisionError.
    """
    N = N or problem.default_N()
    N2 = N + (precision_step or N)
    dim, reps, space_dim = _dim_at(problem, shape_tag, N, raw_deg)
    dim2, _, _ = _dim_at(problem, shape_tag, N2, raw_deg)
    result = ExtDimResult(dim, shape_tag, N, N2, dim2, space_dim)
    if dim != dim2:
        raise PrecisionError(f"ext dimension {dim} at N={N} but {dim2} at N={N2}")
    coords = _Coords(problem.f, problem.k, problem.k2, N)
    result.representatives = [ExtClass(coords.matrices(problem.F, v), shape_tag) for v in reps]
    return result


# --- the dimension bound -----------------------------------------------------------

def d_nek(sub_weights: Sequence[int], quot_weights: Sequence[Sequence[int]]) -> int:
    """#{(i, s) : t_{i,s} > t_{1,s}} over the quotient rows i."""
    return sum(1 for row in quot_weights for s, x in enumerate(row) if x > sub_weights[s])


def hom_obstructions(rows: Sequence[Rank1Kisin], p: int) -> list[tuple[int, int]]:
    """Pairs (i, j), i < j, with a nonzero morphism from row j to row i."""
    return [(i, j) for i, j in itertools.combinations(range(len(rows)), 2)
            if hom_exists(rows[j], rows[i], p)]


@dataclass
class BoundReport:
    ext_dim: int
    d_nek: int
    certificate: dict

    @property
    def holds(self) -> bool:
        return self.ext_dim <= self.d_nek

    def to_record(self) -> dict:
        return {"ext_dim": self.ext_dim, "d_nek": self.d_nek, "holds": self.holds,
                "certificate": self.certificate}


def check_upper_bound(problem: ExtProblem, N: int | None = None,
                      precision_step: int | None = None) -> BoundReport:
    """ext_dim(phi_shape) <= d_nek for a rank-one sub; needs no homs n_j -> n_i for i < j."""
    if problem.k != 1:
        raise InvalidInput("the bound concerns a rank-one sub")
    rows = problem.sub.rank1_rows() + problem.quot.rank1_rows()
    bad = hom_obstructions(rows, problem.p)
    if bad:
        raise HypothesisError(f"nonzero morphisms between rows {bad}; the bound is not asserted")
    res = ext_dim(problem, "phi_shape", N, precision_step)
    bound = d_nek(problem.sub.t[0], problem.quot.t)
    cert = {"N": res.N, "N_check": res.N_check, "dim_check": res.dim_check, "stable": res.stable}
    return BoundReport(res.dim, bound, cert)


# --- successive extensions -----------------------------------------------------------

def successive_ext_assemble(F: GF, N: int, chain: Sequence[Rank1Kisin],
                            classes: Sequence[ExtClass]) -> TriangularKisin:
    """Stack rank-one modules n_1, ..., n_d with classes[i] extending n_{i+2} by the first i+1.

    classes[i].C[s] is an (i+1) x 1 matrix: column i+1 of A_s above the diagonal.
    """
    d = len(chain)
    if len(classes) != d - 1:
        raise InvalidInput(f"{d} rank-one modules need {d - 1} classes, got {len(classes)}")
    f = chain[0].f
    entries = {}
    for n, cls in enumerate(classes):
        if len(cls.C) != f:
            raise InvalidInput(f"class {n} has {len(cls.C)} components, expected {f}")
        for s, X in enumerate(cls.C):
            if smat.shape(X) != (n + 1, 1):
                raise InvalidInput(f"class {n} component {s} must be {(n + 1)}x1")
            for i in range(n + 1):
                entries[(s, i, n + 1)] = Series.from_list(F, N, X[i][0].coeffs)
    return TriangularKisin.build(F, N, [c.t for c in chain], [c.a for c in chain], entries)


def decompose(M: TriangularKisin, shape_tag: str = "raw") -> tuple[list[Rank1Kisin], list[ExtClass]]:
    """The forgetful map back to (rank-one chain, successive classes)."""
    chain = M.rank1_rows()
    classes = []
    for n in range(1, M.d):
        C = tuple(tuple((M.A[s][i][n],) for i in range(n)) for s in range(M.f))
        classes.append(ExtClass(C, shape_tag))
    return chain, classes


def sub_quot_split(M: TriangularKisin, k: int) -> tuple[TriangularKisin, TriangularKisin, tuple]:
    """Split a triangular module into its top-left rank-k sub, the quotient and the C block."""
    sub = TriangularKisin(M.F, M.t[:k], M.a[:k], tuple(tuple(r[:k] for r in X[:k]) for X in M.A))
    quot = TriangularKisin(M.F, M.t[k:], M.a[k:], tuple(tuple(r[k:] for r in X[k:]) for X in M.A))
    C = tuple(tuple(r[k:] for r in X[:k]) for X in M.A)
    return sub, quot, C


# --- instance generation ----------------------------------------------------------

def random_triangular(rng: random.Random, F: GF, N: int, d: int, f: int, p: int,
                      max_deg: int | None = None) -> TriangularKisin:
    t = [[rng.randint(0, p) for _ in range(f)] for _ in range(d)]
    a = [rng.choice(list(F.units())) for _ in range(d)]
    entries = {}
    for s in range(f):
        for i, j in itertools.combinations(range(d), 2):
            deg = max_deg if max_deg is not None else p
            entries[(s, i, j)] = [rng.randrange(F.q) for _ in range(deg + 1)]
    return TriangularKisin.build(F, N, t, a, entries)


def random_matrices(rng: random.Random, F: GF, N: int, f: int, rows: int, cols: int, deg: int) -> tuple:
    return tuple(tuple(tuple(Series.from_list(F, N, [rng.randrange(F.q) for _ in range(deg + 1)])
                             for _ in range(cols)) for _ in range(rows)) for _ in range(f))


def bound_instances(F: GF, p: int, f: int, d: int, N: int):
    """Every rank-one-sub problem of rank d with weights in [0, p], units in k_E^x,
    and (P)-shaped quotient constants, skipping those with a hom between rows."""
    units = list(F.units())
    for tflat in itertools.product(range(p + 1), repeat=d * f):
        t = [tflat[i * f:(i + 1) * f] for i in range(d)]
        for a in itertools.product(units, repeat=d):
            rows = [Rank1Kisin(t[i], a[i]) for i in range(d)]
            if hom_obstructions(rows, p):
                continue
            slots = [(s, i, j) for s in range(f) for i, j in itertools.combinations(range(1, d), 2)
                     if t[j][s] > t[i][s]]
            for ys in itertools.product(range(F.q), repeat=len(slots)):
                entries = {}
                for (s, i, j), y in zip(slots, ys):
                    if y:
                        unit = a[i] if s == 0 else 1
                        entries[(s, i - 1, j - 1)] = Series.monomial(F, N, t[i][s], F.mul(unit, y))
                sub = TriangularKisin.build(F, N, t[:1], a[:1])
                quot = TriangularKisin.build(F, N, t[1:], a[1:], entries)
                yield ExtProblem(sub, quot)
