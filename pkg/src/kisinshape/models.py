"""Weight templates, models, Condition (C-1) and partial line swaps.

A model is a d x f integer matrix whose column s is a permutation of the
weight set h_s and whose row i has inertia residue e_i.  Units never constrain
a model (each row may carry whatever unit its character needs), so only the
residues of the ``CharClass`` list enter the enumeration.

The partial-line-swap machinery is experimental: the combinatorics it encodes
were never published in final form, so every swap result is re-validated.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidInput, InvalidMove
from .rank1 import weight_residue

Model = tuple  # tuple of d rows, each a tuple of f ints


@dataclass(frozen=True)
class CharClass:
    """A character G_K -> k_E^x by its inertia exponent e and unramified unit a."""

    e: int
    a: int = 1

    def reduced(self, p: int, f: int) -> "CharClass":
        return CharClass(self.e % (p**f - 1), self.a)


@dataclass(frozen=True)
class WeightTemplate:
    h: tuple[tuple[int, ...], ...]  # one sorted tuple of d distinct weights per embedding

    def __post_init__(self):
        h = tuple(tuple(sorted(int(x) for x in col)) for col in self.h)
        object.__setattr__(self, "h", h)
        if not h:
            raise InvalidInput("template needs at least one embedding")
        d = len(h[0])
        for s, col in enumerate(h):
            if len(col) != d:
                raise InvalidInput(f"column {s} has {len(col)} weights, expected {d}")
            if len(set(col)) != d:
                raise InvalidInput(f"column {s} repeats a weight: {col}")

    @property
    def f(self) -> int:
        return len(self.h)

    @property
    def d(self) -> int:
        return len(self.h[0])

    def check_range(self, p: int):
        for s, col in enumerate(self.h):
            if col[0] < 0 or col[-1] > p:
                raise InvalidInput(f"column {s} leaves [0, {p}]: {col}")

    def normalized(self) -> "WeightTemplate":
        """Shift every column so its minimum is 0."""
        return WeightTemplate(tuple(tuple(x - col[0] for x in col) for col in self.h))

    @classmethod
    def of_matrix(cls, n: Sequence[Sequence[int]]) -> "WeightTemplate":
        f = len(n[0])
        return cls(tuple(tuple(row[s] for row in n) for s in range(f)))


def chars_from_matrix(n: Sequence[Sequence[int]], p: int, units: Sequence[int] | None = None) -> list[CharClass]:
    units = units or [1] * len(n)
    return [CharClass(weight_residue(row, p), a) for row, a in zip(n, units)]


def is_model(n: Sequence[Sequence[int]], chars: Sequence[CharClass], template: WeightTemplate, p: int) -> bool:
    if len(n) != len(chars) or any(len(r) != template.f for r in n):
        return False
    f = template.f
    for s in range(f):
        if sorted(r[s] for r in n) != list(template.h[s]):
            return False
    mod = p**f - 1
    return all(weight_residue(r, p) == c.e % mod for r, c in zip(n, chars))


# --- enumeration ------------------------------------------------------------------

def enumerate_models(chars: Sequence[CharClass], template: WeightTemplate, p: int) -> list[Model]:
    """Backtracking over per-column bijections with residue-window pruning."""
    d, f = template.d, template.f
    if len(chars) != d:
        raise InvalidInput(f"{len(chars)} characters for a template of column size {d}")
    template.check_range(p)
    mod = p**f - 1
    targets = [c.e % mod for c in chars]
    weights = [p ** (f - 1 - s) for s in range(f)]
    # remaining[s] = (min, max) of what columns s.. can still add to one row
    rest_min = [0] * (f + 1)
    rest_max = [0] * (f + 1)
    for s in range(f - 1, -1, -1):
        rest_min[s] = rest_min[s + 1] + weights[s] * template.h[s][0]
        rest_max[s] = rest_max[s + 1] + weights[s] * template.h[s][-1]

    def reachable(partial: int, e: int, s: int) -> bool:
        lo, hi = partial + rest_min[s], partial + rest_max[s]
        # is there k with e + k*mod in [lo, hi]?
        first = lo + ((e - lo) % mod)
        return first <= hi

    found: list[Model] = []
    columns: list[tuple[int, ...]] = []
    partial = [0] * d

    def place_column(s: int):
        if s == f:
            found.append(tuple(tuple(columns[c][i] for c in range(f)) for i in range(d)))
            return
        used = [False] * d
        col = [0] * d

        def place_row(i: int):
            if i == d:
                columns.append(tuple(col))
                place_column(s + 1)
                columns.pop()
                return
            for k, value in enumerate(template.h[s]):
                if used[k]:
                    continue
                new_partial = partial[i] + weights[s] * value
                if not reachable(new_partial, targets[i], s + 1):
                    continue
                used[k] = True
                col[i] = value
                old = partial[i]
                partial[i] = new_partial
                place_row(i + 1)
                partial[i] = old
                used[k] = False

        place_row(0)

    place_column(0)
    return sorted(found)


def models_by_residues(template: WeightTemplate, p: int) -> dict[tuple[int, ...], list[Model]]:
    """Every matrix with the template's columns, grouped by its row-residue tuple.

    Each group is exactly the model set of the corresponding character list, so
    this enumerates all realizable character lists of a template at once.
    """
    d, f = template.d, template.f
    groups: dict[tuple[int, ...], list[Model]] = {}
    perms = [list(itertools.permutations(col)) for col in template.h]
    for choice in itertools.product(*perms):
        n = tuple(tuple(choice[s][i] for s in range(f)) for i in range(d))
        key = tuple(weight_residue(r, p) for r in n)
        groups.setdefault(key, []).append(n)
    for v in groups.values():
        v.sort()
    return groups


def check_C1(chars: Sequence[CharClass], template: WeightTemplate, p: int) -> tuple[bool, list[Model]]:
    models = enumerate_models(chars, template, p)
    return len(models) == 1, models


def _differences(col: Sequence[int]) -> set[int]:
    return {abs(x - y) for x, y in itertools.combinations(col, 2)}


def c1_sufficient(template: WeightTemplate, p: int) -> set[int]:
    """Which of the three sufficient conditions for (C-1) hold.

    Weight sets are first shifted to have minimum 0 (the standing normalisation
    of crystalline weights); a shift permutes models bijectively.
    1: f = 1 and no two weights differ by p-1.
    2: no two weights in any column differ by 1, and p-1 is missing from some column.
    3: every column lies in [0, p-1], and p-1 is missing from some column.
    """
    h = template.normalized().h
    cases = set()
    missing_p1 = any(p - 1 not in col for col in h)
    if template.f == 1 and (p - 1) not in _differences(h[0]):
        cases.add(1)
    if all(1 not in _differences(col) for col in h) and missing_p1:
        cases.add(2)
    if all(col[-1] <= p - 1 for col in h) and missing_p1:
        cases.add(3)
    return cases


def check_C3(template: WeightTemplate, p: int) -> bool:
    """Some column has no pair of weights differing by p-1."""
    return any((p - 1) not in _differences(col) for col in template.h)


def c3_witness(template: WeightTemplate, p: int) -> int | None:
    for s, col in enumerate(template.h):
        if (p - 1) not in _differences(col):
            return s
    return None


# --- partial line swaps ---------------------------------------------------------

@dataclass(frozen=True)
class PLSMove:
    """Swap of a cyclic segment between two rows.

    The segment covers positions start, start+1, ..., start+length-1 (mod f);
    row_a minus row_b on it equals sign * pattern, where pattern is
    (p-1, ..., p-1) ("flat") or (-1, p-1, ..., p-1, p) ("string").
    """

    row_a: int
    row_b: int
    start: int
    length: int
    sign: int
    pattern: str

    def to_record(self) -> dict:
        return {"rows": [self.row_a, self.row_b], "start": self.start,
                "length": self.length, "sign": self.sign, "pattern": self.pattern}


def _segment(start: int, length: int, f: int) -> list[int]:
    return [(start + k) % f for k in range(length)]


def _match(diff: tuple[int, ...], p: int) -> tuple[int, str] | None:
    L = len(diff)
    flat = (p - 1,) * L
    string = (-1,) + (p - 1,) * (L - 2) + (p,)
    for sign in (1, -1):
        if diff == tuple(sign * x for x in flat):
            return sign, "flat"
        if diff == tuple(sign * x for x in string):
            return sign, "string"
    return None


def pls_moves(model: Model, p: int) -> list[PLSMove]:
    """All legal partial line swaps between pairs of rows.

    Rows are read as cycles, so a segment may start at any embedding and wrap.
    Segment lengths run from 2 to f.
    """
    d = len(model)
    f = len(model[0]) if d else 0
    moves = []
    for a, b in itertools.combinations(range(d), 2):
        A, B = model[a], model[b]
        for length in range(2, f + 1):
            for start in range(f):
                seg = _segment(start, length, f)
                hit = _match(tuple(A[k] - B[k] for k in seg), p)
                if hit is not None:
                    moves.append(PLSMove(a, b, start, length, hit[0], hit[1]))
                    if length == f:
                        break  # every full-length segment swaps the same entries
    return moves


def pls_apply(model: Model, move: PLSMove, p: int, chars: Sequence[CharClass] | None = None,
              template: WeightTemplate | None = None) -> tuple[Model, bool]:
    """Swap the segment; returns the new matrix and whether it is still a model.

    Without ``chars`` the bound characters are taken from ``model`` itself.
    """
    if move not in pls_moves(model, p):
        raise InvalidMove(f"{move} is not a legal swap for this matrix")
    f = len(model[0])
    rows = [list(r) for r in model]
    for k in _segment(move.start, move.length, f):
        rows[move.row_a][k], rows[move.row_b][k] = rows[move.row_b][k], rows[move.row_a][k]
    new = tuple(tuple(r) for r in rows)
    if chars is None:
        chars = chars_from_matrix(model, p)
    if template is None:
        template = WeightTemplate.of_matrix(model)
    return new, is_model(new, chars, template, p)


@dataclass
class PLSComponents:
    components: list[list[Model]]

    @property
    def count(self) -> int:
        return len(self.components)

    def component_of(self, model: Model) -> int:
        for k, comp in enumerate(self.components):
            if model in comp:
                return k
        raise KeyError(model)

    def to_record(self) -> list[dict]:
        return [{"representative": [list(r) for r in comp[0]], "size": len(comp),
                 "members": [[list(r) for r in m] for m in comp]} for comp in self.components]


def pls_components(models: Iterable[Model], p: int) -> PLSComponents:
    """Connected components of a model set under validity-preserving swaps."""
    pool = sorted(set(models))
    members = set(pool)
    seen: set = set()
    comps = []
    for root in pool:
        if root in seen:
            continue
        comp = [root]
        seen.add(root)
        queue = deque([root])
        while queue:
            cur = queue.popleft()
            for mv in pls_moves(cur, p):
                nxt, _ = _swap(cur, mv)
                if nxt in members and nxt not in seen:
                    seen.add(nxt)
                    comp.append(nxt)
                    queue.append(nxt)
        comps.append(sorted(comp))
    comps.sort(key=lambda c: c[0])
    return PLSComponents(comps)


def _swap(model: Model, move: PLSMove) -> tuple[Model, None]:
    f = len(model[0])
    rows = [list(r) for r in model]
    for k in _segment(move.start, move.length, f):
        rows[move.row_a][k], rows[move.row_b][k] = rows[move.row_b][k], rows[move.row_a][k]
    return tuple(tuple(r) for r in rows), None


def pls_reachability(chars: Sequence[CharClass], template: WeightTemplate, p: int) -> PLSComponents:
    return pls_components(enumerate_models(chars, template, p), p)
