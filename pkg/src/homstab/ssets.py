"""Finite semi-simplicial sets.

A simplex is addressed by ``(k, index)``; face maps are stored as index
tables, ``faces[k][a][i]`` being the index in level ``k-1`` of ``d_i`` of the
``a``-th ``k``-simplex.  Labels (``levels``) are kept only for display and
for building things by name.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Sequence

from .chains import ChainComplex, ChainMap, FilteredComplex, suspension
from .linalg import IntegerMatrix


class InvalidSimplicialSetError(ValueError):
    pass


@dataclass(frozen=True)
class SemiSimplicialSet:
    levels: tuple[tuple[Hashable, ...], ...]
    faces: tuple[tuple[tuple[int, ...], ...], ...]

    @classmethod
    def from_face_function(cls, levels: Sequence[Sequence[Hashable]],
                           face: Callable[[int, Hashable, int], Hashable]) -> "SemiSimplicialSet":
        """``face(k, label, i)`` must return the label of ``d_i`` of a ``k``-simplex."""
        levels = tuple(tuple(lv) for lv in levels)
        while levels and not levels[-1]:
            levels = levels[:-1]
        pos = [{lab: j for j, lab in enumerate(lv)} for lv in levels]
        faces: list[tuple[tuple[int, ...], ...]] = [()]
        for k in range(1, len(levels)):
            try:
                faces.append(tuple(
                    tuple(pos[k - 1][face(k, x, i)] for i in range(k + 1)) for x in levels[k]
                ))
            except KeyError as exc:
                raise InvalidSimplicialSetError(f"face of a {k}-simplex is not a {k - 1}-simplex: {exc}")
        return cls(levels, tuple(faces))

    @property
    def dimension(self) -> int:
        return len(self.levels) - 1

    def size(self, k: int) -> int:
        return len(self.levels[k]) if 0 <= k < len(self.levels) else 0

    def face(self, k: int, a: int, i: int) -> int:
        return self.faces[k][a][i]

    def total_size(self) -> int:
        return sum(len(lv) for lv in self.levels)


@dataclass(frozen=True)
class PointedSemiSimplicialSet:
    """A semi-simplicial set with a basepoint in every level, preserved by faces."""

    underlying: SemiSimplicialSet
    basepoints: tuple[int, ...]

    @property
    def levels(self):
        return self.underlying.levels

    @property
    def dimension(self) -> int:
        return self.underlying.dimension


def validate(x: SemiSimplicialSet) -> tuple[int, int, int] | None:
    """Check ``d_i d_j = d_{j-1} d_i`` for ``i < j`` exhaustively.

    Returns ``(k, i, j)`` for the first failure (``k`` the dimension of the
    simplex), or ``None``.
    """
    if len(x.faces) != len(x.levels):
        return (len(x.faces), -1, -1)
    for k in range(1, len(x.levels)):
        if len(x.faces[k]) != len(x.levels[k]):
            return (k, -1, -1)
        for fs in x.faces[k]:
            if len(fs) != k + 1 or any(not 0 <= f < len(x.levels[k - 1]) for f in fs):
                return (k, -1, -1)
    for k in range(2, len(x.levels)):
        lower = x.faces[k - 1]
        for i in range(k):
            for j in range(i + 1, k + 1):
                for fs in x.faces[k]:
                    if lower[fs[j]][i] != lower[fs[i]][j - 1]:
                        return (k, i, j)
    return None


def validate_pointed(x: PointedSemiSimplicialSet) -> str | None:
    bad = validate(x.underlying)
    if bad is not None:
        return f"simplicial identity fails at (k, i, j) = {bad}"
    if len(x.basepoints) != len(x.levels):
        return "one basepoint per level required"
    for k in range(1, len(x.levels)):
        if any(f != x.basepoints[k - 1] for f in x.underlying.faces[k][x.basepoints[k]]):
            return f"faces of the level-{k} basepoint leave the basepoint"
    return None


def _require(x: SemiSimplicialSet) -> None:
    bad = validate(x)
    if bad is not None:
        raise InvalidSimplicialSetError(f"simplicial identity fails at (k, i, j) = {bad}")


def _boundary(x: SemiSimplicialSet, k: int, keep_rows: dict[int, int] | None = None,
              keep_cols: Sequence[int] | None = None) -> IntegerMatrix:
    rows = x.size(k - 1) if keep_rows is None else len(keep_rows)
    cols_src = range(x.size(k)) if keep_cols is None else keep_cols
    columns = []
    for a in cols_src:
        col: dict[int, int] = {}
        for i, f in enumerate(x.faces[k][a]):
            if keep_rows is not None:
                if f not in keep_rows:
                    continue
                f = keep_rows[f]
            col[f] = col.get(f, 0) + (-1) ** i
        columns.append(col)
    return IntegerMatrix(rows, len(columns), columns)


def chain_complex_of(x: SemiSimplicialSet) -> ChainComplex:
    """Free complex on the simplices with ``d = sum (-1)^i d_i``."""
    _require(x)
    ranks = tuple(len(lv) for lv in x.levels)
    return ChainComplex(0, ranks, {k: _boundary(x, k) for k in range(1, len(ranks))})


def reduced_chain_complex_of(x: PointedSemiSimplicialSet) -> ChainComplex:
    """Chains on the non-basepoint simplices; faces hitting a basepoint vanish."""
    bad = validate_pointed(x)
    if bad is not None:
        raise InvalidSimplicialSetError(bad)
    u = x.underlying
    keep = [[a for a in range(u.size(k)) if a != x.basepoints[k]] for k in range(len(u.levels))]
    pos = [{a: i for i, a in enumerate(kp)} for kp in keep]
    ranks = tuple(len(kp) for kp in keep)
    bd = {k: _boundary(u, k, pos[k - 1], keep[k]) for k in range(1, len(ranks))}
    return ChainComplex(0, ranks, bd)


def add_basepoint(x: SemiSimplicialSet, label: Hashable = "*") -> PointedSemiSimplicialSet:
    """Levelwise disjoint basepoint, placed first in every level."""
    n = len(x.levels)
    levels = tuple((label,) + tuple(lv) for lv in x.levels)
    faces: list[tuple[tuple[int, ...], ...]] = [()]
    for k in range(1, n):
        faces.append(((0,) * (k + 1),) + tuple(tuple(f + 1 for f in fs) for fs in x.faces[k]))
    return PointedSemiSimplicialSet(SemiSimplicialSet(levels, tuple(faces)), (0,) * n)


def half_smash_construction(x: SemiSimplicialSet, augmented: bool = True) -> PointedSemiSimplicialSet:
    """Pointed semi-simplicial set whose ``m``-simplices are the basepoint and
    pairs ``(s, j)`` with ``s`` an ``(m-1)``-simplex of ``x`` and ``0 <= j <= m``.

    Faces: ``d_i(s, j)`` is ``(d_i s, j-1)`` for ``i < j``, the basepoint for
    ``i == j`` and ``(d_{i-1} s, j)`` for ``i > j``.

    ``x`` is read as augmented over a point: its single ``(-1)``-simplex
    (label ``()``) gives a level-0 pair ``((), 0)`` and every vertex has it as
    its face.  For injective words this makes the result the levelwise
    quotient ``F(C) / F(C - p)``.  With ``augmented=False`` there are no
    ``(-1)``-simplices, level 0 is the basepoint alone and all faces out of
    level 1 are the basepoint.
    """
    _require(x)
    top = len(x.levels)
    # level -1 of x, and the faces of vertices into it
    minus_one: tuple = ((),) if augmented else ()

    def lower_size(m: int) -> int:  # number of (m-1)-simplices of x
        return len(minus_one) if m == 0 else x.size(m - 1)

    def lower_label(m: int, a: int):
        return minus_one[a] if m == 0 else x.levels[m - 1][a]

    def lower_face(m: int, a: int, i: int) -> int | None:  # d_i of an (m-1)-simplex
        if m == 1:
            return 0 if augmented else None
        return x.faces[m - 1][a][i]

    levels: list[tuple] = []
    index: list[dict[tuple[int, int], int]] = []
    for m in range(0, top + 1):
        pairs = [(a, j) for a in range(lower_size(m)) for j in range(m + 1)]
        index.append({p: 1 + t for t, p in enumerate(pairs)})
        levels.append(("*",) + tuple((lower_label(m, a), j) for a, j in pairs))
    faces: list[tuple[tuple[int, ...], ...]] = [()]
    for m in range(1, top + 1):
        lvl = [(0,) * (m + 1)]
        for a in range(lower_size(m)):
            for j in range(m + 1):
                fs = []
                for i in range(m + 1):
                    if i == j:
                        fs.append(0)
                        continue
                    f = lower_face(m, a, i if i < j else i - 1)
                    fs.append(0 if f is None else index[m - 1][(f, j - 1 if i < j else j)])
                lvl.append(tuple(fs))
        faces.append(tuple(lvl))
    return PointedSemiSimplicialSet(SemiSimplicialSet(tuple(levels), tuple(faces)), (0,) * (top + 1))


def filtration_zero_inclusion(x: SemiSimplicialSet) -> ChainMap:
    """The inclusion of the pairs ``(s, 0)`` into the (augmented) half-smash
    construction, as a chain map out of the chains of the suspension of
    ``x`` (the cone on the augmentation)."""
    hs = half_smash_construction(x)
    target = reduced_chain_complex_of(hs)
    source = suspension(chain_complex_of(x))
    blocks = {0: IntegerMatrix(target.rank(0), source.rank(0), [{0: -1}])}
    for m in range(1, len(x.levels) + 1):
        # reduced generators are ordered (a, j) with j fastest; (a, 0) sits at a*(m+1)
        blocks[m] = IntegerMatrix(
            target.rank(m), source.rank(m),
            [{a * (m + 1): 1} for a in range(x.size(m - 1))],
        )
    return ChainMap(source, target, blocks)


def skeletal_filtration(x: SemiSimplicialSet) -> FilteredComplex:
    """Filtration of the simplicial chains by skeleta: a ``k``-simplex sits in level ``k``."""
    c = chain_complex_of(x)
    return FilteredComplex(c, {k: (k,) * c.rank(k) for k in c.degrees()})


# ---------------------------------------------------------------------------
# coverings


class CoveringError(ValueError):
    pass


@dataclass(frozen=True)
class LevelwiseMap:
    """``images[k][a]`` is the index in ``base`` of the image of simplex ``(k, a)``."""

    total: SemiSimplicialSet
    base: SemiSimplicialSet
    images: tuple[tuple[int, ...], ...]


def check_covering(p: LevelwiseMap) -> int:
    """Validate ``p`` as a finite covering and return its number of sheets."""
    e, b = p.total, p.base
    if len(p.images) != len(e.levels) or len(e.levels) != len(b.levels):
        raise CoveringError("total space and base must have the same levels")
    fibres: list[list[list[int]]] = []
    sheets = None
    for k in range(len(b.levels)):
        fib = [[] for _ in range(b.size(k))]
        for a, im in enumerate(p.images[k]):
            fib[im].append(a)
        for f in fib:
            if sheets is None:
                sheets = len(f)
            elif len(f) != sheets:
                raise CoveringError(f"fibre sizes differ in level {k}: {len(f)} vs {sheets}")
        fibres.append(fib)
    for k in range(1, len(b.levels)):
        for a in range(e.size(k)):
            for i in range(k + 1):
                if p.images[k - 1][e.faces[k][a][i]] != b.faces[k][p.images[k][a]][i]:
                    raise CoveringError(f"map does not commute with d_{i} on level {k}")
        for bb in range(b.size(k)):
            for i in range(k + 1):
                hit = {e.faces[k][a][i] for a in fibres[k][bb]}
                if hit != set(fibres[k - 1][b.faces[k][bb][i]]):
                    raise CoveringError(f"d_{i} is not a bijection of fibres over simplex {bb} in level {k}")
    return sheets or 0


def projection_map(p: LevelwiseMap) -> ChainMap:
    ce, cb = chain_complex_of(p.total), chain_complex_of(p.base)
    blocks = {
        k: IntegerMatrix(cb.rank(k), ce.rank(k), [{im: 1} for im in p.images[k]])
        for k in ce.degrees()
    }
    return ChainMap(ce, cb, blocks)


def covering_transfer(p: LevelwiseMap) -> ChainMap:
    """Transfer ``C(base) -> C(total)``: a simplex goes to the sum of its lifts."""
    check_covering(p)
    ce, cb = chain_complex_of(p.total), chain_complex_of(p.base)
    blocks = {}
    for k in cb.degrees():
        cols: list[dict[int, int]] = [{} for _ in range(cb.rank(k))]
        for a, im in enumerate(p.images[k]):
            cols[im][a] = 1
        blocks[k] = IntegerMatrix(ce.rank(k), cb.rank(k), cols)
    return ChainMap(cb, ce, blocks)


# ---------------------------------------------------------------------------
# small examples


def circle() -> SemiSimplicialSet:
    """One vertex, one edge."""
    return SemiSimplicialSet((("v",), ("e",)), ((), ((0, 0),)))


def point() -> SemiSimplicialSet:
    return SemiSimplicialSet((("v",),), ((),))


def disjoint_union(*xs: SemiSimplicialSet) -> SemiSimplicialSet:
    top = max((len(x.levels) for x in xs), default=0)
    levels, faces = [], [()]
    for k in range(top):
        levels.append(tuple((t, lab) for t, x in enumerate(xs) if k < len(x.levels) for lab in x.levels[k]))
    for k in range(1, top):
        lvl = []
        off = 0
        for x in xs:
            if k < len(x.levels):
                lvl.extend(tuple(f + off for f in fs) for fs in x.faces[k])
            off += x.size(k - 1)
        faces.append(tuple(lvl))
    return SemiSimplicialSet(tuple(levels), tuple(faces))


def simplex_boundary(n: int) -> SemiSimplicialSet:
    """Boundary of the ``n``-simplex: proper nonempty subsets of ``{0..n}``
    as increasing tuples, ``d_i`` dropping the ``i``-th vertex."""
    from itertools import combinations

    levels = [list(combinations(range(n + 1), k + 1)) for k in range(n)]
    return SemiSimplicialSet.from_face_function(levels, lambda k, s, i: s[:i] + s[i + 1:])
