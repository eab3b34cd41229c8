"""Dold decompositions of abstract stability systems, stabilisation onsets of
dimension tables, and the tau experiment on ``C_2(R^d)``."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from .chains import ChainComplex, ChainMap, homology_integral, validate_chain_map
from .linalg import (
    AbelianGroupInvariants,
    IntegerMatrix,
    determinant,
    identity,
    inverse,
    kernel_basis,
    matmul,
    rref,
    smith_normal_form,
)

Matrix = list[list[Fraction]]


class DoldRelationError(ValueError):
    pass


def _zeros(r: int, c: int) -> Matrix:
    return [[Fraction(0)] * c for _ in range(r)]


def _add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _shape(a: Matrix, cols_if_empty: int = 0) -> tuple[int, int]:
    return (len(a), len(a[0]) if a else cols_if_empty)


@dataclass(frozen=True)
class DoldSystem:
    """Rational vector spaces ``A_0 .. A_N`` with stabilisations
    ``stab[n]: A_n -> A_{n+1}`` (``n < N``) and transfers
    ``trans[n]: A_n -> A_{n-1}`` (``n >= 1``; ``trans[0]`` is unused).

    Matrices are lists of rows of Fractions, acting on column vectors.
    """

    dims: tuple[int, ...]
    stab: tuple[Matrix, ...]
    trans: tuple[Matrix, ...]

    @property
    def length(self) -> int:
        return len(self.dims) - 1

    def check_shapes(self) -> None:
        N = self.length
        if len(self.stab) != N or len(self.trans) != N + 1:
            raise ValueError("need N stabilisations and N+1 transfer slots")
        for n, m in enumerate(self.stab):
            if len(m) != self.dims[n + 1] or any(len(row) != self.dims[n] for row in m):
                raise ValueError(f"stabilisation {n} has the wrong shape")
        for n in range(1, N + 1):
            m = self.trans[n]
            if len(m) != self.dims[n - 1] or any(len(row) != self.dims[n] for row in m):
                raise ValueError(f"transfer {n} has the wrong shape")


def verify_dold_relations(s: DoldSystem) -> int | None:
    """Return the first ``n`` with ``t_n i_{n-1} != i_{n-2} t_{n-1} + Id``
    (checked on ``A_{n-1}``), or ``None`` if all hold."""
    s.check_shapes()
    for n in range(1, s.length + 1):
        a = s.dims[n - 1]
        lhs = matmul(s.trans[n], s.stab[n - 1], ncols=a)
        rhs = identity(a)
        if n >= 2:
            rhs = _add(matmul(s.stab[n - 2], s.trans[n - 1], ncols=a), rhs)
        if lhs != rhs:
            return n
    return None


def iterated_transfer(s: DoldSystem, n: int, m: int) -> Matrix:
    """``t_{n,m} = (t_{m+1} ... t_n) / (n-m)!`` as a map ``A_n -> A_m``."""
    if m > n:
        raise ValueError("iterated transfer needs m <= n")
    if m < 0 or n > s.length:
        raise ValueError("indices outside the system")
    prod = identity(s.dims[n])
    for k in range(n, m, -1):
        prod = matmul(s.trans[k], prod, ncols=s.dims[n])
    f = Fraction(1, factorial(n - m))
    return [[f * v for v in row] for row in prod]


def _coker_projection(stab: Matrix, target_dim: int) -> Matrix:
    """Projection ``A -> B = coker(stab)`` onto the coordinates not hit by
    pivots of the reduced column space of ``stab``."""
    if not stab or not stab[0]:
        return identity(target_dim)
    cols_t = [list(col) for col in zip(*stab)]  # rows = columns of stab
    red, pivots = rref(cols_t, 0)
    # basis of A: image vectors ``red`` (pivot at column p) then unit vectors
    # e_q for non-pivot coordinates q; B-coordinates are the e_q coefficients
    nonpivot = [q for q in range(target_dim) if q not in set(pivots)]
    basis_cols = [row for row in red] + [[Fraction(int(i == q)) for i in range(target_dim)] for q in nonpivot]
    change = [list(r) for r in zip(*basis_cols)]  # columns are basis vectors
    coords = inverse(change)
    return coords[len(red):]


@dataclass
class DoldDecomposition:
    b_dims: tuple[int, ...]
    phi: list[Matrix]
    iso: bool
    ti_invertible: bool
    ti_scalars: list[list[Fraction]] = field(default_factory=list)


def dold_decompose(s: DoldSystem, record_scalars: bool = False) -> DoldDecomposition:
    """Split each ``A_n`` as ``B_n + B_{n-1} + ... + B_0`` with
    ``B_n = coker(i_{n-1})`` via iterated transfers.

    With ``record_scalars`` the diagonal of ``t_{n+1} i_n`` in the split
    coordinates is kept as well.
    """
    bad = verify_dold_relations(s)
    if bad is not None:
        raise DoldRelationError(f"transfer relation fails at n = {bad}")
    N = s.length
    projections = []
    for n in range(N + 1):
        if n == 0:
            projections.append(identity(s.dims[0]))
        else:
            projections.append(_coker_projection(s.stab[n - 1], s.dims[n]))
    b_dims = tuple(len(p) for p in projections)
    phis, iso = [], True
    for n in range(N + 1):
        blocks: Matrix = []
        prod = identity(s.dims[n])  # t_{m+1} ... t_n, built up as m decreases
        for m in range(n, -1, -1):
            if m < n:
                prod = matmul(s.trans[m + 1], prod, ncols=s.dims[n])
            if b_dims[m]:
                f = Fraction(1, factorial(n - m))
                t = [[f * v for v in row] for row in prod]
                blocks.extend(matmul(projections[m], t, ncols=s.dims[n]))
        phis.append(blocks)
        if len(blocks) != s.dims[n] or (s.dims[n] and determinant(blocks) == 0):
            iso = False
    ti_ok = True
    scalars = []
    for n in range(N):
        if not s.dims[n]:
            scalars.append([])
            continue
        ti = matmul(s.trans[n + 1], s.stab[n], ncols=s.dims[n])
        if determinant(ti) == 0:
            ti_ok = False
        # eigenvalues on the summands: conjugate by phi_n
        if iso and record_scalars:
            conj = matmul(matmul(phis[n], ti), inverse(phis[n]))
            scalars.append([conj[i][i] for i in range(len(conj))])
    return DoldDecomposition(b_dims, phis, iso, ti_ok, scalars)


def _random_invertible(rng: random.Random, n: int, steps: int | None = None) -> tuple[Matrix, Matrix]:
    """A random integer matrix of determinant +-1 and its inverse, as a
    product of elementary operations, so both stay integral."""
    m = identity(n)
    inv = identity(n)
    for _ in range(steps if steps is not None else 3 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            m[i] = [-v for v in m[i]]
            for row in inv:
                row[i] = -row[i]
            continue
        k = rng.choice((-2, -1, 1, 2))
        # m <- E m with E = I + k e_ij ; inv <- inv E^{-1}
        m[i] = [x + k * y for x, y in zip(m[i], m[j])]
        for row in inv:
            row[j] -= k * row[i]
    return m, inv


def canonical_dold_system(b_dims: Sequence[int]) -> DoldSystem:
    """``A_n = B_0 + ... + B_n``, ``i_n`` the inclusion and ``t_n`` acting as
    the scalar ``n - m`` on the ``B_m`` summand."""
    N = len(b_dims) - 1
    dims = tuple(sum(b_dims[: n + 1]) for n in range(N + 1))
    stab = []
    for n in range(N):
        m = _zeros(dims[n + 1], dims[n])
        for i in range(dims[n]):
            m[i][i] = Fraction(1)
        stab.append(m)
    trans: list[Matrix] = [[]]
    for n in range(1, N + 1):
        t = _zeros(dims[n - 1], dims[n])
        off = 0
        for mm in range(n):
            for j in range(b_dims[mm]):
                t[off + j][off + j] = Fraction(n - mm)
            off += b_dims[mm]
        trans.append(t)
    return DoldSystem(dims, tuple(stab), tuple(trans))


def random_dold_system(seed: int, N: int, b_dims: Sequence[int] | None = None) -> DoldSystem:
    """The canonical system conjugated by seeded random invertible matrices.
    Summand dimensions are drawn from ``0..4`` when ``b_dims`` is omitted."""
    rng = random.Random(seed)
    if b_dims is None:
        b_dims = [rng.randint(0, 4) for _ in range(N + 1)]
    if len(b_dims) != N + 1:
        raise ValueError("need N+1 summand dimensions")
    base = canonical_dold_system(b_dims)
    ps = [_random_invertible(rng, d) for d in base.dims]
    dims = base.dims

    def conj(p_out, m, p_in_inv, ncols):
        return matmul(matmul(p_out, m, ncols=ncols), p_in_inv, ncols=ncols)

    stab = tuple(conj(ps[n + 1][0], base.stab[n], ps[n][1], dims[n]) for n in range(N))
    trans: list[Matrix] = [[]]
    for n in range(1, N + 1):
        trans.append(conj(ps[n - 1][0], base.trans[n], ps[n][1], dims[n]))
    return DoldSystem(base.dims, stab, tuple(trans))


def h0_system(N: int) -> DoldSystem:
    """``A_n = Q``, ``i_n = 1`` and ``t_n = n``."""
    dims = (1,) * (N + 1)
    stab = tuple([[Fraction(1)]] for _ in range(N))
    trans = ([],) + tuple([[Fraction(n)]] for n in range(1, N + 1))
    return DoldSystem(dims, stab, trans)


def perturbation_is_constrained(s: DoldSystem, n: int, col: int) -> bool:
    """Whether the relations see a change to column ``col`` of ``t_n``.

    Every ``t_n`` with ``n < N`` is pinned down by the relation at ``n + 1``
    (``i_{n-1}`` is injective there), but the top transfer ``t_N`` only
    enters through ``t_N i_{N-1}``, so columns of ``t_N`` orthogonal to the
    image of ``i_{N-1}`` are free.
    """
    if n < s.length:
        return True
    return any(v != 0 for v in s.stab[n - 1][col])


def perturb_transfer(s: DoldSystem, n: int, row: int = 0, col: int = 0, by: int = 1) -> DoldSystem:
    trans = [[list(r) for r in t] for t in s.trans]
    trans[n][row][col] += by
    return DoldSystem(s.dims, s.stab, tuple(trans))


# ---------------------------------------------------------------------------
# stabilisation onsets


@dataclass(frozen=True)
class StabilityTable:
    """``dims[i][j]`` is the value in degree ``i`` at ``n = first_n + j``."""

    dims: tuple[tuple[int, ...], ...]
    label: str = ""
    first_n: int = 1

    def __post_init__(self):
        widths = {len(r) for r in self.dims}
        if len(widths) > 1:
            raise ValueError("stability table must be rectangular")

    @property
    def ns(self) -> range:
        width = len(self.dims[0]) if self.dims else 0
        return range(self.first_n, self.first_n + width)


@dataclass(frozen=True)
class Onset:
    degree: int
    onset: int | None  # None means no stabilisation visible in the table
    within_bound: bool


def stability_range(t: StabilityTable, bound_factor: int = 2) -> list[Onset]:
    """Per degree ``i``: the smallest ``N`` such that ``dims[i][n]`` is constant
    for ``n >= N`` across at least two columns, or ``None``.

    ``within_bound`` compares against the range ``n >= bound_factor * i``: it
    holds when the onset is at most that, or when the table has fewer than two
    columns at or beyond it (nothing to test).
    """
    ns = list(t.ns)
    out = []
    for i, row in enumerate(t.dims):
        j = len(row) - 1
        while j > 0 and row[j - 1] == row[j]:
            j -= 1
        onset = ns[j] if row and (len(row) - j >= 2 or len(row) == 1) else None
        bound = bound_factor * i
        testable = sum(1 for n in ns if n >= bound) >= 2
        if onset is None:
            ok = not testable
        else:
            ok = onset <= max(bound, ns[0])
        out.append(Onset(i, onset, ok))
    return out


def stable_range_violations(t: StabilityTable, bound_factor: int = 2) -> list[tuple[int, int]]:
    """Cells ``(i, n)`` with ``n >= bound_factor * i`` and ``dims[i][n] != dims[i][n+1]``."""
    ns = list(t.ns)
    bad = []
    for i, row in enumerate(t.dims):
        for j in range(len(row) - 1):
            if bound_factor * i <= ns[j] and row[j] != row[j + 1]:
                bad.append((i, ns[j]))
    return bad


def monotonicity_violations(t: StabilityTable) -> list[tuple[int, int]]:
    ns = list(t.ns)
    return [
        (i, ns[j]) for i, row in enumerate(t.dims) for j in range(len(row) - 1) if row[j] > row[j + 1]
    ]


# ---------------------------------------------------------------------------
# tau


def sphere_equivariant_complex(d: int) -> ChainComplex:
    """``S^{d-1}`` with two cells ``e_k, T e_k`` per degree ``k < d``;
    ``d e_k = e_{k-1} + (-1)^k T e_{k-1}`` and its ``T``-translate.
    Generators in degree ``k`` are ordered ``(e_k, T e_k)``."""
    bd = {}
    for k in range(1, d):
        sgn = (-1) ** k
        bd[k] = IntegerMatrix.from_rows([[1, sgn], [sgn, 1]])
    return ChainComplex(0, (2,) * d, bd)


def projective_complex(d: int) -> ChainComplex:
    """``RP^{d-1}`` with one cell per degree and ``d_k = 1 + (-1)^k``."""
    bd = {k: IntegerMatrix.from_rows([[1 + (-1) ** k]]) for k in range(1, d)}
    return ChainComplex(0, (1,) * d, bd)


def quotient_map(d: int) -> ChainMap:
    src, tgt = sphere_equivariant_complex(d), projective_complex(d)
    return ChainMap(src, tgt, {k: IntegerMatrix.from_rows([[1, 1]]) for k in range(d)})


@dataclass(frozen=True)
class TauResult:
    d: int
    source_group: AbelianGroupInvariants
    target_group: AbelianGroupInvariants
    image_index: int | None  # None: the image is zero

    @property
    def verdict(self) -> str:
        return "zero" if self.image_index is None else f"index {self.image_index}"


def tau_experiment(d: int) -> TauResult:
    """Image of the fundamental class of ``S^{d-1}`` in
    ``H_{d-1}(RP^{d-1}; Z)`` under the double cover."""
    if d < 2:
        raise ValueError("tau is defined for d >= 2")
    f = quotient_map(d)
    if validate_chain_map(f) is not None:
        raise AssertionError("quotient map is not a chain map")
    top = d - 1
    src_group = homology_integral(f.source, top)
    tgt_group = homology_integral(f.target, top)
    # top degree: no boundaries come in, so H_top = ker d_top, a lattice
    z_src = kernel_basis(f.source.boundary(top))
    z_tgt = kernel_basis(f.target.boundary(top))
    image = f.at(top) @ z_src
    if image.is_zero() or tgt_group.free_rank == 0:
        return TauResult(d, src_group, tgt_group, None)
    # express image in the kernel basis of the target: z_tgt @ coeffs = image
    coeffs = _solve_integral(z_tgt, image)
    diag = [x for x in smith_normal_form(coeffs).diagonal if x]
    index = 1
    for x in diag:
        index *= x
    if len(diag) < z_tgt.cols:
        index = 0  # image of lower rank: infinite index
    return TauResult(d, src_group, tgt_group, index)


def _solve_integral(basis: IntegerMatrix, vectors: IntegerMatrix) -> IntegerMatrix:
    """Coordinates of ``vectors`` in a saturated lattice ``basis`` (full column rank)."""
    cols = []
    b = basis.to_rows()
    for j in range(vectors.cols):
        v = [vectors[i, j] for i in range(vectors.rows)]
        aug = [row + [vi] for row, vi in zip(b, v)]
        red, piv = rref(aug, 0)
        if basis.cols in piv:
            raise ValueError("vector not in the lattice span")
        x = [Fraction(0)] * basis.cols
        for row, p in zip(red, piv):
            x[p] = row[-1]
        if any(xi.denominator != 1 for xi in x):
            raise ValueError("lattice basis is not saturated")
        cols.append({i: int(xi) for i, xi in enumerate(x) if xi})
    return IntegerMatrix(basis.cols, vectors.cols, cols)


def binomial_action(n: int, m: int, j: int) -> int:
    """Scalar by which ``t_{n,m}`` acts on the ``B_j`` summand of the canonical model."""
    return comb(n - j, n - m) if j <= m else 0
