"""Chain complexes of free abelian groups and what one computes from them:
integral homology, homology over a field, mapping cones, suspensions and the
pages of the spectral sequence of a filtration.

Degrees run upwards from ``bottom_degree``.  The boundary in degree ``k`` is
a matrix of shape ``rank(k-1) x rank(k)`` acting on column vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .linalg import (
    AbelianGroupInvariants,
    IntegerMatrix,
    check_characteristic,
    field_rank,
    invariant_factors,
    nullspace,
    rank_over_field,
)


class InvalidComplexError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ChainComplex:
    bottom_degree: int
    ranks: tuple[int, ...]
    boundaries: Mapping[int, IntegerMatrix]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(self.ranks))
        bd = dict(self.boundaries)
        for k, m in bd.items():
            if m.shape != (self.rank(k - 1), self.rank(k)):
                raise InvalidComplexError(
                    f"boundary in degree {k} has shape {m.shape}, "
                    f"expected {(self.rank(k - 1), self.rank(k))}"
                )
        object.__setattr__(self, "boundaries", bd)

    @classmethod
    def from_matrices(cls, ranks: Sequence[int], boundaries: Mapping[int, Sequence[Sequence[int]]],
                      bottom_degree: int = 0) -> "ChainComplex":
        """Build from plain nested lists; missing boundaries are zero."""
        ranks = tuple(ranks)

        def rk(k):
            i = k - bottom_degree
            return ranks[i] if 0 <= i < len(ranks) else 0

        mats = {k: IntegerMatrix.from_rows(rows, ncols=rk(k)) for k, rows in boundaries.items()}
        return cls(bottom_degree, ranks, mats)

    @property
    def top_degree(self) -> int:
        return self.bottom_degree + len(self.ranks) - 1

    def degrees(self) -> range:
        return range(self.bottom_degree, self.top_degree + 1)

    def rank(self, k: int) -> int:
        i = k - self.bottom_degree
        return self.ranks[i] if 0 <= i < len(self.ranks) else 0

    def boundary(self, k: int) -> IntegerMatrix:
        m = self.boundaries.get(k)
        if m is None:
            return IntegerMatrix.zeros(self.rank(k - 1), self.rank(k))
        return m

    def _factors(self, k: int) -> tuple[int, ...]:
        key = ("if", k)
        if key not in self._cache:
            self._cache[key] = invariant_factors(self.boundary(k))
        return self._cache[key]

    def _rank(self, k: int, char: int) -> int:
        if char == 0:
            return len(self._factors(k))
        key = ("rk", k, char)
        if key not in self._cache:
            self._cache[key] = rank_over_field(self.boundary(k), char)
        return self._cache[key]

    def shift(self, by: int, sign: bool = True) -> "ChainComplex":
        """Regrade by ``by``; boundaries pick up ``(-1)**by`` when ``sign``."""
        s = -1 if (sign and by % 2) else 1
        return ChainComplex(
            self.bottom_degree + by,
            self.ranks,
            {k + by: (m if s == 1 else -m) for k, m in self.boundaries.items()},
        )


def validate_complex(c: ChainComplex) -> int | None:
    """Return the first degree ``k`` with ``d_{k-1} d_k != 0``, or ``None``."""
    for k in range(c.bottom_degree + 1, c.top_degree + 1):
        prod = c.boundary(k - 1) @ c.boundary(k)
        if not prod.is_zero():
            return k
    return None


def _require_valid(c: ChainComplex) -> None:
    bad = validate_complex(c)
    if bad is not None:
        raise InvalidComplexError(f"d o d != 0 at degree {bad}")


def homology_integral(c: ChainComplex, k: int) -> AbelianGroupInvariants:
    """``ker d_k / im d_{k+1}`` over Z."""
    _require_valid(c)
    rank_out = len(c._factors(k))
    incoming = c._factors(k + 1)
    return AbelianGroupInvariants.from_diagonal(c.rank(k) - rank_out - len(incoming), incoming)


def homology_all(c: ChainComplex) -> dict[int, AbelianGroupInvariants]:
    _require_valid(c)
    return {k: homology_integral(c, k) for k in c.degrees()}


def homology_field_dims(c: ChainComplex, char: int) -> tuple[int, ...]:
    """Betti numbers over Q or F_p, one per degree from ``bottom_degree``."""
    check_characteristic(char)
    _require_valid(c)
    return tuple(c.rank(k) - c._rank(k, char) - c._rank(k + 1, char) for k in c.degrees())


def euler_characteristic(c: ChainComplex) -> int:
    return sum((-1) ** k * c.rank(k) for k in c.degrees())


@dataclass(frozen=True)
class ChainMap:
    source: ChainComplex
    target: ChainComplex
    blocks: Mapping[int, IntegerMatrix]

    def __post_init__(self):
        for k, m in self.blocks.items():
            if m.shape != (self.target.rank(k), self.source.rank(k)):
                raise InvalidComplexError(f"chain map block in degree {k} has shape {m.shape}")

    def at(self, k: int) -> IntegerMatrix:
        m = self.blocks.get(k)
        if m is None:
            return IntegerMatrix.zeros(self.target.rank(k), self.source.rank(k))
        return m

    def degrees(self) -> range:
        lo = min(self.source.bottom_degree, self.target.bottom_degree)
        hi = max(self.source.top_degree, self.target.top_degree)
        return range(lo, hi + 1)

    def compose(self, other: "ChainMap") -> "ChainMap":
        """``self o other``."""
        if other.target is not self.source and other.target.ranks != self.source.ranks:
            raise InvalidComplexError("maps are not composable")
        degs = set(self.blocks) | set(other.blocks)
        return ChainMap(other.source, self.target, {k: self.at(k) @ other.at(k) for k in degs})


def validate_chain_map(f: ChainMap) -> int | None:
    """First degree where ``d f != f d``, or ``None``."""
    for k in f.degrees():
        lhs = f.target.boundary(k) @ f.at(k)
        rhs = f.at(k - 1) @ f.source.boundary(k)
        if lhs != rhs:
            return k
    return None


def identity_map(c: ChainComplex) -> ChainMap:
    return ChainMap(c, c, {k: IntegerMatrix.identity(c.rank(k)) for k in c.degrees()})


def mapping_cone(f: ChainMap) -> ChainComplex:
    """Cone with ``Cone_k = T_k + S_{k-1}`` and boundary ``[[dT, f], [0, -dS]]``."""
    bad = validate_chain_map(f)
    if bad is not None:
        raise InvalidComplexError(f"not a chain map (fails in degree {bad})")
    s, t = f.source, f.target
    lo = min(t.bottom_degree, s.bottom_degree + 1)
    hi = max(t.top_degree, s.top_degree + 1)
    ranks = tuple(t.rank(k) + s.rank(k - 1) for k in range(lo, hi + 1))
    bd = {}
    for k in range(lo + 1, hi + 1):
        bd[k] = IntegerMatrix.block([
            [t.boundary(k), f.at(k - 1)],
            [IntegerMatrix.zeros(s.rank(k - 2), t.rank(k)), -s.boundary(k - 1)],
        ])
    return ChainComplex(lo, ranks, bd)


def augmentation(c: ChainComplex) -> ChainMap:
    """The map to Z in degree 0 sending every degree-0 generator to 1."""
    point = ChainComplex(0, (1,), {})
    d1 = c.boundary(1)
    for j in range(d1.cols):
        if sum(d1.column(j).values()):
            raise InvalidComplexError("complex is not augmented: d_1 column sums are nonzero")
    return ChainMap(c, point, {0: IntegerMatrix.from_rows([[1] * c.rank(0)], ncols=c.rank(0))})


def suspension(c: ChainComplex, reduced: bool = False) -> ChainComplex:
    """Chains of the suspension, with reduced homology moved up one degree.

    An unreduced complex is first augmented (cone of the augmentation); pass
    ``reduced=True`` for a complex already computing reduced homology and it
    is simply shifted.
    """
    if reduced:
        return c.shift(1)
    if c.bottom_degree != 0:
        raise InvalidComplexError("augmentation needs a complex starting in degree 0")
    return mapping_cone(augmentation(c))


# ---------------------------------------------------------------------------
# filtrations and spectral sequences


@dataclass(frozen=True)
class FilteredComplex:
    """``ambient`` plus an integer level for every basis element;
    ``levels[k][j]`` belongs to generator ``j`` in degree ``k``."""

    ambient: ChainComplex
    levels: Mapping[int, tuple[int, ...]]

    def level(self, k: int) -> tuple[int, ...]:
        return tuple(self.levels.get(k, (0,) * self.ambient.rank(k)))

    def max_level(self) -> int:
        return max((max(v) for v in self.levels.values() if v), default=0)


def validate_filtration(fc: FilteredComplex) -> tuple[int, int] | None:
    """First ``(degree, generator)`` whose boundary raises filtration, else ``None``."""
    c = fc.ambient
    for k in c.degrees():
        lv = fc.level(k)
        if len(lv) != c.rank(k):
            return (k, -1)
        if any(x < 0 for x in lv):
            return (k, lv.index(min(lv)))
        below = fc.level(k - 1)
        d = c.boundary(k)
        for j in range(d.cols):
            if any(below[r] > lv[j] for r in d.column(j)):
                return (k, j)
    return None


@dataclass(frozen=True)
class SpectralPage:
    r: int
    dims: Mapping[tuple[int, int], int]
    char: int

    def total(self, n: int) -> int:
        return sum(v for (s, t), v in self.dims.items() if s + t == n)


def _dense(m: IntegerMatrix, rows: Sequence[int], cols: Sequence[int]) -> list[list[int]]:
    full = m.to_rows()
    return [[full[r][c] for c in cols] for r in rows]


def _subspace_dims(fc: FilteredComplex, n: int, s: int, r: int, char: int) -> int:
    """dim E^r_{s, n-s} = dim Z^r_s - dim(Z^{r-1}_{s-1} + B^{r-1}_s)."""
    c = fc.ambient
    lv = fc.level(n)
    lv_below = fc.level(n - 1)
    lv_above = fc.level(n + 1)
    d = c.boundary(n)
    d_up = c.boundary(n + 1)
    dim_n = c.rank(n)

    def z(rr: int, ss: int) -> list[list]:
        # {x in F_ss C_n : d x in F_{ss-rr} C_{n-1}} as vectors of length dim_n
        cols = [j for j in range(dim_n) if lv[j] <= ss]
        rows = [i for i in range(c.rank(n - 1)) if lv_below[i] > ss - rr]
        basis = nullspace(_dense(d, rows, cols), len(cols), char)
        out = []
        for v in basis:
            full = [0] * dim_n
            for j, x in zip(cols, v):
                full[j] = x
            out.append(full)
        return out

    def b(rr: int, ss: int) -> list[list]:
        # F_ss C_n intersected with d(F_{ss+rr} C_{n+1})
        cols = [j for j in range(c.rank(n + 1)) if lv_above[j] <= ss + rr]
        rows_out = [i for i in range(dim_n) if lv[i] > ss]
        ys = nullspace(_dense(d_up, rows_out, cols), len(cols), char)
        full_d = d_up.to_rows()
        out = []
        for y in ys:
            out.append([sum(full_d[i][j] * yj for j, yj in zip(cols, y)) for i in range(dim_n)])
        return out

    zr = z(r, s)
    dim_z = len(zr)
    if dim_z == 0:
        return 0
    denom = z(r - 1, s - 1) + b(r - 1, s)
    return dim_z - field_rank(denom, char) if denom else dim_z


def spectral_pages(fc: FilteredComplex, char: int, r_max: int) -> list[SpectralPage]:
    """Pages ``E^1 .. E^{r_max}`` of the spectral sequence of a filtration,
    computed directly from the cycle/boundary subspaces.  Field coefficients
    only: pass 0 for Q or a prime."""
    if char is None:
        raise ValueError("integral spectral sequences are not supported")
    check_characteristic(char)
    bad = validate_filtration(fc)
    if bad is not None:
        raise InvalidComplexError(f"filtration raised by boundary at {bad}")
    _require_valid(fc.ambient)
    c = fc.ambient
    pages = []
    for r in range(1, r_max + 1):
        dims = {}
        for n in c.degrees():
            if c.rank(n) == 0:
                continue
            for s in sorted(set(fc.level(n))):
                v = _subspace_dims(fc, n, s, r, char)
                if v:
                    dims[(s, n - s)] = v
        pages.append(SpectralPage(r, dims, char))
    return pages
