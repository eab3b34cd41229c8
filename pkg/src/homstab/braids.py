"""Configuration spaces of points in the plane and on the sphere, at desk scale.

Two independent models:

* the mod-2 cochain complex on compositions of ``n`` computing
  ``H^*(C_n(R^2); F_2)``;
* group presentations (Artin braid group, spherical braid group) whose
  abelianisations give ``H_1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterator, Sequence

from .linalg import AbelianGroupInvariants, IntegerMatrix, check_characteristic, cokernel_invariants, rank_over_field

Composition = tuple[int, ...]


def compositions(n: int, k: int) -> list[Composition]:
    """All compositions of ``n`` into ``k`` positive parts, lexicographic."""
    if k == 0:
        return [()] if n == 0 else []
    if k == 1:
        return [(n,)] if n >= 1 else []
    out = []
    for first in range(1, n - k + 2):
        out.extend((first,) + rest for rest in compositions(n - first, k - 1))
    return out


def composition_degree(c: Composition) -> int:
    return sum(c) - len(c)


@dataclass(frozen=True)
class FuksComplex:
    """Compositions of ``n``; one with ``k`` parts sits in degree ``n - k``.
    The differential merges adjacent parts ``a, b`` with coefficient
    ``binom(a + b, a) mod 2``."""

    n: int

    def basis(self, degree: int) -> list[Composition]:
        return compositions(self.n, self.n - degree) if 0 <= degree < self.n else []

    def differential(self, degree: int) -> IntegerMatrix:
        """Matrix of ``delta: C^degree -> C^{degree+1}`` over F_2 (entries 0/1)."""
        src = self.basis(degree)
        dst = self.basis(degree + 1)
        pos = {c: i for i, c in enumerate(dst)}
        cols = []
        for c in src:
            col: dict[int, int] = {}
            for j in range(len(c) - 1):
                if comb(c[j] + c[j + 1], c[j]) % 2:
                    merged = c[:j] + (c[j] + c[j + 1],) + c[j + 2:]
                    r = pos[merged]
                    col[r] = (col.get(r, 0) + 1) % 2
            cols.append(col)
        return IntegerMatrix(len(dst), len(src), cols)

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * len(self.basis(i)) for i in range(self.n))


@lru_cache(maxsize=None)
def fuks_mod2_dims(n: int) -> tuple[int, ...]:
    """``dim H^i(C_n(R^2); F_2)`` for ``i = 0 .. n-1``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    fc = FuksComplex(n)
    ranks = [rank_over_field(fc.differential(i), 2) for i in range(n)]
    return tuple(len(fc.basis(i)) - ranks[i] - (ranks[i - 1] if i else 0) for i in range(n))


def stability_table_mod2(n_max: int, i_max: int) -> list[list[int]]:
    """``table[i][n-1] = dim H^i(C_n(R^2); F_2)`` for ``1 <= n <= n_max``."""
    rows = [[0] * n_max for _ in range(i_max + 1)]
    for n in range(1, n_max + 1):
        dims = fuks_mod2_dims(n)
        for i in range(min(i_max + 1, len(dims))):
            rows[i][n - 1] = dims[i]
    return rows


# ---------------------------------------------------------------------------
# presentations

Word = tuple[int, ...]


@dataclass(frozen=True)
class GroupPresentation:
    """Generators are ``1..generators``; a relator is a word of signed indices
    (``-g`` is the inverse of generator ``g``)."""

    generators: int
    relators: tuple[Word, ...]

    def __post_init__(self):
        for w in self.relators:
            for letter in w:
                if letter == 0 or abs(letter) > self.generators:
                    raise ValueError(f"letter {letter} out of range in relator {w}")

    def exponent_sums(self) -> IntegerMatrix:
        """Rows are generators, columns relators."""
        cols = []
        for w in self.relators:
            col: dict[int, int] = {}
            for letter in w:
                g = abs(letter) - 1
                col[g] = col.get(g, 0) + (1 if letter > 0 else -1)
            cols.append(col)
        return IntegerMatrix(self.generators, len(self.relators), cols)


def _braid_relators(n: int) -> Iterator[Word]:
    for i in range(1, n - 1):
        yield (i, i + 1, i, -(i + 1), -i, -(i + 1))
    for i in range(1, n):
        for j in range(i + 2, n):
            yield (i, j, -i, -j)


def artin_presentation(n: int) -> GroupPresentation:
    if n < 1:
        raise ValueError("n must be at least 1")
    return GroupPresentation(max(n - 1, 0), tuple(_braid_relators(n)))


def spherical_presentation(n: int) -> GroupPresentation:
    """Artin relators plus ``s_1 s_2 ... s_{n-1} s_{n-1} ... s_2 s_1``."""
    if n < 2:
        raise ValueError("the spherical braid presentation needs n >= 2")
    gens = tuple(range(1, n))
    surface = gens + gens[::-1]
    return GroupPresentation(n - 1, tuple(_braid_relators(n)) + (surface,))


def abelianization(p: GroupPresentation) -> AbelianGroupInvariants:
    return cokernel_invariants(p.exponent_sums())


def h1_mod_p(p: GroupPresentation, char: int) -> int:
    """``dim_{F_p}`` of the abelianisation tensored with ``F_p``."""
    if char == 0 or check_characteristic(char) != char:
        raise ValueError("a prime characteristic is required")
    return abelianization(p).dim_mod(char)


def free_presentation(rank: int) -> GroupPresentation:
    return GroupPresentation(rank, ())


def sphere_h1_table(ns: Sequence[int], char: int) -> list[int]:
    return [h1_mod_p(spherical_presentation(n), char) for n in ns]
