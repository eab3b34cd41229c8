"""The complex of injective words on ``n`` letters and its wedge-of-spheres
certificate."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from math import factorial

from .chains import homology_all
from .ssets import SemiSimplicialSet, chain_complex_of

MAX_CERTIFIED_N = 7


class WedgeCertificationError(AssertionError):
    pass


@dataclass(frozen=True)
class InjectiveWordsComplex:
    n: int
    sset: SemiSimplicialSet


def build_injective_words(n: int) -> InjectiveWordsComplex:
    """``k``-simplices are injective words of length ``k+1`` over ``1..n``
    in lexicographic order; ``d_j`` deletes the ``j``-th letter."""
    if n < 0:
        raise ValueError("alphabet size must be nonnegative")
    letters = range(1, n + 1)
    levels = [sorted(permutations(letters, k + 1)) for k in range(n)]
    sset = SemiSimplicialSet.from_face_function(levels, lambda k, w, j: w[:j] + w[j + 1:])
    return InjectiveWordsComplex(n, sset)


def level_size(n: int, k: int) -> int:
    """Number of injective words of length ``k+1`` on ``n`` letters."""
    return factorial(n) // factorial(n - k - 1) if 0 <= k < n else 0


def expected_top_rank(n: int) -> int:
    """``|reduced Euler characteristic|`` of F(n), from the level counts alone."""
    if n < 1:
        raise ValueError("n must be at least 1")
    chi = -1 + sum((-1) ** k * level_size(n, k) for k in range(n))
    return abs(chi)


def derangements(n: int) -> int:
    """``D_n`` by ``D_n = (n-1)(D_{n-1} + D_{n-2})``."""
    a, b = 1, 0  # D_0, D_1
    if n == 0:
        return a
    for m in range(2, n + 1):
        a, b = b, (m - 1) * (a + b)
    return b


@dataclass
class WedgeReport:
    n: int
    reduced_betti: tuple[int, ...]
    top_rank: int
    torsion_free: bool
    torsion: dict[int, tuple[int, ...]] = field(default_factory=dict)


def certify_wedge(n: int) -> WedgeReport:
    """Check that F(n) has the reduced integral homology of a wedge of
    ``(n-1)``-spheres; raise ``WedgeCertificationError`` if it does not."""
    if n < 1:
        raise ValueError("n must be at least 1")
    hom = homology_all(chain_complex_of(build_injective_words(n).sset))
    h0 = hom[0]
    if h0.torsion or h0.free_rank < 1:
        raise WedgeCertificationError(f"H_0 of F({n}) is {h0}")
    betti = [h0.free_rank - 1] + [hom[k].free_rank for k in range(1, n)]
    torsion = {k: g.torsion for k, g in hom.items() if g.torsion}
    report = WedgeReport(n, tuple(betti), betti[n - 1], not torsion, torsion)
    for k in range(n - 1):
        if betti[k] or k in torsion:
            raise WedgeCertificationError(f"F({n}) has reduced homology in degree {k}: {hom[k]}")
    if torsion:
        raise WedgeCertificationError(f"F({n}) has torsion {torsion}")
    return report
