"""Batch checks behind ``homstab verify-all``.

Each check returns a :class:`Check`; ``scale="small"`` shrinks parameter
ranges so the whole sweep finishes in a few seconds.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable

from . import braids, chains, injwords, ssets, stability
from .linalg import IntegerMatrix, smith_normal_form


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


SCALES = {
    "small": dict(inj_n=5, braid_n=8, braid_i=4, sphere_n=20, dold_trials=10, hs_n=4, snf_trials=100, ss_trials=10),
    "full": dict(inj_n=7, braid_n=12, braid_i=6, sphere_n=20, dold_trials=100, hs_n=6, snf_trials=1000, ss_trials=50),
}


def check_injective_words(n_max: int) -> Check:
    tops = []
    for n in range(1, n_max + 1):
        try:
            rep = injwords.certify_wedge(n)
        except injwords.WedgeCertificationError as exc:
            return Check("injective-words", False, str(exc))
        if rep.top_rank != injwords.expected_top_rank(n) or rep.top_rank != injwords.derangements(n):
            return Check("injective-words", False, f"n={n}: top rank {rep.top_rank}")
        tops.append(rep.top_rank)
    return Check("injective-words", True, f"top ranks {tops}")


def braid_table(n_max: int, i_max: int) -> stability.StabilityTable:
    rows = braids.stability_table_mod2(n_max, i_max)
    return stability.StabilityTable(tuple(tuple(r) for r in rows), "H^i(C_n(R^2); F_2)", first_n=1)


def check_braid_table(n_max: int, i_max: int) -> Check:
    table = braid_table(n_max, i_max)
    stable_bad = stability.stable_range_violations(table)
    mono_bad = stability.monotonicity_violations(table)
    h1 = [braids.h1_mod_p(braids.artin_presentation(n), 2) if n >= 2 else 0 for n in table.ns]
    oracle_ok = len(table.dims) < 2 or list(table.dims[1]) == h1
    ok = not stable_bad and not mono_bad and oracle_ok
    return Check("braid-table", ok,
                 f"stable-range violations {stable_bad}, monotonicity violations {mono_bad}, H^1 oracle {'ok' if oracle_ok else 'MISMATCH'}")


def check_sphere(n_max: int) -> Check:
    bad = []
    for n in range(2, n_max + 1):
        p = braids.spherical_presentation(n)
        g = braids.abelianization(p)
        if g.free_rank or g.torsion != (2 * n - 2,):
            bad.append((n, str(g)))
        if braids.h1_mod_p(p, 2) != 1:
            bad.append((n, "mod 2"))
        if braids.h1_mod_p(p, 3) != int((2 * n - 2) % 3 == 0):
            bad.append((n, "mod 3"))
    mod3 = stability.StabilityTable((tuple(braids.sphere_h1_table(range(2, n_max + 1), 3)),), "mod 3", first_n=2)
    onset = stability.stability_range(mod3)[0].onset
    if n_max >= 4 and onset is not None:
        bad.append(("mod-3 onset", onset))
    return Check("sphere-h1", not bad, f"failures {bad}")


def check_tau(d_max: int = 10) -> Check:
    bad = []
    for d in range(2, d_max + 1):
        r = stability.tau_experiment(d)
        expect = None if d % 2 else 2
        if r.image_index != expect:
            bad.append((d, r.verdict))
    return Check("tau", not bad, f"failures {bad}")


def check_dold(trials: int, seed: int = 0) -> Check:
    bad = []
    for t in range(trials):
        s = stability.random_dold_system(seed + t, N=1 + (seed + t) % 6)
        dec = stability.dold_decompose(s)
        if not (dec.iso and dec.ti_invertible):
            bad.append(seed + t)
            continue
        rng = random.Random(seed + t)
        slots = [k for k in range(1, s.length + 1) if s.dims[k] and s.dims[k - 1]]
        for _ in range(3 if slots else 0):
            n = rng.choice(slots)
            row, col = rng.randrange(s.dims[n - 1]), rng.randrange(s.dims[n])
            caught = stability.verify_dold_relations(stability.perturb_transfer(s, n, row, col)) is not None
            if caught != stability.perturbation_is_constrained(s, n, col):
                bad.append(("perturbation", seed + t, n, row, col))
    return Check("dold", not bad, f"{trials} systems, failures {bad}")


def check_half_smash(n_max: int) -> Check:
    bad = []
    for n in range(1, n_max + 1):
        hs = ssets.half_smash_construction(injwords.build_injective_words(n).sset)
        c = ssets.reduced_chain_complex_of(hs)
        for k in range(0, n):
            g = chains.homology_integral(c, k)
            if not g.is_trivial():
                bad.append((n, k, str(g)))
    return Check("half-smash", not bad, f"failures {bad}")


def check_machinery(snf_trials: int, ss_trials: int, seed: int = 0) -> Check:
    rng = random.Random(seed)
    for _ in range(snf_trials):
        r, c = rng.randint(0, 8), rng.randint(0, 8)
        m = IntegerMatrix.from_rows([[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)], ncols=c)
        f = smith_normal_form(m)
        if f.left @ m @ f.right != IntegerMatrix.diagonal(r, c, f.diagonal):
            return Check("machinery", False, f"SNF certificate fails on {m!r}")
    for n in range(1, 7):
        c = ssets.chain_complex_of(injwords.build_injective_words(n).sset)
        if chains.validate_complex(c) is not None:
            return Check("machinery", False, f"d o d != 0 on F({n})")
    b = ssets.circle()
    e = ssets.SemiSimplicialSet((("u0", "u1"), ("f0", "f1")), ((), ((1, 0), (0, 1))))
    p = ssets.LevelwiseMap(e, b, ((0, 0), (0, 0)))
    comp = ssets.projection_map(p).compose(ssets.covering_transfer(p))
    if any(comp.at(k) != IntegerMatrix.identity(b.size(k), 2) for k in range(2)):
        return Check("machinery", False, "p o trf != 2 id on the double cover of the circle")
    for t in range(ss_trials):
        for char in (2, 3):
            fc = random_filtered_complex(rng)
            pages = chains.spectral_pages(fc, char, fc.max_level() + 2)
            dims = chains.homology_field_dims(fc.ambient, char)
            last = pages[-1]
            if any(last.total(n) != dims[n - fc.ambient.bottom_degree] for n in fc.ambient.degrees()):
                return Check("machinery", False, f"E-infinity totals differ from homology (trial {t}, char {char})")
    return Check("machinery", True, f"{snf_trials} SNF certificates, {ss_trials} x 2 spectral sequences")


def random_filtered_complex(rng: random.Random, max_dim: int = 3, max_simplices: int = 5) -> chains.FilteredComplex:
    """Skeletal-plus-random filtration on a random semi-simplicial set.

    Simplices get a level no lower than any of their faces, so boundaries
    never raise filtration.
    """
    x = random_sset(rng, max_dim, max_simplices)
    c = ssets.chain_complex_of(x)
    levels: dict[int, tuple[int, ...]] = {}
    for k in c.degrees():
        lv = []
        for a in range(x.size(k)):
            floor = max((levels[k - 1][f] for f in x.faces[k][a]), default=0) if k else 0
            lv.append(floor + rng.randint(0, 2))
        levels[k] = tuple(lv)
    return chains.FilteredComplex(c, levels)


def random_sset(rng: random.Random, max_dim: int = 3, max_simplices: int = 5) -> ssets.SemiSimplicialSet:
    """Random semi-simplicial set built by attaching simplices along
    compatible boundaries (each new simplex has faces drawn so that the
    simplicial identities hold)."""
    levels: list[list[int]] = [list(range(rng.randint(1, max_simplices)))]
    faces: list[list[tuple[int, ...]]] = [[]]
    for k in range(1, max_dim + 1):
        new: list[tuple[int, ...]] = []
        for _ in range(rng.randint(0, max_simplices) * 4):
            if len(new) >= max_simplices:
                break
            cand = _random_compatible_faces(rng, faces, levels, k)
            if cand is not None:
                new.append(cand)
        if not new:
            break
        levels.append(list(range(len(new))))
        faces.append(new)
    return ssets.SemiSimplicialSet(tuple(tuple(lv) for lv in levels), tuple(tuple(f) for f in faces))


def _random_compatible_faces(rng, faces, levels, k):
    if k == 1:
        return (rng.choice(levels[0]), rng.choice(levels[0]))
    # choose faces one at a time, keeping only those consistent with earlier ones
    chosen: list[int] = []
    lower = faces[k - 1]
    for j in range(k + 1):
        options = []
        for cand in range(len(levels[k - 1])):
            ok = True
            for i, fi in enumerate(chosen):  # i < j: d_i d_j = d_{j-1} d_i
                if lower[cand][i] != lower[fi][j - 1]:
                    ok = False
                    break
            if ok:
                options.append(cand)
        if not options:
            return None
        chosen.append(rng.choice(options))
    return tuple(chosen)


def run_all(scale: str = "full", seed: int = 0, progress: Callable[[Check], None] | None = None) -> list[Check]:
    cfg = SCALES[scale]
    jobs = [
        lambda: check_injective_words(cfg["inj_n"]),
        lambda: check_braid_table(cfg["braid_n"], cfg["braid_i"]),
        lambda: check_sphere(cfg["sphere_n"]),
        lambda: check_tau(),
        lambda: check_dold(cfg["dold_trials"], seed),
        lambda: check_half_smash(cfg["hs_n"]),
        lambda: check_machinery(cfg["snf_trials"], cfg["ss_trials"], seed),
    ]
    out = []
    for job in jobs:
        t0 = time.perf_counter()
        chk = job()
        chk.seconds = time.perf_counter() - t0
        out.append(chk)
        if progress:
            progress(chk)
    return out
