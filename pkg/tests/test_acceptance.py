"""Acceptance suite: each criterion at full scale, with its time budget.

Run under pytest, or directly with ``python3 tests/test_acceptance.py`` to
print only the pass/fail lines.
"""

import time

import pytest

from homstab import verify

CFG = verify.SCALES["full"]

# name -> (runner, seconds allowed)
CRITERIA = {
    "injective words F(1..7): wedge of spheres, derangement ranks": (
        lambda: verify.check_injective_words(CFG["inj_n"]), 60),
    "mod-2 braid table n<=12, i<=6: stable range, monotone, H^1 oracle": (
        lambda: verify.check_braid_table(CFG["braid_n"], CFG["braid_i"]), 120),
    "spherical braids n=2..20: H_1 = Z/(2n-2), mod 2 constant, mod 3 unstable": (
        lambda: verify.check_sphere(CFG["sphere_n"]), 5),
    "tau: zero for odd d, index 2 for even d (d=2..10)": (
        lambda: verify.check_tau(10), 5),
    "Dold engine: 100 random systems split, perturbations detected": (
        lambda: verify.check_dold(CFG["dold_trials"]), 30),
    "half-smash on F(1..6): reduced homology vanishes through degree n-1": (
        lambda: verify.check_half_smash(CFG["hs_n"]), 60),
    "machinery: dd=0, 1000 SNF certificates, transfer, 50 spectral sequences": (
        lambda: verify.check_machinery(CFG["snf_trials"], CFG["ss_trials"]), 60),
}

REPORT: list[str] = []


def run_criterion(name):
    runner, budget = CRITERIA[name]
    t0 = time.perf_counter()
    chk = runner()
    secs = time.perf_counter() - t0
    ok = chk.passed and secs < budget
    line = f"[{'PASS' if ok else 'FAIL'}] {name} ({secs:.2f}s / {budget}s) {chk.detail}"
    REPORT.append(line)
    print(line)
    return chk, secs, budget


@pytest.mark.parametrize("name", list(CRITERIA))
def test_criterion(name):
    chk, secs, budget = run_criterion(name)
    assert chk.passed, chk.detail
    assert secs < budget, f"took {secs:.1f}s, budget {budget}s"


if __name__ == "__main__":
    for name in CRITERIA:
        run_criterion(name)
