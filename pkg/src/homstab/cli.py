"""Command-line runner: ``homstab <command> [options]``.

Every command produces an :class:`ExperimentResult`, printed as a table, JSON
or CSV.  Results are cached on disk under a key derived from the command and
its canonical parameters; the exit status is 0 exactly when every asserted
property passed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable

from . import braids, chains, injwords, ssets, stability, verify

DEFAULT_BRAID_CAP = 12
CACHE_ENV = "HOMSTAB_CACHE_DIR"


class UsageError(Exception):
    pass


@dataclass
class ExperimentResult:
    experiment: str
    params: dict[str, Any]
    results: list[dict[str, Any]] = field(default_factory=list)
    status: str = "pass"
    wall_ms: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentResult":
        d = json.loads(text)
        return cls(d["experiment"], d["params"], d["results"], d["status"], d["wall_ms"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "n", "value"])
        for r in self.results:
            w.writerow([r.get("i", ""), r.get("n", ""), r["value"]])
        return buf.getvalue()

    def to_table(self) -> str:
        lines = [f"{self.experiment}  {json.dumps(self.params, sort_keys=True)}"]
        lines.append(f"{'i':>4} {'n':>4}  value")
        for r in self.results:
            i = "" if r.get("i") is None else r["i"]
            n = "" if r.get("n") is None else r["n"]
            lines.append(f"{i!s:>4} {n!s:>4}  {r['value']}")
        lines.append(f"status: {self.status}  ({self.wall_ms} ms)")
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json() + "\n"
        if fmt == "csv":
            return self.to_csv()
        return self.to_table()


def _record(value, i=None, n=None) -> dict[str, Any]:
    rec: dict[str, Any] = {}
    if i is not None:
        rec["i"] = i
    if n is not None:
        rec["n"] = n
    rec["value"] = value
    return rec


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


# ---------------------------------------------------------------------------
# experiments (pure functions of their parameters)


def cmd_injwords(n: int, max_n: int = injwords.MAX_CERTIFIED_N) -> ExperimentResult:
    if not 0 <= n <= max_n:
        raise UsageError(f"n must lie in 0..{max_n}")
    res = ExperimentResult("injwords", {"n": n})
    if n == 0:
        return res
    try:
        rep = injwords.certify_wedge(n)
    except injwords.WedgeCertificationError as exc:
        res.status = "fail"
        res.results.append(_record(str(exc), n=n))
        return res
    res.results = [_record(b, i=k, n=n) for k, b in enumerate(rep.reduced_betti)]
    res.status = _status(rep.torsion_free and rep.top_rank == injwords.expected_top_rank(n))
    return res


def _fuks_column(n: int) -> tuple[int, tuple[int, ...]]:
    return n, braids.fuks_mod2_dims(n)


def cmd_braid_table(n_max: int, deg_max: int, cap: int = DEFAULT_BRAID_CAP, jobs: int = 1) -> ExperimentResult:
    if not 1 <= n_max <= cap:
        raise UsageError(f"n_max must lie in 1..{cap}")
    if deg_max < 0:
        raise UsageError("deg_max must be nonnegative")
    columns = dict(_map(_fuks_column, range(1, n_max + 1), jobs))
    dims = tuple(
        tuple(columns[n][i] if i < len(columns[n]) else 0 for n in range(1, n_max + 1))
        for i in range(deg_max + 1)
    )
    table = stability.StabilityTable(dims, "H^i(C_n(R^2); F_2)", first_n=1)
    res = ExperimentResult("braid-table", {"n_max": n_max, "deg_max": deg_max})
    res.results = [_record(v, i=i, n=n) for i, row in enumerate(dims) for n, v in zip(table.ns, row)]
    onsets = stability.stability_range(table)
    for o in onsets:
        res.results.append(_record(f"onset={o.onset if o.onset is not None else 'none'} "
                                   f"within_2i={'pass' if o.within_bound else 'fail'}", i=o.degree))
    stable_ok = not stability.stable_range_violations(table)
    mono_ok = not stability.monotonicity_violations(table)
    h1_ok = True
    if deg_max >= 1:
        oracle = [braids.h1_mod_p(braids.artin_presentation(n), 2) if n >= 2 else 0 for n in table.ns]
        h1_ok = list(dims[1]) == oracle
    res.results.append(_record(f"stable_range={_status(stable_ok)} monotone={_status(mono_ok)} "
                               f"h1_oracle={_status(h1_ok)}"))
    res.status = _status(stable_ok and mono_ok and h1_ok and all(o.within_bound for o in onsets))
    return res


def cmd_sphere_h1(n: int, char: int | None = None) -> ExperimentResult:
    if n < 2:
        raise UsageError("n must be at least 2")
    p = braids.spherical_presentation(n)
    res = ExperimentResult("sphere-h1", {"n": n, "char": char})
    if char is None:
        g = braids.abelianization(p)
        res.results = [_record(str(g), n=n)]
        res.status = _status(g.free_rank == 0 and g.torsion == (2 * n - 2,))
    else:
        try:
            dim = braids.h1_mod_p(p, char)
        except ValueError as exc:
            raise UsageError(str(exc))
        res.results = [_record(dim, n=n)]
        res.status = _status(dim == int((2 * n - 2) % char == 0))
    return res


def cmd_tau(d: int) -> ExperimentResult:
    if d < 2:
        raise UsageError("d must be at least 2")
    r = stability.tau_experiment(d)
    res = ExperimentResult("tau", {"d": d})
    res.results = [_record(str(r.target_group), i=d - 1), _record(r.verdict)]
    res.status = _status(r.image_index == (None if d % 2 else 2))
    return res


def cmd_dold(seed: int, N: int, dims: list[int] | None) -> ExperimentResult:
    if N < 0:
        raise UsageError("N must be nonnegative")
    if dims is not None:
        if len(dims) > N + 1:
            raise UsageError(f"--dims takes at most N+1 = {N + 1} entries")
        if any(d < 0 for d in dims):
            raise UsageError("--dims entries must be nonnegative")
        dims = list(dims) + [0] * (N + 1 - len(dims))  # missing top summands are zero
    s = stability.random_dold_system(seed, N, dims)
    res = ExperimentResult("dold", {"seed": seed, "N": N, "dims": dims})
    rel = stability.verify_dold_relations(s)
    if rel is not None:
        res.results = [_record(f"relation fails at n={rel}")]
        res.status = "fail"
        return res
    dec = stability.dold_decompose(s, record_scalars=True)
    res.results = [_record(b, n=n) for n, b in enumerate(dec.b_dims)]
    for n, sc in enumerate(dec.ti_scalars):
        res.results.append(_record("t_{n+1} i_n scalars " + " ".join(str(x) for x in sc), n=n))
    res.results.append(_record(f"iso={str(dec.iso).lower()} ti_invertible={str(dec.ti_invertible).lower()}"))
    ok = dec.iso and dec.ti_invertible and (dims is None or list(dec.b_dims) == list(dims))
    res.status = _status(ok)
    return res


def cmd_halfsmash(n: int, max_n: int = injwords.MAX_CERTIFIED_N) -> ExperimentResult:
    if not 1 <= n <= max_n:
        raise UsageError(f"n must lie in 1..{max_n}")
    x = injwords.build_injective_words(n).sset
    c = ssets.reduced_chain_complex_of(ssets.half_smash_construction(x))
    hom = chains.homology_all(c)
    res = ExperimentResult("halfsmash", {"n": n})
    res.results = [_record(str(g), i=k, n=n) for k, g in hom.items()]
    res.status = _status(all(hom[k].is_trivial() for k in range(n)))
    return res


def cmd_verify_all(scale: str, seed: int) -> ExperimentResult:
    res = ExperimentResult("verify-all", {"scale": scale, "seed": seed})
    checks = verify.run_all(scale, seed)
    res.results = [_record(f"{c.name}: {_status(c.passed)} ({c.seconds:.2f}s) {c.detail}") for c in checks]
    res.status = _status(all(c.passed for c in checks))
    return res


def _map(fn: Callable, items, jobs: int) -> list:
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# caching


def cache_dir(flag: str | None) -> Path:
    if flag:
        return Path(flag)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "homstab"


def cache_key(command: str, params: dict[str, Any]) -> str:
    canon = json.dumps({"command": command, "params": params}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def run_cached(command: str, params: dict[str, Any], compute: Callable[[], ExperimentResult],
               directory: Path | None) -> ExperimentResult:
    path = directory / f"{cache_key(command, params)}.json" if directory is not None else None
    if path is not None and path.exists():
        try:
            return ExperimentResult.from_json(path.read_text())
        except (ValueError, KeyError):
            pass  # corrupt entry: recompute and overwrite
    t0 = time.perf_counter()
    res = compute()
    res.wall_ms = int(round((time.perf_counter() - t0) * 1000))
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(res.to_json())
        tmp.replace(path)
    return res


# ---------------------------------------------------------------------------
# argument parsing


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json", "csv"), default="table")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for independent cells")
    common.add_argument("--cache-dir", default=None, help=f"result cache (default ${CACHE_ENV} or ~/.cache/homstab)")
    common.add_argument("--no-cache", action="store_true", help="neither read nor write cached results")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="homstab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("injwords", parents=[common], help="certify the complex of injective words F(n)")
    p.add_argument("n", type=int)
    p.add_argument("--max-n", type=int, default=injwords.MAX_CERTIFIED_N)

    p = sub.add_parser("braid-table", parents=[common], help="mod-2 cohomology table of C_n(R^2)")
    p.add_argument("--n-max", type=int, default=DEFAULT_BRAID_CAP)
    p.add_argument("--deg-max", type=int, default=6)
    p.add_argument("--cap", type=int, default=DEFAULT_BRAID_CAP)

    p = sub.add_parser("sphere-h1", parents=[common], help="H_1 of C_n(S^2) from the spherical braid group")
    p.add_argument("n", type=int)
    p.add_argument("--char", type=int, default=None)

    p = sub.add_parser("tau", parents=[common], help="image of the tau class in H_{d-1}(RP^{d-1})")
    p.add_argument("d", type=int)

    p = sub.add_parser("dold", parents=[common], help="Dold decomposition of a random stability system")
    p.add_argument("--N", type=int, default=5)
    p.add_argument("--dims", type=_int_list, default=None, help="summand dimensions, e.g. 1,2,0,3")

    p = sub.add_parser("halfsmash", parents=[common], help="half-smash construction on F(n)")
    p.add_argument("n", type=int)
    p.add_argument("--max-n", type=int, default=injwords.MAX_CERTIFIED_N)

    p = sub.add_parser("verify-all", parents=[common], help="run every check")
    p.add_argument("--scale", choices=("small", "full"), default="small")
    return parser


def dispatch(args: argparse.Namespace) -> tuple[str, dict[str, Any], Callable[[], ExperimentResult]]:
    c = args.command
    if c == "injwords":
        return c, {"n": args.n, "max_n": args.max_n}, lambda: cmd_injwords(args.n, args.max_n)
    if c == "braid-table":
        return (c, {"n_max": args.n_max, "deg_max": args.deg_max, "cap": args.cap},
                lambda: cmd_braid_table(args.n_max, args.deg_max, args.cap, args.jobs))
    if c == "sphere-h1":
        return c, {"n": args.n, "char": args.char}, lambda: cmd_sphere_h1(args.n, args.char)
    if c == "tau":
        return c, {"d": args.d}, lambda: cmd_tau(args.d)
    if c == "dold":
        return (c, {"seed": args.seed, "N": args.N, "dims": args.dims},
                lambda: cmd_dold(args.seed, args.N, args.dims))
    if c == "halfsmash":
        return c, {"n": args.n, "max_n": args.max_n}, lambda: cmd_halfsmash(args.n, args.max_n)
    if c == "verify-all":
        return c, {"scale": args.scale, "seed": args.seed}, lambda: cmd_verify_all(args.scale, args.seed)
    raise UsageError(f"unknown command {c}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command, params, compute = dispatch(args)
    directory = None if args.no_cache else cache_dir(args.cache_dir)
    try:
        res = run_cached(command, params, compute, directory)
    except UsageError as exc:
        print(f"homstab {command}: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(res.render(args.format))
    return 0 if res.status == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
