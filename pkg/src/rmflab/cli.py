"""Batch experiment runner and report generator.

One subcommand per experiment family: verify | simulate | signchanges |
prime-sums | sup-scan | chaining | concentration | sequences | report.
Configuration comes from an optional JSON file plus flags (flags win);
results are deterministic given (config, seed) and independent of thread
count.  Every run appends a timestamped manifest with the config echo and
sha256 checksums of the result files it produced.

Exit codes: 0 success, 1 verification failure, 2 invalid configuration,
3 resource exhaustion.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, chaining, concentration, primes, prime_series, rmf, sequences
from .rmf import ResourceLimitError
from .sequences import StepParams, TheoremParams

import mpmath as mp


def _worker_count() -> int:
    env = os.environ.get("RMFLAB_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ValueError(f"RMFLAB_THREADS must be an integer, got {env!r}") from exc
    return min(8, os.cpu_count() or 1)


def _json_default(obj):
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def _canonical_json(obj) -> str:
    return json.dumps(
        obj, sort_keys=True, separators=(",", ":"), allow_nan=True, default=_json_default
    )


def _config_digest(config: dict) -> str:
    return hashlib.sha256(_canonical_json(config).encode()).hexdigest()[:12]


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _write_json(path: Path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2, default=_json_default)
        fh.write("\n")


class _Run:
    """Collects result files for one invocation and writes the manifest."""

    def __init__(self, command: str, config: dict):
        out = str(config.get("output_dir", "") or "")
        if not out.strip():
            raise ValueError("output_dir must be a non-empty path")
        self.command = command
        self.config = config
        self.dir = Path(out)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.digest = _config_digest(config)
        self.files: list[Path] = []

    def path(self, kind: str, ext: str) -> Path:
        p = self.dir / f"{self.command}-{kind}-{self.digest}.{ext}"
        self.files.append(p)
        return p

    def finish(self, extra: dict | None = None) -> None:
        config_path = self.path("config", "json")
        _write_json(config_path, self.config)
        manifest = {
            "command": self.command,
            "config": self.config,
            "config_digest": self.digest,
            "results": {p.name: _sha256_file(p) for p in self.files},
            "versions": {
                "python": sys.version.split()[0],
                "numpy": np.__version__,
                "mpmath": mp.__version__,
                "rmflab": __version__,
            },
        }
        if extra:
            manifest.update(extra)
        stamp = time.strftime("%Y%m%dT%H%M%S", time.gmtime())
        n = 0
        while True:
            name = self.dir / f"manifest-{stamp}-{self.command}-{n:03d}.json"
            if not name.exists():
                break
            n += 1
        manifest["created_utc"] = stamp
        _write_json(name, manifest)


@dataclass
class ExperimentConfig:
    """Flat experiment configuration; round-trips losslessly through JSON."""

    command: str = ""
    seed: int = 0
    output_dir: str = ""
    c: float = 3.0
    a0: float = 0.1
    a1: float = 1.1
    epsilon: float = 1.0
    gamma: float = 1.0
    sigma_grid: list[float] = field(default_factory=lambda: [0.7, 0.65, 0.6, 0.55])
    prime_limit: int = 10**6
    x_max: int = 10**6
    trials: int = 10**4
    grid_step: float = 0.01
    seeds: int = 100
    ells: list[int] = field(default_factory=lambda: [3, 4, 5])
    ell_min: int = 1
    ell_max: int = 8
    r_max: int = 12
    k_max: int = 20
    n_primes: int = 9_000_000
    claim1_n: int = 10**7
    chebyshev_limit: int = 10**7
    c0: float = 0.25
    c1: float = 2.0
    c2: float = -1.5

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _load_config(args: argparse.Namespace, command: str) -> dict:
    cfg = ExperimentConfig(command=command).to_dict()
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("config file must hold a JSON object")
        for key, value in data.items():
            if key not in cfg:
                raise ValueError(f"unknown config key {key!r}")
            cfg[key] = value
    for key in cfg:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    cfg["command"] = command
    return cfg


# ---------------------------------------------------------------- verify --


def _verify_constants(cfg: dict) -> list[dict]:
    checks = []
    t0 = time.monotonic()
    ev = prime_series.euler_tail_constant(int(cfg["n_primes"]))
    checks.append(
        {
            "name": "euler-tail-constant",
            "passed": 2.10 < ev.upper <= 2.1121,
            "detail": {
                "n_primes": int(cfg["n_primes"]),
                "estimate": ev.estimate,
                "upper": ev.upper,
                "seconds": round(time.monotonic() - t0, 3),
            },
        }
    )

    sigmas = [round(0.51 + 0.01 * i, 2) for i in range(50)]
    table = primes.cached_primes(int(cfg["claim1_n"]))
    grid = [prime_series.log_weighted_sum(s, n_cut=int(cfg["claim1_n"]), table=table) for s in sigmas]
    checks.append(
        {
            "name": "log-weighted-bound-grid",
            "passed": all(r.holds for r in grid),
            "detail": {
                "n_cut": int(cfg["claim1_n"]),
                "worst_margin": min(r.bound_rhs - r.value.upper for r in grid),
            },
        }
    )

    xs = [1.5, 1.1, 1.01, 1.001]
    ratios = [prime_series.zetaasym_ratio(x)[0] for x in xs]
    gaps = [abs(r - 1.0) for r in ratios]
    checks.append(
        {
            "name": "zeta-asymptotic-ratio",
            "passed": all(gaps[i] > gaps[i + 1] for i in range(len(gaps) - 1)) and gaps[-1] <= 0.1,
            "detail": {"x": xs, "ratio_sum": ratios},
        }
    )

    rep = primes.chebyshev_check(primes.cached_primes(int(cfg["chebyshev_limit"])))
    checks.append(
        {
            "name": "chebyshev-two-over-log",
            "passed": rep.holds,
            "detail": {
                "limit": int(cfg["chebyshev_limit"]),
                "max_ratio": rep.max_ratio,
                "worst_prime": rep.worst_prime,
            },
        }
    )
    return checks


def _verify_extras(cfg: dict) -> list[dict]:
    checks = []
    step = StepParams(float(cfg["epsilon"]))
    scans = {
        d: sequences.subtraction_bound_scan(StepParams.from_delta(d), 10**5)
        for d in (0.25, 0.5, 0.75)
    }
    checks.append(
        {
            "name": "sigma-difference-bound-scan",
            "passed": all(s.ell1 is not None and s.ell1 <= 100 for s in scans.values()),
            "detail": {str(d): s.ell1 for d, s in scans.items()},
        }
    )

    params = TheoremParams(c=float(cfg["c"]), a0=float(cfg["a0"]), a1=float(cfg["a1"]))
    disjoint = [sequences.intervals_disjoint(k, params) for k in range(1, int(cfg["k_max"]) + 1)]
    checks.append(
        {
            "name": "interval-disjointness",
            "passed": all(disjoint),
            "detail": {"k_max": int(cfg["k_max"])},
        }
    )

    bc = concentration.borel_cantelli_partial("step2", 400, gamma=float(cfg["gamma"]), step=step)
    bc2 = concentration.borel_cantelli_partial("step2", 800, gamma=float(cfg["gamma"]), step=step)
    bigterm_ok = all(
        concentration.borel_cantelli_partial(
            "bigterm", 300, step=StepParams.from_delta(d), ell=ell
        ).closed_bound_holds
        for d in (0.25, 0.5, 0.9)
        for ell in range(1, 101)
    )
    checks.append(
        {
            "name": "borel-cantelli-series",
            "passed": abs(bc2.partial_sum - bc.partial_sum) <= max(bc.tail_estimate, 1e-10)
            and bigterm_ok,
            "detail": {"partial_400": bc.partial_sum, "tail_400": bc.tail_estimate},
        }
    )

    rng_rows = concentration.step2_experiment(
        step,
        float(cfg["gamma"]),
        range(int(cfg["ell_min"]), int(cfg["ell_max"]) + 1),
        trials=max(100, int(cfg["trials"]) // 10),
        prime_limit=min(int(cfg["prime_limit"]), 10**5),
        base_seed=int(cfg["seed"]),
    )
    checks.append(
        {
            "name": "hoeffding-validity",
            "passed": all(
                r.empirical_freq <= r.hoeffding_bound + 3.0 * r.std_err for r in rng_rows
            ),
            "detail": {"rows": len(rng_rows)},
        }
    )
    return checks


def cmd_verify(args) -> int:
    cfg = _load_config(args, "verify")
    target = args.target
    if target not in ("constants", "all"):
        raise ValueError(f"unknown verify target {target!r}")
    run = _Run("verify", cfg)
    checks = _verify_constants(cfg)
    if target == "all":
        checks += _verify_extras(cfg)
    rows = [[c["name"], c["passed"]] for c in checks]
    _write_csv(run.path("checks", "csv"), ["check", "passed"], rows)
    _write_json(run.path("checks", "json"), {"target": target, "checks": checks})
    run.finish({"passed": all(c["passed"] for c in checks)})
    for c in checks:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}: {c['detail']}")
    return 0 if all(c["passed"] for c in checks) else 1


# -------------------------------------------------------------- simulate --


def cmd_simulate(args) -> int:
    cfg = _load_config(args, "simulate")
    run = _Run("simulate", cfg)
    x_max = int(cfg["x_max"])
    signs = rmf.sample_signs(int(cfg["seed"]), max(x_max, 2))
    trace = rmf.partial_sum_trace(signs, x_max)

    if trace.values is not None and x_max <= 10**5:
        ns = np.arange(1, x_max + 1)
        ms = trace.values
    else:
        ns = trace.checkpoint_ns
        ms = trace.checkpoint_values
    _write_csv(run.path("trace", "csv"), ["n", "M"], [[int(n), int(m)] for n, m in zip(ns, ms)])

    cps = trace.change_points
    # M starts at M(1) = 1, so the first transition lands on a negative value.
    sign_after = [-1 if i % 2 else 1 for i in range(1, cps.size + 1)]
    _write_csv(
        run.path("changes", "csv"),
        ["index", "sign_before", "sign_after"],
        [[int(n), -s, s] for n, s in zip(cps, sign_after)],
    )

    xs = [10**k for k in range(1, len(str(x_max)))] + [x_max]
    xs = sorted(set(x for x in xs if x <= x_max))
    _write_csv(
        run.path("vf", "csv"),
        ["x", "V_f"],
        [[x, trace.count_changes(x)] for x in xs],
    )
    _write_json(
        run.path("summary", "json"),
        {
            "seed": int(cfg["seed"]),
            "x_max": x_max,
            "V_f": trace.count_changes(),
            "final_value": trace.final_value,
        },
    )
    run.finish()
    print(f"simulate: V_f({x_max}) = {trace.count_changes()}, M({x_max}) = {trace.final_value}")
    return 0


def cmd_signchanges(args) -> int:
    cfg = _load_config(args, "signchanges")
    run = _Run("signchanges", cfg)
    x_max = int(cfg["x_max"])
    n_seeds = int(cfg["seeds"])
    table = primes.cached_primes(max(x_max, 2))

    def one(seed: int) -> tuple[int, int, int]:
        signs = rmf.sample_signs(seed, max(x_max, 2), table=table)
        trace = rmf.partial_sum_trace(signs, x_max, keep_values=False)
        return seed, trace.count_changes(), trace.final_value

    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        results = list(pool.map(one, range(n_seeds)))
    results.sort(key=lambda r: r[0])
    _write_csv(
        run.path("table", "csv"),
        ["seed", "V_f", "final_M"],
        [list(r) for r in results],
    )
    counts = np.array([r[1] for r in results], dtype=np.float64)
    summary = {
        "seeds": n_seeds,
        "x_max": x_max,
        "median": float(np.median(counts)),
        "q1": float(np.percentile(counts, 25)),
        "q3": float(np.percentile(counts, 75)),
        "min": float(counts.min()),
        "max": float(counts.max()),
        "fraction_with_change": float(np.mean(counts >= 1)),
    }
    _write_json(run.path("summary", "json"), summary)
    run.finish()
    print(f"signchanges: median V_f({x_max}) = {summary['median']}")
    return 0


# ------------------------------------------------------------ prime sums --


def cmd_prime_sums(args) -> int:
    cfg = _load_config(args, "prime-sums")
    run = _Run("prime-sums", cfg)
    table = primes.cached_primes(int(cfg["claim1_n"]))

    sigmas = [round(0.51 + 0.01 * i, 2) for i in range(50)]
    prime_series.write_claim1_grid_csv(
        run.path("logsq-grid", "csv"), sigmas, n_cut=int(cfg["claim1_n"]), table=table
    )

    rows = []
    for s in [1.001, 1.01, 1.1, 1.2, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0, 32.0, 64.0]:
        acc = prime_series.prime_zeta(s, method="accelerated")
        direct = prime_series.prime_zeta(
            s, method="direct", n_cut=min(int(cfg["prime_limit"]), table.limit), table=table
        )
        rows.append(
            [s, acc.estimate, acc.lower, acc.upper, direct.estimate, direct.lower, direct.upper,
             acc.intersects(direct)]
        )
    _write_csv(
        run.path("prime-zeta", "csv"),
        ["s", "accelerated", "acc_lower", "acc_upper", "direct", "dir_lower", "dir_upper",
         "intervals_intersect"],
        rows,
    )

    ratio_rows = []
    for x in [1.5, 1.1, 1.05, 1.01, 1.005, 1.001]:
        rs, rl = prime_series.zetaasym_ratio(x)
        ratio_rows.append([x, rs, rl])
    _write_csv(run.path("zetaasym", "csv"), ["x", "ratio_sum", "ratio_logzeta"], ratio_rows)
    run.finish()
    print("prime-sums: wrote grids")
    return 0


# -------------------------------------------------------------- sup scan --


def cmd_sup_scan(args) -> int:
    cfg = _load_config(args, "sup-scan")
    run = _Run("sup-scan", cfg)
    limit = int(cfg["prime_limit"])
    signs = rmf.sample_signs(int(cfg["seed"]), limit)
    rows = []
    for sigma in cfg["sigma_grid"]:
        sigma = float(sigma)
        log_inv_gap = float(mp.log(1.0 / (mp.mpf(sigma) - 0.5)))
        t_max = 2.0 * log_inv_gap**2
        res = rmf.sup_scan(signs, sigma, max(1.0, t_max), float(cfg["grid_step"]), limit=limit)
        hb = sequences.harper_lower_bound(
            sigma, float(cfg["c0"]), max(float(cfg["c1"]), 1.0 + 1e-9), float(cfg["c2"])
        )
        ek_threshold = log_inv_gap - float(cfg["c1"]) * float(mp.log(log_inv_gap))
        rows.append(
            [
                sigma,
                t_max,
                res.sup_cos,
                res.argmax_t,
                res.sup_abs_f,
                ek_threshold,
                res.sup_cos >= ek_threshold,
                hb.lower,
                float(mp.exp(hb.lower)),
            ]
        )
    _write_csv(
        run.path("scan", "csv"),
        ["sigma", "t_max", "sup_cos", "argmax_t", "sup_absF", "ek_threshold", "exceeds",
         "harper_L", "exp_harper_L"],
        rows,
    )
    run.finish()
    print(f"sup-scan: {len(rows)} sigma values recorded")
    return 0


# -------------------------------------------------------------- chaining --


def cmd_chaining(args) -> int:
    cfg = _load_config(args, "chaining")
    run = _Run("chaining", cfg)
    step = StepParams(float(cfg["epsilon"]))
    limit = int(cfg["prime_limit"])
    table = primes.cached_primes(limit)
    seed_list = list(range(int(cfg["seeds"])))
    rows = []
    for ell in cfg["ells"]:
        for res in chaining.oscillation_batch(
            seed_list, int(ell), step, r_max=int(cfg["r_max"]), limit=limit, table=table
        ):
            rows.append(
                [
                    res.seed,
                    res.ell,
                    res.sigma_ell,
                    res.max_osc,
                    res.paper_c,
                    res.first_violation_r if res.first_violation_r is not None else "",
                    res.truncation_std,
                ]
            )
    _write_csv(
        run.path("oscillation", "csv"),
        ["seed", "ell", "sigma_ell", "max_osc", "paper_C", "first_violation_r", "truncation_std"],
        rows,
    )
    run.finish()
    print(f"chaining: {len(rows)} oscillation runs recorded")
    return 0


# --------------------------------------------------------- concentration --


def cmd_concentration(args) -> int:
    cfg = _load_config(args, "concentration")
    run = _Run("concentration", cfg)
    step = StepParams(float(cfg["epsilon"]))
    rows = concentration.step2_experiment(
        step,
        float(cfg["gamma"]),
        range(int(cfg["ell_min"]), int(cfg["ell_max"]) + 1),
        trials=int(cfg["trials"]),
        prime_limit=int(cfg["prime_limit"]),
        base_seed=int(cfg["seed"]),
    )
    _write_csv(
        run.path("step2", "csv"),
        ["ell", "sigma", "E_trunc", "threshold", "emp_freq", "std_err", "hoeffding_bound",
         "asymptotic_surrogate", "variance_deficit"],
        [
            [r.ell, r.sigma, r.variance_trunc, r.threshold, r.empirical_freq, r.std_err,
             r.hoeffding_bound, r.asymptotic_surrogate, r.variance_deficit]
            for r in rows
        ],
    )
    bc = concentration.borel_cantelli_partial(
        "step2", 400, gamma=float(cfg["gamma"]), step=step
    )
    bigterm = {
        str(ell): concentration.borel_cantelli_partial("bigterm", 300, step=step, ell=ell).closed_bound_holds
        for ell in range(1, 101)
    }
    _write_json(
        run.path("series", "json"),
        {
            "step2_partial_400": bc.partial_sum,
            "step2_tail_400": bc.tail_estimate,
            "bigterm_all_hold": all(bigterm.values()),
        },
    )
    run.finish()
    ok = all(r.empirical_freq <= r.hoeffding_bound + 3.0 * r.std_err for r in rows)
    print(f"concentration: {len(rows)} rows, hoeffding validity: {ok}")
    return 0


# ------------------------------------------------------------- sequences --


def cmd_sequences(args) -> int:
    cfg = _load_config(args, "sequences")
    run = _Run("sequences", cfg)
    params = TheoremParams(c=float(cfg["c"]), a0=float(cfg["a0"]), a1=float(cfg["a1"]))
    rows = []
    for k in range(1, int(cfg["k_max"]) + 1):
        sk = sequences.sigma_k(k, params)
        y_k, x_k = sequences.interval_endpoints(k, params)
        rows.append(
            [
                k,
                sk.sigma,
                sk.underflow,
                mp.nstr(y_k.mantissa, 17) + f"@d{y_k.depth}",
                mp.nstr(x_k.mantissa, 17) + f"@d{x_k.depth}",
                sequences.intervals_disjoint(k, params),
            ]
        )
    _write_csv(
        run.path("table", "csv"),
        ["k", "sigma_k", "sigma_underflow", "y_k_mantissa", "X_k_mantissa", "disjoint_with_next"],
        rows,
    )
    run.finish()
    print(f"sequences: {len(rows)} rows")
    return 0


# ---------------------------------------------------------------- report --


def cmd_report(args) -> int:
    cfg = _load_config(args, "report")
    out = Path(str(cfg["output_dir"]))
    manifests = sorted(out.glob("manifest-*.json"))
    if not manifests:
        raise ValueError(f"no manifests found in {out}")
    runs = []
    for path in manifests:
        with open(path) as fh:
            runs.append(json.load(fh))

    summary: dict = {"runs": len(runs), "commands": {}, "verify_passed": None, "headline": {}}
    for r in runs:
        summary["commands"][r["command"]] = summary["commands"].get(r["command"], 0) + 1
        if r["command"] == "verify":
            summary["verify_passed"] = bool(r.get("passed"))

    # Aggregate sign-change sweeps into quartiles.
    vf_values: list[float] = []
    for r in runs:
        if r["command"] != "signchanges":
            continue
        digest = r["config_digest"]
        table = out / f"signchanges-table-{digest}.csv"
        if table.exists():
            with open(table) as fh:
                for row in csv.DictReader(fh):
                    vf_values.append(float(row["V_f"]))
    if vf_values:
        arr = np.asarray(vf_values)
        summary["headline"]["signchanges"] = {
            "count": int(arr.size),
            "median": float(np.median(arr)),
            "q1": float(np.percentile(arr, 25)),
            "q3": float(np.percentile(arr, 75)),
        }
        _write_csv(
            out / "report-signchanges.csv",
            ["statistic", "value"],
            [["count", int(arr.size)], ["median", float(np.median(arr))],
             ["q1", float(np.percentile(arr, 25))], ["q3", float(np.percentile(arr, 75))],
             ["min", float(arr.min())], ["max", float(arr.max())]],
        )

    sup_files = sorted(p.name for p in out.glob("sup-scan-scan-*.csv"))
    if sup_files:
        summary["headline"]["sup_scan_files"] = sup_files

    _write_json(out / "report-summary.json", summary)
    print(json.dumps(summary, sort_keys=True, indent=2))
    return 0


# ------------------------------------------------------------------ main --


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output-dir", dest="output_dir", default=None)


def _int_flag(p, name, **kw):
    p.add_argument(name, dest=name.lstrip("-").replace("-", "_"), type=int, default=None, **kw)


def _float_flag(p, name, **kw):
    p.add_argument(name, dest=name.lstrip("-").replace("-", "_"), type=float, default=None, **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmflab",
        description="Experiments on partial sums of Rademacher random multiplicative functions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the constant-reproduction checks")
    p.add_argument("target", choices=["constants", "all"])
    _add_common(p)
    _int_flag(p, "--n-primes")
    _int_flag(p, "--claim1-n")
    _int_flag(p, "--chebyshev-limit")
    _int_flag(p, "--trials")
    _int_flag(p, "--prime-limit")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="one partial-sum trace with sign changes")
    _add_common(p)
    _int_flag(p, "--x-max")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("signchanges", help="sign-change counts over a seed sweep")
    _add_common(p)
    _int_flag(p, "--x-max")
    _int_flag(p, "--seeds")
    p.set_defaults(func=cmd_signchanges)

    p = sub.add_parser("prime-sums", help="certified prime-series verification grids")
    _add_common(p)
    _int_flag(p, "--claim1-n")
    _int_flag(p, "--prime-limit")
    p.set_defaults(func=cmd_prime_sums)

    p = sub.add_parser("sup-scan", help="grid suprema of cosine prime sums with overlays")
    _add_common(p)
    _int_flag(p, "--prime-limit")
    _float_flag(p, "--grid-step")
    _float_flag(p, "--c0")
    _float_flag(p, "--c1")
    _float_flag(p, "--c2")
    p.add_argument(
        "--sigma-grid",
        dest="sigma_grid",
        type=lambda s: [float(x) for x in s.split(",")],
        default=None,
    )
    p.set_defaults(func=cmd_sup_scan)

    p = sub.add_parser("chaining", help="dyadic oscillation experiments")
    _add_common(p)
    _int_flag(p, "--seeds")
    _int_flag(p, "--r-max")
    _int_flag(p, "--prime-limit")
    _float_flag(p, "--epsilon")
    p.add_argument(
        "--ells", dest="ells", type=lambda s: [int(x) for x in s.split(",")], default=None
    )
    p.set_defaults(func=cmd_chaining)

    p = sub.add_parser("concentration", help="Hoeffding tail tables and bound series")
    _add_common(p)
    _int_flag(p, "--trials")
    _int_flag(p, "--prime-limit")
    _int_flag(p, "--ell-min")
    _int_flag(p, "--ell-max")
    _float_flag(p, "--gamma")
    _float_flag(p, "--epsilon")
    p.set_defaults(func=cmd_concentration)

    p = sub.add_parser("sequences", help="sigma_k / y_k / X_k tables at nested-log scale")
    _add_common(p)
    _int_flag(p, "--k-max")
    _float_flag(p, "--c")
    _float_flag(p, "--a0")
    _float_flag(p, "--a1")
    p.set_defaults(func=cmd_sequences)

    p = sub.add_parser("report", help="aggregate manifests in an output directory")
    _add_common(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MemoryError, ResourceLimitError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
