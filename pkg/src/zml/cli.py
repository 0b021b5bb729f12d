"""Command-line front end: ``zml <command> [options]``.

Settings come from flags, then a ``key=value`` file given with ``--config``,
then built-in defaults. Every report row carries the inputs it was computed
from; with ``--no-timestamp`` a rerun with the same settings is
byte-identical.

Exit status: 0 success, 2 invalid input, 3 convergence or resource failure,
4 output could not be written.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, fields
from datetime import datetime, timezone

import numpy as np

from . import __version__, gfun, moments, primes, surrogate, zeta
from .errors import AccuracyError, ConvergenceError, DomainError, ResourceError
from .reports import Report

COMMANDS = ("moments", "sweep", "verify-g", "mertens", "partition", "sound-check", "identities")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_FAILED = 3
EXIT_IO = 4


@dataclass
class RunConfig:
    command: str = "moments"
    T: float = 1e5
    k: float = 1.0
    alpha1: float = 0.0
    alpha2: float = 0.0
    range: str = "zero_to_T"
    tol: float = moments.DEFAULT_TOL
    seed: int = 0
    threshold: float = surrogate.DEFAULT_THRESHOLD
    out_format: str = "csv"
    out_path: str = "-"
    permissive: bool = False
    paper_mode: bool = False
    no_timestamp: bool = False
    shifts: str = "0,0.01,0.1,1"
    trials: int = 50
    doubled: bool = False
    samples: int = 1000
    z: float = 1e6
    a: str = "0,0.001,0.005,0.01,0.1,1,10"
    lam: float = 1.0
    x: float = 0.0
    draws: int = 1000


_BOOL_TEXT = {"1": True, "true": True, "yes": True, "on": True, "0": False, "false": False, "no": False, "off": False}


def _coerce(name, text):
    kind = {f.name: f.type for f in fields(RunConfig)}[name]
    if kind == "bool":
        try:
            return _BOOL_TEXT[str(text).strip().lower()]
        except KeyError:
            raise DomainError(f"{name}: expected a boolean, got {text!r}") from None
    if kind == "int":
        v = float(text)
        if v != int(v):
            raise DomainError(f"{name}: expected an integer, got {text!r}")
        return int(v)
    if kind == "float":
        return float(text)
    return str(text)


def read_config_file(path):
    """``key = value`` lines; ``#`` starts a comment, dashes and underscores are interchangeable."""
    known = {f.name for f in fields(RunConfig)}
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            key = {"format": "out_format", "out": "out_path"}.get(key, key)
            if key not in known or key == "command":
                raise DomainError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = _coerce(key, value)
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="zml", description="Shifted zeta moments and prime-sum diagnostics.")
    p.add_argument("--version", action="version", version=f"zml {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--T", type=float, default=S, help="height T")
    common.add_argument("--k", type=float, default=S, help="moment exponent k")
    common.add_argument("--alpha1", type=float, default=S)
    common.add_argument("--alpha2", type=float, default=S)
    common.add_argument("--range", choices=moments.RANGES, default=S)
    common.add_argument("--tol", type=float, default=S, help="relative refinement tolerance")
    common.add_argument("--seed", type=int, default=S)
    common.add_argument("--threshold", type=float, default=S, help="beta-ladder threshold")
    common.add_argument("--format", dest="out_format", choices=("csv", "json"), default=S)
    common.add_argument("--out", dest="out_path", default=S, help="output file, '-' for stdout")
    common.add_argument("--config", default=None, help="key=value settings file")
    common.add_argument("--no-timestamp", dest="no_timestamp", action="store_const", const=True, default=S,
                        help="omit timestamp and runtime fields")
    common.add_argument("--paper-mode", dest="paper_mode", action="store_const", const=True, default=S,
                        help="threshold exp(-1000 k) instead of --threshold")
    common.add_argument("--permissive", action="store_const", const=True, default=S, help="allow 0 <= k < 1")
    cmds = {name: sub.add_parser(name, parents=[common]) for name in COMMANDS}
    cmds["sweep"].add_argument("--shifts", default=S, help="comma-separated alpha2 values")
    cmds["verify-g"].add_argument("--trials", type=int, default=S)
    cmds["verify-g"].add_argument("--doubled", action="store_const", const=True, default=S,
                                  help="doubled-frequency entries from a random split point")
    for name in ("partition", "sound-check"):
        cmds[name].add_argument("--samples", type=int, default=S)
    cmds["mertens"].add_argument("--z", type=float, default=S)
    cmds["mertens"].add_argument("--a", default=S, help="comma-separated frequencies")
    cmds["sound-check"].add_argument("--lam", type=float, default=S)
    cmds["sound-check"].add_argument("--x", type=float, default=S, help="prime-sum length (default T)")
    cmds["identities"].add_argument("--draws", type=int, default=S)
    return p


def resolve_config(argv):
    """Parse ``argv`` into a :class:`RunConfig`: flags over file over defaults."""
    args = vars(build_parser().parse_args(argv))
    settings = asdict(RunConfig())
    path = args.pop("config", None)
    if path is not None:
        settings.update(read_config_file(path))
    settings.update(args)
    return RunConfig(**settings)


def _floats(text, name):
    try:
        vals = [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise DomainError(f"{name}: expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise DomainError(f"{name}: empty list")
    return vals


def _ladder_kwargs(cfg):
    if cfg.paper_mode:
        return {"log_threshold": -1000.0 * cfg.k}
    return {"threshold": cfg.threshold}


def _spec(cfg, alpha2=None):
    return moments.MomentSpec(cfg.T, cfg.k, cfg.alpha1, cfg.alpha2 if alpha2 is None else alpha2, cfg.range,
                              cfg.permissive)


def _moment_fields(spec, est):
    geo = moments.shift_geometry(spec)
    return dict(
        T=spec.T, k=spec.k, alpha1=spec.alpha1, alpha2=spec.alpha2, range=spec.range,
        delta=geo.delta, delta_log_T=geo.delta * math.log(spec.T), regime=moments.regime_classify(spec),
        f_value=geo.f_value, value=est.value, conjecture_ratio=moments.conjecture_ratio(spec, estimate=est),
        error_estimate=est.error_estimate, panels=est.panels, refinement_level=est.refinement_level,
    )


def cmd_moments(cfg, report):
    spec = _spec(cfg)
    est = moments.shifted_moment(spec, cfg.tol)
    row = _moment_fields(spec, est)
    if spec.k == 1 and spec.alpha1 == spec.alpha2 == 0 and spec.range == "zero_to_T":
        row["reference"] = moments.second_moment_reference(spec.T)
    report.add("moments", **row, runtime_seconds=est.runtime_seconds,
               note="composite Gauss-Legendre with panel halving")


def cmd_sweep(cfg, report):
    shifts = _floats(cfg.shifts, "shifts")
    unique = list(dict.fromkeys(shifts))
    if len(unique) < len(shifts):
        dropped = len(shifts) - len(unique)
        report.add("sweep-warning", note=f"dropped {dropped} duplicate shift value(s)")
    specs = [_spec(cfg, a2) for a2 in unique]
    ests = moments.shifted_moment_multi(specs, cfg.tol)
    for spec, est in zip(specs, ests):
        report.add("sweep", **_moment_fields(spec, est), runtime_seconds=est.runtime_seconds,
                   note="regime thresholds on delta*log T are finite-height stand-ins")


def cmd_verify_g(cfg, report):
    if cfg.trials < 1:
        raise DomainError("trials must be >= 1")
    rng = np.random.default_rng(cfg.seed)
    for trial in range(cfg.trials):
        f = gfun.random_square_factorization(rng, doubled=cfg.doubled)
        t0 = time.perf_counter()
        main, bound = gfun.cosine_product_integral_formula(cfg.T, f)
        res = gfun.cosine_product_integral_numeric(cfg.T, f)
        deviation = abs(res.value - main)
        report.add(
            "verify-g", trial=trial, n=f.value, factorization=gfun.describe(f), T=cfg.T, g=gfun.g_of_n(f),
            main=main, numeric=res.value, deviation=deviation, boundary_bound=res.boundary_bound,
            error_bound=bound, passed=bool(deviation <= 10 * bound and deviation <= res.boundary_bound),
            runtime_seconds=time.perf_counter() - t0, note="closed-form expansion oracle",
        )


def cmd_mertens(cfg, report):
    table = primes.sieve(int(cfg.z))
    for a in _floats(cfg.a, "a"):
        t0 = time.perf_counter()
        c = primes.mertens_cos_sum(table, a, cfg.z)
        small = abs(a) <= 0.01
        passed = abs(c.discrepancy) <= 2 if small else c.sum_value <= c.reference_value + 2
        report.add("mertens", a=a, z=cfg.z, sum_value=c.sum_value, reference_value=c.reference_value,
                   discrepancy=c.discrepancy, regime="small" if small else "large", passed=bool(passed),
                   runtime_seconds=time.perf_counter() - t0,
                   note="two-sided within 2" if small else "one-sided: sum <= reference + 2")


def cmd_partition(cfg, report):
    if cfg.samples < 1:
        raise DomainError("samples must be >= 1")
    t0 = time.perf_counter()
    sc = surrogate.build_config(cfg.T, cfg.k, cfg.alpha1, cfg.alpha2, **_ladder_kwargs(cfg))
    ts = np.random.default_rng(cfg.seed).uniform(cfg.T, 2 * cfg.T, cfg.samples)
    labels = [str(x) for x in surrogate.classify_many(sc, ts)]
    p_labels = [str(x) if x is not None else "none" for x in surrogate.classify_p_many(sc, ts)]
    dt = time.perf_counter() - t0
    names = [f"S({j})" for j in range(sc.cal_I)] + ["T"]
    common = dict(T=cfg.T, k=cfg.k, threshold=sc.ladder.threshold, cal_I=sc.cal_I, truncated=sc.truncated)
    for name in names:
        n = labels.count(name)
        report.add("partition", family="S/T", label=name, count=n, fraction=n / cfg.samples, **common,
                   runtime_seconds=dt, note="label = first failing block, else T")
    for name in sorted(set(p_labels)):
        n = p_labels.count(name)
        report.add("partition", family="P", label=name, count=n, fraction=n / cfg.samples, **common,
                   runtime_seconds=dt, note="largest dyadic block out of bounds")


def cmd_sound_check(cfg, report):
    if cfg.samples < 1:
        raise DomainError("samples must be >= 1")
    t0 = time.perf_counter()
    x = cfg.x if cfg.x > 0 else cfg.T
    table = primes.sieve(max(2, int(x)))
    ts = np.random.default_rng(cfg.seed).uniform(cfg.T, 2 * cfg.T, cfg.samples)
    rhs = surrogate.sound_rhs(ts, cfg.lam, x, cfg.T, cfg.alpha1, table)
    margin = rhs - np.log(zeta.abs_zeta_half_array(ts + cfg.alpha1))
    report.add("sound-check", T=cfg.T, lam=cfg.lam, x=x, alpha=cfg.alpha1, samples=cfg.samples,
               margin_min=float(margin.min()), fraction_negative=float(np.mean(margin < 0)),
               calibration_C0=float(max(0.0, -margin.min())), lambda0=surrogate.LAMBDA0,
               runtime_seconds=time.perf_counter() - t0, note="empirical margin; additive constant not asserted")


def cmd_identities(cfg, report):
    if cfg.draws < 1:
        raise DomainError("draws must be >= 1")
    rng = np.random.default_rng(cfg.seed)
    table = primes.sieve(10**4)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(cfg.draws):
        x = float(rng.uniform(2, table.limit))
        t = float(rng.uniform(0, 1e4))
        a1, a2 = rng.uniform(-10, 10, 2)
        worst = max(worst, surrogate.key_identity_check(x, t, a1, a2, table))
    report.add("identities", identity="sum-of-shifts", draws=cfg.draws, max_residual=worst,
               passed=bool(worst < 1e-10), runtime_seconds=time.perf_counter() - t0, note="k = 1")
    t0 = time.perf_counter()
    sc = surrogate.build_config(cfg.T, cfg.k, cfg.alpha1, cfg.alpha2, **_ladder_kwargs(cfg))
    ts = rng.uniform(cfg.T, 2 * cfg.T, 100)
    blocks = sum(surrogate.f_poly(sc, i, ts) for i in range(1, sc.cal_I + 1))
    full = surrogate.full_f_sum(sc, ts)
    rel = float(np.max(np.abs(blocks - full) / np.maximum(np.abs(full), 1e-300)))
    report.add("identities", identity="block-decomposition", draws=100, max_residual=rel, passed=bool(rel < 1e-10),
               runtime_seconds=time.perf_counter() - t0, note="relative")
    t0 = time.perf_counter()
    dyadic = sum(surrogate.p_poly(sc, m, ts) for m in range(surrogate.p_block_count(sc.T) + 1))
    direct = surrogate.p_direct_sum(sc, ts)
    err = float(np.max(np.abs(dyadic - direct)))
    report.add("identities", identity="dyadic-telescoping", draws=100, max_residual=err, passed=bool(err < 1e-12),
               runtime_seconds=time.perf_counter() - t0, note="absolute")


HANDLERS = {
    "moments": cmd_moments,
    "sweep": cmd_sweep,
    "verify-g": cmd_verify_g,
    "mertens": cmd_mertens,
    "partition": cmd_partition,
    "sound-check": cmd_sound_check,
    "identities": cmd_identities,
}


def _apply_thread_cap():
    cap = os.environ.get("ZML_THREADS")
    if not cap:
        return
    import numba

    n = int(cap)
    if n < 1:
        raise DomainError(f"ZML_THREADS must be >= 1, got {cap!r}")
    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def _strip_volatile(report):
    for row in report.rows:
        row.pop("runtime_seconds", None)


def render(cfg, report):
    meta = {}
    if cfg.no_timestamp:
        _strip_volatile(report)
    else:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    meta["version"] = __version__
    if cfg.out_format == "json":
        return report.to_json(meta)
    return report.to_csv(meta)


def run(cfg):
    """Execute ``cfg`` and write its report. Returns the exit status."""
    if cfg.command not in HANDLERS:
        print(f"zml: unknown command {cfg.command!r}", file=sys.stderr)
        return EXIT_INVALID
    try:
        _apply_thread_cap()
        report = Report(cfg.command, asdict(cfg))
        HANDLERS[cfg.command](cfg, report)
        text = render(cfg, report)
    except (ConvergenceError, ResourceError, AccuracyError) as exc:
        print(f"zml: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (DomainError, ValueError) as exc:
        print(f"zml: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        if cfg.out_path == "-":
            sys.stdout.write(text)
            sys.stdout.flush()
        else:
            with open(cfg.out_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"zml: cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main(argv=None):
    try:
        cfg = resolve_config(sys.argv[1:] if argv is None else argv)
    except (DomainError, ValueError, OSError) as exc:
        print(f"zml: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
