"""mdimlab command line: estimate, sweep, verify, export-config.

Exit codes: 0 success, 1 failed verification, 2 invalid input or config,
3 depth or representability budget exceeded.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys
from pathlib import Path

from . import __version__
from .config import (ConfigError, RunConfig, apply_overrides, build_ladder, build_metric,
                     build_system, from_mapping, load_config)
from .errors import BudgetError, ValidationError

SWEEP_PARAMS = ("j", "alpha", "a", "s", "r")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 already; keep the message terse
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _window(text: str) -> list[int]:
    try:
        a, b = text.split(":")
        return [int(a), int(b)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected n1:n2, got {text!r}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_run_flags(p):
    p.add_argument("--config", type=Path, help="YAML run configuration")
    p.add_argument("--system", help="cantor-psi, cantor-phi, full-shift, interval-phi, "
                                    "interval-psi or interval-varphi")
    p.add_argument("--j", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--s", type=int)
    p.add_argument("--r", type=float)
    p.add_argument("--k-min", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--ladder", type=_floats, help="explicit eps values, coarse to fine")
    p.add_argument("--n", type=_window, help="Bowen window n1:n2")
    p.add_argument("--snowflake", type=float, help="use d^a instead of d")
    p.add_argument("--grid", type=int, help="uniform grid size for interval systems")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--deterministic", action="store_true", help="omit timestamps from headers")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mdimlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"mdimlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    est = sub.add_parser("estimate", help="estimate metric mean dimension")
    _add_run_flags(est)
    sw = sub.add_parser("sweep", help="estimate over a parameter family")
    _add_run_flags(sw)
    sw.add_argument("--parameter", required=True)
    sw.add_argument("--values", type=_floats, required=True)
    ver = sub.add_parser("verify", help="run a check suite")
    ver.add_argument("suite")
    exp = sub.add_parser("export-config", help="print the resolved configuration")
    _add_run_flags(exp)
    return p


def _overrides(args) -> dict:
    o = {("system", "kind"): args.system, ("system", "j"): args.j,
         ("system", "alpha"): args.alpha, ("system", "s"): args.s, ("system", "r"): args.r,
         ("ladder", "k_min"): args.k_min, ("ladder", "k_max"): args.k_max,
         ("n_window",): args.n, ("sample", "grid"): args.grid, ("sample", "seed"): args.seed,
         ("metric", "snowflake"): args.snowflake}
    if args.ladder is not None:
        o[("ladder",)] = {"values": args.ladder}
    if args.out is not None:
        o[("outputs", "dir")] = str(args.out)
    return o


def resolve_config(args) -> RunConfig:
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        return apply_overrides(load_config(text), _overrides(args))
    d: dict = {}
    for path, value in _overrides(args).items():
        if value is None:
            continue
        node = d
        *head, last = path
        for key in head:
            node = node.setdefault(key, {})
        node[last] = value
    if "ladder" not in d and d.get("system", {}).get("kind"):
        raise ConfigError("a ladder is required: pass --k-max or --ladder")
    return from_mapping(d)


def _header(cfg: RunConfig, deterministic: bool) -> list[str]:
    lines = [f"mdimlab {__version__}", "config " + json.dumps(cfg.to_dict(), sort_keys=True),
             f"seed {cfg.seed}"]
    if not deterministic:
        lines.append("timestamp " + _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))
    return lines


def run_estimate(cfg: RunConfig):
    from .dimension import mdim_m_estimate
    from .interval import grid_sample

    system = build_system(cfg)
    metric = build_metric(cfg, system)
    ladder = build_ladder(cfg, system, metric)
    sample = None
    if not cfg.is_symbolic and "grid" in cfg.sample:
        sample = grid_sample((0.0, 1.0), int(cfg.sample["grid"]))
    return mdim_m_estimate(system, metric, ladder, cfg.n_window, sample=sample)


def closed_form_target(cfg: RunConfig) -> float | None:
    s = cfg.system
    kind = s["kind"]
    if kind == "cantor-psi":
        t = s["j"] * math.log(2) / ((s["j"] + 1) * math.log(s["alpha"]))
    elif kind == "cantor-phi":
        t = math.log(2) / math.log(s["alpha"])
    elif kind == "full-shift":
        t = 0.0
    elif kind == "interval-phi":
        t = s["s"] / (s["r"] + s["s"])
    elif kind == "interval-psi":
        t = 1.0
    else:
        t = 0.0
    a = cfg.metric.get("snowflake") if cfg.metric else None
    return t / a if a else t


def cmd_estimate(args) -> int:
    cfg = resolve_config(args)
    est = run_estimate(cfg)
    header = _header(cfg, args.deterministic)
    out = Path(cfg.outputs.get("dir", "."))
    out.mkdir(parents=True, exist_ok=True)
    (out / "counts.csv").write_text(est.counts.to_csv(header))
    (out / "estimate.csv").write_text(est.to_csv(header))
    (out / "estimate.plot").write_text(est.plot_data())
    lo, hi = est.bracket if est.bracket else (float("nan"), float("nan"))
    print(f"{est.kind} extrapolated={est.extrapolated:.6f} bracket=({lo:.6f}, {hi:.6f}) "
          f"method={est.diagnostics.get('method')} wrote {out}/estimate.csv")
    if est.diagnostics.get("zero_rate"):
        print("note: all rates are zero")
    return 0


def cmd_sweep(args) -> int:
    if args.parameter not in SWEEP_PARAMS:
        raise ConfigError(f"sweep parameter must be one of {SWEEP_PARAMS}, got {args.parameter!r}")
    if not args.values:
        raise ConfigError("sweep needs a nonempty --values list")
    base = resolve_config(args)
    rows = []
    for v in args.values:
        if args.parameter == "a":
            o = {("metric", "snowflake"): v}
        else:
            o = {("system", args.parameter): int(v) if args.parameter in ("j", "s") else v}
        cfg = apply_overrides(base, o)
        est = run_estimate(cfg)
        target = closed_form_target(cfg)
        err = abs(est.extrapolated - target) if target is not None else None
        rows.append((v, est.extrapolated, target, err))
    header = _header(base, args.deterministic)
    lines = [f"# {h}" for h in header] + ["value,estimate,target,abs_err"]
    for v, e, t, err in rows:
        lines.append(f"{v:.9g},{e:.9g},{'' if t is None else f'{t:.9g}'},"
                     f"{'' if err is None else f'{err:.9g}'}")
    text = "\n".join(lines) + "\n"
    if base.outputs.get("dir"):
        out = Path(base.outputs["dir"])
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep.csv").write_text(text)
    sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    from .verify import SUITES, run_suite, suite_passed

    if args.suite not in SUITES:
        print(f"error: unknown suite {args.suite!r}; choose from {sorted(SUITES)}",
              file=sys.stderr)
        return 2
    checks = run_suite(args.suite)
    for c in checks:
        print(c.line())
    ok = suite_passed(checks)
    print(f"{args.suite}: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_export(args) -> int:
    sys.stdout.write(resolve_config(args).to_yaml())
    return 0


COMMANDS = {"estimate": cmd_estimate, "sweep": cmd_sweep, "verify": cmd_verify,
            "export-config": cmd_export}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
