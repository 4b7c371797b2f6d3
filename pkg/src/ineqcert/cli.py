"""Command-line entry point: ``ineqcert {identities,certify,critical,scan}``.

Settings are resolved as command-line flag, then the ``INEQCERT_WORKERS``
environment variable (worker count only), then a ``key = value`` config file
given with ``--config``, then built-in defaults.

Exit codes: 0 success, 1 failure, 2 epsilon-grade result, 64 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import Dict, List, Optional

EXIT_OK, EXIT_FAIL, EXIT_PARTIAL, EXIT_USAGE = 0, 1, 2, 64
ENV_WORKERS = "INEQCERT_WORKERS"

DEFAULTS = {
    "identities": {"mode": "both", "workers": 1, "out": None, "fixture": None,
                   "export_fixture": None, "step": []},
    "certify": {"lemma": 1, "rho": 0.1, "slice_width": 0.01, "budget": 5_000_000, "workers": 1,
                "out": None, "seed": 0, "corner_samples": 1_000_000, "offset": 0.0,
                "x_max": 1e5, "t_min": None, "t_max": None, "no_timing": False},
    "critical": {"mode": "trig", "starts": 1000, "seed": 0, "out": None},
    "scan": {"mode": "trig", "grid": 100, "out": None, "t_range": None, "x_range": None},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _number(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _count(text: str) -> int:
    """Integers, also written as 2e6."""
    val = _number(text)
    if val != int(val) or val < 0:
        raise argparse.ArgumentTypeError(f"not a non-negative integer: {text!r}")
    return int(val)


def _pair(text: str):
    parts = text.replace(",", " ").split()
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two numbers, e.g. 0.3,3.14")
    return tuple(_number(p) for p in parts)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ineqcert", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="key = value file with defaults for the subcommand")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    S = argparse.SUPPRESS
    common = _Parser(add_help=False)
    common.add_argument("--config", default=S, help="key = value file with defaults")

    q = sub.add_parser("identities", parents=[common], help="verify the proof-step ledger")
    q.add_argument("--mode", choices=["trig", "hyp", "both"], default=S)
    q.add_argument("--step", action="append", default=S, help="step id or name (repeatable)")
    q.add_argument("--workers", type=_count, default=S)
    q.add_argument("--out", default=S, help="JSON report path")
    q.add_argument("--fixture", default=S, help="verify stored polynomial pairs from this file")
    q.add_argument("--export-fixture", dest="export_fixture", default=S,
                   help="write the cleared polynomial pairs and exit")

    q = sub.add_parser("certify", parents=[common], help="branch-and-bound certificate for one lemma")
    q.add_argument("--lemma", type=int, choices=[1, 2], default=S)
    q.add_argument("--rho", type=_number, default=S, help="tube radius in compact coordinates")
    q.add_argument("--slice-width", dest="slice_width", type=_number, default=S)
    q.add_argument("--budget", type=_count, default=S, help="maximum boxes processed")
    q.add_argument("--workers", type=_count, default=S)
    q.add_argument("--out", default=S, help="certificate JSON path")
    q.add_argument("--seed", type=_count, default=S, help="seed for the corner sampler")
    q.add_argument("--corner-samples", dest="corner_samples", type=_count, default=S)
    q.add_argument("--offset", type=_number, default=S, help="certify f > offset instead of f > 0")
    q.add_argument("--x-max", dest="x_max", type=_number, default=S)
    q.add_argument("--t-min", dest="t_min", type=_number, default=S)
    q.add_argument("--t-max", dest="t_max", type=_number, default=S)
    q.add_argument("--no-timing", dest="no_timing", action="store_true", default=S,
                   help="omit wall-clock timing from the JSON")

    q = sub.add_parser("critical", parents=[common], help="multistart Newton on the gradient system")
    q.add_argument("--mode", choices=["trig", "hyp"], default=S)
    q.add_argument("--starts", type=_count, default=S)
    q.add_argument("--seed", type=_count, default=S)
    q.add_argument("--out", default=S, help="CSV path (default: standard output)")

    q = sub.add_parser("scan", parents=[common], help="grid oracle")
    q.add_argument("--mode", choices=["trig", "hyp"], default=S)
    q.add_argument("--grid", type=_count, default=S, help="points per axis (>= 2)")
    q.add_argument("--t-range", dest="t_range", type=_pair, default=S)
    q.add_argument("--x-range", dest="x_range", type=_pair, default=S)
    q.add_argument("--out", default=S, help="CSV path for every grid point")
    return p


def read_config(path: str) -> Dict[str, str]:
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def _coerce(key: str, raw: str, default):
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return _count(raw)
    if isinstance(default, float):
        return _number(raw)
    if key in ("t_range", "x_range"):
        return _pair(raw)
    if key in ("t_min", "t_max"):
        return _number(raw)
    if key == "step":
        return raw.split()
    return raw


def resolve(args: argparse.Namespace, environ=None) -> Dict:
    environ = os.environ if environ is None else environ
    base = dict(DEFAULTS[args.command])
    if getattr(args, "config", None):
        try:
            file_cfg = read_config(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}")
        for key, raw in file_cfg.items():
            if key not in base:
                raise UsageError(f"unknown config key {key!r} for {args.command}")
            try:
                base[key] = _coerce(key, raw, base[key])
            except argparse.ArgumentTypeError as exc:
                raise UsageError(f"config key {key}: {exc}")
    if "workers" in base and environ.get(ENV_WORKERS):
        try:
            base["workers"] = _count(environ[ENV_WORKERS])
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"{ENV_WORKERS}: {exc}")
    for key, val in vars(args).items():
        if key in base and key != "config":
            base[key] = val
    base["command"] = args.command
    return base


def _write(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_identities(cfg: Dict) -> int:
    from . import identities as ids

    if cfg["export_fixture"]:
        _write(cfg["export_fixture"], ids.export_fixture(cfg["mode"]))
        return EXIT_OK
    fixture = None
    if cfg["fixture"]:
        with open(cfg["fixture"]) as fh:
            fixture = ids.load_fixture(fh.read())
    if cfg["step"]:
        for sid in cfg["step"]:
            try:
                ids.get_step(sid)
            except KeyError as exc:
                raise UsageError(str(exc.args[0]))
    report = ids.verify_all(cfg["mode"], workers=max(cfg["workers"], 1), fixture=fixture,
                            step_ids=cfg["step"])
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if cfg["out"]:
        _write(cfg["out"], text)
    n_ok = sum(r.status == "verified" for r in report.steps)
    print(f"{n_ok}/{len(report.steps)} steps verified")
    if not report.all_verified:
        print("failed steps: " + " ".join(report.failed_ids), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_certify(cfg: Dict) -> int:
    from . import certifier

    lemma = cfg["lemma"]
    over = dict(rho=cfg["rho"], slice_width=cfg["slice_width"], budget=cfg["budget"],
                workers=max(cfg["workers"], 1), seed=cfg["seed"], offset=cfg["offset"])
    if lemma == 1:
        over.update(corner_samples=cfg["corner_samples"], x_max=cfg["x_max"])
    base = certifier.CertConfig.default(lemma)
    t0 = base.t_range[0] if cfg["t_min"] is None else cfg["t_min"]
    t1 = base.t_range[1] if cfg["t_max"] is None else cfg["t_max"]
    if not t0 < t1:
        raise UsageError("t-min must be below t-max")
    if cfg["rho"] < 0:
        raise UsageError("rho must be >= 0")
    over["t_range"] = (t0, t1)
    cert = certifier.certify_lemma(lemma, certifier.CertConfig.default(lemma, **over))
    text = cert.to_json(include_timing=not cfg["no_timing"]) + "\n"
    _write(cfg["out"] or f"certificate_lemma{lemma}.json", text)
    print(f"lemma {lemma}: {cert.status} (delta={cert.delta}, boxes={cert.stats['boxes_processed']})")
    if cert.status != "proved_strict":
        for name, part in cert.parts.items():
            if part["status"] == "inconclusive":
                print(f"  {name}: {part.get('note', '')}", file=sys.stderr)
                for box in part.get("residual_boxes", [])[:5]:
                    print(f"    residual box {box}", file=sys.stderr)
    return {"proved_strict": EXIT_OK, "proved_up_to_epsilon": EXIT_PARTIAL}.get(cert.status, EXIT_FAIL)


def cmd_critical(cfg: Dict) -> int:
    from . import critical

    pts = critical.multistart(cfg["mode"], cfg["starts"], cfg["seed"])
    _write(cfg["out"], critical.stationary_csv(pts))
    counts: Dict[str, int] = {}
    for p in pts:
        counts[p.classification] = counts.get(p.classification, 0) + 1
    print(" ".join(f"{k}={v}" for k, v in sorted(counts.items())),
          file=sys.stderr if cfg["out"] in (None, "-") else sys.stdout)
    return EXIT_FAIL if counts.get("spurious") else EXIT_OK


SCAN_BOXES = {"trig": ((0.3, math.pi), (0.0, 10.0)), "hyp": ((0.5, 3.0), (1.05, 10.0))}


def cmd_scan(cfg: Dict) -> int:
    from . import critical

    if cfg["grid"] < 2:
        raise UsageError("--grid must be at least 2")
    t_rng, x_rng = SCAN_BOXES[cfg["mode"]]
    t_rng = cfg["t_range"] or t_rng
    x_rng = cfg["x_range"] or x_rng
    box = (t_rng, x_rng, x_rng)
    if cfg["out"]:
        with open(cfg["out"], "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "x", "y", "value"])
            for row in critical.grid_rows(cfg["mode"], box, cfg["grid"]):
                w.writerow([repr(v) for v in row])
    arg, val = critical.brute_force_min(cfg["mode"], box, cfg["grid"])
    print(f"min {val:.6e} at t={arg[0]!r} x={arg[1]!r} y={arg[2]!r}")
    return EXIT_OK if val >= -1e-9 else EXIT_FAIL


COMMANDS = {"identities": cmd_identities, "certify": cmd_certify,
            "critical": cmd_critical, "scan": cmd_scan}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"ineqcert: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ineqcert: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
