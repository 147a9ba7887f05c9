"""riesz-mellin command-line entry point.

Exit codes: 0 all checks passed, 1 a check failed, 2 bad configuration,
3 a refinement ladder was aborted (partial results are on disk).
"""
import argparse
import json
import os
import sys

from . import selftest
from .errors import ConfigError, LadderError
from .experiments import ExperimentConfig, corner_continuity, symbol_report, theorem1_sweep


def _parse_set(items):
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=JSON, got {item!r}")
        try:
            out[key.strip()] = json.loads(value)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--set {key}: value is not JSON ({exc})") from exc
    return out


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML config file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--threads", type=int, help="worker threads")
    common.add_argument("--set", action="append", metavar="KEY=JSON",
                        help="override a config key with a JSON value (repeatable)")

    p = argparse.ArgumentParser(prog="riesz-mellin", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("symbol", parents=[common], help="symbol residues, decay and moduli")
    s.add_argument("--alpha", type=float, action="append", help="angle in radians (repeatable)")
    s.add_argument("--Q", type=int, help="continuation order")

    t = sub.add_parser("theorem1", parents=[common], help="continuity modulus refinement ladder")
    t.add_argument("--polygon", help="preset (square, L) or JSON file with a vertices list")
    t.add_argument("--ladder", type=int, nargs="+", help="element counts per level")

    c = sub.add_parser("corner", parents=[common], help="corner difference operator ratios")
    c.add_argument("--theta", type=float, action="append", help="half-aperture in radians (repeatable)")
    c.add_argument("--trials", type=int)
    c.add_argument("--resolution", type=int, action="append", help="grid nodes per decade (repeatable)")

    st = sub.add_parser("selftest", help="run the invariant suite")
    st.add_argument("--filter", help="only checks whose module or name contains this")
    st.add_argument("--inject-fault", choices=selftest.FAULTS, help="corrupt a table to test detection")
    return p


def _config(args):
    overrides = _parse_set(args.set)
    direct = {
        "seed": args.seed, "threads": args.threads, "out": args.out,
        "alphas": getattr(args, "alpha", None), "Q": getattr(args, "Q", None),
        "polygon": getattr(args, "polygon", None), "ladder": getattr(args, "ladder", None),
        "thetas": getattr(args, "theta", None), "trials": getattr(args, "trials", None),
        "resolutions": getattr(args, "resolution", None),
    }
    overrides.update({k: v for k, v in direct.items() if v is not None})
    return ExperimentConfig.load(args.config, overrides)


def _report(bundle, out_dir):
    bundle.write(out_dir)
    for name, chk in bundle.checks.items():
        status = "PASS" if chk["passed"] else "FAIL"
        print(f"{status} {name}: {chk['value']!r} (tol {chk['tolerance']!r})")
    print(f"wrote {os.path.join(out_dir, 'summary.json')}")
    return 0 if bundle.passed else 1


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        results = selftest.run(args.filter, args.inject_fault)
        failed = [f"{r.module}.{r.name}" for r in results if not r.passed]
        if not results:
            print("no checks matched the filter", file=sys.stderr)
            return 2
        if failed:
            print("failed: " + ", ".join(failed), file=sys.stderr)
            return 1
        return 0
    try:
        cfg = _config(args)
        out_dir = cfg.out or os.path.join("riesz-mellin-out", args.command)
        if args.command == "symbol":
            bundle = symbol_report(cfg)
        elif args.command == "theorem1":
            bundle = theorem1_sweep(cfg, out_dir)
        else:
            bundle = corner_continuity(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except LadderError as exc:
        print(f"ladder aborted: {exc}; {len(exc.partial)} completed levels written to {out_dir}",
              file=sys.stderr)
        return 3
    return _report(bundle, out_dir)


if __name__ == "__main__":
    sys.exit(main())
