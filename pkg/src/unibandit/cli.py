"""Command line: ``unibandit {simulate,lowerbound,plot,validate}``.

Exit codes: 0 success, 2 input error, 3 monitor violation under
``--strict-monitors``.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from .config import build_spec, load_json, parse_environment
from .env import BanditConfig, ConfigError, lower_bound_constant, lower_bound_terms
from .kl import kl
from .report import CsvFormatError, fmt, pulls_csv, read_regret_csv, regret_csv, regret_svg
from .runner import run_experiment

log = logging.getLogger("unibandit")

EXIT_INPUT = 2
EXIT_MONITOR = 3


def _sibling(out: Path, suffix: str) -> Path:
    return out.with_name(f"{out.stem}_{suffix}.csv")


def cmd_simulate(args) -> int:
    overrides = {"seed": args.seed, "replicates": args.replicates, "horizon": args.horizon,
                 "policies": args.policies}
    if args.strict_monitors or args.monitors:
        overrides["monitors"] = True
    spec = build_spec(load_json(args.config), overrides)
    result = run_experiment(spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(regret_csv(result))
    _sibling(out, "pulls").write_text(pulls_csv(result))
    violations = 0
    if spec.monitors:
        path = _sibling(out, "monitors")
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["policy", "bound", "checks", "violations"])
            for label, report in result.reports.items():
                for bound in sorted(set(report.checks) | set(report.violations)):
                    w.writerow([label, bound, report.checks[bound], report.violations[bound]])
                w.writerow([label, "skipped_steps", report.steps, report.skipped_steps])
                w.writerow([label, "gamma_zero_steps", report.steps, report.gamma_zero_steps])
                violations += report.total_violations
                for v in report.log[:20]:
                    log.warning("%s %s violated at t=%d: %s > %s (chosen arm %d, leader %d, pulls %s)",
                                label, v.bound, v.t, v.lhs, v.rhs, v.chosen + 1, v.leader + 1, list(v.pulls))
    if violations and args.strict_monitors:
        print(f"monitor violations: {violations}", file=sys.stderr)
        return EXIT_MONITOR
    return 0


def cmd_lowerbound(args) -> int:
    env = parse_environment(load_json(args.config))
    if not isinstance(env, BanditConfig):
        raise ConfigError("lowerbound needs a fixed configuration ('means'), not a random generator")
    best = env.best_mean
    print("arm,gap,kl,term")
    for arm, term in sorted(lower_bound_terms(env).items()):
        m = env.means[arm]
        print(f"{arm + 1},{fmt(best - m)},{fmt(kl(env.family, m, best))},{fmt(term)}")
    print(f"c,{fmt(lower_bound_constant(env))}")
    return 0


def cmd_plot(args) -> int:
    try:
        text = Path(args.csv).read_text()
    except OSError as exc:
        raise ConfigError(f"{args.csv}: cannot read ({exc.strerror})") from None
    try:
        curves = read_regret_csv(text)
    except CsvFormatError as exc:
        raise ConfigError(f"{args.csv}: {exc}") from None
    reference = args.reference
    if reference is None and args.config:
        env = parse_environment(load_json(args.config))
        if isinstance(env, BanditConfig):
            reference = lower_bound_constant(env)
    Path(args.out).write_text(regret_svg(curves, reference))
    return 0


def cmd_validate(args) -> int:
    data = load_json(args.config)
    build_spec(data)
    print("ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unibandit", description="Unimodal bandit simulations.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)

    sim = sub.add_parser("simulate", help="run an experiment and write regret/pull CSVs")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", required=True)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--replicates", type=int)
    sim.add_argument("--horizon", type=int)
    sim.add_argument("--policies", help="comma separated policy names")
    sim.add_argument("--monitors", action="store_true", help="check the empirical bounds every step")
    sim.add_argument("--strict-monitors", action="store_true",
                     help="enable monitors and exit 3 on any violation")
    sim.set_defaults(func=cmd_simulate)

    lb = sub.add_parser("lowerbound", help="print the asymptotic regret constant")
    lb.add_argument("--config", required=True)
    lb.set_defaults(func=cmd_lowerbound)

    pl = sub.add_parser("plot", help="render a regret CSV as SVG")
    pl.add_argument("--csv", required=True)
    pl.add_argument("--out", required=True)
    pl.add_argument("--reference", type=float, help="draw reference * log(t)")
    pl.add_argument("--config", help="take the reference constant from this configuration")
    pl.set_defaults(func=cmd_plot)

    va = sub.add_parser("validate", help="check a configuration")
    va.add_argument("--config", required=True)
    va.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
