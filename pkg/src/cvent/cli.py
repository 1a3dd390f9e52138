"""Command-line entry point ``cvent``."""
import argparse
import json
import logging
import sys

from . import __version__
from .errors import CventError
from .potentials import E_CHARGE, PotentialSpec, check_stability, coupling, coupling_generic, generic_equivalent
from .reproduce import TARGETS, reproduce
from .runner import default_jobs, run_scenario
from .scenario import load_scenario

log = logging.getLogger("cvent")

EXIT_CODES = """exit codes:
  0  success
  2  validation error (scenario file or arguments)
  3  stability error (alpha_tilde below -1/2)
  4  numeric error, including 'no steady state'
  5  I/O error
"""


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cvent",
        description="Gaussian entanglement between two trapped oscillators coupled by a central potential.",
        epilog=EXIT_CODES,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file", epilog=EXIT_CODES,
                         formatter_class=argparse.RawDescriptionHelpFormatter)
    run.add_argument("scenario", help="scenario JSON file")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--jobs", type=_positive_int, default=default_jobs(),
                     help="worker processes for sweep cells (default: number of cores)")

    rep = sub.add_parser("reproduce", help="run a built-in reference scenario", epilog=EXIT_CODES,
                         formatter_class=argparse.RawDescriptionHelpFormatter)
    rep.add_argument("target", choices=sorted(TARGETS))
    rep.add_argument("--out", required=True, help="output directory")
    rep.add_argument("--jobs", type=_positive_int, default=default_jobs())

    cp = sub.add_parser("coupling", help="print alpha_tilde and its stability verdict", epilog=EXIT_CODES,
                        formatter_class=argparse.RawDescriptionHelpFormatter)
    cp.add_argument("kind", choices=("generic", "coulomb", "newtonian"))
    cp.add_argument("--m", type=float, required=True, help="oscillator mass [kg]")
    cp.add_argument("--omega-m", type=float, required=True, help="mechanical angular frequency [rad/s]")
    cp.add_argument("--r", type=float, required=True, help="equilibrium separation [m]")
    cp.add_argument("--n", type=int, default=1, help="power of 1/r^n (generic only)")
    cp.add_argument("--alpha", type=float, default=0.0, help="coupling constant [SI] (generic only)")
    cp.add_argument("--q1", type=float, default=E_CHARGE, help="charge 1 [C] (coulomb; default +e)")
    cp.add_argument("--q2", type=float, default=-E_CHARGE, help="charge 2 [C] (coulomb; default -e)")
    cp.add_argument("--json", action="store_true", help="print a JSON object")
    return parser


def _coupling(args):
    spec = PotentialSpec(kind=args.kind, m=args.m, omega_m=args.omega_m, r=args.r, n=args.n,
                         alpha=args.alpha, q1=args.q1, q2=args.q2)
    alpha = coupling(spec)
    verdict = check_stability(alpha)
    if args.json:
        out = {"kind": spec.kind, "alpha_tilde": alpha, "stability": verdict}
        if spec.kind != "generic":
            out["alpha_tilde_with_n(n+1)"] = coupling_generic(generic_equivalent(spec))
        print(json.dumps(out))
    else:
        print(f"alpha_tilde = {alpha:.6e}")
        print(f"stability   = {verdict}")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        if args.command == "coupling":
            return _coupling(args)
        if args.command == "run":
            scenario = load_scenario(args.scenario)
            result = run_scenario(scenario, args.out, jobs=args.jobs, source=args.scenario)
            for name in result.files:
                log.info("wrote %s", name)
            print(f"{scenario.name}: {len(result.cells)} cell(s), wrote {len(result.files)} file(s) "
                  f"and {result.record_path.name}")
            return 0
        if args.command == "reproduce":
            checks = reproduce(args.target, args.out, jobs=args.jobs)
            for c in checks:
                print(f"[{'PASS' if c.passed else 'FAIL'}] {args.target}.{c.name}: {c.computed:.6g} ({c.criterion})")
            return 0
    except CventError as exc:
        print(f"cvent: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"cvent: error: {exc}", file=sys.stderr)
        return 5
    parser.error(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
