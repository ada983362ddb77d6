"""Batch CLI: evaluate witnesses, run parameter sweeps, reproduce the
interferometer estimate, and drive the validation suites.

Exit codes: 0 success (verdicts are results, not errors), 1 evaluation or
suite failure, 2 usage error.  Defaults can be overridden by GUPW_-prefixed
environment variables; explicit flags always win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .fock import TruncationError
from .gup import GupConfig
from .oracle import default_suites, run_suites
from .states import state_from_spec
from .witnesses import (
    BipartiteCoefficients,
    TripartiteCoefficients,
    duan_witness,
    rigolin_collective,
    rigolin_pairwise,
    vanloock_witness,
)

PHYSICAL_HBAR = 1.054571817e-34  # J s

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _env(name: str, cast, fallback):
    raw = os.environ.get("GUPW_" + name)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError as exc:
        raise SystemExit(f"invalid GUPW_{name}={raw!r}: {exc}")


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _parse_triple(raw: str, flag: str) -> tuple[float, float, float]:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 3:
        raise ValueError(f"{flag} needs three comma-separated reals, got {raw!r}")
    return tuple(float(p) for p in parts)


def _load_state(args):
    with open(args.state, "r", encoding="utf-8") as fh:
        tree = json.load(fh)
    return state_from_spec(tree, cutoff=args.cutoff, max_tail=args.max_tail)


def _coeffs_for(args):
    if args.criterion == "duan":
        return BipartiteCoefficients(args.a)
    if args.criterion == "vanloock":
        h = _parse_triple(args.h, "--h") if args.h else (1.0, -1.0, 0.0)
        g = _parse_triple(args.g, "--g") if args.g else (1.0, 1.0, 1.0)
        return TripartiteCoefficients(h, g)
    return None


def _evaluate(criterion, state, coeffs, config, max_tail):
    if criterion == "duan":
        return duan_witness(state, coeffs, config, max_tail=max_tail)
    if criterion == "vanloock":
        return vanloock_witness(state, coeffs, config, max_tail=max_tail)
    if criterion == "rigolin_collective":
        return rigolin_collective(state, config, max_tail=max_tail)
    if criterion == "rigolin_pairwise":
        return rigolin_pairwise(state, config, max_tail=max_tail)
    raise ValueError(f"unknown criterion {criterion!r}")


def _write_json(path: str, payload) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# witness
# ---------------------------------------------------------------------------

def cmd_witness(args) -> int:
    state = _load_state(args)
    coeffs = _coeffs_for(args)
    config = GupConfig(args.beta, args.convention)
    report = _evaluate(args.criterion, state, coeffs, config, args.max_tail)
    line = (
        f"lhs={report.lhs:.6g} bound={report.bound_hup:.6g} "
        f"bound_gup={report.bound_gup:.6g} verdict={report.verdict}"
    )
    print(line)
    if args.out:
        _write_json(args.out, report.to_dict())
    elif args.format == "json":
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

@dataclass
class SweepSpec:
    parameter: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.parameter not in ("beta", "a", "r"):
            raise ValueError("sweep parameter must be beta, a, or r")
        if self.steps < 2:
            raise ValueError("sweep needs at least 2 steps")
        if not self.start < self.stop:
            raise ValueError("sweep range needs start < stop")

    def values(self) -> list[float]:
        step = (self.stop - self.start) / (self.steps - 1)
        return [self.start + k * step for k in range(self.steps)]


def _sweep_rows(spec: SweepSpec, args):
    with open(args.state, "r", encoding="utf-8") as fh:
        tree = json.load(fh)
    rows = []
    for value in spec.values():
        beta = args.beta
        a = args.a
        cur_tree = tree
        if spec.parameter == "beta":
            beta = value
        elif spec.parameter == "a":
            a = value
        else:
            family = next((k for k in ("tmsv", "cv_ghz") if k in tree), None)
            if family is None:
                raise ValueError("an r sweep needs a 'tmsv' or 'cv_ghz' state spec")
            cur_tree = dict(tree)
            cur_tree[family] = {"r": value}
        state = state_from_spec(cur_tree, cutoff=args.cutoff, max_tail=args.max_tail)
        config = GupConfig(beta, args.convention)
        ns = argparse.Namespace(criterion=args.criterion, a=a, h=args.h, g=args.g)
        coeffs = _coeffs_for(ns)
        report = _evaluate(args.criterion, state, coeffs, config, args.max_tail)
        rows.append((value, report))
    return rows


def cmd_sweep(args) -> int:
    spec = SweepSpec(args.parameter, args.start, args.stop, args.steps)
    rows = _sweep_rows(spec, args)
    if args.format == "json":
        payload = [dict(report.to_dict(), **{spec.parameter: value}) for value, report in rows]
        if args.out:
            _write_json(args.out, payload)
        else:
            print(json.dumps(payload, indent=2, sort_keys=True))
        return EXIT_OK
    header = f"{spec.parameter},lhs,bound_hup,delta_gup,bound_gup,verdict,verdict_gup"
    lines = [header]
    for value, rep in rows:
        lines.append(",".join([
            _fmt(value), _fmt(rep.lhs), _fmt(rep.bound_hup), _fmt(rep.delta_gup),
            _fmt(rep.bound_gup), rep.verdict, rep.verdict_gup,
        ]))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# scenario kim-shih
# ---------------------------------------------------------------------------

@dataclass
class ScenarioKimShih:
    """Momentum-spread estimate for the two-photon interference setup.

    delta_y is the transverse position spread in meters (default 0.16 mm);
    beta is the GUP parameter in SI momentum units, 1/(kg m/s)^2, so
    beta * delta_p^2 is dimensionless.  The sanity cap on the internal
    dimensionless beta does not apply here.
    """

    delta_y: float = 0.16e-3
    beta: float = 0.0
    hbar: float = PHYSICAL_HBAR

    def __post_init__(self):
        if self.delta_y <= 0:
            raise ValueError("delta_y must be positive")
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")

    def evaluate(self) -> dict:
        delta_p = self.hbar / (2.0 * self.delta_y)
        beta_dp2 = self.beta * delta_p * delta_p
        delta_gup = 0.25 * self.hbar * beta_dp2
        classification = "no_disagreement" if beta_dp2 >= 1.0 else "disagreement"
        return {
            "delta_y_m": self.delta_y,
            "delta_p_kg_m_per_s": delta_p,
            "beta_per_momentum_squared": self.beta,
            "beta_delta_p_squared": beta_dp2,
            "delta_gup_J_s": delta_gup,
            "classification": classification,
        }


def cmd_scenario_kimshih(args) -> int:
    scenario = ScenarioKimShih(delta_y=args.delta_y, beta=args.beta)
    result = scenario.evaluate()
    print(f"delta_y            = {result['delta_y_m']:.6g} m")
    print(f"delta_p = hbar/(2 delta_y) = {result['delta_p_kg_m_per_s']:.6g} kg m/s")
    print(f"beta * delta_p^2   = {result['beta_delta_p_squared']:.6g} (dimensionless)")
    print(f"delta_gup          = {result['delta_gup_J_s']:.6g} J s")
    print(f"classification     = {result['classification']}")
    if args.out:
        _write_json(args.out, result)
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    names = [s.strip() for s in args.suites.split(",") if s.strip()] if args.suites else None
    config = GupConfig(args.beta, args.convention)
    reports = run_suites(seed=args.seed, names=names, config=config)
    all_pass = True
    for rep in reports:
        status = "PASS" if rep.passed else "FAIL"
        print(f"[{status}] {rep.suite}: n={rep.n_samples} min_slack={rep.min_slack:.3e} "
              f"elapsed={rep.elapsed:.2f}s")
        if not rep.passed:
            all_pass = False
            for failure in rep.failures:
                print(f"    replay: seed={failure.get('seed')} params={failure.get('params')} "
                      f"slack={failure.get('slack')}")
    payload = {
        "seed": args.seed,
        "beta": args.beta,
        "convention": args.convention,
        "passed": all_pass,
        "suites": [rep.to_dict() for rep in reports],
    }
    if args.out:
        _write_json(args.out, payload)
    return EXIT_OK if all_pass else EXIT_FAILURE


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gupwit",
        description="Variance-based entanglement witnesses with GUP-corrected bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, need_state=True):
        if need_state:
            p.add_argument("--state", required=True, metavar="PATH",
                           help="JSON state spec (see README for the schema)")
        p.add_argument("--criterion", required=True,
                       choices=["duan", "vanloock", "rigolin_collective", "rigolin_pairwise"])
        p.add_argument("--a", type=float, default=_env("A", float, 1.0),
                       help="EPR coefficient for the duan criterion")
        p.add_argument("--h", default=None, metavar="H1,H2,H3")
        p.add_argument("--g", default=None, metavar="G1,G2,G3")
        p.add_argument("--beta", type=float, default=_env("BETA", float, 0.0))
        p.add_argument("--convention", choices=["paper", "kempf"],
                       default=_env("CONVENTION", str, "kempf"))
        p.add_argument("--cutoff", type=int, default=_env("CUTOFF", int, None))
        p.add_argument("--max-tail", type=float, default=_env("MAX_TAIL", float, 1e-6))
        p.add_argument("--out", default=_env("OUT", str, None), metavar="PATH")

    w = sub.add_parser("witness", help="evaluate one criterion on one state")
    add_common(w)
    w.add_argument("--format", choices=["json"], default="json")
    w.set_defaults(fn=cmd_witness)

    s = sub.add_parser("sweep", help="sweep beta, a, or r and emit CSV")
    add_common(s)
    s.add_argument("--parameter", required=True, choices=["beta", "a", "r"])
    s.add_argument("--from", dest="start", type=float, required=True)
    s.add_argument("--to", dest="stop", type=float, required=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.set_defaults(fn=cmd_sweep)

    sc = sub.add_parser("scenario", help="named physical scenarios")
    scsub = sc.add_subparsers(dest="scenario", required=True)
    ks = scsub.add_parser("kim-shih",
                          help="momentum-spread estimate with delta_y = 0.16 mm")
    ks.add_argument("--delta-y", dest="delta_y", type=float,
                    default=_env("DELTA_Y", float, 0.16e-3), metavar="METERS")
    ks.add_argument("--beta", type=float, default=_env("BETA", float, 0.0),
                    help="GUP parameter in 1/(kg m/s)^2")
    ks.add_argument("--out", default=_env("OUT", str, None), metavar="PATH")
    ks.set_defaults(fn=cmd_scenario_kimshih)

    v = sub.add_parser("validate", help="run the oracle suites")
    v.add_argument("--suites", default=None,
                   help=f"comma-separated subset of {sorted(default_suites(0))}")
    v.add_argument("--seed", type=int, default=_env("SEED", int, 20240))
    v.add_argument("--beta", type=float, default=_env("BETA", float, 1e-3))
    v.add_argument("--convention", choices=["paper", "kempf"],
                   default=_env("CONVENTION", str, "kempf"))
    v.add_argument("--out", default=_env("OUT", str, None), metavar="PATH")
    v.set_defaults(fn=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TruncationError as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
