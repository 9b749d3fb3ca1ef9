"""Command-line entry point ``lcoarea``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .backends import SprinkleConfig, dump_space, load_space, parse_space, sprinkle, unit_diamond
from .covering import random_family, sample_points, verify_certificate, vitali_select
from .errors import ExperimentAborted, LCoareaError
from .harness import ExperimentConfig, run_coarea_experiment, run_minkowski_volume_experiment
from .integration import weighted_causal_integral_delta
from .measure import candidate_diamonds, cover_value_exact, cover_value_greedy
from .report import csv_text, dumps, write_json
from .space import verify_axioms


def _emit(obj, out: str | None) -> None:
    if out:
        write_json(obj, out)
    else:
        sys.stdout.write(dumps(obj))


def _write_csv(rows, path: str | None) -> None:
    if path:
        Path(path).write_text(csv_text(rows))


def _schedule(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad schedule {text!r}") from None


def cmd_check_axioms(args) -> int:
    space = load_space(args.space, verify=False)
    report = verify_axioms(space, tol=args.tol)
    _emit(report, args.out)
    return 0 if report.passed else 1


def cmd_measure(args) -> int:
    space = load_space(args.space)
    target = list(range(space.n))
    if args.pool:
        amb = json.loads(Path(args.pool).read_text())
        amb_space = parse_space(amb, verify=False)
        if amb_space.coords is None:
            raise LCoareaError("ambient pool needs coordinates")
        space = space.extended(amb_space.coords, [f"ambient:{i}" for i in amb_space.ids])
    cands = candidate_diamonds(space, args.delta)
    if args.method == "exact":
        sol = cover_value_exact(space, target, cands, args.s, args.delta)
    else:
        sol = cover_value_greedy(space, target, cands, args.s, args.delta)
    _emit(sol, args.out)
    _write_csv([("V", args.s, None, args.delta, sol.cost)], args.csv)
    return 0


def cmd_measure_minkowski(args) -> int:
    rep = run_minkowski_volume_experiment(args.schedule, tau=args.tau)
    _emit(rep, args.out)
    _write_csv(rep.csv_rows(), args.csv)
    return 0


def cmd_integrate(args) -> int:
    space = load_space(args.space)
    f = json.loads(Path(args.f).read_text())
    if not isinstance(f, dict):
        raise LCoareaError("f.json must map point ids to values")
    f = {k: float("inf") if v in ("inf", None) else float(v) for k, v in f.items()}
    res = weighted_causal_integral_delta(space, f, args.s, args.delta, method=args.method)
    _emit(res, args.out)
    _write_csv([("integral", args.s, None, args.delta, res.value)], args.csv)
    return 0


def cmd_coarea(args) -> int:
    path = Path(args.config)
    cfg = ExperimentConfig.from_dict(json.loads(path.read_text()), base=path.parent)
    try:
        rep = run_coarea_experiment(cfg)
    except ExperimentAborted as exc:
        _emit({"aborted": str(exc), "verdict": exc.verdict}, args.out)
        return 2
    _emit(rep, args.out)
    c = rep.chain
    _write_csv([("lhs", c.s, c.t, c.delta, rep.lhs), ("rhs", c.s, c.t, c.delta, rep.rhs),
                ("phi", c.s, c.t, c.delta, c.phi), ("slack", c.s, c.t, c.delta, rep.slack)], args.csv)
    return 0 if rep.passed else 1


def cmd_covering_demo(args) -> int:
    rng = np.random.default_rng(args.seed)
    m = max(1, args.n // 2)
    E = sample_points(rng, unit_diamond(1), m)
    fam = random_family(rng, E, args.n, args.ecc_max)
    cert = vitali_select(E, fam)
    checks = verify_certificate(cert, E, rng, args.samples)
    _emit(cert, args.out)
    print(f"family {len(fam)}  selected {len(cert.selected)}  points {len(E)}  "
          f"failures {sum(checks.values())}  {'PASS' if cert.passed else 'FAIL'}", file=sys.stderr)
    return 0 if cert.passed else 1


def cmd_sprinkle(args) -> int:
    cs = sprinkle(SprinkleConfig(args.dim, args.intensity, args.seed))
    _emit(dump_space(cs), args.out)
    print(f"{cs.n} points", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lcoarea", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        sp.add_argument("--out", help="write JSON here instead of stdout")
        return sp

    sp = add("check-axioms", cmd_check_axioms, "verify pre-length axioms of a causal-set file")
    sp.add_argument("space")
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = add("measure", cmd_measure, "cover value of all points at one scale")
    sp.add_argument("space")
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--method", choices=("exact", "greedy"), default="exact")
    sp.add_argument("--pool", help="space file with ambient vertex coordinates")
    sp.add_argument("--csv")

    sp = add("measure-minkowski", cmd_measure_minkowski, "null-tiling values for a 1+1 diamond")
    sp.add_argument("--tau", type=float, default=1.0)
    sp.add_argument("--schedule", type=_schedule, required=True)
    sp.add_argument("--csv")

    sp = add("integrate", cmd_integrate, "weighted diamond integral of a function")
    sp.add_argument("space")
    sp.add_argument("--f", required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--method", choices=("lp", "exact"), default="lp")
    sp.add_argument("--csv")

    sp = add("coarea", cmd_coarea, "run a coarea experiment from a config file")
    sp.add_argument("config")
    sp.add_argument("--csv")

    sp = add("covering-demo", cmd_covering_demo, "disjoint selection on a random family")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--n", type=int, default=50)
    sp.add_argument("--ecc-max", type=float, default=3.0)
    sp.add_argument("--samples", type=int, default=10_000)

    sp = add("sprinkle", cmd_sprinkle, "Poisson sprinkling into the unit diamond")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--intensity", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (LCoareaError, OSError, json.JSONDecodeError) as exc:
        print(f"lcoarea: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
