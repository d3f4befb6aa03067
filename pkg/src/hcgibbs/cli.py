"""Command-line entry point: ``hcgibbs {phase,boundary-law,chain,simulate,reproduce}``.

Exit codes: 0 success, 1 a reproduce row failed, 2 usage or domain error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from .activities import ActivitySpec
from .boundary import (
    boundary_law_from_A,
    consistency_residual,
    law_sum,
    normalisability_check,
    periodic_pair,
)
from .chain import (
    build_periodic_kernel,
    build_ti_kernel,
    stationarity_residual,
    stationary_periodic,
    stationary_ti,
    to_csv,
)
from .errors import DomainError, HCGibbsError, NumericalError, TruncationError
from .phase import Regime, analyze, classify
from .reproduce import EXAMPLES, all_passed, format_table, run_example
from .simulate import (
    admissibility_check,
    effective_count,
    empirical_marginals,
    parity_marginal,
    periodic_measure,
    sample_to_csv,
    sample_trees,
    ti_measure,
)

__all__ = ["RunConfig", "main", "build_parser"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    k: int = 2
    activities: str | None = None
    Lambda: float | None = None
    tol: float = 1e-12
    truncate: int | None = None
    depth: int = 6
    samples: int = 1000
    seed: int = 0
    measure: str = "mu0"
    out: str = "text"
    example: int | None = None

    def __post_init__(self):
        if self.k < 2:
            raise DomainError(f"--k must be at least 2, got {self.k}")
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise DomainError(f"--tol must be positive, got {self.tol}")
        if self.truncate is not None and self.truncate < 1:
            raise DomainError(f"--truncate must be at least 1, got {self.truncate}")
        if self.depth < 0:
            raise DomainError(f"--depth must be nonnegative, got {self.depth}")
        if self.samples < 1:
            raise DomainError(f"--samples must be at least 1, got {self.samples}")
        if self.Lambda is not None and not self.Lambda > 0:
            raise DomainError(f"--lambda must be positive, got {self.Lambda}")
        if self.activities is not None and self.Lambda is not None:
            raise DomainError("give either --activities or --lambda, not both")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise DomainError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, default=2, help="tree order (default 2)")
    common.add_argument("--tol", type=float, default=1e-12,
                        help="root residual and series tail tolerance (default 1e-12)")
    common.add_argument("--out", choices=("json", "csv", "text"), default="text")

    spec_arg = argparse.ArgumentParser(add_help=False)
    spec_arg.add_argument("--activities", metavar="PATH", help="activity-spec JSON file")

    measure_arg = argparse.ArgumentParser(add_help=False)
    measure_arg.add_argument("--measure", choices=("mu0", "mu1", "mu2"), default="mu0",
                             help="TI measure or one of the two periodic ones")

    p = _Parser(prog="hcgibbs", description="Gibbs measures of the countable-spin "
                "hard-core model on Cayley trees.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ph = sub.add_parser("phase", parents=[common, spec_arg],
                        help="classify the phase for an activity spec or total activity")
    ph.add_argument("--lambda", dest="Lambda", type=float, help="total activity")

    bl = sub.add_parser("boundary-law", parents=[common, spec_arg, measure_arg],
                        help="boundary-law values over -N..N")
    bl.add_argument("--truncate", type=int, default=10, help="index range N (default 10)")

    ch = sub.add_parser("chain", parents=[common, spec_arg, measure_arg],
                        help="transition kernel and stationary vector")
    ch.add_argument("--truncate", type=int, default=None,
                    help="truncation N (default: smallest admissible)")

    sm = sub.add_parser("simulate", parents=[common, spec_arg, measure_arg],
                        help="sample configurations on a finite tree ball")
    sm.add_argument("--depth", type=int, default=6)
    sm.add_argument("--samples", type=int, default=1000)
    sm.add_argument("--seed", type=int, default=0)

    rp = sub.add_parser("reproduce", parents=[common],
                        help="run the worked examples and print a PASS/FAIL table")
    rp.add_argument("--example", type=int, choices=sorted(EXAMPLES),
                    help="example number (default: all)")
    return p


def _config(ns) -> RunConfig:
    fields = {name: getattr(ns, name) for name in RunConfig.__dataclass_fields__
              if hasattr(ns, name)}
    return RunConfig(**fields)


def load_spec(path: str) -> ActivitySpec:
    """Read an activity spec, prefixing parse errors with ``path:line:col``."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DomainError(f"{path}: {exc.strerror}") from None
    try:
        return ActivitySpec.from_json(text)
    except DomainError as exc:
        msg = str(exc)
        raise DomainError(f"{path}:{msg}" if msg[:1].isdigit() else f"{path}: {msg}") from None


def _require_spec(cfg: RunConfig) -> ActivitySpec:
    if cfg.activities is None:
        raise DomainError(f"{cfg.command} needs --activities PATH")
    return load_spec(cfg.activities)


def _laws(spec, cfg):
    """Phase report plus the law (mu0) or law pair (mu1/mu2) requested by ``cfg``."""
    report = analyze(spec, cfg.k, cfg.tol)
    if report.regime is Regime.NO_MEASURE:
        raise DomainError("activity series diverges; no Gibbs measure exists")
    if cfg.measure == "mu0":
        return report, boundary_law_from_A(spec, cfg.k, report.A0)
    if report.regime is not Regime.THREE_PERIODIC:
        raise DomainError(f"{cfg.measure} needs Lambda > Lambda_cr={report.Lambda_cr:g}; "
                          f"got Lambda={report.Lambda:.12g}")
    low, high = report.pair
    pair = periodic_pair(spec, cfg.k, low, high)
    return report, (pair if cfg.measure == "mu1" else pair.swapped())


def _csv_rows(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x) -> str:
    return "none" if x is None else f"{x:.15g}"


def cmd_phase(cfg: RunConfig):
    if cfg.activities is not None:
        report = analyze(load_spec(cfg.activities), cfg.k, cfg.tol)
    elif cfg.Lambda is not None:
        report = classify(cfg.k, cfg.Lambda, cfg.tol)
    else:
        raise DomainError("phase needs --activities PATH or --lambda FLOAT")
    d = report.to_dict()
    if cfg.out == "json":
        return json.dumps(d, indent=2)
    if cfg.out == "csv":
        pair = d["pair"] or [None, None]
        return _csv_rows(["k", "Lambda", "Lambda_cr", "regime", "A0", "A_low", "A_high"],
                         [[d["k"], d["Lambda"], d["Lambda_cr"], d["regime"], d["A0"], *pair]])
    lines = [f"k          {d['k']}",
             f"Lambda     {_fmt(d['Lambda']) if d['Lambda'] is not None else 'divergent'}",
             f"Lambda_cr  {_fmt(d['Lambda_cr'])}",
             f"regime     {d['regime']}",
             f"A0         {_fmt(d['A0'])}"]
    if d["pair"]:
        lines.append(f"pair       ({_fmt(d['pair'][0])}, {_fmt(d['pair'][1])})")
    lines += [f"residual   {name}: {val:.3e}" for name, val in d["residuals"].items()]
    return "\n".join(lines)


def cmd_boundary_law(cfg: RunConfig):
    spec = _require_spec(cfg)
    report, law = _laws(spec, cfg)
    N = cfg.truncate
    if cfg.measure == "mu0":
        cols = {"z": law}
    else:
        cols = {"even": law.law_even, "odd": law.law_odd}
    values = {name: [1.0 if j == 0 else L.z(j) for j in range(-N, N + 1)]
              for name, L in cols.items()}
    sums = {name: law_sum(L, cfg.tol).value for name, L in cols.items()}
    norm = {name: bool(normalisability_check(L, cfg.tol)) for name, L in cols.items()}
    residual = consistency_residual(law, cfg.tol)
    if cfg.out == "csv":
        rows = [[j, *(repr(values[c][j + N]) for c in cols)] for j in range(-N, N + 1)]
        return _csv_rows(["index", *cols], rows)
    if cfg.out == "json":
        return json.dumps({
            "measure": cfg.measure, "k": cfg.k, "Lambda": report.Lambda,
            "laws": {c: {str(j): values[c][j + N] for j in range(-N, N + 1)} for c in cols},
            "sums": sums, "normalisable": norm, "consistency_residual": residual,
        }, indent=2)
    head = "index  " + "  ".join(f"{c:<22}" for c in cols)
    lines = [head] + [f"{j:>5}  " + "  ".join(f"{values[c][j + N]:<22.15g}" for c in cols)
                      for j in range(-N, N + 1)]
    lines += [f"sum {c}: {_fmt(s)}" for c, s in sums.items()]
    lines += [f"normalisable {c}: {v}" for c, v in norm.items()]
    lines.append(f"consistency residual: {residual:.3e}")
    return "\n".join(lines)


def cmd_chain(cfg: RunConfig):
    spec = _require_spec(cfg)
    _, law = _laws(spec, cfg)
    if cfg.measure == "mu0":
        P = build_ti_kernel(spec, law, cfg.truncate, cfg.tol)
        X = stationary_ti(spec, law, cfg.tol)
    else:
        P = build_periodic_kernel(spec, law, cfg.truncate, cfg.tol)
        X = stationary_periodic(spec, law, cfg.tol)
    residual = stationarity_residual(X, P)
    sums = P.row_sums()
    x = X.restricted(P.N)
    if cfg.out == "csv":
        return to_csv(P.indices, x)
    window = min(P.N, 32)
    if cfg.out == "json":
        return json.dumps({
            "measure": cfg.measure, "kind": P.kind, "N": P.N, "tail_mass": P.tail_mass,
            "row_sums": {"row0": sums[0], "other": sums[1]},
            "stationary": X.to_dict(window), "residual": residual,
        }, indent=2)
    lines = [f"kernel      {P.kind}, N={P.N}, certified tail {P.tail_mass:.3e}",
             f"row sums    row0 {sums[0]!r}, other {sums[1]!r}",
             f"x0          {X.x0!r}",
             f"residual    {residual:.3e}  (max |xP - x| over -N..N)"]
    lines += [f"x[{j:>3}]     {X.prob(j):.15g}" for j in range(-min(window, 5), min(window, 5) + 1)]
    return "\n".join(lines)


def cmd_simulate(cfg: RunConfig):
    spec = _require_spec(cfg)
    if cfg.out == "csv" and cfg.samples != 1:
        raise DomainError("csv output writes one configuration; pass --samples 1")
    _, law = _laws(spec, cfg)
    if cfg.measure == "mu0":
        measure = ti_measure(spec, law)
    elif cfg.measure == "mu1":
        measure = periodic_measure(spec, law, 1)
    else:
        # _laws hands back the swapped pair for mu2; undo it for periodic_measure
        measure = periodic_measure(spec, law.swapped(), 2)
    samples = sample_trees(spec, measure, cfg.k, cfg.depth, cfg.samples, cfg.seed, cfg.tol)
    if cfg.out == "csv":
        return sample_to_csv(samples[0])
    violations = sum(not admissibility_check(s) for s in samples)
    stats = []
    for parity in ("even", "odd"):
        if parity == "odd" and cfg.depth == 0:
            continue
        freq = empirical_marginals(samples, parity)
        entry = {"parity": parity, "freq": {str(j): f for j, f in sorted(freq.items())},
                 "theory_x0": parity_marginal(measure, 0 if parity == "even" else 1, cfg.tol).x0}
        if len(samples) > 1:
            entry["effective_count"] = effective_count(samples, parity)
        stats.append(entry)
    if cfg.out == "json":
        return json.dumps({"measure": cfg.measure, "k": cfg.k, "depth": cfg.depth,
                           "samples": cfg.samples, "seed": cfg.seed,
                           "violations": violations, "stats": stats}, indent=2)
    lines = [f"{cfg.samples} samples of {cfg.measure}, k={cfg.k}, depth {cfg.depth}, "
             f"seed {cfg.seed}",
             f"admissibility violations: {violations}"]
    for e in stats:
        p0 = e["freq"].get("0", 0.0)
        lines.append(f"{e['parity']:<5} freq(0) = {p0:.6f}  theory {e['theory_x0']:.6f}")
    return "\n".join(lines)


def cmd_reproduce(cfg: RunConfig):
    numbers = [cfg.example] if cfg.example is not None else sorted(EXAMPLES)
    results = {n: run_example(n, cfg.tol) for n in numbers}
    ok = all(all_passed(rows) for rows in results.values())
    if cfg.out == "json":
        text = json.dumps({str(n): [r.to_dict() for r in rows] for n, rows in results.items()},
                          indent=2)
    elif cfg.out == "csv":
        text = _csv_rows(["example", "name", "computed", "expected", "tol", "status"],
                         [[n, r.name, float(r.computed), r.expected, r.tol, r.status]
                          for n, rows in results.items() for r in rows])
    else:
        text = "\n\n".join(f"Example {n}\n{format_table(rows)}" for n, rows in results.items())
        text += f"\n\n{'PASS' if ok else 'FAIL'}"
    return text, ok


_COMMANDS = {
    "phase": cmd_phase,
    "boundary-law": cmd_boundary_law,
    "chain": cmd_chain,
    "simulate": cmd_simulate,
    "reproduce": cmd_reproduce,
}


def main(argv=None) -> int:
    out, err = sys.stdout, sys.stderr
    try:
        ns = build_parser().parse_args(argv)
        cfg = _config(ns)
        result = _COMMANDS[cfg.command](cfg)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (DomainError, TruncationError) as exc:
        print(f"hcgibbs: error: {exc}", file=err)
        return EXIT_USAGE
    except (NumericalError, HCGibbsError, ArithmeticError) as exc:
        print(f"hcgibbs: numerical failure: {exc}", file=err)
        return EXIT_NUMERIC
    ok = True
    if isinstance(result, tuple):
        result, ok = result
    out.write(result if result.endswith("\n") else result + "\n")
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
