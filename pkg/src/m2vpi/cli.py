"""Command-line front end: instance I/O, generation, solving, benchmarks.

Subcommands:

* ``solve FILE --algo {simple,tradeoff}``: solve an m2vpi/dmdp instance,
  print ``x <v> <value>`` lines (feasible, exit 0) or a certificate block
  (infeasible, exit 2). Every output is re-verified before the process
  exits; verification failure is an internal error (exit 1).
* ``gen KIND --n N --m M --seed S``: write a deterministic instance file.
* ``dapsp FILE``: all-pairs discounted distances of a uniform instance as a
  CSV matrix; ``--check`` diffs against the quadratic reference.
* ``bench SUITE``: run a JSON suite of (generator x algorithm) cells and
  emit one CSV row per cell.

Vertices and edge ids are 1-indexed in all text formats, matching the
instance file layout.
"""

import argparse
import json
import sys
import time
from dataclasses import dataclass
from typing import Optional

from . import instrument
from .certificates import NegBicycleCert, NegUnitGainCert, verify_certificate
from .core import Ext, ParseError, Q, format_rational, parse_instance
from .dapsp import format_uniform, naive_dapsp_float, parse_uniform, solve_dapsp
from .generators import (
    dapsp_random,
    dmdp_random,
    feasible_random,
    infeasible_bicycle,
    planted_long_cycle,
    planted_unit_cycle,
)
from .oracle import naive_dapsp
from .solver import Verified, solve_simple, verify_extended
from .tradeoff import sample_size, solve_tradeoff

CSV_HEADER = "# m2vpi-bench-csv v1"
CSV_COLUMNS = (
    "cell,instance,algorithm,seed,param,n,m,outcome,wall_s,"
    "edge_relaxations,locate_calls,kcycle_calls,phase_samples,peak_aux_cells"
)

_GEN_KINDS = {
    "feasible-random": feasible_random,
    "planted-long-cycle": planted_long_cycle,
    "infeasible-bicycle": infeasible_bicycle,
    "infeasible-unit": planted_unit_cycle,
    "dmdp-random": dmdp_random,
    "dapsp-random": dapsp_random,
}


@dataclass
class RunReport:
    """One benchmark/solve cell: what ran, what happened, what it cost.

    peak_aux_cells is a coarse cell-count model of working memory: the
    solution vector plus the largest phase sample buffer for the simple
    solver, the compressed instance for the trade-off solver, and the
    answer matrix for the dapsp driver.
    """

    instance: str
    algorithm: str
    seed: int
    param: str
    n: int
    m: int
    outcome: str
    wall_s: float
    edge_relaxations: int
    locate_calls: int
    kcycle_calls: int
    phase_samples: int
    peak_aux_cells: int

    def csv_row(self, cell: int) -> str:
        return (
            f"{cell},{self.instance},{self.algorithm},{self.seed},{self.param},"
            f"{self.n},{self.m},{self.outcome},{self.wall_s:.6f},"
            f"{self.edge_relaxations},{self.locate_calls},{self.kcycle_calls},"
            f"{self.phase_samples},{self.peak_aux_cells}"
        )


def _fmt_value(x: Ext) -> str:
    if x.is_pos_inf:
        return "inf"
    return format_rational(x.finite())


def _edge_id_line(label: str, ids) -> str:
    return f"{label} " + " ".join(str(i + 1) for i in ids)


def _certificate_block(cert) -> str:
    if isinstance(cert, NegUnitGainCert):
        lines = [
            "cert neg-unit-gain",
            f"start {cert.walk.start + 1}",
            _edge_id_line("walk", cert.walk.edge_ids),
        ]
    elif isinstance(cert, NegBicycleCert):
        lines = [
            "cert bicycle",
            _edge_id_line("cycle-high", cert.cycle_ge.edge_ids),
            _edge_id_line("path", cert.path.edge_ids) if cert.path.edge_ids
            else f"path (empty at {cert.path.start + 1})",
            _edge_id_line("cycle-low", cert.cycle_le.edge_ids),
        ]
    else:
        raise TypeError(f"unknown certificate type {type(cert)!r}")
    return "\n".join(lines) + "\n"


def _solve_report(g, algo: str, seed: int, h: Optional[int]):
    instrument.reset()
    t0 = time.perf_counter()
    if algo == "simple":
        out = solve_simple(g, seed=seed)
        param = ""
        aux = g.n + (max(out.sample_counts) if out.sample_counts else 0)
    else:
        hh = h if h is not None else max(1, g.n // 2)
        out = solve_tradeoff(g, hh, seed=seed)
        param = f"h={hh}"
        aux = g.n + sample_size(g.n, hh) * (hh + 2)
    wall = time.perf_counter() - t0
    work = instrument.snapshot()
    report = RunReport(
        instance="-",
        algorithm=algo,
        seed=seed,
        param=param,
        n=g.n,
        m=g.m,
        outcome="feasible" if out.feasible else "infeasible",
        wall_s=wall,
        edge_relaxations=work.get("edge_relaxations", 0),
        locate_calls=work.get("locate_calls", 0),
        kcycle_calls=work.get("kcycle_calls", 0),
        phase_samples=sum(out.sample_counts),
        peak_aux_cells=aux,
    )
    return out, report


def cmd_solve(args) -> int:
    try:
        text = open(args.file).read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        g = parse_instance(text)
    except ParseError as exc:
        print(f"error: {args.file}: {exc}", file=sys.stderr)
        return 1
    out, report = _solve_report(g, args.algo, args.seed, args.h)
    report.instance = args.file

    if out.feasible:
        # re-verify before reporting anything
        check = verify_extended(g, out.x)
        if not isinstance(check, Verified):
            print(f"error: internal verification failed: {check}", file=sys.stderr)
            return 1
        body = "".join(
            f"x {v + 1} {_fmt_value(out.x[v])}\n" for v in range(g.n)
        )
        exit_code = 0
    else:
        if out.certificate is None:
            print("error: infeasible outcome without certificate", file=sys.stderr)
            return 1
        if not verify_certificate(g, out.certificate):
            print("error: internal verification failed: certificate rejected",
                  file=sys.stderr)
            return 1
        body = _certificate_block(out.certificate)
        exit_code = 2

    if args.out:
        with open(args.out, "w") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    print(
        f"report algo={report.algorithm} outcome={report.outcome} "
        f"wall_s={report.wall_s:.6f} edge_relaxations={report.edge_relaxations} "
        f"locate_calls={report.locate_calls} kcycle_calls={report.kcycle_calls} "
        f"phase_samples={report.phase_samples} peak_aux_cells={report.peak_aux_cells}",
        file=sys.stderr,
    )
    return exit_code


def cmd_gen(args) -> int:
    kind = args.kind
    try:
        if kind == "dapsp-random":
            inst = dapsp_random(args.n, args.m, args.seed, gamma=args.gamma)
            text = format_uniform(inst)
        else:
            g = _GEN_KINDS[kind](args.n, args.m, args.seed)
            from .core import format_instance

            text = format_instance(g)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_dapsp(args) -> int:
    try:
        text = open(args.file).read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        inst = parse_uniform(text)
    except ParseError as exc:
        print(f"error: {args.file}: {exc}", file=sys.stderr)
        return 1
    if args.gamma is not None:
        from .dapsp import UniformInstance

        try:
            inst = UniformInstance.build(inst.n, inst.edges, Q(args.gamma))
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    d = args.d
    if d != "auto":
        try:
            d = int(d)
        except ValueError:
            print("error: --d must be an integer >= 2 or 'auto'", file=sys.stderr)
            return 1
    try:
        sol = solve_dapsp(inst, d=d, exact=not args.float)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    lines = [f"# dapsp n={inst.n} d={sol.d} mode={sol.mode} stages={sol.stages}"]
    for s in range(inst.n):
        row = []
        for t in range(inst.n):
            val = sol.value(s, t)
            if sol.mode == "exact":
                row.append(_fmt_value(val))
            else:
                row.append("inf" if val == float("inf") else repr(val))
        lines.append(",".join(row))
    body = "\n".join(lines) + "\n"

    if args.check:
        from .dapsp import madani_reduce

        red = madani_reduce(inst)
        naive = naive_dapsp(red.graph.n, list(red.graph.edges), inst.gamma)
        bad = 0
        for u in range(inst.n):
            for v in range(inst.n):
                want = naive[red.start(u)][red.finish(v)]
                got = sol.value(u, v)
                if sol.mode == "exact":
                    ok = got == want
                else:
                    if want.is_pos_inf:
                        ok = got == float("inf")
                    else:
                        w = float(want.finite())
                        ok = abs(got - w) <= 1e-9 * max(1.0, abs(w))
                if not ok:
                    bad += 1
                    print(f"check: mismatch at ({u + 1}, {v + 1}): "
                          f"driver {got} naive {want}", file=sys.stderr)
        if bad:
            print(f"check: {bad} mismatches", file=sys.stderr)
            return 1
        print("check: all entries agree with the naive reference", file=sys.stderr)

    if args.out:
        with open(args.out, "w") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    return 0


def _bench_cell(idx: int, cell: dict) -> RunReport:
    kind = cell["kind"]
    n = int(cell["n"])
    m = int(cell["m"])
    seed = int(cell.get("seed", 0))
    algo = cell["algo"]
    params = cell.get("params", {})
    name = f"{kind}/n{n}/m{m}/s{seed}"

    if algo in ("simple", "tradeoff"):
        g = _GEN_KINDS[kind](n, m, seed)
        out, report = _solve_report(g, algo, int(params.get("seed", 0)),
                                    params.get("h"))
        report.instance = name
        return report

    if algo in ("dapsp", "dapsp-naive"):
        inst = dapsp_random(n, m, seed, gamma=cell.get("gamma"))
        use_float = bool(params.get("float", False))
        instrument.reset()
        if algo == "dapsp":
            d = params.get("d", "auto")
            if d != "auto":
                d = int(d)
            t0 = time.perf_counter()
            sol = solve_dapsp(inst, d=d, exact=not use_float)
            wall = time.perf_counter() - t0
            param = f"d={sol.d}" + ("/float" if use_float else "")
            aux = inst.n * inst.n
        else:
            from .dapsp import madani_reduce, _psi_float, _reduced_edges

            t0 = time.perf_counter()
            if use_float:
                pump = _psi_float(inst)
                edges = _reduced_edges(
                    inst.n, [(u, v, float(c)) for u, v, c in inst.edges], pump)
                naive_dapsp_float(3 * inst.n, edges, float(inst.gamma),
                                  targets=range(2 * inst.n, 3 * inst.n))
            else:
                red = madani_reduce(inst)
                targets = list(red.targets)
                naive_dapsp(red.graph.n, list(red.graph.edges), inst.gamma,
                            targets=targets)
                # the oracle is uninstrumented; count its loop analytically
                instrument.bump(
                    "edge_relaxations",
                    red.graph.n * len(red.graph.edges) * len(targets))
            wall = time.perf_counter() - t0
            param = "full-rounds" + ("/float" if use_float else "")
            aux = 3 * inst.n * inst.n
        work = instrument.snapshot()
        return RunReport(
            instance=name,
            algorithm=algo,
            seed=seed,
            param=param,
            n=n,
            m=m,
            outcome="ok",
            wall_s=wall,
            edge_relaxations=work.get("edge_relaxations", 0),
            locate_calls=work.get("locate_calls", 0),
            kcycle_calls=work.get("kcycle_calls", 0),
            phase_samples=0,
            peak_aux_cells=aux,
        )

    raise ValueError(f"cell {idx}: unknown algo {algo!r}")


def cmd_bench(args) -> int:
    try:
        suite = json.load(open(args.suite))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    cells = suite.get("cells")
    if not isinstance(cells, list) or not cells:
        print("error: suite must contain a non-empty 'cells' list", file=sys.stderr)
        return 1
    rows = []
    for idx, cell in enumerate(cells):
        try:
            rows.append(_bench_cell(idx, cell).csv_row(idx))
        except (KeyError, ValueError, TypeError) as exc:
            print(f"error: cell {idx}: {exc}", file=sys.stderr)
            return 1
    body = "\n".join([CSV_HEADER, CSV_COLUMNS] + rows) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="m2vpi", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve an m2vpi/dmdp instance file")
    ps.add_argument("file")
    ps.add_argument("--algo", choices=("simple", "tradeoff"), default="simple")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--h", type=int, default=None,
                    help="trade-off parameter (tradeoff algo only)")
    ps.add_argument("--out", default=None, help="write solution here instead of stdout")
    ps.set_defaults(func=cmd_solve)

    pg = sub.add_parser("gen", help="generate a seeded instance file")
    pg.add_argument("kind", choices=sorted(_GEN_KINDS))
    pg.add_argument("--n", type=int, required=True)
    pg.add_argument("--m", type=int, required=True)
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--gamma", default=None, help="discount (dapsp-random only)")
    pg.add_argument("--out", default=None)
    pg.set_defaults(func=cmd_gen)

    pd = sub.add_parser("dapsp", help="all-pairs discounted distances (CSV matrix)")
    pd.add_argument("file")
    pd.add_argument("--gamma", default=None,
                    help="override the discount from the file header")
    pd.add_argument("--d", default="auto", help="stage parameter, integer >= 2 or auto")
    pd.add_argument("--float", action="store_true", help="float mode")
    pd.add_argument("--check", action="store_true",
                    help="diff the matrix against the naive reference")
    pd.add_argument("--out", default=None)
    pd.set_defaults(func=cmd_dapsp)

    pb = sub.add_parser("bench", help="run a JSON benchmark suite, emit CSV")
    pb.add_argument("suite")
    pb.add_argument("--out", default=None)
    pb.set_defaults(func=cmd_bench)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
