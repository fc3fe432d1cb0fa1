"""Command-line front end.

Every command prints a line-oriented key=value report. Exit status is 0
on success, 1 on parse or domain errors (and usage errors), 2 when a
capability cap is hit.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import sys
import time
from pathlib import Path
from typing import Callable

import numpy as np

from . import domset_solver, hom_solver, is_solver, lcsgen, maxcut_solver, oracle
from .engine import thread_count
from .errors import CapabilityError, DomainError, ParseError, ShrubError
from .graph import LabeledGraph, parse_graph
from .models import random_model
from .tree_model import TreeModel, parse_tree_model, realize, validate


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which we reserve for caps
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


class Report:
    def __init__(self, argv: list[str]):
        self.lines: list[tuple[str, str]] = [("command", " ".join(argv))]

    def add(self, key: str, value) -> None:
        if isinstance(value, (list, tuple)):
            value = ",".join(str(x) for x in value)
        self.lines.append((key, str(value)))

    def digest(self, key: str, path: str, data: bytes) -> None:
        self.add(f"input.{key}", path)
        self.add(f"sha256.{key}", hashlib.sha256(data).hexdigest())

    def counters(self, ct) -> None:
        self.add("counter.max_frames", ct.max_frames)
        self.add("counter.max_frame_residues", ct.max_frame_residues)
        self.add("counter.memo_entries", ct.memo_entries)
        for kind in sorted(ct.calls):
            self.add(f"counter.calls.{kind}", ct.calls[kind])

    def text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.lines)


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise DomainError(f"cannot read {path}: {e.strerror}") from None


def _load_model(rep: Report, path: str) -> TreeModel:
    data = _read(path)
    rep.digest("model", path, data)
    return parse_tree_model(data)


def _load_graph(rep: Report, path: str, key: str = "graph") -> LabeledGraph:
    data = _read(path)
    rep.digest(key, path, data)
    return parse_graph(data)


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _stats(rep: Report, st: is_solver.SolveStats, timing: bool) -> None:
    rep.add("primes", st.primes)
    rep.add("lanes", st.lanes)
    rep.counters(st.counters)
    if timing:
        rep.add("seconds", f"{st.seconds:.6f}")


# commands


def cmd_validate(a, rep: Report) -> int:
    m = _load_model(rep, a.model)
    diags = validate(m)
    rep.add("status", "invalid" if diags else "ok")
    rep.add("n", m.n)
    rep.add("k", m.k)
    rep.add("depth", m.depth)
    for d in diags:
        rep.add("diagnostic", d)
    return 1 if diags else 0


def cmd_realize(a, rep: Report) -> int:
    g = realize(_load_model(rep, a.model))
    rep.add("n", g.n)
    rep.add("edges", len(g.edges))
    if a.output:
        _write(a.output, g.to_text())
        rep.add("output", a.output)
    else:
        for u, v in g.sorted_edges():
            rep.add("e", f"{u} {v}")
    return 0


def cmd_solve(a, rep: Report) -> int:
    m = _load_model(rep, a.model)
    rep.add("problem", a.problem)
    kw = dict(memoize=a.memoize, collapse=a.collapse)
    st = is_solver.SolveStats()
    t0 = time.perf_counter()
    if a.problem == "is":
        if a.coeff is not None:
            rep.add("coefficient", a.coeff)
            rep.add("answer", is_solver.is_coefficient(m, a.coeff, **kw))
            if a.timing:
                rep.add("seconds", f"{time.perf_counter() - t0:.6f}")
            return 0
        coeffs = is_solver.is_polynomial(m, stats=st, **kw)
        rep.add("coefficients", coeffs)
        rep.add("answer", len(coeffs) - 1)
        _stats(rep, st, a.timing)
    elif a.problem == "maxcut":
        mc = maxcut_solver.MaxCut(m, memoize=a.memoize)
        ans = max(mc.f_node(m.root, s) for s in maxcut_solver.signatures(mc.sizes[m.root]))
        rep.add("answer", ans)
        rep.add("first_prime", mc.first_prime)
        rep.add("counter.kane_calls", mc.kane_calls)
        rep.add("counter.primes_tested", mc.primes_tested)
        if a.timing:
            rep.add("seconds", f"{time.perf_counter() - t0:.6f}")
    elif a.problem == "domset":
        rep.add("seed", a.seed)
        rep.add("trials", a.trials)
        rep.add("rng", domset_solver.RNG_NAME)
        if a.trials < 1:
            raise DomainError("trials must be at least 1")
        dkw = {key: v for key, v in kw.items() if v}  # library default is memoize + collapse
        sizes = [domset_solver.single_trial(m, (a.seed, t), stats=st, **dkw) for t in range(a.trials)]
        rep.add("trial_answers", sizes)
        rep.add("answer", min(sizes))
        _stats(rep, st, a.timing)
    elif a.problem == "hom":
        if a.pattern is None:
            raise DomainError("solve hom needs --pattern")
        data = _read(a.pattern)
        rep.digest("pattern", a.pattern, data)
        pattern = hom_solver.parse_pattern(data)
        lists = weights = None
        if a.graph:
            g = _load_graph(rep, a.graph)
            if g.n != m.n:
                raise DomainError("graph file and model disagree on n")
            lists, weights = g.lists, g.weights
            if weights and max(weights.values()) > 2 * m.n:
                raise CapabilityError(f"weights above 2n = {2 * m.n} are not accepted here")
        inst = hom_solver.HomInstance(m, pattern, lists, weights, a.size, a.weight)
        rep.add("size", a.size)
        rep.add("weight", a.weight)
        rep.add("answer", hom_solver.count_hom(inst, stats=st, **kw))
        _stats(rep, st, a.timing)
    elif a.problem == "qcol":
        rep.add("q", a.q)
        rep.add("answer", hom_solver.q_coloring_count(m, a.q, stats=st, **kw))
        _stats(rep, st, a.timing)
    elif a.problem == "oct":
        rep.add("answer", hom_solver.oct_minimum(m, stats=st, **kw))
        _stats(rep, st, a.timing)
    return 0


def cmd_oracle(a, rep: Report) -> int:
    rep.add("problem", a.problem)
    if a.problem == "lcs":
        data = _read(a.input)
        rep.digest("lcs", a.input, data)
        inst = lcsgen.parse_lcs(data)
        rep.add("answer", int(oracle.brute_lcs(list(inst.strings), inst.t)))
        return 0
    g = _load_graph(rep, a.input)
    if a.problem == "is":
        coeffs = oracle.brute_is_polynomial(g)
        rep.add("coefficients", coeffs)
        rep.add("answer", len(coeffs) - 1)
    elif a.problem == "maxcut":
        rep.add("answer", oracle.brute_max_cut(g))
    elif a.problem == "domset":
        rep.add("answer", oracle.brute_min_domset(g))
    elif a.problem == "hom":
        if a.pattern is None:
            raise DomainError("oracle hom needs --pattern")
        data = _read(a.pattern)
        rep.digest("pattern", a.pattern, data)
        pattern = hom_solver.parse_pattern(data)
        rep.add("size", a.size)
        rep.add("weight", a.weight)
        rep.add("answer", oracle.brute_count_hom(g, pattern, g.lists, g.weights, a.size, a.weight))
    return 0


def cmd_gen(a, rep: Report) -> int:
    if a.kind == "random":
        rng = np.random.Generator(np.random.PCG64(a.seed))
        m = random_model(a.n, a.d, a.k, rng, density=a.density)
        rep.add("seed", a.seed)
        text = m.to_text()
    else:
        if a.input is None:
            raise DomainError("gen lcs needs an input file")
        data = _read(a.input)
        rep.digest("lcs", a.input, data)
        inst = lcsgen.pad_to_power_of_two(lcsgen.parse_lcs(data))
        out = lcsgen.build_reduction(inst)
        m = out.model
        rep.add("N", inst.N)
        rep.add("t", inst.t)
        rep.add("r", inst.r)
        if a.emit_goal:
            rep.add("goal", out.goal)
        if a.emit_graph:
            _write(a.emit_graph, out.graph.to_text())
            rep.add("graph", a.emit_graph)
        text = m.to_text()
    rep.add("n", m.n)
    rep.add("k", m.k)
    rep.add("depth", m.depth)
    if a.output:
        _write(a.output, text)
        rep.add("output", a.output)
    else:
        rep.add("model", text.strip().replace("\n", " | "))
    return 0


BENCH_FIELDS = ["problem", "n", "d", "k", "seed", "status", "answer", "seconds", "max_frames", "max_frame_residues", "primes", "lanes"]


def _bench_one(problem: str, m: TreeModel, seed: int) -> tuple[str, dict]:
    st = is_solver.SolveStats()
    if problem == "is":
        ans = len(is_solver.is_polynomial(m, stats=st)) - 1
    elif problem == "domset":
        ans = domset_solver.single_trial(m, (seed, 0), stats=st)
    elif problem == "oct":
        ans = hom_solver.oct_minimum(m, stats=st)
    elif problem == "maxcut":
        ans = maxcut_solver.max_cut(m, memoize=True)
    else:
        raise DomainError(f"unknown bench problem {problem!r}")
    return str(ans), dict(
        max_frames=st.counters.max_frames,
        max_frame_residues=st.counters.max_frame_residues,
        primes=st.primes,
        lanes=st.lanes,
    )


def _ints(text: str) -> list[int]:
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise DomainError(f"expected a comma-separated integer list, got {text!r}") from None


def cmd_bench(a, rep: Report) -> int:
    buf = io.StringIO()
    w = csv.DictWriter(buf, BENCH_FIELDS, lineterminator="\n")
    w.writeheader()
    code = 0
    rows = 0
    for d in _ints(a.d):
        for k in _ints(a.k):
            for n in _ints(a.n):
                rng = np.random.Generator(np.random.PCG64([a.seed, n, d, k]))
                m = random_model(n, d, k, rng)
                row = dict(problem=a.problem, n=n, d=d, k=k, seed=a.seed)
                t0 = time.perf_counter()
                try:
                    ans, extra = _bench_one(a.problem, m, a.seed)
                    row.update(status="ok", answer=ans, **extra)
                except CapabilityError:
                    row.update(status="capability_error", answer="")
                    code = 2
                row["seconds"] = f"{time.perf_counter() - t0:.6f}"
                w.writerow(row)
                rows += 1
    rep.add("rows", rows)
    if a.output:
        _write(a.output, buf.getvalue())
        rep.add("output", a.output)
    else:
        sys.stdout.write(buf.getvalue())
    return code


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="shrubsolve", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="check a model file")
    v.add_argument("model")
    v.set_defaults(fn=cmd_validate)

    r = sub.add_parser("realize", help="print or write the graph of a model")
    r.add_argument("model")
    r.add_argument("-o", "--output")
    r.set_defaults(fn=cmd_realize)

    s = sub.add_parser("solve", help="run a tree-model solver")
    s.add_argument("problem", choices=["is", "maxcut", "domset", "hom", "qcol", "oct"])
    s.add_argument("model")
    s.add_argument("--memoize", action="store_true", help="cache subproblems (not polynomial space)")
    s.add_argument("--collapse", action="store_true", help="use the telescoped chain sum")
    s.add_argument("--coeff", type=int, help="IS: compute only this coefficient")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--pattern", help="hom: pattern file")
    s.add_argument("--graph", help="hom: graph file supplying lists and weights")
    s.add_argument("--size", type=int, default=0, help="hom: |phi^-1(R)|")
    s.add_argument("--weight", type=int, default=0, help="hom: weight of phi^-1(R)")
    s.add_argument("--q", type=int, default=3, help="qcol: number of colors")
    s.add_argument("--timing", action="store_true", help="add wall time to the report")
    s.set_defaults(fn=cmd_solve)

    o = sub.add_parser("oracle", help="brute-force reference answer")
    o.add_argument("problem", choices=["is", "maxcut", "domset", "hom", "lcs"])
    o.add_argument("input", help="graph file (lcs: LCS file)")
    o.add_argument("--pattern")
    o.add_argument("--size", type=int, default=0)
    o.add_argument("--weight", type=int, default=0)
    o.set_defaults(fn=cmd_oracle)

    g = sub.add_parser("gen", help="generate a model")
    g.add_argument("kind", choices=["lcs", "random"])
    g.add_argument("input", nargs="?", help="lcs: LCS instance file")
    g.add_argument("-o", "--output")
    g.add_argument("--emit-graph", metavar="PATH")
    g.add_argument("--emit-goal", action="store_true")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--density", type=float, default=0.5)
    g.set_defaults(fn=cmd_gen)

    b = sub.add_parser("bench", help="CSV sweep over random models")
    b.add_argument("--problem", default="is", choices=["is", "domset", "oct", "maxcut"])
    b.add_argument("--d", default="1,2")
    b.add_argument("--k", default="1,2")
    b.add_argument("--n", default="4,8")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("-o", "--output")
    b.set_defaults(fn=cmd_bench)
    return p


def run(argv: list[str], out: Callable[[str], object] = sys.stdout.write, err: Callable[[str], object] = sys.stderr.write) -> int:
    rep = Report(argv)
    try:
        args = build_parser().parse_args(argv)
        rep.add("threads", thread_count())
        code = args.fn(args, rep)
    except UsageError as e:
        err(f"{e}\n")
        return 1
    except CapabilityError as e:
        rep.add("error", f"capability: {e}")
        out(rep.text())
        return 2
    except (ParseError, DomainError, ShrubError) as e:
        rep.add("error", str(e))
        out(rep.text())
        return 1
    out(rep.text())
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
