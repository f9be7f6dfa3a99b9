"""Batch experiment driver.

Every subcommand runs one construction end to end, prints an aligned summary
table plus one PASS/FAIL line per built-in check, and exits nonzero if any
check fails.  With --outdir the run records land in a delimited report file
(see reports.py) with rendered figures alongside; pass --seed to make the
records reproducible byte for byte (timing columns aside).

Workers: set BOMBSIM_WORKERS=k to fan trials out over k processes; records
are written in submission order either way.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, figures, graphs, oracles, qsim, reports, zeno
from .classical import (ConstantGuesser, OrScan, compile_classical_to_bomb,
                        derive_seed, simulate_classical_by_quantum)
from .oracles import HiddenString, QueryLedger
from .reports import RunReport, StopWatch, summary_table
from .search import MarkPredicate, find_first_marked, make_backend
from .zeno import BudgetWarning, ZenoParams


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.name}" + (
            f": {self.detail}" if self.detail else "")


@dataclass
class ExperimentResult:
    name: str
    runs: list[RunReport]
    summary_rows: list[dict]
    checks: list[Check]
    figure_jobs: list = field(default_factory=list)  # (fname, fn(path))

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("BOMBSIM_WORKERS", "1")))
    except ValueError:
        return 1


def _map_jobs(fn, jobs):
    """Run jobs (picklable tuples) through fn, preserving submission order."""
    k = _workers()
    if k == 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, jobs))


def _seed_from_args(args) -> int:
    if args.seed is not None:
        return args.seed
    seed = int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
    print(f"note: no --seed given; using {seed} (pass it back to reproduce)")
    return seed


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok]


# --- ev ----------------------------------------------------------------------

def cmd_ev(args) -> ExperimentResult:
    seed = _seed_from_args(args)
    runs, rows, checks = [], [], []
    for run_id, live in enumerate((True, False)):
        with StopWatch() as sw:
            verdict, explosion = zeno.ev_bomb_test(live, args.L)
        expected = zeno.live_test_explosion(args.L) if live else 0.0
        correct = verdict == ("live" if live else "dud")
        runs.append(RunReport(
            experiment="ev", run_id=run_id, seed=seed, L=args.L,
            answer=verdict, correct=correct,
            queries={"bomb": args.L}, explosion=explosion, wall_ms=sw.ms))
        rows.append({"bomb": "live" if live else "dud", "verdict": verdict,
                     "explosion": f"{explosion:.6f}",
                     "closed_form": f"{expected:.6f}"})
        checks.append(Check(
            f"{'live' if live else 'dud'} explosion matches closed form",
            abs(explosion - expected) <= 1e-9,
            f"measured {explosion:.9f} vs {expected:.9f}"))
        checks.append(Check(f"{'live' if live else 'dud'} verdict correct",
                            correct, verdict))
    checks.append(Check("live explosion within pi^2/(4L)",
                        zeno.live_test_explosion(args.L)
                        <= zeno.distance_bound(args.L),
                        f"bound {zeno.distance_bound(args.L):.6f}"))

    def fig(path):
        ls = [max(2, args.L // 4), args.L // 2 or 1, args.L, 2 * args.L,
              4 * args.L]
        ls = sorted(set(ls))
        return figures.save_series(
            ls, {"live explosion": [zeno.live_test_explosion(v) for v in ls],
                 "pi^2/(4L)": [zeno.distance_bound(v) for v in ls]},
            path, xlabel="L", ylabel="probability", logx=True,
            title="tester explosion vs chain length")

    return ExperimentResult("ev", runs, rows, checks,
                            [("ev_explosion.png", fig)])


# --- zeno-oracle ---------------------------------------------------------------

def _zeno_oracle_trial(job):
    n, L, seed, trial = job
    rng = np.random.default_rng(derive_seed(seed, trial))
    x = HiddenString.random(n, rng)
    layout = qsim.RegisterLayout.of(("record", 2), ("index", n))
    amps = rng.normal(size=2 * n) + 1j * rng.normal(size=2 * n)
    amps /= np.linalg.norm(amps)
    state = qsim.QState(layout, amps)
    ledger = QueryLedger()
    with StopWatch() as sw:
        out = zeno.zeno_simulated_oracle(state, x, ZenoParams(L), ledger)
    ref = oracles.standard_oracle(state, x, QueryLedger())
    dist = qsim.state_distance(out, ref)
    return (ledger.explosion_probability, dist, ledger.count("bomb"),
            reports.canonical_answer(x.bits), sw.ms)


def cmd_zeno_oracle(args) -> ExperimentResult:
    seed = _seed_from_args(args)
    jobs = [(args.n, args.L, seed, t) for t in range(args.trials)]
    results = _map_jobs(_zeno_oracle_trial, jobs)
    runs, rows = [], []
    worst_dist, worst_expl = 0.0, 0.0
    for t, (expl, dist, nbomb, xtxt, ms) in enumerate(results):
        worst_dist = max(worst_dist, dist)
        worst_expl = max(worst_expl, expl)
        runs.append(RunReport(
            experiment="zeno-oracle", run_id=t, seed=seed, n=args.n,
            L=args.L, answer=xtxt, correct=True,
            queries={"bomb": nbomb}, explosion=expl, wall_ms=ms))
        rows.append({"trial": t, "explosion": f"{expl:.6f}",
                     "distance": f"{dist:.6f}", "bomb_queries": nbomb})
    checks = [
        Check("explosion <= pi^2/(2L) on all trials",
              worst_expl <= zeno.explosion_bound(args.L) + 1e-9,
              f"worst {worst_expl:.6f} vs {zeno.explosion_bound(args.L):.6f}"),
        Check("output distance to the true oracle <= pi^2/(4L)",
              worst_dist <= zeno.distance_bound(args.L) + 1e-9,
              f"worst {worst_dist:.6f} vs {zeno.distance_bound(args.L):.6f}"),
        Check("2L bomb queries per simulated call",
              all(r[2] == 2 * args.L for r in results)),
    ]
    return ExperimentResult("zeno-oracle", runs, rows, checks)


# --- bomb-or -------------------------------------------------------------------

def _bomb_or_inputs(n: int, seed: int, cap: int = 256) -> list[HiddenString]:
    if 2 ** n <= cap:
        return [HiddenString(tuple((v >> i) & 1 for i in range(n)))
                for v in range(2 ** n)]
    rng = np.random.default_rng(derive_seed(seed, 0xF))
    return [HiddenString.random(n, rng) for _ in range(cap)]


def cmd_bomb_or(args) -> ExperimentResult:
    seed = _seed_from_args(args)
    xs = _bomb_or_inputs(args.n, seed)
    runs, rows, checks = [], [], []
    if args.mode == "thm3":
        worst_expl, worst_corr = 0.0, 1.0
        for i, x in enumerate(xs):
            with StopWatch() as sw:
                out = zeno.run_bomb_or(args.n, x, args.eps)
            truth = int(any(x.bits))
            p_correct = (out.answer_one_probability if truth
                         else 1.0 - out.answer_one_probability)
            worst_expl = max(worst_expl, out.explosion)
            worst_corr = min(worst_corr, p_correct)
            runs.append(RunReport(
                experiment="bomb-or", run_id=i, seed=seed, n=args.n,
                eps=args.eps, L=out.L, answer=reports.canonical_answer(x.bits),
                correct=p_correct >= 0.9,
                queries={"bomb": out.bomb_queries}, explosion=out.explosion,
                wall_ms=sw.ms))
        rows.append({"inputs": len(xs), "worst_explosion": f"{worst_expl:.6f}",
                     "worst_p_correct": f"{worst_corr:.6f}",
                     "bomb_queries_per_input": runs[-1].queries["bomb"]})
        checks.append(Check("explosion <= eps on every input",
                            worst_expl <= args.eps + 1e-12,
                            f"worst {worst_expl:.6f} vs eps {args.eps}"))
        checks.append(Check("answer correct w.p. >= 0.9 given survival",
                            worst_corr >= 0.9, f"worst {worst_corr:.6f}"))
    else:  # thm6
        alg = OrScan(args.n)
        compiled = compile_classical_to_bomb(alg, ConstantGuesser(0),
                                             args.eps, g_bound=1.0)
        budget = compiled.L * args.n
        worst_expl = 0.0
        all_exact = True
        single_one_expl = zeno.live_test_explosion(compiled.L)
        single_ok = True
        for i, x in enumerate(xs):
            with StopWatch() as sw:
                res = compiled.run(x, derive_seed(seed, i))
            truth = int(any(x.bits))
            all_exact &= res.answer == truth
            worst_expl = max(worst_expl, res.explosion)
            if sum(x.bits) == 0:
                single_ok &= res.explosion == 0.0
            elif sum(x.bits) == 1:
                single_ok &= abs(res.explosion - single_one_expl) <= 1e-9
            runs.append(RunReport(
                experiment="bomb-or", run_id=i, seed=seed, n=args.n,
                eps=args.eps, L=compiled.L,
                answer=str(res.answer), correct=res.answer == truth,
                queries=dict(res.ledger.counts), explosion=res.explosion,
                wall_ms=sw.ms))
        rows.append({"inputs": len(xs), "L": compiled.L,
                     "query_budget": budget,
                     "worst_explosion": f"{worst_expl:.6f}"})
        checks.append(Check(
            "total bomb queries within ceil(pi^2 G/(4 eps)) * T",
            all(r.queries.get("symmetric", 0) <= budget for r in runs),
            f"budget {budget}"))
        checks.append(Check("surviving answer always exact", all_exact))
        checks.append(Check(
            "explosion exactly 0 (all-zero) / closed form (single-one)",
            single_ok, f"single-one closed form {single_one_expl:.6f}"))
        checks.append(Check("explosion <= eps on every input",
                            worst_expl <= args.eps + 1e-12,
                            f"worst {worst_expl:.6f}"))
    return ExperimentResult("bomb-or", runs, rows, checks)


# --- graph experiments -----------------------------------------------------------

def _sssp_trial(job):
    (n, p, seed, idx, backend_mode, c_s, eps, graph_doc) = job
    if graph_doc is not None:
        graph = graphs.GraphSpec.from_dict(graph_doc)
    else:
        graph = graphs.gen_gnp(n, p, derive_seed(seed, idx), directed=True)
    oracle = graphs.AdjacencyOracle(graph)
    with StopWatch() as sw:
        dists, transcript = graphs.bfs_sssp(oracle, 1)
    ref = graphs.reference_bfs_distances(graph, 1)
    machine = graphs.BfsSssp(n, 1, directed=True)
    x = graph.to_hidden_string()
    sim = simulate_classical_by_quantum(
        machine, ConstantGuesser(0), x, make_backend(backend_mode, c_s),
        derive_seed(seed, idx, 1), g_bound=max(n - 1, 1))
    bomb_expl = None
    bomb_queries = 0
    if eps is not None:
        compiled = compile_classical_to_bomb(machine, ConstantGuesser(0),
                                             eps, g_bound=max(n - 1, 1))
        bres = compiled.run(x, derive_seed(seed, idx, 2))
        bomb_expl = bres.explosion
        bomb_queries = bres.bomb_queries
        if bres.answer != dists:
            raise RuntimeError("bomb-compiled run disagreed with classical")
    return {
        "n": n, "idx": idx, "correct": dists == ref,
        "wrong": transcript.wrong_guesses, "queries": len(transcript),
        "distinct": oracle.distinct_queries,
        "sim_correct": (not sim.failed) and sim.answer == dists,
        "sim_queries": sim.queries,
        "cs_ok": _cauchy_schwarz_ok(sim),
        "bomb_explosion": bomb_expl, "bomb_queries": bomb_queries,
        "wall": sw.ms, "answer": reports.canonical_answer(dists),
    }


def _cauchy_schwarz_ok(sim) -> bool:
    widths = sim.segment_widths
    total = sum(widths)
    g = len(sim.deviations)
    lhs = sum(math.sqrt(w) for w in widths)
    return lhs <= math.sqrt((g + 1) * max(total, 1)) + 1e-9


def cmd_sssp(args) -> ExperimentResult:
    seed = _seed_from_args(args)
    graph_doc = graphs.load_graph(args.graph).to_dict() if args.graph else None
    sizes = ([graph_doc["n"]] if graph_doc else _parse_int_list(args.n))
    runs, rows, checks = [], [], []
    fit_points = []
    run_id = 0
    all_ok = {"correct": True, "wrong": True, "dedup": True,
              "sim": True, "cs": True, "bomb": True}
    for n in sizes:
        p = args.p if args.p is not None else min(1.0, args.degree / n)
        jobs = [(n, p, seed, (n << 20) + t, args.backend, args.c_s,
                 args.eps, graph_doc) for t in range(args.trials)]
        results = _map_jobs(_sssp_trial, jobs)
        mean_q = float(np.mean([r["sim_queries"] for r in results]))
        for r in results:
            all_ok["correct"] &= r["correct"]
            all_ok["wrong"] &= r["wrong"] <= n - 1
            all_ok["dedup"] &= r["distinct"] <= n * (n - 1)
            all_ok["sim"] &= r["sim_correct"]
            all_ok["cs"] &= r["cs_ok"]
            if r["bomb_explosion"] is not None:
                all_ok["bomb"] &= r["bomb_explosion"] <= (args.eps or 1) + 1e-12
            runs.append(RunReport(
                experiment="sssp", run_id=run_id, seed=seed, n=n,
                eps=args.eps, backend=args.backend, c_s=args.c_s,
                answer=r["answer"], correct=r["correct"] and r["sim_correct"],
                queries={"classical": r["queries"],
                         "quantum": r["sim_queries"],
                         "symmetric": r["bomb_queries"]},
                explosion=r["bomb_explosion"], wall_ms=r["wall"]))
            fit_points.append((n, max(r["sim_queries"], 1)))
            run_id += 1
        rows.append({"n": n, "p": f"{p:.4f}", "trials": args.trials,
                     "mean_quantum_queries": f"{mean_q:.1f}",
                     "mean_classical": f"{np.mean([r['queries'] for r in results]):.1f}",
                     "max_wrong": max(r["wrong"] for r in results)})
    checks.append(Check("distances match the reference sweep", all_ok["correct"]))
    checks.append(Check("wrong guesses <= n-1 on every run", all_ok["wrong"]))
    checks.append(Check("distinct queried pairs <= n(n-1)", all_ok["dedup"]))
    checks.append(Check("first-deviation simulation reproduces the answer",
                        all_ok["sim"]))
    checks.append(Check("segment cost Cauchy-Schwarz bound", all_ok["cs"]))
    if args.eps is not None:
        checks.append(Check("bomb-compiled explosion within eps", all_ok["bomb"]))
    figure_jobs = []
    if len(sizes) >= 4:
        fit = analysis.scaling_fit(fit_points)
        rows.append({"n": "fit", "p": "", "trials": "",
                     "mean_quantum_queries":
                         f"exponent {fit.exponent:.3f} resid {fit.residual:.3f}",
                     "mean_classical": "", "max_wrong": ""})
        figure_jobs.append(("sssp_scaling.png", lambda path, fp=fit_points,
                            f=fit: figures.save_loglog_fit(
                                fp, f, path, "n", "quantum queries",
                                "shortest-path query scaling")))
    return ExperimentResult("sssp", runs, rows, checks, figure_jobs)


def _matching_trial(job):
    (n, p, seed, idx, backend_mode, c_s, graph_doc) = job
    if graph_doc is not None:
        graph = graphs.GraphSpec.from_dict(graph_doc)
    else:
        graph = graphs.gen_random_bipartite(n // 2, n - n // 2, p,
                                            derive_seed(seed, idx))
    oracle = graphs.AdjacencyOracle(graph)
    with StopWatch() as sw:
        matching, phases, transcript = graphs.hopcroft_karp(oracle)
    size_ok = True
    if n <= 14:
        size_ok = len(matching) == graphs.reference_max_matching(graph)
    machine = graphs.HopcroftKarp(n, graph.left)
    sim = simulate_classical_by_quantum(
        machine, ConstantGuesser(0), graph.to_hidden_string(),
        make_backend(backend_mode, c_s), derive_seed(seed, idx, 1),
        g_bound=max(math.ceil(2 * n ** 1.5), 4))
    return {
        "n": n, "size": len(matching), "size_ok": size_ok, "phases": phases,
        "wrong": transcript.wrong_guesses, "distinct": oracle.distinct_queries,
        "sim_correct": (not sim.failed) and sim.answer == matching,
        "sim_queries": sim.queries, "cs_ok": _cauchy_schwarz_ok(sim),
        "wall": sw.ms, "answer": reports.canonical_answer(matching),
    }


def cmd_matching(args) -> ExperimentResult:
    seed = _seed_from_args(args)
    graph_doc = graphs.load_graph(args.graph).to_dict() if args.graph else None
    sizes = ([graph_doc["n"]] if graph_doc else _parse_int_list(args.n))
    runs, rows, checks = [], [], []
    fit_points, wrong_ratios = [], []
    ok = {"size": True, "sim": True, "cs": True, "dedup": True}
    run_id = 0
    for n in sizes:
        # sqrt-density keeps phase counts growing at these sizes
        p = args.p if args.p is not None else min(1.0, 2.0 / math.sqrt(n))
        jobs = [(n, p, seed, (n << 20) + t, args.backend, args.c_s,
                 graph_doc) for t in range(args.trials)]
        results = _map_jobs(_matching_trial, jobs)
        for r in results:
            ok["size"] &= r["size_ok"]
            ok["sim"] &= r["sim_correct"]
            ok["cs"] &= r["cs_ok"]
            ok["dedup"] &= r["distinct"] <= n * n
            runs.append(RunReport(
                experiment="matching", run_id=run_id, seed=seed, n=n,
                backend=args.backend, c_s=args.c_s, answer=r["answer"],
                correct=r["size_ok"] and r["sim_correct"],
                queries={"classical": r["distinct"],
                         "quantum": r["sim_queries"]},
                wall_ms=r["wall"]))
            fit_points.append((n, max(r["sim_queries"], 1)))
            wrong_ratios.append(r["wrong"] / n ** 1.5)
            run_id += 1
        rows.append({
            "n": n, "p": f"{p:.4f}",
            "mean_size": f"{np.mean([r['size'] for r in results]):.2f}",
            "max_phases": max(r["phases"] for r in results),
            "max_wrong": max(r["wrong"] for r in results),
            "mean_quantum": f"{np.mean([r['sim_queries'] for r in results]):.1f}"})
    checks.append(Check("matching size equals exhaustive reference (n<=14)",
                        ok["size"]))
    checks.append(Check("first-deviation simulation reproduces the matching",
                        ok["sim"]))
    checks.append(Check("segment cost Cauchy-Schwarz bound", ok["cs"]))
    checks.append(Check("distinct queried pairs <= n^2", ok["dedup"]))
    figure_jobs = []
    if len(sizes) >= 4:
        fit = analysis.scaling_fit(fit_points)
        rows.append({"n": "fit", "p": "",
                     "mean_size": f"exponent {fit.exponent:.3f}",
                     "max_phases": "", "max_wrong": "",
                     "mean_quantum": f"resid {fit.residual:.3f}"})
        figure_jobs.append(("matching_scaling.png",
                            lambda path, fp=fit_points, f=fit:
                            figures.save_loglog_fit(
                                fp, f, path, "n", "quantum queries",
                                "matching query scaling")))
    return ExperimentResult("matching", runs, rows, checks, figure_jobs)


def _maxflow_trial(job):
    (n, p, seed, idx, graph_doc) = job
    if graph_doc is not None:
        graph = graphs.GraphSpec.from_dict(graph_doc)
    else:
        graph = graphs.gen_flow_network(n, p, derive_seed(seed, idx))
    s = graph.source if graph.source is not None else 1
    t = graph.sink if graph.sink is not None else graph.n
    oracle = graphs.AdjacencyOracle(graph)
    with StopWatch() as sw:
        value, phases, transcript = graphs.dinic_unit_flow(oracle, s, t)
    ref_ok = True
    if graph.n <= 14:
        ref_ok = value == graphs.reference_max_flow(graph, s, t)
    m = graph.edge_count
    bound = max(min(math.sqrt(m), n ** (2 / 3)), 1.0)
    return {"n": n, "m": m, "value": value, "ref_ok": ref_ok,
            "phases": phases, "ratio": phases / bound,
            "wrong": transcript.wrong_guesses,
            "distinct": oracle.distinct_queries, "wall": sw.ms}


def cmd_maxflow(args) -> ExperimentResult:
    seed = _seed_from_args(args)
    graph_doc = graphs.load_graph(args.graph).to_dict() if args.graph else None
    sizes = ([graph_doc["n"]] if graph_doc else _parse_int_list(args.n))
    runs, rows, checks = [], [], []
    ok_ref, max_ratio = True, 0.0
    run_id = 0
    for n in sizes:
        p = args.p if args.p is not None else min(1.0, args.degree / n)
        jobs = [(n, p, seed, (n << 20) + t, graph_doc)
                for t in range(args.trials)]
        results = _map_jobs(_maxflow_trial, jobs)
        for r in results:
            ok_ref &= r["ref_ok"]
            max_ratio = max(max_ratio, r["ratio"])
            runs.append(RunReport(
                experiment="maxflow", run_id=run_id, seed=seed, n=n,
                answer=str(r["value"]), correct=r["ref_ok"],
                queries={"classical": r["distinct"]}, wall_ms=r["wall"]))
            run_id += 1
        rows.append({"n": n, "p": f"{p:.4f}",
                     "mean_value": f"{np.mean([r['value'] for r in results]):.2f}",
                     "max_phases": max(r["phases"] for r in results),
                     "max_phase_ratio": f"{max(r['ratio'] for r in results):.2f}"})
    checks.append(Check("flow value equals the augmenting-path reference",
                        ok_ref))
    checks.append(Check("phase count within 3x min(sqrt(m), n^(2/3))",
                        max_ratio <= 3.0, f"max ratio {max_ratio:.2f}"))
    return ExperimentResult("maxflow", runs, rows, checks)


# --- first-marked -----------------------------------------------------------------

def _first_marked_trial(job):
    (n, d, delta, backend_mode, c_s, seed, idx) = job
    rng = np.random.default_rng(derive_seed(seed, d, idx))
    marked = set()
    if d > 0:
        marked.add(d)
        extra = rng.integers(d + 1, n + 1, size=max(n // 64, 1))
        marked.update(int(e) for e in extra)
    ledger = QueryLedger()
    pred = MarkPredicate(lambda p: p in marked, ledger)
    with StopWatch() as sw:
        res = find_first_marked(pred, n, delta, make_backend(backend_mode, c_s),
                                rng)
    expected = d if d > 0 else None
    return {"d": d, "found": res.position, "correct": res.position == expected,
            "queries": res.queries, "windows": res.windows, "wall": sw.ms}


def cmd_first_marked(args) -> ExperimentResult:
    seed = _seed_from_args(args)
    ds = _parse_int_list(args.d)
    runs, rows, checks = [], [], []
    ratios = []
    run_id = 0
    err_ok, none_ok = True, True
    for d in ds:
        jobs = [(args.n, d, args.delta, args.backend, args.c_s, seed, t)
                for t in range(args.trials)]
        results = _map_jobs(_first_marked_trial, jobs)
        errs = sum(0 if r["correct"] else 1 for r in results)
        mean_q = float(np.mean([r["queries"] for r in results]))
        if d > 0:
            ratios.append(mean_q / math.sqrt(d))
            err_ok &= errs / len(results) <= args.delta + 0.02
        else:
            none_ok &= errs == 0
        for r in results:
            runs.append(RunReport(
                experiment="first-marked", run_id=run_id, seed=seed,
                n=args.n, d=d, delta=args.delta, backend=args.backend,
                c_s=args.c_s, answer=str(r["found"]), correct=r["correct"],
                queries={"quantum": r["queries"]}, wall_ms=r["wall"]))
            run_id += 1
        rows.append({"d": d, "trials": len(results), "errors": errs,
                     "mean_queries": f"{mean_q:.1f}",
                     "queries_per_sqrt_d":
                         f"{mean_q / math.sqrt(d):.2f}" if d else "-"})
    checks.append(Check("error rate within delta on marked instances", err_ok))
    if 0 in ds:
        checks.append(Check("no-marks case always answers none", none_ok))
    if len(ratios) >= 2:
        spread = max(ratios) / min(ratios)
        checks.append(Check("queries/sqrt(d) stable across the grid (max/min < 3)",
                            spread < 3.0, f"spread {spread:.2f}"))
    figure_jobs = []
    pts = [(row["d"], float(row["mean_queries"]))
           for row in rows if row["d"] != 0]
    if len(pts) >= 2:
        figure_jobs.append(("first_marked_cost.png",
                            lambda path, p=pts: figures.save_loglog_fit(
                                p, None, path, "first mark position d",
                                "mean queries", "first-marked search cost")))
    return ExperimentResult("first-marked", runs, rows, checks, figure_jobs)


# --- progress-and ------------------------------------------------------------------

def cmd_progress_and(args) -> ExperimentResult:
    seed = _seed_from_args(args)
    with StopWatch() as sw:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BudgetWarning)
            trace = analysis.progress_trace_and(args.n, args.eps)
        report = analysis.check_progress_bounds(trace, args.delta)
    w0_exact = trace.w_values[0].real
    runs = [RunReport(
        experiment="progress-and", run_id=0, seed=seed, n=args.n,
        eps=args.eps, delta=args.delta,
        answer=f"drop={report.drop:.6f}", correct=report.all_ok,
        queries={"bomb": trace.steps}, explosion=float(trace.explosions.max()),
        wall_ms=sw.ms)]
    rows = [{"n": args.n, "steps": trace.steps, "W0": f"{w0_exact:.3f}",
             "drop": f"{report.drop:.4f}",
             "lower": f"{report.lower_threshold:.4f}",
             "upper": f"{report.upper_threshold:.4f}",
             "eps_hat": f"{report.eps_hat:.5f}"}]
    checks = [
        Check("W_0 equals n exactly", abs(w0_exact - args.n) <= 1e-12,
              f"|{w0_exact} - {args.n}|"),
        Check("progress drop above the distinguishing threshold",
              report.lower_ok,
              f"{report.drop:.4f} >= {report.lower_threshold:.4f}"),
        Check("progress drop below the leak-limited ceiling",
              report.upper_ok,
              f"{report.drop:.4f} <= {report.upper_threshold:.4f}"),
        Check("step count above the derived floor", report.step_floor_ok,
              f"{trace.steps} >= {report.step_count_floor:.1f}"),
        Check("per-step decrease inequality", report.per_step_ok),
    ]

    def fig(path):
        w = trace.w_values.real
        return figures.save_series(
            list(range(len(w))), {"W_t": w}, path, xlabel="bomb query t",
            ylabel="progress", title=f"progress function, n={args.n}")

    return ExperimentResult("progress-and", runs, rows, checks,
                            [("progress_and.png", fig)])


# --- fit ---------------------------------------------------------------------------

def cmd_fit(args) -> ExperimentResult:
    seed = args.seed if args.seed is not None else 0
    points = []
    with open(args.input) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p for p in line.replace(",", " ").split() if p]
            if parts[0].lower() in ("size", "n", "x"):
                continue
            points.append((float(parts[0]), float(parts[1])))
    fit = analysis.scaling_fit(points)
    runs = [RunReport(
        experiment="fit", run_id=0, seed=seed,
        answer=f"exponent={fit.exponent:.6f}", correct=True)]
    rows = [{"points": len(points), "exponent": f"{fit.exponent:.4f}",
             "constant": f"{fit.constant:.4g}",
             "residual": f"{fit.residual:.4f}"}]
    checks = [Check("fit computed", math.isfinite(fit.exponent))]
    if args.expect_min is not None and args.expect_max is not None:
        checks.append(Check(
            f"exponent within [{args.expect_min}, {args.expect_max}]",
            args.expect_min <= fit.exponent <= args.expect_max,
            f"{fit.exponent:.4f}"))
    figure_jobs = [("fit.png", lambda path: figures.save_loglog_fit(
        points, fit, path, "size", "cost", "power-law fit"))]
    return ExperimentResult("fit", runs, rows, checks, figure_jobs)


# --- wiring ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bombsim",
        description="bomb query-complexity measurement harness")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None,
                       help="64-bit seed; required for reproducible reports")
        p.add_argument("--outdir", type=Path, default=None,
                       help="directory for report CSV, summary, and figures")
        p.add_argument("--no-figures", action="store_true",
                       help="skip figure rendering")

    p = sub.add_parser("ev", help="live/dud bomb tester demo")
    p.add_argument("--L", type=int, default=10)
    common(p)

    p = sub.add_parser("zeno-oracle", help="simulated-oracle bounds on random states")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--L", type=int, default=10)
    p.add_argument("--trials", type=int, default=20)
    common(p)

    p = sub.add_parser("bomb-or", help="OR through bomb queries")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--mode", choices=("thm3", "thm6"), default="thm6",
                   help="thm3: compiled Grover attempts; "
                        "thm6: classical scan through guessed queries")
    common(p)

    for name, desc in (("sssp", "single-source shortest paths"),
                       ("matching", "maximum bipartite matching"),
                       ("maxflow", "unit-capacity maximum flow")):
        p = sub.add_parser(name, help=desc)
        p.add_argument("--graph", type=Path, default=None,
                       help="graph file (JSON); otherwise generated")
        p.add_argument("--n", type=str, default="16",
                       help="vertex count or comma list, e.g. 16,32,64")
        p.add_argument("--p", type=float, default=None,
                       help="edge probability (default degree/n)")
        p.add_argument("--degree", type=float, default=3.0,
                       help="target mean degree when --p is not given")
        p.add_argument("--trials", type=int, default=20)
        p.add_argument("--backend", choices=("ideal", "exact"), default="ideal")
        p.add_argument("--c_s", type=float, default=math.pi / 4)
        if name == "sssp":
            p.add_argument("--eps", type=float, default=None,
                           help="also run the bomb compilation at this budget")
        common(p)

    p = sub.add_parser("first-marked", help="doubling first-marked search")
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--d", type=str, default="4,16,64,256",
                   help="first-mark positions (0 = no marks), comma list")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--backend", choices=("ideal", "exact"), default="ideal")
    p.add_argument("--c_s", type=float, default=math.pi / 4)
    common(p)

    p = sub.add_parser("progress-and", help="progress-function bound checks")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--delta", type=float, default=0.1)
    common(p)

    p = sub.add_parser("fit", help="power-law fit of (size, cost) data")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--expect-min", type=float, default=None)
    p.add_argument("--expect-max", type=float, default=None)
    common(p)
    return ap


HANDLERS = {
    "ev": cmd_ev,
    "zeno-oracle": cmd_zeno_oracle,
    "bomb-or": cmd_bomb_or,
    "sssp": cmd_sssp,
    "matching": cmd_matching,
    "maxflow": cmd_maxflow,
    "first-marked": cmd_first_marked,
    "progress-and": cmd_progress_and,
    "fit": cmd_fit,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    result = HANDLERS[args.command](args)
    print(summary_table(result.summary_rows))
    for check in result.checks:
        print(check.line())
    if args.outdir is not None:
        outdir = Path(args.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        csv_path = outdir / f"{result.name}_runs.csv"
        reports.write_report_csv(result.runs, csv_path)
        with open(outdir / f"{result.name}_summary.txt", "w") as fh:
            fh.write(summary_table(result.summary_rows))
            for check in result.checks:
                fh.write(check.line() + "\n")
        written = [csv_path]
        if not args.no_figures:
            for fname, job in result.figure_jobs:
                written.append(job(outdir / fname))
        print(f"wrote {', '.join(str(w) for w in written)}")
    return 0 if result.ok else 1


if __name__ == "__main__":
    sys.exit(main())
