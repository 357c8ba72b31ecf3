"""Throughput and parallelism measurements for both engines."""
from __future__ import annotations

import statistics
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from . import seq, sweep
from .compiler import DispatchTable, compile_system
from .terms import RewriteSystem, Term, format_term, term_equal

BENCH_HEADER = "engine,run,rewrites,micros,terms_per_s,max_width,median_width"
ENGINES = ("seq", "sweep")


class EngineDivergence(RuntimeError):
    pass


@dataclass
class BenchReport:
    engine: str
    total_rewrites: int
    wall_time: float
    sweep_count: Optional[int] = None
    max_sweep_width: Optional[int] = None
    median_sweep_width: Optional[float] = None
    run: int = 0

    @property
    def rewritten_terms_per_second(self) -> float:
        return self.total_rewrites / self.wall_time if self.wall_time > 0 else float("inf")

    def csv(self) -> str:
        def opt(x):
            return "" if x is None else str(x)
        return (f"{self.engine},{self.run},{self.total_rewrites},{int(self.wall_time * 1e6)},"
                f"{self.rewritten_terms_per_second:.1f},{opt(self.max_sweep_width)},"
                f"{opt(self.median_sweep_width)}")

    def summary(self) -> str:
        s = (f"{self.engine}: {self.total_rewrites} rewrites in {self.wall_time:.4f} s "
             f"({self.rewritten_terms_per_second:.3g} terms/s)")
        if self.sweep_count is not None:
            s += (f", {self.sweep_count} sweeps, max width {self.max_sweep_width}, "
                  f"median width {self.median_sweep_width}")
        return s


def run_engine(engine: str, system: RewriteSystem, table: DispatchTable,
               t: Optional[Term] = None, **opts):
    """Normalize with one engine; returns ``(normal form, report, trace or None)``."""
    if engine == "seq":
        nf, stats = seq.normalize(system, table, t,
                                  step_budget=opts.get("step_budget", seq.DEFAULT_STEP_BUDGET))
        return nf, BenchReport("seq", stats.rewritten_terms, stats.wall_time), None
    if engine == "sweep":
        start = time.perf_counter()
        nf, trace = sweep.normalize(system, table, t, **opts)
        wall = time.perf_counter() - start
        w = trace.widths
        return nf, BenchReport("sweep", trace.total_rewrites, wall, trace.sweeps,
                               int(w.max()) if len(w) else 0,
                               float(statistics.median(w.tolist())) if len(w) else 0.0), trace
    raise ValueError(f"unknown engine {engine!r}")


def bench(system: RewriteSystem, engines: Sequence[str] = ENGINES, repetitions: int = 3,
          **opts) -> List[BenchReport]:
    """Run every engine ``repetitions`` times after checking they agree."""
    if repetitions <= 0:
        return []
    table = compile_system(system)
    reports: List[BenchReport] = []
    forms: Dict[str, Term] = {}
    counts: Dict[str, int] = {}
    for engine in engines:
        for r in range(repetitions):
            nf, rep, _ = run_engine(engine, system, table, **opts)
            rep.run = r
            reports.append(rep)
            if engine not in forms:
                forms[engine] = nf
                counts[engine] = rep.total_rewrites
    first = engines[0]
    for engine in engines[1:]:
        if not term_equal(forms[first], forms[engine]) or counts[first] != counts[engine]:
            sig = system.signature
            raise EngineDivergence(
                f"engines disagree\n"
                f"  {first}: {counts[first]} rewrites -> {format_term(sig, forms[first])}\n"
                f"  {engine}: {counts[engine]} rewrites -> {format_term(sig, forms[engine])}")
    return reports


def median_reports(reports: List[BenchReport]) -> List[BenchReport]:
    """One report per engine, holding the median-throughput run."""
    out = []
    for engine in dict.fromkeys(r.engine for r in reports):
        runs = sorted((r for r in reports if r.engine == engine),
                      key=lambda r: r.rewritten_terms_per_second)
        out.append(runs[(len(runs) - 1) // 2])
    return out


def reports_csv(reports: List[BenchReport]) -> str:
    return "\n".join([BENCH_HEADER] + [r.csv() for r in reports]) + "\n"
