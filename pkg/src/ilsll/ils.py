"""The outer ILS loop: perturb, local search, elitist acceptance, metrics."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .core import hamming, make_rng, random_bits
from .perturbation import AdpState, srp, vigwbp
from .search import ls, lswll2
from .vigw import EmpiricalVigw

ENGINES = ("ls", "lswll2")
PERTURBATIONS = ("srp2", "srp50", "adp", "vigwbp")


class ConfigError(ValueError):
    """Invalid run or experiment configuration."""


@dataclass
class IlsConfig:
    problem: object
    engine: str = "lswll2"
    perturbation: str = "vigwbp"
    max_iterations: int | None = None
    max_seconds: float | None = None
    seed: int = 0
    optimum_fitness: float | None = None
    revisit_inclusive: bool = False
    collect_series: bool = True

    def validate(self):
        if self.engine not in ENGINES:
            raise ConfigError(f"unknown search engine: {self.engine!r}")
        if self.perturbation not in PERTURBATIONS:
            raise ConfigError(f"unknown perturbation: {self.perturbation!r}")
        if (self.max_iterations is None) == (self.max_seconds is None):
            raise ConfigError("set exactly one of max_iterations / max_seconds")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ConfigError("max_iterations must be at least 1")
        if self.perturbation == "vigwbp" and self.engine != "lswll2":
            raise ConfigError("vigwbp needs the graph built by lswll2")


@dataclass
class IterationRecord:
    escaped: bool
    hdlo: int
    hdp: int
    fdp: float
    nils: int


@dataclass
class RunReport:
    best_bits: np.ndarray
    fit: float
    err: float | None
    metrics: dict
    ni: int
    elapsed_seconds: float
    graph: EmpiricalVigw | None
    seed: int
    engine: str
    perturbation: str
    series: list = field(default_factory=list)


def accept(current, candidate):
    """Elitist acceptance: candidate replaces current iff strictly better."""
    if candidate[1] > current[1]:
        return candidate
    return current


def compute_metrics(series):
    """Per-run aggregates over the iteration records.

    FHRP is the ratio of the per-run means (mean FDP / mean HDP); the mean
    of per-iteration ratios is reported alongside as fhrp_mean_of_ratios.
    """
    if not series:
        raise ValueError("no iterations recorded")
    n = len(series)
    pelo = sum(1 for r in series if r.escaped) / n
    hdlo = sum(r.hdlo for r in series) / n
    hdp = sum(r.hdp for r in series) / n
    fdp = sum(r.fdp for r in series) / n
    fhrp = fdp / hdp if hdp > 0 else 0.0
    fhrp_ratios = sum(r.fdp / r.hdp for r in series if r.hdp > 0) / n
    nils = sum(r.nils for r in series) / n
    return {
        "pelo": pelo,
        "hdlo": hdlo,
        "hdp": hdp,
        "fdp": fdp,
        "fhrp": fhrp,
        "fhrp_mean_of_ratios": fhrp_ratios,
        "nils": nils,
    }


def run_ils(cfg):
    """One ILS run: random start, local search, then perturb/search/accept
    until the iteration or wall-clock budget is spent.  Deterministic for a
    fixed seed in iteration mode; the time budget is only checked between
    iterations, so an iteration never aborts mid-search."""
    cfg.validate()
    problem = cfg.problem
    n = problem.n
    seed_path = cfg.seed if isinstance(cfg.seed, (tuple, list)) else (cfg.seed,)
    rng = make_rng(*seed_path)
    graph = EmpiricalVigw(n) if cfg.engine == "lswll2" else None

    def search(bits):
        if cfg.engine == "lswll2":
            return lswll2(
                problem, bits, graph, rng, revisit_inclusive=cfg.revisit_inclusive
            )
        return ls(problem, bits, rng)

    if cfg.perturbation == "srp2":
        alpha_fixed = min(2, n)
    elif cfg.perturbation == "srp50":
        alpha_fixed = min(50, n // 2)
    else:
        alpha_fixed = None
    adp = AdpState(n=n) if cfg.perturbation == "adp" else None

    t0 = time.perf_counter()
    x0 = random_bits(n, rng)
    res0 = search(x0)
    cur_bits, cur_fit = res0.bits, res0.fitness
    prev_lo = cur_bits
    nils_calls = [res0.inner_iterations]

    series = []
    iteration = 0
    while True:
        if cfg.max_iterations is not None and iteration >= cfg.max_iterations:
            break
        if cfg.max_seconds is not None and time.perf_counter() - t0 >= cfg.max_seconds:
            break
        iteration += 1

        if cfg.perturbation == "vigwbp":
            out = vigwbp(cur_bits, graph, rng)
        elif cfg.perturbation == "adp":
            out = srp(cur_bits, adp.alpha, rng)
        else:
            out = srp(cur_bits, alpha_fixed, rng)

        res = search(out.bits)
        fdp = abs(res.start_fitness - cur_fit)
        escaped = not np.array_equal(res.bits, prev_lo)
        hdlo = hamming(prev_lo, res.bits)
        same_basin = np.array_equal(res.bits, cur_bits)
        improved = res.fitness > cur_fit
        nils_calls.append(res.inner_iterations)

        rec = IterationRecord(
            escaped=escaped, hdlo=hdlo, hdp=out.hdp, fdp=fdp, nils=res.inner_iterations
        )
        series.append(rec)
        if adp is not None:
            adp.update(same_basin=same_basin, hdp=out.hdp, hdlo=hdlo, improved=improved)

        cur_bits, cur_fit = accept((cur_bits, cur_fit), (res.bits, res.fitness))
        prev_lo = res.bits

    elapsed = time.perf_counter() - t0
    metrics = compute_metrics(series) if series else {}
    if metrics:
        # NILS is the mean per local-search invocation, initial call included.
        metrics["nils"] = sum(nils_calls) / len(nils_calls)
    err = None
    if cfg.optimum_fitness is not None:
        err = (cfg.optimum_fitness - cur_fit) / cfg.optimum_fitness
    return RunReport(
        best_bits=cur_bits,
        fit=cur_fit,
        err=err,
        metrics=metrics,
        ni=iteration,
        elapsed_seconds=elapsed,
        graph=graph,
        seed=cfg.seed,
        engine=cfg.engine,
        perturbation=cfg.perturbation,
        series=series if cfg.collect_series else [],
    )
