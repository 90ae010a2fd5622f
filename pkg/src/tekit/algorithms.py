"""Uniform driver over every routing algorithm.

``SchemeDriver`` owns the per-run state machine the simulator needs:
oblivious algorithms build one scheme from the topology and never touch it;
fixed-path adaptive algorithms build a base path set once and re-balance its
weights per traffic matrix; conscious algorithms recompute paths and weights
every matrix; the omniscient baseline recomputes on the live (possibly
failure-reduced) topology from the actual demands.  Budgets prune oblivious
schemes and adaptive bases once, and conscious schemes on every recompute.

Solve wall-clock times and any solver phase-limit events are recorded on the
driver for reporting.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

from . import baseline, raecke
from .baseline import KspConfig
from .mcf import (MwConfig, PhaseLimitError, mcf_mw, semi_mcf, semi_mcf_env,
                  semi_mcf_ft_env)
from .model import (AlgorithmKind, Scheme, Topology, TrafficMatrix,
                    prune_to_budget)
from .raecke import RaeckeConfig


@dataclass(frozen=True)
class BuildConfig:
    budget: int | None = None
    ksp_k: int = 4
    mw: MwConfig = MwConfig()
    seed: int = 0
    trace: object = None  # callable(str) for per-iteration solver traces


def oblivious_scheme(tag: str, topo: Topology, cfg: BuildConfig) -> Scheme:
    """Build one of the demand-independent schemes."""
    if tag == "spf":
        return baseline.spf(topo)
    if tag == "ecmp":
        return baseline.ecmp(topo)
    if tag == "ksp":
        return baseline.ksp(topo, KspConfig(cfg.ksp_k))
    if tag == "vlb":
        return baseline.vlb(topo)
    if tag == "raecke":
        dist = raecke.raecke_distribution(topo, RaeckeConfig(seed=cfg.seed),
                                          trace=cfg.trace)
        return raecke.paths_from_distribution(dist, topo)
    raise ValueError(f"not an oblivious algorithm: {tag}")


def reweight(topo: Topology, base: Scheme, tm: TrafficMatrix,
             mw: MwConfig = MwConfig()) -> Scheme:
    """Re-balance rates over fixed paths, tolerating stranded pairs.

    Pairs whose entry is empty (e.g. every path crossed a failed link) keep
    an empty entry and have their demand ignored by the solver — the
    simulator accounts it as failure loss.
    """
    covered = {pair: dist for pair, dist in base.items() if dist}
    stranded = [pair for pair, dist in base.items() if not dist]
    tm_solv = tm
    dropped = [p for p in stranded if tm.get(*p) > 0]
    if dropped or any(tm.get(*p) > 0 and p not in base for p in tm.pairs()):
        rates = tm.rates.copy()
        idx = {h: i for i, h in enumerate(tm.hosts)}
        for pair in tm.pairs():
            if tm.get(*pair) > 0 and (pair in stranded or pair not in base):
                rates[idx[pair[0]], idx[pair[1]]] = 0.0
        tm_solv = TrafficMatrix(tm.hosts, rates)
    try:
        solved = semi_mcf(topo, tm_solv, covered, mw).scheme
    except PhaseLimitError as exc:
        solved = exc.solution.scheme
    for pair in stranded:
        solved[pair] = {}
    return solved


class SchemeDriver:
    """Per-run algorithm state: installed paths plus the update rule."""

    def __init__(self, topo: Topology, kind: AlgorithmKind,
                 predicted_tms: Sequence[TrafficMatrix], cfg: BuildConfig):
        self.topo = topo
        self.kind = kind
        self.cfg = cfg
        self.solve_times: list[tuple[str, float]] = []
        self.phase_limit_events: list[str] = []
        self.base: Scheme | None = None
        self.fixed: Scheme | None = None
        self.installed: Scheme = {}

        tag = kind.tag
        if kind.category == "oblivious":
            scheme = self._timed(f"{kind.name} build",
                                 lambda: oblivious_scheme(tag, topo, cfg))
            self.fixed = self._budgeted(scheme)
            self.installed = self.fixed
        elif tag == "semimcf":
            if kind.base == "mcf":
                if not predicted_tms:
                    raise ValueError("semimcfmcf needs a predicted matrix")
                builder = lambda: self._solve(topo, predicted_tms[0]).scheme
            else:
                builder = lambda: oblivious_scheme(kind.base, topo, cfg)
            self.base = self._budgeted(self._timed(f"{kind.name} base", builder))
            self.installed = self.base
        elif tag == "semimcfmcfenv":
            self.base = self._budgeted(self._timed(
                f"{kind.name} base",
                lambda: semi_mcf_env(topo, list(predicted_tms), cfg.mw)))
            self.installed = self.base
        elif tag == "semimcfmcfftenv":
            self.base = self._budgeted(self._timed(
                f"{kind.name} base",
                lambda: semi_mcf_ft_env(topo, list(predicted_tms), None, cfg.mw)))
            self.installed = self.base
        # conscious kinds (mcf, mw, optimalmcf) build per matrix

    def _timed(self, label: str, fn):
        t0 = time.perf_counter()
        try:
            result = fn()
        except PhaseLimitError as exc:
            self.phase_limit_events.append(f"{label}: {exc}")
            result = exc.solution.scheme
        self.solve_times.append((label, time.perf_counter() - t0))
        return result

    def _budgeted(self, scheme: Scheme) -> Scheme:
        if self.cfg.budget is None:
            return scheme
        return prune_to_budget(scheme, self.cfg.budget)

    def _solve(self, topo: Topology, tm: TrafficMatrix):
        return mcf_mw(topo, tm, self.cfg.mw)

    def scheme_for(self, t: int, predicted: TrafficMatrix,
                   actual: TrafficMatrix, topo_current: Topology) -> Scheme:
        """The scheme to install for matrix index t, before failure
        recovery.  Updates ``installed`` for churn accounting."""
        kind = self.kind
        if kind.category == "oblivious":
            return self.fixed
        if kind.category == "semi-oblivious":
            self.installed = self.base
            return self._timed(f"{kind.name} reweight tm{t}",
                               lambda: reweight(self.topo, self.base,
                                                predicted, self.cfg.mw))
        if kind.tag == "optimalmcf":
            scheme = self._budgeted(self._timed(
                f"{kind.name} solve tm{t}",
                lambda: self._solve(topo_current, actual).scheme))
        else:  # mcf / mw
            scheme = self._budgeted(self._timed(
                f"{kind.name} solve tm{t}",
                lambda: self._solve(self.topo, predicted).scheme))
        self.installed = scheme
        return scheme

    def reweight_source(self, current: Scheme) -> Scheme:
        """What local recovery should prune: the installed base for
        fixed-path kinds, the current scheme otherwise."""
        return self.base if self.base is not None else current

    def solve_conscious(self, topo_current: Topology,
                        tm: TrafficMatrix) -> Scheme:
        return self._budgeted(self._timed(
            f"{self.kind.name} flash solve",
            lambda: self._solve(topo_current, tm).scheme))


def make_scheme(name: str, topo: Topology, tm: TrafficMatrix | None = None,
                cfg: BuildConfig = BuildConfig()) -> Scheme:
    """One-shot scheme construction for demos and quick experiments."""
    kind = AlgorithmKind.parse(name)
    tms = [tm] if tm is not None else []
    driver = SchemeDriver(topo, kind, tms, cfg)
    if kind.category == "oblivious":
        return driver.fixed
    if tm is None:
        raise ValueError(f"{name} needs a traffic matrix")
    return driver.scheme_for(0, tm, tm, topo)
