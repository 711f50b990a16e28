"""First-improvement local search, plain and with linkage learning.

Both engines sweep variables in a fixed random permutation and accept a flip
iff its fitness delta strictly exceeds EPS.  The linkage-learning variant
revisits the variables queued since the last improvement and turns the
change in their deltas into weighted-graph observations; recording is a pure
observer and never alters the trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EPS


@dataclass
class LocalSearchResult:
    bits: np.ndarray
    fitness: float
    inner_iterations: int
    evaluations: int
    start_fitness: float = 0.0


@dataclass
class Observation:
    """One recorded edge observation, kept for the replay-based checks."""

    g: int
    h: int
    value: float
    bits: np.ndarray


@dataclass
class TraceRow:
    branch: str  # "fresh" or "revisit"
    g: int
    delta: float
    accepted: bool
    edge_update: bool


def ls(problem, bits, rng, *, order=None):
    """Plain first-improvement local search (no learning).

    Terminates once n consecutive tests fail to improve, which certifies a
    1-flip local optimum.
    """
    n = problem.n
    state = problem.init_state(bits)
    scan = list(order) if order is not None else [int(v) for v in rng.permutation(n)]
    start_fitness = state.fitness
    k = 0
    stall = 0
    iters = 0
    while stall < n:
        g = scan[k]
        k += 1
        if k == n:
            k = 0
        iters += 1
        if state.delta(g) > EPS:
            state.flip(g)
            stall = 0
        else:
            stall += 1
    return LocalSearchResult(
        bits=state.bits,
        fitness=state.fitness,
        inner_iterations=iters,
        evaluations=state.evaluations,
        start_fitness=start_fitness,
    )


def lswll2(
    problem,
    bits,
    graph,
    rng,
    *,
    record=True,
    revisit_inclusive=False,
    order=None,
    observations=None,
    trace=None,
):
    """First-improvement local search that learns the weighted VIG.

    After an accepted flip at variable h, the variables queued (with their
    deltas) since the previous improvement are revisited; a revisit of g
    whose delta changed by more than EPS is exactly the four-point pairwise
    probe at the pre-flip state and is folded into edge (h, g).

    revisit_inclusive=False reproduces the queue cursor verbatim (the most
    recently queued variable is not revisited); True also revisits it.
    """
    n = problem.n
    if graph is not None and graph.n_vertices != n:
        raise ValueError("graph size does not match problem dimension")
    state = problem.init_state(bits)
    scan = list(order) if order is not None else [int(v) for v in rng.permutation(n)]
    start_fitness = state.fitness

    q = []  # variables queued since the last improvement
    f = []  # their deltas, all computed at one common state
    j = 1  # 1-based cursor into q
    k = 0  # cursor into scan
    r = False  # alternates revisit / no-revisit phases across improvements
    h = -1  # variable of the last accepted flip
    stall = 0
    iters = 0
    do_record = record and graph is not None

    while True:
        limit = len(q) if revisit_inclusive else len(q) - 1
        revisit = j <= limit
        if revisit:
            g = q[j - 1]
        else:
            if stall >= n:
                break
            g = scan[k]
            k += 1
            if k == n:
                k = 0
        iters += 1
        d = state.delta(g)
        edge_update = False
        if revisit:
            value = d - f[j - 1]
            if value < 0.0:
                value = -value
            if value > EPS:
                edge_update = True
                if do_record:
                    graph.record_interaction(h, g, value)
                if observations is not None:
                    observations.append(
                        Observation(g=g, h=h, value=value, bits=state.bits.copy())
                    )
        accepted = d > EPS
        if accepted:
            state.flip(g)
            if revisit or r:
                q = []
                f = []
            h = g
            r = not r
            j = 1
            stall = 0
        else:
            if not revisit:
                q.append(g)
                f.append(d)
                stall += 1
            j += 1
        if trace is not None:
            trace.append(
                TraceRow(
                    branch="revisit" if revisit else "fresh",
                    g=g,
                    delta=d,
                    accepted=accepted,
                    edge_update=edge_update,
                )
            )

    return LocalSearchResult(
        bits=state.bits,
        fitness=state.fitness,
        inner_iterations=iters,
        evaluations=state.evaluations,
        start_fitness=start_fitness,
    )
