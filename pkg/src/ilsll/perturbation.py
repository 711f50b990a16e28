"""Perturbation operators: fixed random, adaptive random, and graph-guided."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .vigw import threshold_computation


@dataclass
class PerturbationOutcome:
    bits: np.ndarray
    flipped: list
    hdp: int


def srp(bits, alpha, rng):
    """Flip a uniformly sampled subset of exactly alpha distinct positions."""
    n = len(bits)
    if not 1 <= alpha <= n:
        raise ValueError(f"alpha={alpha} out of range for n={n}")
    positions = sorted(int(v) for v in rng.choice(n, size=alpha, replace=False))
    y = bits.copy()
    for g in positions:
        y[g] ^= 1
    return PerturbationOutcome(bits=y, flipped=positions, hdp=alpha)


def vigwbp(bits, graph, rng):
    """Graph-guided perturbation: flip a random variable plus the neighbors
    most strongly tied to it.

    With fewer than four neighbors every one of them flips (an upper fence
    over so small a sample can never fall below the weaker weights, yet a
    sparsely connected vertex is exactly where the whole neighborhood should
    move together).  From four neighbors up the strongest always flips and
    weaker ones flip only while their weight strictly exceeds the box-plot
    outlier bound.  An isolated vertex falls back to flipping one extra
    random bit, so at least two bits always change.  Parameterless: the flip
    count comes from the graph.
    """
    n = len(bits)
    if graph.n_vertices != n:
        raise ValueError("graph size does not match bit-string length")
    i = int(rng.integers(n))
    y = bits.copy()
    y[i] ^= 1
    neighbors = graph.neighbors_sorted(i)
    flipped = [i]
    if neighbors:
        if len(neighbors) < 4:
            chosen = [v for v, _ in neighbors]
        else:
            weights = [w for _, w in neighbors]
            beta = threshold_computation(weights)
            chosen = [neighbors[-1][0]]
            j = len(neighbors) - 2
            while j >= 0 and neighbors[j][1] > beta:
                chosen.append(neighbors[j][0])
                j -= 1
        for v in chosen:
            y[v] ^= 1
        flipped.extend(chosen)
    else:
        j = int(rng.integers(n - 1))
        if j >= i:
            j += 1
        y[j] ^= 1
        flipped.append(j)
    flipped = sorted(flipped)
    return PerturbationOutcome(bits=y, flipped=flipped, hdp=len(flipped))


@dataclass
class AdpState:
    """Online adaptation of the random-perturbation strength.

    Every 5th update the strength grows if the last perturbation failed to
    leave the current basin or jumped less than the running-mean distance
    between consecutive local optima; otherwise it shrinks unless the last
    local optimum improved on the incumbent.
    """

    n: int
    alpha: int = 2
    iteration: int = 0
    hdlo_sum: float = 0.0
    hdlo_count: int = 0

    @property
    def min_alpha(self):
        return 2

    @property
    def max_alpha(self):
        return max(2, self.n // 2)

    @property
    def mean_hdlo(self):
        if self.hdlo_count == 0:
            return 0.0
        return self.hdlo_sum / self.hdlo_count

    def update(self, *, same_basin, hdp, hdlo, improved):
        """Fold in one ILS iteration's stats; adjust alpha on every 5th call."""
        self.iteration += 1
        self.hdlo_sum += hdlo
        self.hdlo_count += 1
        if self.iteration % 5 == 0:
            if same_basin or hdp < self.mean_hdlo:
                self.alpha += 1
            elif not improved:
                self.alpha -= 1
            self.alpha = min(self.max_alpha, max(self.min_alpha, self.alpha))
