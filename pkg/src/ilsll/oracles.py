"""Ground-truth machinery: brute-force Walsh spectra, true interaction
graphs, exhaustive optima, and the exact knapsack DP solver.

All of it enumerates, so hard size caps apply.  Integer state s encodes the
bit string with x_g = (s >> g) & 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CapabilityError, TOOL_VERSION
from .serialize import canonical_dumps

WALSH_TOL = 1e-9

WALSH_MAX_N = 20
VIGW_MAX_N = 16
OPTIMUM_MAX_N = 24


@dataclass
class WalshSpectrum:
    n: int
    coefficients: np.ndarray  # 2^n reals, index i is the parity mask

    def reconstruct(self, s):
        """f at integer state s from the spectrum (sign (-1)^(i.x))."""
        i = np.arange(1 << self.n, dtype=np.int64)
        parity = _popcount(i & s) & 1
        signs = 1.0 - 2.0 * parity
        return float(np.dot(self.coefficients, signs))


@dataclass
class TrueVigw:
    n: int
    strengths: dict  # (g, h) with g < h -> exact mean probe value

    def edge_set(self):
        return {e for e, v in self.strengths.items() if v > 0.0}


def _popcount(arr):
    arr = arr.astype(np.int64)
    count = np.zeros_like(arr)
    while np.any(arr):
        count += arr & 1
        arr >>= 1
    return count


def _fwht(values):
    """In-place fast Walsh-Hadamard transform (unnormalized)."""
    a = values.copy()
    h = 1
    n = len(a)
    while h < n:
        for start in range(0, n, h * 2):
            x = a[start : start + h].copy()
            y = a[start + h : start + 2 * h].copy()
            a[start : start + h] = x + y
            a[start + h : start + 2 * h] = x - y
        h *= 2
    return a


def enumerate_values(problem):
    """Fitness of every state, indexed by the integer encoding."""
    return np.asarray(problem.evaluate_all(), dtype=np.float64)


def walsh_transform(problem):
    """Exact Walsh spectrum: w = 2^-n * H f, with psi_i(x) = (-1)^(i.x)."""
    if problem.n > WALSH_MAX_N:
        raise CapabilityError(
            f"walsh transform capped at n={WALSH_MAX_N}, got {problem.n}"
        )
    values = enumerate_values(problem)
    coeffs = _fwht(values) / len(values)
    return WalshSpectrum(n=problem.n, coefficients=coeffs)


def true_vig(spectrum, tol=WALSH_TOL):
    """Edges (g, h) covered by at least one Walsh coefficient above tol."""
    edges = set()
    nonzero = np.nonzero(np.abs(spectrum.coefficients) > tol)[0]
    for i in nonzero:
        bits = [g for g in range(spectrum.n) if (int(i) >> g) & 1]
        for a in range(len(bits)):
            for b in range(a + 1, len(bits)):
                edges.add((bits[a], bits[b]))
    return edges


def true_vigw(problem):
    """Exact interaction strengths: the pairwise probe averaged over every
    state, for every variable pair.  Symmetric by construction."""
    n = problem.n
    if n > VIGW_MAX_N:
        raise CapabilityError(f"true vigw capped at n={VIGW_MAX_N}, got {n}")
    values = enumerate_values(problem)
    idx = np.arange(1 << n, dtype=np.int64)
    strengths = {}
    for g in range(n):
        bg = 1 << g
        fg = values[idx ^ bg]
        for h in range(g + 1, n):
            bh = 1 << h
            omega = np.abs(values[idx ^ bg ^ bh] - values[idx ^ bh] - fg + values)
            strengths[(g, h)] = float(np.mean(omega))
    return TrueVigw(n=n, strengths=strengths)


def exhaustive_optimum(problem):
    """Global maximum by enumeration; ties resolve to the lexicographically
    smallest bit string (x_1 most significant)."""
    n = problem.n
    if n > OPTIMUM_MAX_N:
        raise CapabilityError(f"exhaustive optimum capped at n={OPTIMUM_MAX_N}, got {n}")
    values = enumerate_values(problem)
    best = np.max(values)
    candidates = np.nonzero(values == best)[0]
    # lex order compares x_1 first, which is the low bit of the encoding
    state = min(
        (int(s) for s in candidates),
        key=lambda s: tuple((s >> g) & 1 for g in range(n)),
    )
    bits = np.array([(state >> g) & 1 for g in range(n)], dtype=np.uint8)
    return bits, float(best)


def knapsack_dp(inst):
    """Exact optimal feasible profit via the capacity-indexed DP table.

    The penalized formulation's maximum coincides with this: the penalty
    rate makes any overweight packing no better than some feasible one.
    """
    cap = inst.capacity
    dp = np.zeros(cap + 1, dtype=np.int64)
    for w, p in zip(inst.weights, inst.profits):
        if w <= cap:
            dp[w:] = np.maximum(dp[w:], dp[:-w] + p)
    return int(dp[cap])


def edges_to_json(n, edges, strengths=None):
    """Serialize a true interaction graph, 1-based, sorted for diffing."""
    doc = {
        "format": "true-vig",
        "version": 1,
        "tool_version": TOOL_VERSION,
        "n_vertices": n,
        "edges": [
            {"u": u + 1, "v": v + 1}
            | ({"strength": strengths[(u, v)]} if strengths else {})
            for u, v in sorted(edges)
        ],
    }
    return canonical_dumps(doc)


def edges_from_json(text):
    import json

    doc = json.loads(text)
    if doc.get("format") != "true-vig":
        raise ValueError("not a true-vig document")
    return doc["n_vertices"], {(e["u"] - 1, e["v"] - 1) for e in doc["edges"]}
