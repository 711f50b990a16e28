"""NK-landscape and 0-1 knapsack instances: generation, evaluation, JSON I/O."""

from __future__ import annotations

import json

import numpy as np

from .core import (
    Problem,
    ProblemState,
    RNG_ALGORITHM,
    TOOL_VERSION,
    CapabilityError,
)
from .serialize import canonical_dumps


class NkInstance(Problem):
    """Sum of n random k-input subfunctions, normalized by n.

    masks[i] lists the k distinct variables feeding subfunction i (always
    including i itself); tables[i] holds 2^k uniform [0,1) values indexed by
    the pattern sum(x[masks[i][j]] << j).
    """

    kind = "nk"

    def __init__(self, n, k, model, masks, tables, seed=None):
        if model not in ("adjacent", "random"):
            raise ValueError(f"unknown NK model: {model}")
        self.n = n
        self.k = k
        self.model = model
        self.masks = [list(m) for m in masks]
        self.tables = [list(map(float, t)) for t in tables]
        self.seed = seed
        self._check()
        # cover[g]: list of (subfunction index, bit position of g in its mask)
        self.cover = [[] for _ in range(n)]
        for i, mask in enumerate(self.masks):
            for pos, v in enumerate(mask):
                self.cover[v].append((i, pos))

    def _check(self):
        if not self.n >= self.k >= 2:
            raise ValueError("need n >= k >= 2")
        for i, mask in enumerate(self.masks):
            if len(mask) != self.k or len(set(mask)) != self.k or i not in mask:
                raise ValueError(f"bad mask for subfunction {i}: {mask}")
            if any(not 0 <= v < self.n for v in mask):
                raise ValueError(f"mask index out of range in subfunction {i}")
        for i, t in enumerate(self.tables):
            if len(t) != 1 << self.k:
                raise ValueError(f"table {i} must have 2^{self.k} entries")
            if any(not 0.0 <= v < 1.0 for v in t):
                raise ValueError(f"table {i} entries must lie in [0,1)")

    def evaluate(self, bits):
        if len(bits) != self.n:
            raise ValueError(f"expected {self.n} bits, got {len(bits)}")
        total = 0.0
        b = bits
        for mask, table in zip(self.masks, self.tables):
            idx = 0
            for pos, v in enumerate(mask):
                if b[v]:
                    idx |= 1 << pos
            total += table[idx]
        return total / self.n

    def init_state(self, bits):
        return NkState(self, bits)

    def evaluate_all(self):
        if self.n > 24:
            raise CapabilityError(f"cannot enumerate 2^{self.n} states")
        s = np.arange(1 << self.n, dtype=np.int64)
        total = np.zeros(1 << self.n, dtype=np.float64)
        for mask, table in zip(self.masks, self.tables):
            idx = np.zeros(1 << self.n, dtype=np.int64)
            for pos, v in enumerate(mask):
                idx |= ((s >> v) & 1) << pos
            total += np.asarray(table, dtype=np.float64)[idx]
        return total / self.n

    def cooccurrence_edges(self):
        """All pairs (g, h), g < h, sharing at least one subfunction mask.
        A superset of the true VIG (random tables can cancel)."""
        edges = set()
        for mask in self.masks:
            srt = sorted(mask)
            for a in range(len(srt)):
                for b in range(a + 1, len(srt)):
                    edges.add((srt[a], srt[b]))
        return edges

    def to_json(self):
        return canonical_dumps(
            {
                "format": "nk-instance",
                "version": 1,
                "tool_version": TOOL_VERSION,
                "rng_algorithm": RNG_ALGORITHM,
                "seed": self.seed,
                "n": self.n,
                "k": self.k,
                "model": self.model,
                "masks": [[v + 1 for v in m] for m in self.masks],
                "tables": self.tables,
            }
        )

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        if doc.get("format") != "nk-instance":
            raise ValueError("not an nk-instance document")
        return cls(
            n=doc["n"],
            k=doc["k"],
            model=doc["model"],
            masks=[[v - 1 for v in m] for m in doc["masks"]],
            tables=doc["tables"],
            seed=doc.get("seed"),
        )


class NkState(ProblemState):
    """Incremental NK evaluator: caches the pattern index of every
    subfunction so a delta touches only the subfunctions covering g."""

    def __init__(self, inst, bits):
        self.inst = inst
        self.bits = np.asarray(bits, dtype=np.uint8).copy()
        self._b = [int(v) for v in self.bits]
        self.idx = []
        total = 0.0
        for mask, table in zip(inst.masks, inst.tables):
            i = 0
            for pos, v in enumerate(mask):
                if self._b[v]:
                    i |= 1 << pos
            self.idx.append(i)
            total += table[i]
        self.fitness = total / inst.n
        self.evaluations = 1
        self._inv_n = 1.0 / inst.n

    def delta(self, g):
        d = 0.0
        tables = self.inst.tables
        idx = self.idx
        for fn, pos in self.inst.cover[g]:
            t = tables[fn]
            i = idx[fn]
            d += t[i ^ (1 << pos)] - t[i]
        self.evaluations += 1
        return d * self._inv_n

    def flip(self, g):
        d = 0.0
        tables = self.inst.tables
        idx = self.idx
        for fn, pos in self.inst.cover[g]:
            t = tables[fn]
            i = idx[fn]
            j = i ^ (1 << pos)
            d += t[j] - t[i]
            idx[fn] = j
        self._b[g] ^= 1
        self.bits[g] ^= 1
        self.fitness += d * self._inv_n


def nk_generate(n, k, model, rng):
    """Generate an NK instance.  Adjacent model wraps modulo n; random model
    samples K extra distinct variables per subfunction."""
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    if k < 2:
        raise ValueError("k must be at least 2")
    masks = []
    for i in range(n):
        if model == "adjacent":
            mask = [(i + j) % n for j in range(k)]
        elif model == "random":
            others = [v for v in range(n) if v != i]
            extra = rng.choice(len(others), size=k - 1, replace=False)
            mask = [i] + [others[int(e)] for e in sorted(extra)]
        else:
            raise ValueError(f"unknown NK model: {model}")
        masks.append(mask)
    tables = [rng.random(1 << k).tolist() for _ in range(n)]
    return NkInstance(n=n, k=k, model=model, masks=masks, tables=tables)


class KnapsackInstance(Problem):
    """Penalized 0-1 knapsack: f(x) = sum(p_i x_i) - r(x), with r(x) the
    overweight times the steepest profit/weight ratio.  Integer weights and
    profits keep the DP oracle exact."""

    kind = "knapsack"

    def __init__(self, weights, profits, seed=None):
        self.n = len(weights)
        self.weights = [int(w) for w in weights]
        self.profits = [int(p) for p in profits]
        if len(self.profits) != self.n or self.n < 1:
            raise ValueError("weights and profits must be nonempty, equal length")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")
        self.capacity = int(sum(self.weights)) // 2
        self.penalty_rate = max(p / w for p, w in zip(self.profits, self.weights))
        self.seed = seed

    def evaluate(self, bits):
        if len(bits) != self.n:
            raise ValueError(f"expected {self.n} bits, got {len(bits)}")
        profit = 0
        weight = 0
        for b, p, w in zip(bits, self.profits, self.weights):
            if b:
                profit += p
                weight += w
        if weight > self.capacity:
            return profit - (weight - self.capacity) * self.penalty_rate
        return float(profit)

    def init_state(self, bits):
        return KnapsackState(self, bits)

    def to_json(self):
        return canonical_dumps(
            {
                "format": "knapsack-instance",
                "version": 1,
                "tool_version": TOOL_VERSION,
                "rng_algorithm": RNG_ALGORITHM,
                "seed": self.seed,
                "n": self.n,
                "weights": self.weights,
                "profits": self.profits,
                "capacity": self.capacity,
                "penalty_rate": self.penalty_rate,
            }
        )

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        if doc.get("format") != "knapsack-instance":
            raise ValueError("not a knapsack-instance document")
        inst = cls(doc["weights"], doc["profits"], seed=doc.get("seed"))
        if inst.capacity != doc["capacity"]:
            raise ValueError("capacity in file disagrees with weights")
        return inst


class KnapsackState(ProblemState):
    """O(1) delta: track total weight and profit of the packed items."""

    def __init__(self, inst, bits):
        self.inst = inst
        self.bits = np.asarray(bits, dtype=np.uint8).copy()
        self._b = [int(v) for v in self.bits]
        self._w = inst.weights
        self._p = inst.profits
        self._cap = inst.capacity
        self._rate = inst.penalty_rate
        self.total_weight = sum(w for b, w in zip(self._b, self._w) if b)
        self.total_profit = sum(p for b, p in zip(self._b, self._p) if b)
        self.fitness = self._fit(self.total_weight, self.total_profit)
        self.evaluations = 1

    def _fit(self, weight, profit):
        if weight > self._cap:
            return profit - (weight - self._cap) * self._rate
        return float(profit)

    def delta(self, g):
        if self._b[g]:
            w = self.total_weight - self._w[g]
            p = self.total_profit - self._p[g]
        else:
            w = self.total_weight + self._w[g]
            p = self.total_profit + self._p[g]
        self.evaluations += 1
        return self._fit(w, p) - self.fitness

    def flip(self, g):
        if self._b[g]:
            self.total_weight -= self._w[g]
            self.total_profit -= self._p[g]
            self._b[g] = 0
            self.bits[g] = 0
        else:
            self.total_weight += self._w[g]
            self.total_profit += self._p[g]
            self._b[g] = 1
            self.bits[g] = 1
        self.fitness = self._fit(self.total_weight, self.total_profit)


def knapsack_generate(n, rng):
    """Random instance: integer weights in [5,20], profits in [40,100]."""
    if n < 1:
        raise ValueError("n must be at least 1")
    weights = rng.integers(5, 21, size=n).tolist()
    profits = rng.integers(40, 101, size=n).tolist()
    return KnapsackInstance(weights, profits)


def load_instance(path):
    """Load an instance file, dispatching on its format field."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    doc = json.loads(text)
    fmt = doc.get("format")
    if fmt == "nk-instance":
        return NkInstance.from_json(text)
    if fmt == "knapsack-instance":
        return KnapsackInstance.from_json(text)
    raise ValueError(f"unknown instance format: {fmt!r}")
