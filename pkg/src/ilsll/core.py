"""Bit-string primitives, the problem/evaluation contract and the RNG contract.

Bit strings are numpy uint8 arrays of fixed length N with values in {0, 1}.
Variable indices are 0-based everywhere in the Python API; only serialized
files and CLI output use 1-based indices.
"""

from __future__ import annotations

import numpy as np

# Tolerance for "strictly positive" tests on fitness differences.  NK
# subfunction sums accumulate rounding noise that must not create phantom
# improvements or phantom graph edges.
EPS = 1e-10

# Generator recorded in every output file so experiments replay across
# platforms.
RNG_ALGORITHM = "numpy-pcg64"

TOOL_VERSION = "0.1.0"


def make_rng(master_seed, *path):
    """Derive a deterministic RNG stream from a master seed and a task path.

    The stream is a pure function of (master_seed, *path), so per-run and
    per-instance streams never collide and replay bit-identically.
    """
    return np.random.default_rng([int(master_seed), *[int(p) for p in path]])


def random_bits(n, rng):
    """Uniform random bit string of length n."""
    return rng.integers(0, 2, size=n, dtype=np.uint8)


def bits_from_iterable(values):
    x = np.asarray(list(values), dtype=np.uint8)
    if x.ndim != 1 or not np.all((x == 0) | (x == 1)):
        raise ValueError("bit string must be a flat sequence of 0/1 values")
    return x


def bits_to_str(x):
    return "".join("1" if b else "0" for b in x)


def flip(x, g):
    """Return a copy of x with bit g toggled; x is unchanged."""
    n = len(x)
    if not 0 <= g < n:
        raise ValueError(f"bit index {g} out of range for length {n}")
    y = x.copy()
    y[g] ^= 1
    return y


def hamming(x, y):
    """Number of differing positions between two equal-length bit strings."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    return int(np.count_nonzero(x != y))


class Problem:
    """Deterministic fitness definition over bit strings of length n.

    Subclasses set ``n`` and ``kind`` and implement ``evaluate``.  They may
    override ``init_state`` with an incremental evaluator; any incremental
    path must agree with the two-evaluation delta within 1e-12.
    """

    n: int
    kind: str = "custom-test"

    def evaluate(self, bits) -> float:
        raise NotImplementedError

    def init_state(self, bits):
        return FullEvalState(self, bits)

    def evaluate_all(self):
        """Fitness of every bit string, indexed by integer state s with
        x_g = (s >> g) & 1.  Used by the enumeration oracles; subclasses
        may vectorize."""
        if self.n > 24:
            raise CapabilityError(f"cannot enumerate 2^{self.n} states")
        values = np.empty(1 << self.n, dtype=np.float64)
        for s in range(1 << self.n):
            bits = np.array([(s >> g) & 1 for g in range(self.n)], dtype=np.uint8)
            values[s] = self.evaluate(bits)
        return values


class CapabilityError(Exception):
    """Raised when an operation exceeds a hard size cap."""


class ProblemState:
    """Mutable evaluation state used by the search engines.

    ``bits`` is owned by the state; ``delta(g)`` returns the fitness change
    of flipping bit g without applying it; ``flip(g)`` applies the flip and
    updates ``fitness``.
    """

    bits: np.ndarray
    fitness: float
    evaluations: int

    def delta(self, g) -> float:
        raise NotImplementedError

    def flip(self, g):
        raise NotImplementedError


class FullEvalState(ProblemState):
    """Default state: every delta costs two full evaluations (or one, with
    the current fitness cached)."""

    def __init__(self, problem, bits):
        self.problem = problem
        self.bits = np.asarray(bits, dtype=np.uint8).copy()
        self.fitness = problem.evaluate(self.bits)
        self.evaluations = 1

    def delta(self, g):
        self.bits[g] ^= 1
        f_flipped = self.problem.evaluate(self.bits)
        self.bits[g] ^= 1
        self.evaluations += 1
        return f_flipped - self.fitness

    def flip(self, g):
        self.bits[g] ^= 1
        self.fitness = self.problem.evaluate(self.bits)
        self.evaluations += 1


def delta(problem, x, g):
    """Fitness difference from flipping bit g of x: f(x ^ 1_g) - f(x)."""
    n = len(x)
    if not 0 <= g < n:
        raise ValueError(f"bit index {g} out of range for length {n}")
    return problem.evaluate(flip(x, g)) - problem.evaluate(x)


def second_difference(problem, x, g, h):
    """Pairwise nonlinearity probe |f(x^1_h^1_g) - f(x^1_h) - f(x^1_g) + f(x)|.

    Symmetric in (g, h) by construction; zero for every x when no Walsh
    coefficient covers both variables.
    """
    if g == h:
        raise ValueError("probe requires two distinct variables")
    n = len(x)
    if not (0 <= g < n and 0 <= h < n):
        raise ValueError("bit index out of range")
    f00 = problem.evaluate(x)
    xg = flip(x, g)
    f10 = problem.evaluate(xg)
    xh = flip(x, h)
    f01 = problem.evaluate(xh)
    f11 = problem.evaluate(flip(xg, h))
    return abs(f11 - f01 - f10 + f00)


class OneMax(Problem):
    """Normalized onemax: f(x) = sum(x) / n.  Linear, so no variable pair
    interacts; handy as a unimodal test landscape."""

    kind = "custom-test"

    def __init__(self, n):
        self.n = n

    def evaluate(self, bits):
        return float(np.sum(bits)) / self.n

    def evaluate_all(self):
        s = np.arange(1 << self.n, dtype=np.uint32)
        ones = np.zeros(1 << self.n, dtype=np.float64)
        for g in range(self.n):
            ones += (s >> g) & 1
        return ones / self.n


class CallableProblem(Problem):
    """Wrap an arbitrary function of a bit string for tests and oracles."""

    kind = "custom-test"

    def __init__(self, n, fn):
        self.n = n
        self.fn = fn

    def evaluate(self, bits):
        return float(self.fn(bits))
