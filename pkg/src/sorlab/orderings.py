"""Seeded permutation generation and sweep-ordering strategies.

All randomness flows through numpy's PCG64 generator (``default_rng``): a
fixed, named, seedable 64-bit engine whose stream is a pure function of the
seed. ``Generator.permutation`` performs a Fisher-Yates shuffle and
``Generator.integers`` uses rejection sampling, so permutations are exactly
uniform and integer draws carry no modulo bias. Parallel or repeated trials
use :func:`derive_seed` so streams are independent and order-insensitive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GENERATOR_NAME = "PCG64"

KINDS = ("cyclic", "shuffled", "preshuffled", "single_step_random", "fixed")
_NEEDS_SIGMA = ("preshuffled", "fixed")


def make_rng(seed: int) -> np.random.Generator:
    """Fresh PCG64 generator for the given seed."""
    return np.random.default_rng(int(seed))


def derive_seed(base_seed: int, *path: int) -> int:
    """Deterministic 64-bit child seed for (base_seed, path...).

    Distinct paths give statistically independent streams, so trials can be
    seeded as derive_seed(base, trial_index) regardless of execution order.
    """
    entropy = [int(base_seed)] + [int(p) for p in path]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def derived_rng(base_seed: int, *path: int) -> np.random.Generator:
    return make_rng(derive_seed(base_seed, *path))


def random_permutation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random permutation of {0..n-1}; advances rng."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return rng.permutation(n)


def check_permutation(sigma) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=np.intp)
    if sigma.ndim != 1 or not np.array_equal(np.sort(sigma), np.arange(len(sigma))):
        raise ValueError("not a permutation of 0..n-1")
    return sigma


@dataclass(frozen=True, eq=False)
class OrderingStrategy:
    """Sweep-order policy: which equation order each sweep uses.

    cyclic             -- fixed natural order 1..n every sweep
    shuffled           -- fresh uniform permutation every sweep
    preshuffled        -- one randomly drawn permutation, reused forever
    single_step_random -- n independent uniform picks (repeats allowed)
    fixed              -- a caller-specified permutation, reused forever
    """

    kind: str
    sigma: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ordering kind {self.kind!r}")
        if self.kind in _NEEDS_SIGMA:
            if self.sigma is None:
                raise ValueError(f"{self.kind} ordering requires a permutation")
            object.__setattr__(self, "sigma", check_permutation(self.sigma))
        elif self.sigma is not None:
            raise ValueError(f"{self.kind} ordering takes no permutation")


def cyclic() -> OrderingStrategy:
    return OrderingStrategy("cyclic")


def shuffled() -> OrderingStrategy:
    return OrderingStrategy("shuffled")


def preshuffled(sigma) -> OrderingStrategy:
    return OrderingStrategy("preshuffled", sigma)


def single_step_random() -> OrderingStrategy:
    return OrderingStrategy("single_step_random")


def fixed(sigma) -> OrderingStrategy:
    return OrderingStrategy("fixed", sigma)


def sweep_order(strategy: OrderingStrategy, n: int,
                rng: np.random.Generator | None = None) -> np.ndarray:
    """Index sequence (length n) for one sweep under the given strategy."""
    if strategy.kind == "cyclic":
        return np.arange(n, dtype=np.intp)
    if strategy.kind in _NEEDS_SIGMA:
        if len(strategy.sigma) != n:
            raise ValueError("stored permutation length does not match n")
        return strategy.sigma.copy()
    if rng is None:
        raise ValueError(f"{strategy.kind} ordering needs an rng")
    if strategy.kind == "shuffled":
        return rng.permutation(n).astype(np.intp)
    return rng.integers(0, n, size=n).astype(np.intp)  # single_step_random


def format_permutation(sigma) -> str:
    """Serialize as comma-separated 1-based indices, e.g. '3,1,2'."""
    sigma = check_permutation(sigma)
    return ",".join(str(int(i) + 1) for i in sigma)


def parse_permutation(text: str, n: int | None = None) -> np.ndarray:
    """Parse '3,1,2' (1-based) into the 0-based permutation array."""
    try:
        sigma = np.array([int(tok) - 1 for tok in text.split(",")], dtype=np.intp)
    except ValueError as exc:
        raise ValueError(f"bad permutation string {text!r}") from exc
    sigma = check_permutation(sigma)
    if n is not None and len(sigma) != n:
        raise ValueError(f"permutation has length {len(sigma)}, expected {n}")
    return sigma
