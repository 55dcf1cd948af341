"""Reordering-average analysis and convergence-rate bounds.

Centerpieces:

* the average of L L* over all n! simultaneous row/column reorderings of a
  Hermitian B (exhaustive oracle, closed form, Monte Carlo estimator),
* spectral-norm statistics of the triangular truncation ||L_sigma|| across
  permutations (exhaustive search, local-search heuristic, Monte Carlo),
* evaluation of the per-sweep contraction bounds for the cyclic, shuffled,
  preshuffled, and single-step-random iterations,
* the exact expected one-sweep contraction factor, measured from the
  averaged operator itself.

Note on the closed form: the definitional average over permutations equals
(1/3) H^2 + (1/6) diag(H^2) with H = B - D (verified against the exhaustive
oracle). A tempting alternative, (1/n) K o H^2 with K the min-index matrix,
arises from counting positions of the *target* indices instead of positions
within the drawn ordering; it disagrees with the oracle already at n = 2
and is kept as a separate, clearly labeled operation so reports can show
the discrepancy.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    eigen_hermitian,
    hadamard,
    has_unit_diagonal,
    min_index_matrix,
    permute_conjugate,
    RANK_TOLERANCE,
    spectral_norm,
    spectral_summary,
    strict_lower,
)

# Largest n for which all n! permutations are enumerated (8! = 40320).
EXHAUSTIVE_LIMIT = 8

_CHUNK = 5040  # enumeration batch size, keeps peak memory modest

# Best currently known constants for the reordered-truncation existence
# bounds: ||L_sigma|| <= C1 ||B|| for some sigma when B is PSD with unit
# diagonal, and <= C2 ||B|| for general Hermitian B. Both come from
# quantitative paving-partition estimates and are considered pessimistic.
C1_DEFAULT = 32.42
C2_DEFAULT = 2907.0


def _square_hermitian_input(B):
    B = np.asarray(B)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError("square matrix expected")
    return B


def _iter_perm_chunks(n):
    """Yield (chunk, total) arrays of permutations in lexicographic order."""
    total = math.factorial(n)
    it = itertools.permutations(range(n))
    while True:
        chunk = list(itertools.islice(it, _CHUNK))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.intp), total


def _lower_gram_terms(B, perms):
    """Stack of P* L_s L_s* P over the given permutations (original indexing)."""
    Bs = B[perms[:, :, None], perms[:, None, :]]
    Ls = np.tril(Bs, -1)
    T = Ls @ np.conj(np.transpose(Ls, (0, 2, 1)))
    inv = np.argsort(perms, axis=1)
    T = np.take_along_axis(T, inv[:, :, None], axis=1)
    T = np.take_along_axis(T, inv[:, None, :], axis=2)
    return T


def expected_lower_gram_bruteforce(B) -> np.ndarray:
    """Exact average of P* L_s L_s* P over all n! reorderings (n <= 8)."""
    B = _square_hermitian_input(B)
    n = B.shape[0]
    if n > EXHAUSTIVE_LIMIT:
        raise ValueError(f"n = {n} too large for exhaustive averaging; use montecarlo")
    acc = np.zeros((n, n), dtype=np.complex128 if np.iscomplexobj(B) else np.float64)
    total = math.factorial(n)
    for perms, _ in _iter_perm_chunks(n):
        acc += _lower_gram_terms(B, perms).sum(axis=0)
    return acc / total


def expected_lower_gram_closed(B) -> np.ndarray:
    """Closed form of the reordering average: (1/3) H^2 + (1/6) diag(H^2).

    H = B - D is the off-diagonal part. Entry (s, t) of the average is
    sum_l H[s, l] H[l, t] times the probability that l precedes both s and
    t in a uniform ordering: 1/2 for s = t and 1/3 for s != t (terms with
    l in {s, t} vanish because diag(H) = 0). Agrees with the exhaustive
    oracle to rounding.
    """
    B = _square_hermitian_input(B)
    H = B - np.diag(np.diag(B))
    H2 = H @ H
    out = H2 / 3.0
    idx = np.diag_indices_from(out)
    out[idx] += np.diag(H2) / 6.0
    return out


def expected_lower_gram_weighted(B) -> np.ndarray:
    """Alternative weighted form (1/n) K o H^2 with K the min-index matrix.

    Disagrees with the definitional average (see module docstring): at
    n = 2 the oracle gives diag(0.125, 0.125) for off-diagonal 0.5 while
    this form gives diag(0, 0.125). Provided for comparison reports only.
    """
    B = _square_hermitian_input(B)
    n = B.shape[0]
    H = B - np.diag(np.diag(B))
    return hadamard(min_index_matrix(n), H @ H) / n


def expected_lower_gram_montecarlo(B, trials: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Sampled reordering average over `trials` uniform permutations.

    Returns (mean, standard_error) where the per-entry standard error is
    sample_std / sqrt(trials).
    """
    B = _square_hermitian_input(B)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = B.shape[0]
    dtype = np.complex128 if np.iscomplexobj(B) else np.float64
    acc = np.zeros((n, n), dtype=dtype)
    acc_sq = np.zeros((n, n))
    done = 0
    while done < trials:
        k = min(_CHUNK, trials - done)
        perms = rng.permuted(np.tile(np.arange(n), (k, 1)), axis=1).astype(np.intp)
        T = _lower_gram_terms(B, perms)
        acc += T.sum(axis=0)
        acc_sq += (np.abs(T) ** 2).sum(axis=0)
        done += k
    mean = acc / trials
    var = np.maximum(acc_sq / trials - np.abs(mean) ** 2, 0.0)
    return mean, np.sqrt(var / trials)


@dataclass(frozen=True)
class LowerGramReport:
    """Spectral-norm checks of the averaged operator against ||B||^2."""

    norm_avg: float
    norm_b: float
    norm_h: float
    psd_unit_diagonal: bool
    general_ok: bool          # norm_avg <= 4 ||B||^2
    psd_strict_ok: bool | None    # norm_avg < ||B||^2 (PSD unit-diagonal only)
    h_general_ok: bool        # ||H|| <= 2 ||B||
    h_psd_ok: bool | None     # ||H|| <= max(||B|| - 1, 1) <= ||B||


def _is_psd_unit_diagonal(B, tol=RANK_TOLERANCE):
    if not has_unit_diagonal(B):
        return False
    w, _ = eigen_hermitian(B)
    lambda1 = float(w[0])
    return lambda1 > 0 and float(w[-1]) >= -tol * lambda1


def check_lower_gram_bounds(B) -> LowerGramReport:
    """Evaluate norm bounds for the reordering average of L L*.

    Always checks ||E|| <= 4 ||B||^2 and ||H|| <= 2 ||B||; for PSD B with
    unit diagonal additionally the strict bound ||E|| < ||B||^2 and
    ||H|| <= max(||B|| - 1, 1).
    """
    B = _square_hermitian_input(B)
    norm_b = spectral_norm(B)
    norm_avg = spectral_norm(expected_lower_gram_closed(B))
    norm_h = spectral_norm(B - np.diag(np.diag(B)))
    slack = 1e-12 * max(norm_b**2, 1.0)
    psd_unit = _is_psd_unit_diagonal(B)
    psd_strict = None
    h_psd = None
    if psd_unit:
        psd_strict = bool(norm_avg < norm_b**2 - 1e-10 * norm_b**2) if norm_b > 0 else True
        h_psd = bool(norm_h <= max(norm_b - 1.0, 1.0) + slack)
    return LowerGramReport(
        norm_avg=norm_avg,
        norm_b=norm_b,
        norm_h=norm_h,
        psd_unit_diagonal=psd_unit,
        general_ok=bool(norm_avg <= 4.0 * norm_b**2 + slack),
        psd_strict_ok=psd_strict,
        h_general_ok=bool(norm_h <= 2.0 * norm_b + slack),
        h_psd_ok=h_psd,
    )


def truncation_ratio(B, sigma) -> float:
    """||L_sigma|| / ||B||: relative norm of the reordered lower truncation."""
    B = _square_hermitian_input(B)
    norm_b = spectral_norm(B)
    if norm_b == 0:
        raise ValueError("zero matrix has no truncation ratio")
    return spectral_norm(strict_lower(permute_conjugate(B, sigma))) / norm_b


@dataclass(frozen=True)
class TruncationStats:
    """Statistics of ||L_sigma|| / ||B|| over permutations.

    For the exhaustive method min/mean/max run over all n! permutations;
    for the heuristic, min is the best ordering found by local search and
    mean/max are Monte Carlo statistics over the uniform random starting
    permutations. The heuristic minimum is an upper bound on the true one.
    """

    ratio_identity: float
    min_ratio: float
    argmin_sigma: np.ndarray
    mean_ratio: float
    max_ratio: float
    method: str
    samples: int


def _batched_truncation_norms(B, perms):
    Bs = B[perms[:, :, None], perms[:, None, :]]
    Ls = np.tril(Bs, -1)
    return np.linalg.svd(Ls, compute_uv=False)[:, 0]


def min_truncation_exhaustive(B) -> TruncationStats:
    """Exact min/mean/max of the truncation ratio over all n! orderings (n <= 8)."""
    B = _square_hermitian_input(B)
    n = B.shape[0]
    if n > EXHAUSTIVE_LIMIT:
        raise ValueError(f"n = {n} too large for exhaustive search; use heuristic")
    norm_b = spectral_norm(B)
    if norm_b == 0:
        raise ValueError("zero matrix has no truncation ratio")
    best = np.inf
    best_sigma = None
    total_sum = 0.0
    worst = 0.0
    identity_ratio = None
    count = 0
    for perms, total in _iter_perm_chunks(n):
        norms = _batched_truncation_norms(B, perms)
        if count == 0:
            identity_ratio = float(norms[0]) / norm_b  # lexicographic first = identity
        i = int(np.argmin(norms))
        if norms[i] < best:
            best = float(norms[i])
            best_sigma = perms[i].copy()
        worst = max(worst, float(norms.max()))
        total_sum += float(norms.sum())
        count += len(perms)
    return TruncationStats(
        ratio_identity=identity_ratio,
        min_ratio=best / norm_b,
        argmin_sigma=best_sigma,
        mean_ratio=total_sum / count / norm_b,
        max_ratio=worst / norm_b,
        method="exhaustive",
        samples=count,
    )


def min_truncation_heuristic(B, restarts: int, rng) -> TruncationStats:
    """Adjacent-transposition steepest descent from random starts.

    From each uniformly drawn starting permutation, repeatedly applies the
    best norm-decreasing swap of neighboring positions until none improves.
    Deterministic given the rng seed. The result is an upper bound on the
    exhaustive minimum.
    """
    B = _square_hermitian_input(B)
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    n = B.shape[0]
    norm_b = spectral_norm(B)
    if norm_b == 0:
        raise ValueError("zero matrix has no truncation ratio")

    def lower_norm(sig):
        return spectral_norm(np.tril(B[np.ix_(sig, sig)], -1))

    best = np.inf
    best_sigma = None
    start_norms = []
    for _ in range(restarts):
        sigma = rng.permutation(n).astype(np.intp)
        cur = lower_norm(sigma)
        start_norms.append(cur)
        improved = True
        while improved:
            improved = False
            cand_norm = cur
            cand_k = -1
            for k in range(n - 1):
                sigma[k], sigma[k + 1] = sigma[k + 1], sigma[k]
                v = lower_norm(sigma)
                sigma[k], sigma[k + 1] = sigma[k + 1], sigma[k]
                if v < cand_norm:
                    cand_norm = v
                    cand_k = k
            if cand_k >= 0:
                sigma[cand_k], sigma[cand_k + 1] = sigma[cand_k + 1], sigma[cand_k]
                cur = cand_norm
                improved = True
        if cur < best:
            best = cur
            best_sigma = sigma.copy()
    start_ratios = np.array(start_norms) / norm_b
    return TruncationStats(
        ratio_identity=spectral_norm(strict_lower(B)) / norm_b,
        min_ratio=best / norm_b,
        argmin_sigma=best_sigma,
        mean_ratio=float(start_ratios.mean()),
        max_ratio=float(start_ratios.max()),
        method="heuristic",
        samples=restarts,
    )


def expected_truncation_norm(B, trials: int, rng) -> tuple[float, float]:
    """Monte Carlo estimate of E[||L_sigma||] / ||B|| over uniform orderings.

    Returns (estimate, standard_error). Empirical data only; no closed form
    or proven bound for this average is implemented.
    """
    B = _square_hermitian_input(B)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = B.shape[0]
    norm_b = spectral_norm(B)
    if norm_b == 0:
        raise ValueError("zero matrix has no truncation ratio")
    vals = np.empty(trials)
    done = 0
    while done < trials:
        k = min(_CHUNK, trials - done)
        perms = rng.permuted(np.tile(np.arange(n), (k, 1)), axis=1).astype(np.intp)
        vals[done:done + k] = _batched_truncation_norms(B, perms)
        done += k
    ratios = vals / norm_b
    se = float(ratios.std(ddof=0) / np.sqrt(trials))
    return float(ratios.mean()), se


@dataclass(frozen=True)
class RateBounds:
    """Per-sweep squared-error contraction bounds for one (B, omega).

    Every rate is an upper bound on the factor by which the squared energy
    error shrinks per sweep (in expectation, for the randomized variants).
    ``rate_cyclic_lowrank`` is only evaluated when the caller supplies the
    constant c0 and rank >= 2.
    """

    omega: float
    n: int
    lambda1: float
    kappa_bar: float
    rank: int
    rate_cyclic: float
    rate_cyclic_lowrank: float | None
    rate_single_step_sweep: float
    rate_shuffled: float
    rate_preshuffled: float
    c0: float | None
    c1: float
    c2: float = C2_DEFAULT  # general-Hermitian existence constant, informational


def _check_rate(name, value):
    if not 0.0 <= value < 1.0:
        raise ValueError(f"{name} = {value} falls outside [0, 1); "
                         "check the supplied constants")
    return float(value)


def evaluate_rate_bounds(B, omega: float, c0: float | None = None,
                         c1: float = C1_DEFAULT) -> RateBounds:
    """Evaluate all per-sweep contraction bounds for PSD unit-diagonal B.

    rate_cyclic        : 1 - (2-w) w L1 / ((1 + (1/2) floor(log2 2n) w L1)^2 kbar)
    rate_cyclic_lowrank: same with (1/2) floor(log2 2n) replaced by c0 ln(rank)
    rate_single_step   : (1 - (2-w) w L1 / (n kbar))^n  (one sweep = n picks)
    rate_shuffled      : 1 - w (2-w) L1 / ((1 + w L1)^2 kbar)
    rate_preshuffled   : 1 - w (2-w) L1 / ((1 + c1 w L1)^2 kbar)
    """
    if not 0.0 < omega < 2.0:
        raise ValueError("omega must lie strictly in (0, 2)")
    B = _square_hermitian_input(B)
    if not has_unit_diagonal(B):
        raise ValueError("bounds assume unit diagonal; call rescale_unit_diagonal first")
    s = spectral_summary(B)
    lam = s.lambda1
    kap = s.kappa_bar
    n = B.shape[0]
    gain = (2.0 - omega) * omega * lam

    half_log = 0.5 * math.floor(math.log2(2 * n))
    rate_cyclic = _check_rate(
        "rate_cyclic", 1.0 - gain / ((1.0 + half_log * omega * lam) ** 2 * kap))

    lowrank = None
    if c0 is not None:
        if s.rank < 2:
            raise ValueError("low-rank variant needs rank >= 2")
        if c0 <= 0:
            raise ValueError("c0 must be positive")
        lowrank = _check_rate(
            "rate_cyclic_lowrank",
            1.0 - gain / ((1.0 + c0 * math.log(s.rank) * omega * lam) ** 2 * kap))

    rate_single = _check_rate(
        "rate_single_step_sweep", (1.0 - gain / (n * kap)) ** n)
    rate_shuffled = _check_rate(
        "rate_shuffled", 1.0 - gain / ((1.0 + omega * lam) ** 2 * kap))
    if c1 <= 0:
        raise ValueError("c1 must be positive")
    rate_preshuffled = _check_rate(
        "rate_preshuffled", 1.0 - gain / ((1.0 + c1 * omega * lam) ** 2 * kap))

    return RateBounds(
        omega=omega,
        n=n,
        lambda1=lam,
        kappa_bar=kap,
        rank=s.rank,
        rate_cyclic=rate_cyclic,
        rate_cyclic_lowrank=lowrank,
        rate_single_step_sweep=rate_single,
        rate_shuffled=rate_shuffled,
        rate_preshuffled=rate_preshuffled,
        c0=c0,
        c1=c1,
    )


def _contraction_operator(B, omega, perms):
    """Average of Q_s* B Q_s over the given permutations (original indexing)."""
    n = B.shape[0]
    dtype = np.complex128 if np.iscomplexobj(B) else np.float64
    eye = np.eye(n, dtype=dtype)
    Bs = B[perms[:, :, None], perms[:, None, :]]
    Ms = eye + omega * np.tril(Bs, -1)
    X = np.linalg.solve(Ms, B[perms])          # (I + w L_s)^{-1} P B
    inv = np.argsort(perms, axis=1)
    X = np.take_along_axis(X, inv[:, :, None], axis=1)
    Q = eye - omega * X
    return np.matmul(np.conj(np.transpose(Q, (0, 2, 1))), np.matmul(B, Q)).sum(axis=0)


def expected_contraction(B, omega: float, trials: int = 2000, rng=None) -> float:
    """Tight expected one-sweep contraction factor of the shuffled iteration.

    Averages Q_s* B Q_s over permutations (all n! of them when n <= 8, else
    `trials` Monte Carlo samples) and returns the largest generalized
    Rayleigh quotient <M y, y> / <B y, y> over y outside the kernel of B.
    """
    B = _square_hermitian_input(B)
    if not 0.0 < omega < 2.0:
        raise ValueError("omega must lie strictly in (0, 2)")
    if not has_unit_diagonal(B):
        # also rejects the zero matrix, which has no contraction factor
        raise ValueError("unit diagonal required; call rescale_unit_diagonal first")
    n = B.shape[0]

    acc = np.zeros((n, n), dtype=np.complex128 if np.iscomplexobj(B) else np.float64)
    count = 0
    if n <= EXHAUSTIVE_LIMIT:
        for perms, _ in _iter_perm_chunks(n):
            acc += _contraction_operator(B, omega, perms)
            count += len(perms)
    else:
        if trials < 1:
            raise ValueError("trials must be >= 1")
        if rng is None:
            raise ValueError("Monte Carlo mode needs an rng")
        while count < trials:
            k = min(_CHUNK, trials - count)
            perms = rng.permuted(np.tile(np.arange(n), (k, 1)), axis=1).astype(np.intp)
            acc += _contraction_operator(B, omega, perms)
            count += k
    M = acc / count
    M = (M + M.conj().T) / 2

    w, V = eigen_hermitian(B)
    lambda1 = float(w[0])
    r = int(np.sum(w > RANK_TOLERANCE * lambda1))
    W = V[:, :r] / np.sqrt(w[:r])
    Mr = W.conj().T @ M @ W
    Mr = (Mr + Mr.conj().T) / 2
    return float(np.linalg.eigvalsh(Mr)[-1])
