"""Closed-form moments of Haar-random-state purities and their two-copy
Fourier law, plus the Monte Carlo validators that confirm them.

All formulas are exact at finite n (no asymptotic simplification), which is
what makes tight z-tests possible at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import gf2, wht
from .purity import entanglement_feature
from .statevec import SetPartition, haar_random_state


def mean_purity(n: int, weight: int) -> float:
    """Haar-average purity across any cut of the given weight."""
    if not 0 <= weight <= n:
        raise ValueError("weight out of range")
    return (2.0**-weight + 2.0 ** (weight - n)) / (1.0 + 2.0**-n)


def purity_covariance(n: int, x: int, x2: int) -> float:
    """Haar covariance of the purities across two cut masks."""
    if x >> n or x2 >> n or x < 0 or x2 < 0:
        raise ValueError("mask length mismatch")
    d = gf2.weight(x ^ x2)
    big = 2.0**n
    term1 = 2.0 * (2.0**d + 2.0 ** (n - d)) / ((big + 1) * (big + 2) * (big + 3))
    px = mean_purity(n, gf2.weight(x))
    px2 = mean_purity(n, gf2.weight(x2))
    term2 = 2.0 / ((big + 2) * (big + 3)) * px * px2
    return term1 - term2


def fourier_mean(n: int, y: int) -> float:
    """Haar mean of the two-copy Fourier probability at outcome y.

    Zero at odd weight; otherwise 2 * 3^(n-|y|) / (2^n (2^n + 1)).
    """
    w = gf2.weight(y)
    if w % 2:
        return 0.0
    return 2.0 * 3.0 ** (n - w) / (2.0**n * (2.0**n + 1.0))


def fourier_variance(n: int, y: int) -> float:
    """Haar variance of the two-copy Fourier probability at outcome y.

    The normalization is pinned by assembling Var[2^-n sum_x (-1)^(x.y) p_x]
    from the purity covariance; the test suite confirms it by direct Monte
    Carlo at n = 2..4.
    """
    w = gf2.weight(y)
    if w % 2:
        return 0.0
    big = 2.0**n
    num = 2.0 ** (2 - 2 * n) * 3.0 ** (n - 2 * w) * (big * (big + 1) * 3.0**w - 2.0 * 3.0**n)
    den = (big + 1) ** 2 * (big + 2) * (big + 3)
    return num / den


def q_p(n: int, p: int) -> float:
    """Probability weight of a parity-sum of p+... Bernoulli(1/4) rows landing
    back on the skewed law: 4 * ((2 + 2^-p) / 4)^n."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    return 4.0 * ((2.0 + 2.0**-p) / 4.0) ** n


def pi_lower_bound(n: int, k: int) -> float:
    """Lower bound on the probability that k draws from the skewed two-copy law
    are linearly independent: 1 - sum_{p=0}^{k-1} C(k, p+1) q_p, clamped to [0, 1].

    The bound drops the multiplicative 1 + O(2^(-n/2)) correction and is loose
    at small n (it can clamp to 0 well before the empirical value drops)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    total = sum(math.comb(k, p + 1) * q_p(n, p) for p in range(k))
    return min(1.0, max(0.0, 1.0 - total))


def _two_part_masks(cut: SetPartition) -> tuple[int, int]:
    if cut.num_parts != 2:
        raise ValueError("a two-part cut is required")
    m1, m2 = cut.indicator_masks()
    return m1, m2


def bernoulli_rejection_sampler(n: int, cut: SetPartition,
                                rng: np.random.Generator) -> int:
    """Draw bits i.i.d. Bernoulli(1/4); accept when both cut sides have even
    weight. The accepted law is proportional to 3^-|y| inside the cut subspace."""
    m1, m2 = _two_part_masks(cut)
    if cut.num_qubits != n:
        raise ValueError("cut does not match n")
    while True:
        bits = rng.random(n) < 0.25
        y = 0
        for i in range(n):
            if bits[i]:
                y |= 1 << i
        if gf2.weight(y & m1) % 2 == 0 and gf2.weight(y & m2) % 2 == 0:
            return y


def _rejection_batch(n: int, cut: SetPartition, rng: np.random.Generator,
                     count: int) -> np.ndarray:
    """Vectorized batch of accepted draws (same law as the scalar sampler)."""
    m1, m2 = _two_part_masks(cut)
    powers = 1 << np.arange(n, dtype=np.int64)
    side1 = (m1 >> np.arange(n)) & 1
    side2 = (m2 >> np.arange(n)) & 1
    out = np.empty(count, dtype=np.int64)
    have = 0
    while have < count:
        chunk = max(1024, int((count - have) * 4.4))
        bits = rng.random((chunk, n)) < 0.25
        ok = ((bits @ side1) % 2 == 0) & ((bits @ side2) % 2 == 0)
        ys = (bits[ok] * powers).sum(axis=1)
        take = min(count - have, ys.size)
        out[have:have + take] = ys[:take]
        have += take
    return out


def enumerated_rejection_law(n: int, cut: SetPartition) -> np.ndarray:
    """Exact probability vector of the rejection sampler over all 2^n outcomes."""
    m1, m2 = _two_part_masks(cut)
    probs = np.zeros(1 << n)
    for y in range(1 << n):
        if gf2.weight(y & m1) % 2 == 0 and gf2.weight(y & m2) % 2 == 0:
            probs[y] = 3.0 ** (-gf2.weight(y))
    return probs / probs.sum()


def wilson_interval(successes: int, trials: int, z: float = 1.0) -> tuple[float, float, float]:
    """(estimate, lo, hi) by the Wilson score interval at z standard normal units."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials**2)) / denom
    return phat, center - half, center + half


@dataclass
class PiEstimate:
    n: int
    k: int
    trials: int
    successes: int
    pi_hat: float
    wilson_lo: float
    wilson_hi: float
    z: float
    analytic_lower_bound: float

    def to_dict(self) -> dict[str, Any]:
        return dict(self.__dict__)


def monte_carlo_pi(n: int, k: int, trials: int, cut: SetPartition,
                   rng: np.random.Generator, z: float = 1.0) -> PiEstimate:
    """Fraction of trials in which k sampler draws have full GF(2) rank."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    draws = _rejection_batch(n, cut, rng, trials * k)
    successes = 0
    for trial in range(trials):
        acc = gf2.RankAccumulator()
        for j in range(k):
            acc.add(int(draws[trial * k + j]))
        if acc.rank == k:
            successes += 1
    pi_hat, lo, hi = wilson_interval(successes, trials, z)
    return PiEstimate(n, k, trials, successes, pi_hat, lo, hi, z,
                      pi_lower_bound(n, k))


@dataclass
class MomentReport:
    """Empirical vs. closed-form Haar moments from one Monte Carlo run."""

    n: int
    trials: int
    degenerate: bool
    per_weight_purity: list[dict[str, Any]] = field(default_factory=list)
    per_weight_fourier: list[dict[str, Any]] = field(default_factory=list)
    per_y_fourier: list[dict[str, Any]] = field(default_factory=list)
    max_relative_deviation: float = float("nan")
    mean_relative_deviation: float = float("nan")

    def z_scores(self) -> list[float]:
        rows = self.per_weight_purity + self.per_weight_fourier + self.per_y_fourier
        return [r["z"] for r in rows if r["z"] is not None]

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "trials": self.trials,
            "degenerate": self.degenerate,
            "per_weight_purity": self.per_weight_purity,
            "per_weight_fourier": self.per_weight_fourier,
            "per_y_fourier": self.per_y_fourier,
            "max_relative_deviation": self.max_relative_deviation,
            "mean_relative_deviation": self.mean_relative_deviation,
        }


def _z_row(emp_mean: float, emp_std: float, closed: float, trials: int) -> float | None:
    if trials < 2 or emp_std == 0.0:
        return None
    return (emp_mean - closed) / (emp_std / math.sqrt(trials))


def _batched_haar(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((count, 1 << n)) + 1j * rng.standard_normal((count, 1 << n))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _batched_purity(amps: np.ndarray, mask: int, n: int) -> np.ndarray:
    """Purity across `mask` for a (batch, 2^n) block of amplitude rows."""
    from .statevec import full_mask, mask_qubits

    if mask == 0 or mask == full_mask(n):
        return np.ones(amps.shape[0])
    if 2 * mask.bit_count() > n:
        mask ^= full_mask(n)
    sel = mask_qubits(mask)
    rest = [q for q in range(n) if q not in sel]
    batch = amps.shape[0]
    tensor = amps.reshape((batch,) + (2,) * n)
    axes = [0] + [1 + n - 1 - q for q in sel] + [1 + n - 1 - q for q in rest]
    m = tensor.transpose(axes).reshape(batch, 1 << len(sel), 1 << len(rest))
    gram = np.einsum("bij,bkj->bik", m, m.conj())
    return np.einsum("bik,bik->b", gram, gram.conj()).real


def monte_carlo_purity_covariance(
    n: int, pairs: list[tuple[int, int]], trials: int,
    rng: np.random.Generator, blocks: int = 50,
) -> list[dict[str, Any]]:
    """Empirical purity covariances vs. the closed form, one row per mask pair.

    The trials are split into i.i.d. blocks; each block yields one unbiased
    covariance estimate, and the z-score is taken over the block means.
    """
    if trials < 2 * blocks:
        raise ValueError("need at least two trials per block")
    per_block = trials // blocks
    masks = sorted({m for pair in pairs for m in pair})
    block_covs = {pair: [] for pair in pairs}
    for _ in range(blocks):
        amps = _batched_haar(n, per_block, rng)
        purities = {m: _batched_purity(amps, m, n) for m in masks}
        for a, b in pairs:
            pa, pb = purities[a], purities[b]
            cov = float(((pa - pa.mean()) * (pb - pb.mean())).sum() / (per_block - 1))
            block_covs[(a, b)].append(cov)
    rows = []
    for a, b in pairs:
        vals = np.array(block_covs[(a, b)])
        closed = purity_covariance(n, a, b)
        se = float(vals.std(ddof=1)) / math.sqrt(blocks)
        rows.append({
            "x": a, "x2": b, "closed_cov": closed,
            "emp_cov": float(vals.mean()), "se": se,
            "z": (float(vals.mean()) - closed) / se if se > 0 else None,
            "trials": per_block * blocks,
        })
    return rows


def monte_carlo_haar_moments(n: int, trials: int,
                             rng: np.random.Generator) -> MomentReport:
    """Sample Haar states; compare per-weight purity means, per-outcome
    two-copy Fourier means and the self-averaging envelope against the
    closed forms. A single-trial run is flagged degenerate (no z-scores)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    size = 1 << n
    weights = np.array([gf2.weight(x) for x in range(size)])
    purity_by_weight = np.zeros((trials, n + 1))
    fourier_probs = np.zeros((trials, size))
    for trial in range(trials):
        state = haar_random_state(n, rng)
        feat = entanglement_feature(state)
        for w in range(n + 1):
            purity_by_weight[trial, w] = feat.values[weights == w].mean()
        fourier_probs[trial] = wht.walsh_hadamard(feat.values) / size

    report = MomentReport(n=n, trials=trials, degenerate=trials < 2)
    for w in range(n + 1):
        emp = purity_by_weight[:, w]
        closed = mean_purity(n, w)
        report.per_weight_purity.append({
            "weight": w, "mask_count": int((weights == w).sum()),
            "closed_mean": closed, "emp_mean": float(emp.mean()),
            "emp_std": float(emp.std(ddof=1)) if trials > 1 else 0.0,
            "z": _z_row(float(emp.mean()), float(emp.std(ddof=1)) if trials > 1 else 0.0,
                        closed, trials),
        })
    for w in range(n + 1):
        sel = weights == w
        emp = fourier_probs[:, sel].mean(axis=1)
        closed = fourier_mean(n, (1 << w) - 1)
        report.per_weight_fourier.append({
            "weight": w, "outcome_count": int(sel.sum()),
            "closed_mean": closed, "emp_mean": float(emp.mean()),
            "emp_std": float(emp.std(ddof=1)) if trials > 1 else 0.0,
            "z": _z_row(float(emp.mean()), float(emp.std(ddof=1)) if trials > 1 else 0.0,
                        closed, trials),
        })
    rel_devs = []
    for y in range(size):
        emp = fourier_probs[:, y]
        closed = fourier_mean(n, y)
        std = float(emp.std(ddof=1)) if trials > 1 else 0.0
        row = {
            "y": y, "weight": int(weights[y]), "closed_mean": closed,
            "emp_mean": float(emp.mean()), "emp_std": std,
            "closed_var": fourier_variance(n, y),
            "z": _z_row(float(emp.mean()), std, closed, trials) if closed > 0 else None,
        }
        if closed > 0.0:
            dev = np.abs(emp / closed - 1.0)
            row["max_rel_dev"] = float(dev.max())
            rel_devs.append(dev)
        report.per_y_fourier.append(row)
    if rel_devs:
        stacked = np.concatenate(rel_devs)
        report.max_relative_deviation = float(stacked.max())
        report.mean_relative_deviation = float(stacked.mean())
    return report
