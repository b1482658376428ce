"""Fast Walsh-Hadamard transform and the exact Fourier-sampling output laws.

The measurement law of the sampling circuit depends on the input state only
through its amplified purities: the outcome probability at y is the Walsh
transform (at y) of the entanglement feature raised entrywise to the power
t/2, normalized by 2^-n. Building that vector directly makes n=12, t=200
runs cheap where explicit multi-copy circuits would need 2^(n(1+t))
amplitudes; the `circuit` module cross-checks the equivalence at tiny sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gf2
from .purity import EntanglementFeature

NEGATIVE_MASS_TOL = 1e-9


class NumericalIntegrityError(RuntimeError):
    """Distribution negativity beyond tolerance: signals a purity bug, not physics."""


@dataclass(frozen=True)
class FourierDistribution:
    """Probability vector over Z2^n outcomes of Fourier sampling with t copies."""

    num_qubits: int
    probs: np.ndarray
    copies_t: int
    negative_mass: float = 0.0  # total pre-clamp negative mass

    def __post_init__(self) -> None:
        p = np.ascontiguousarray(self.probs, dtype=np.float64)
        if p.shape != (1 << self.num_qubits,):
            raise ValueError("probs length must be 2^n")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)


def walsh_hadamard(vec: np.ndarray) -> np.ndarray:
    """Unnormalized transform out[y] = sum_x (-1)^(x.y) vec[x], in O(n 2^n)."""
    a = np.array(vec, dtype=np.float64, copy=True)
    size = a.size
    if a.ndim != 1 or size == 0 or size & (size - 1):
        raise ValueError("input length must be a power of two")
    h = 1
    while h < size:
        a = a.reshape(size // (2 * h), 2, h)
        lo = a[:, 0, :].copy()
        hi = a[:, 1, :].copy()
        a[:, 0, :] = lo + hi
        a[:, 1, :] = lo - hi
        a = a.reshape(size)
        h *= 2
    return a


def _finalize(raw: np.ndarray, n: int, t: int) -> FourierDistribution:
    neg_mass = float(-raw[raw < 0].sum())
    if neg_mass > NEGATIVE_MASS_TOL:
        raise NumericalIntegrityError(
            f"negative probability mass {neg_mass:.3e} exceeds {NEGATIVE_MASS_TOL:.0e}"
        )
    total = float(raw.sum())
    if abs(total - 1.0) > NEGATIVE_MASS_TOL:
        raise NumericalIntegrityError(f"probabilities sum to {total!r} before clamping")
    probs = np.clip(raw, 0.0, None)
    probs /= probs.sum()
    return FourierDistribution(n, probs, t, neg_mass)


def statehsp_distribution(feature: EntanglementFeature, t: int) -> FourierDistribution:
    """Exact outcome law of nonadaptive Fourier sampling on t state copies.

    probs[y] = 2^-n sum_x (-1)^(x.y) values[x]^(t/2). Tiny negative entries
    from float cancellation are clamped and the vector renormalized; negative
    mass above NEGATIVE_MASS_TOL raises.
    """
    if t < 2 or t % 2:
        raise ValueError(f"t must be an even integer >= 2, got {t}")
    n = feature.num_qubits
    amplified = feature.values ** (t // 2)
    raw = walsh_hadamard(amplified) / (1 << n)
    return _finalize(raw, n, t)


def adaptive_distribution(feature: EntanglementFeature, t: int,
                          sigma: gf2.GF2Subspace) -> FourierDistribution:
    """Round law when the group register starts in a superposition over `sigma`.

    probs[y] = 2^-n sum_{z in sigma} (-1)^(y.z) values[z]^(t/2). Implemented by
    zero-filling the amplified feature outside sigma and reusing the same
    transform path, so sigma = Z2^n reproduces statehsp_distribution
    bit-for-bit.
    """
    if t < 2 or t % 2:
        raise ValueError(f"t must be an even integer >= 2, got {t}")
    n = feature.num_qubits
    if sigma.ambient_dim != n:
        raise ValueError("sigma ambient dimension does not match the feature")
    masked = np.zeros(1 << n, dtype=np.float64)
    expo = t // 2
    for z in gf2.enumerate_subspace(sigma):
        masked[z] = feature.values[z] ** expo
    raw = walsh_hadamard(masked) / (1 << n)
    return _finalize(raw, n, t)


def sample(dist: FourierDistribution, rng: np.random.Generator, count: int) -> list[int]:
    """`count` i.i.d. outcome draws by inverse-CDF binary search; seeded-deterministic."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    cum = np.cumsum(dist.probs)
    cum[-1] = 1.0
    draws = np.searchsorted(cum, rng.random(count), side="right")
    return [int(d) for d in draws]


def total_variation(a: FourierDistribution, b: FourierDistribution) -> float:
    if a.num_qubits != b.num_qubits:
        raise ValueError("distributions live on different spaces")
    return float(0.5 * np.abs(a.probs - b.probs).sum())


def weight_histogram(dist: FourierDistribution) -> list[tuple[int, float]]:
    """Total probability by Hamming weight of the outcome."""
    n = dist.num_qubits
    acc = [0.0] * (n + 1)
    for y in range(1 << n):
        acc[gf2.weight(y)] += float(dist.probs[y])
    return list(enumerate(acc))
