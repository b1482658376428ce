"""SWAP-test and amplified product-test simulation for candidate-cut
verification, with exact copy accounting.

Tests are simulated as Bernoulli draws at their analytically exact acceptance
probabilities (1/2 + 1/2 * purity per test); collapsing a doubled register
would produce identical statistics at 4^n the cost. The doubled-register
projector computation lives in the test suite as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .purity import purity
from .statevec import PureState


@dataclass(frozen=True)
class VerificationOutcome:
    accepted: bool
    copies_used: int
    acceptance_prob_exact: float

    def __post_init__(self) -> None:
        if self.copies_used % 2:
            raise ValueError("copies_used must be even (tests consume pairs)")
        if not 0.0 <= self.acceptance_prob_exact <= 1.0:
            raise ValueError("acceptance probability out of [0, 1]")


def swap_test_accept_prob(state: PureState, mask: int) -> float:
    """Exact single-test acceptance probability: 1/2 + 1/2 * purity across the mask.

    Clamped to 1 from above: float error can push a purity a few ulp past 1.
    """
    return min(1.0, 0.5 + 0.5 * purity(state, mask))


def simulate_swap_test(state: PureState, mask: int, rng: np.random.Generator) -> VerificationOutcome:
    """One Bernoulli draw at the exact probability; consumes 2 copies."""
    p = swap_test_accept_prob(state, mask)
    return VerificationOutcome(bool(rng.random() < p), 2, p)


def amplified_product_test(state: PureState, mask: int, m: int,
                           rng: np.random.Generator) -> VerificationOutcome:
    """m independent tests on fresh pairs; accepts iff all accept (2m copies).

    m = 0 accepts vacuously. Exact acceptance is the single-test probability
    to the m-th power.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    p = swap_test_accept_prob(state, mask)
    accepted = bool(np.all(rng.random(m) < p)) if m else True
    return VerificationOutcome(accepted, 2 * m, p**m)


def repetitions_for_confidence(confidence: float, epsilon: float) -> int:
    """Smallest m with exp(-epsilon^2 m / 2) <= 1 - confidence."""
    if not 0.0 <= confidence < 1.0:
        raise ValueError("confidence must be in [0, 1)")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must be in (0, 1]")
    if confidence == 0.0:
        return 0
    return math.ceil(2.0 * math.log(1.0 / (1.0 - confidence)) / epsilon**2)


def verify_candidate_cut(state: PureState, mask: int, confidence: float,
                         rng: np.random.Generator,
                         epsilon: float | None = None) -> VerificationOutcome:
    """Amplified test sized so a cut with purity <= 1 - epsilon^2 slips through
    with probability at most 1 - confidence. Falls back to epsilon = 1/2 when
    no certificate is supplied."""
    eps = epsilon if epsilon is not None else 0.5
    m = repetitions_for_confidence(confidence, eps)
    return amplified_product_test(state, mask, m, rng)
