"""End-to-end cut recovery: nonadaptive Fourier sampling, adaptive subspace
sampling, and the two-copy route for Haar factors with six-candidate SWAP
disambiguation. Also the GF(2) post-processing shared by all three.

Sample draws are taken from the exact analytic outcome laws in `wht`; every
draw costs t state copies (rejected draws included) and every SWAP test
costs 2, so reports carry exact copy accounting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import gf2, swaptest, wht
from .purity import entanglement_feature
from .statevec import PlantedInstance, SetPartition, full_mask, mask_qubits

MODES = ("nonadaptive", "adaptive", "haar_t2")


@dataclass
class SolverConfig:
    """Knobs for a solve run.

    epsilon: promise parameter; None means "use the instance certificate".
    t / delta: fixed-t policy vs. choose-t-from-target-failure policy
    (exactly one may be set; adaptive mode defaults to the smallest even
    t >= 2/epsilon^2 when neither is given).
    """

    mode: str = "adaptive"
    epsilon: float | None = None
    t: int | None = None
    delta: float | None = None
    max_part: int | None = None  # largest part size the t policy must cover
    max_samples: int = 512
    min_samples: int = 0
    patience: int = 8
    confidence: float = 0.99
    max_batch_retries: int = 48  # desk-scale independence rates sit near 0.1
    haar_direct: bool = False  # experimental n-2 route without SWAP verification
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.epsilon is not None and not 0.0 < self.epsilon <= 1.0:
            raise ValueError("epsilon must be in (0, 1]")
        if self.delta is not None and not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")
        if self.t is not None and self.delta is not None:
            raise ValueError("set a fixed t or a delta target, not both")
        if self.t is not None and self.t < 2:
            raise ValueError("t must be >= 2")
        if not 0.0 <= self.confidence < 1.0:
            raise ValueError("confidence must be in [0, 1)")


@dataclass
class SolveReport:
    """Outcome and exact resource accounting of one solve run."""

    mode: str
    n: int
    t: int
    epsilon: float | None
    recovered: SetPartition | None
    samples: list[int]
    copies_consumed: int
    rounds: int
    rank_trace: list[int]
    draws: int
    swap_tests: int
    success: bool | None = None
    failure_reason: str | None = None
    accepted_samples: list[int] = field(default_factory=list)
    round_stats: list[dict[str, Any]] = field(default_factory=list)
    candidate_stats: list[dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode,
            "n": self.n,
            "t": self.t,
            "epsilon": self.epsilon,
            "recovered": None if self.recovered is None else self.recovered.as_lists(),
            "samples": self.samples,
            "copies_consumed": self.copies_consumed,
            "rounds": self.rounds,
            "rank_trace": self.rank_trace,
            "draws": self.draws,
            "swap_tests": self.swap_tests,
            "success": self.success,
            "failure_reason": self.failure_reason,
            "accepted_samples": self.accepted_samples,
            "round_stats": self.round_stats,
            "candidate_stats": self.candidate_stats,
        }


def even_at_least(x: float) -> int:
    """Smallest even integer >= max(x, 2)."""
    return max(2, 2 * math.ceil(x / 2.0))


def choose_t(epsilon: float, n: int, max_part: int, delta: float) -> int:
    """Smallest even t with 2^max_part (1 - epsilon^2)^(t/2) <= delta.

    This drives the per-factor spurious-cut contribution below delta when
    every factor of size <= max_part is epsilon-far from product. n is kept
    for validation only; the exponent is governed by the largest part.
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must be in (0, 1]")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    if not 1 <= max_part <= n:
        raise ValueError("max_part must be in [1, n]")
    base = 1.0 - epsilon**2
    if base <= 0.0:
        return 2
    need = (max_part * math.log(2.0) + math.log(1.0 / delta)) / -math.log(base)
    return 2 * max(1, math.ceil(need))


def partition_from_nullspace(ns: gf2.GF2Subspace, n: int) -> SetPartition:
    """Group qubits whose bits agree in every nullspace basis vector.

    Valid sample sets always put the all-ones vector in the nullspace (every
    sample has even total weight); its absence signals corrupted samples. The
    resulting partition's indicator span must reproduce the nullspace exactly.
    """
    if ns.ambient_dim != n:
        raise ValueError("nullspace ambient dimension does not match n")
    if not gf2.membership(ns, full_mask(n)):
        raise ValueError("all-ones vector missing from the nullspace: corrupted samples")
    groups: dict[tuple[int, ...], list[int]] = {}
    for q in range(n):
        sig = tuple((row >> q) & 1 for row in ns.basis)
        groups.setdefault(sig, []).append(q)
    parts = SetPartition.of(groups.values())
    if parts.num_parts != ns.dim or not all(
        gf2.membership(ns, m) for m in parts.indicator_masks()
    ):
        raise ValueError("partition indicator span does not reproduce the nullspace")
    return parts


def infer_num_parts(samples: list[int], n: int) -> int:
    """Estimated part count once the sample rank has plateaued: n - rank."""
    return n - gf2.rank(samples, n)


def _resolve_epsilon(cfg: SolverConfig, instance: PlantedInstance) -> float | None:
    if cfg.epsilon is not None:
        return cfg.epsilon
    return instance.epsilon_certified


def _resolve_t(cfg: SolverConfig, epsilon: float | None, n: int) -> int:
    if cfg.t is not None:
        return cfg.t + (cfg.t % 2)  # odd fixed requests round up
    if epsilon is None:
        raise ValueError("no epsilon available to derive t; set cfg.t or cfg.epsilon")
    if cfg.delta is not None:
        return choose_t(epsilon, n, cfg.max_part or n, cfg.delta)
    return even_at_least(2.0 / epsilon**2)


def _known_truth(instance: PlantedInstance) -> SetPartition | None:
    return instance.truth


def solve_nonadaptive(instance: PlantedInstance, cfg: SolverConfig,
                      rng: np.random.Generator) -> SolveReport:
    """Draw Fourier samples from the uniform-superposition law until the GF(2)
    rank has not moved for `patience` consecutive draws, then read the
    partition off the nullspace."""
    if cfg.mode != "nonadaptive":
        raise ValueError("config mode is not 'nonadaptive'")
    n = instance.num_qubits
    eps = _resolve_epsilon(cfg, instance)
    t = _resolve_t(cfg, eps, n)
    feature = entanglement_feature(instance.state)
    dist = wht.statehsp_distribution(feature, t)

    acc = gf2.RankAccumulator()
    samples: list[int] = []
    rank_trace: list[int] = []
    stale = 0
    plateaued = False
    while len(samples) < cfg.max_samples:
        y = wht.sample(dist, rng, 1)[0]
        samples.append(y)
        if acc.add(y):
            stale = 0
        else:
            stale += 1
        rank_trace.append(acc.rank)
        if stale >= cfg.patience and len(samples) >= cfg.min_samples:
            plateaued = True
            break

    report = SolveReport(
        mode=cfg.mode, n=n, t=t, epsilon=eps, recovered=None,
        samples=samples, copies_consumed=len(samples) * t,
        rounds=len(samples), rank_trace=rank_trace,
        draws=len(samples), swap_tests=0,
    )
    if not plateaued:
        report.failure_reason = "max_samples exhausted before rank plateau"
        report.success = False
        return report
    report.recovered = partition_from_nullspace(gf2.nullspace(samples, n), n)
    truth = _known_truth(instance)
    report.success = None if truth is None else report.recovered == truth
    return report


def solve_adaptive(instance: PlantedInstance, cfg: SolverConfig,
                   rng: np.random.Generator) -> SolveReport:
    """Per round, restart the group register on the subspace orthogonal to the
    accepted samples and draw until a sample outside their span appears.

    Rejected draws (zero or inside the span) still consume t copies. A round
    that exhausts its retry budget means no independent direction is being
    found: the rank has plateaued and the run stops.
    """
    if cfg.mode != "adaptive":
        raise ValueError("config mode is not 'adaptive'")
    n = instance.num_qubits
    eps = _resolve_epsilon(cfg, instance)
    if eps is None:
        raise ValueError("adaptive mode needs an epsilon promise (config or certificate)")
    t = _resolve_t(cfg, eps, n)
    feature = entanglement_feature(instance.state)

    acceptance_floor = 0.5 * (1.0 - (1.0 - eps**2) ** (t // 2))
    budget = max(cfg.patience, math.ceil(8.0 / max(acceptance_floor, 1e-9)))

    accepted: list[int] = []
    acc = gf2.RankAccumulator()
    samples: list[int] = []
    rank_trace: list[int] = []
    round_stats: list[dict[str, Any]] = []
    rounds = 0
    while rounds <= n:
        rounds += 1
        sigma = gf2.orthogonal_complement(gf2.GF2Subspace.from_rows(accepted, n))
        dist = wht.adaptive_distribution(feature, t, sigma)
        got = None
        attempts = 0
        for _ in range(budget):
            attempts += 1
            y = wht.sample(dist, rng, 1)[0]
            samples.append(y)
            if y != 0 and not acc.contains(y):
                got = y
                acc.add(y)
            rank_trace.append(acc.rank)
            if got is not None:
                break
        round_stats.append({
            "round": rounds, "sigma_dim": sigma.dim, "draws": attempts,
            "accepted": got, "rank_after": acc.rank,
        })
        if got is None:
            break  # plateau: budget exhausted with no new direction
        accepted.append(got)

    report = SolveReport(
        mode=cfg.mode, n=n, t=t, epsilon=eps, recovered=None,
        samples=samples, copies_consumed=len(samples) * t,
        rounds=rounds, rank_trace=rank_trace,
        draws=len(samples), swap_tests=0,
        accepted_samples=accepted, round_stats=round_stats,
    )
    if rounds > n:
        report.failure_reason = "round budget exhausted"
        report.success = False
        return report
    report.recovered = partition_from_nullspace(gf2.nullspace(accepted, n), n)
    truth = _known_truth(instance)
    report.success = None if truth is None else report.recovered == truth
    return report


def _mask_as_cut(mask: int, n: int) -> tuple[int, int]:
    """Canonical key for the bipartition encoded by a mask: (side of qubit 0, other)."""
    comp = mask ^ full_mask(n)
    return (mask, comp) if mask & 1 else (comp, mask)


def solve_haar_t2(instance: PlantedInstance, cfg: SolverConfig,
                  rng: np.random.Generator) -> SolveReport:
    """Two-copy route for a cut between two equal-size, highly entangled factors.

    Draws n-3 samples at t=2; when they are linearly independent the
    3-dimensional nullspace leaves 8 vectors, of which the 6 nontrivial ones
    are amplified-SWAP-tested at the configured confidence. The experimental
    n-2 variant skips verification and trusts the 2-dimensional nullspace.
    """
    if cfg.mode != "haar_t2":
        raise ValueError("config mode is not 'haar_t2'")
    n = instance.num_qubits
    truth = instance.truth
    if truth.num_parts != 2 or len(truth.parts[0]) != len(truth.parts[1]):
        raise ValueError("the two-copy route expects two equal-size factors")
    eps = _resolve_epsilon(cfg, instance)
    t = 2
    feature = entanglement_feature(instance.state)
    dist = wht.statehsp_distribution(feature, t)
    want = n - 2 if cfg.haar_direct else n - 3

    samples: list[int] = []
    rank_trace: list[int] = []
    draws = 0
    batch: list[int] = []
    batches = 0
    independent = False
    while batches < cfg.max_batch_retries:
        batches += 1
        batch = wht.sample(dist, rng, want)
        draws += want
        acc = gf2.RankAccumulator()
        rank_trace = []
        for y in batch:
            acc.add(y)
            rank_trace.append(acc.rank)
        if acc.rank == want:
            independent = True
            break
    samples = batch

    report = SolveReport(
        mode=cfg.mode, n=n, t=t, epsilon=eps, recovered=None,
        samples=samples, copies_consumed=draws * t,
        rounds=batches, rank_trace=rank_trace,
        draws=draws, swap_tests=0,
    )
    if not independent:
        report.failure_reason = "batch retries exhausted without independent samples"
        report.success = False
        return report

    ns = gf2.nullspace(samples, n)
    if cfg.haar_direct:
        report.recovered = partition_from_nullspace(ns, n)
        report.success = report.recovered == truth
        return report

    candidates = [v for v in gf2.enumerate_subspace(ns) if v not in (0, full_mask(n))]
    if len(candidates) != 6:
        raise ValueError("nullspace lost a trivial vector: corrupted samples")
    accepted_cuts: dict[tuple[int, int], int] = {}
    for cand in candidates:
        outcome = swaptest.verify_candidate_cut(
            instance.state, cand, cfg.confidence, rng, epsilon=eps
        )
        report.swap_tests += outcome.copies_used // 2
        report.copies_consumed += outcome.copies_used
        report.candidate_stats.append({
            "mask": cand, "accepted": outcome.accepted,
            "copies": outcome.copies_used,
            "acceptance_prob_exact": outcome.acceptance_prob_exact,
        })
        if outcome.accepted:
            key = _mask_as_cut(cand, n)
            accepted_cuts[key] = accepted_cuts.get(key, 0) + 1

    if len(accepted_cuts) == 1:
        mask0 = next(iter(accepted_cuts))[0]  # the side containing qubit 0
        part0 = mask_qubits(mask0)
        part1 = [q for q in range(n) if q not in part0]
        report.recovered = SetPartition.of([part0, part1])
        report.success = report.recovered == truth
    else:
        report.failure_reason = (
            "no candidate verified" if not accepted_cuts else
            f"{len(accepted_cuts)} distinct cuts verified: ambiguous"
        )
        report.success = False
    return report


def solve(instance: PlantedInstance, cfg: SolverConfig,
          rng: np.random.Generator) -> SolveReport:
    """Dispatch on cfg.mode."""
    if cfg.mode == "nonadaptive":
        return solve_nonadaptive(instance, cfg, rng)
    if cfg.mode == "adaptive":
        return solve_adaptive(instance, cfg, rng)
    return solve_haar_t2(instance, cfg, rng)
