"""Construction and manipulation of n-qubit pure statevectors.

Bit convention, used everywhere in this package: little-endian, qubit i is
bit i of the amplitude index (qubit 0 = least significant bit). Cut masks,
Fourier samples and GF(2) vectors all share it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

MAX_QUBITS = 14  # default cost guard for dense statevector work
NORM_TOL = 1e-10
PURITY_ONE_TOL = 1e-10


def full_mask(n: int) -> int:
    return (1 << n) - 1


def is_nontrivial_mask(mask: int, n: int) -> bool:
    """A mask cuts something iff it is neither empty nor all qubits."""
    return 0 < mask < full_mask(n)


def mask_qubits(mask: int) -> list[int]:
    """Qubit indices selected by a mask, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def qubits_mask(qubits: Iterable[int]) -> int:
    m = 0
    for q in qubits:
        m |= 1 << q
    return m


@dataclass(frozen=True)
class PureState:
    """A normalized complex amplitude vector over n qubits."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.num_qubits < 1:
            raise ValueError("need at least one qubit")
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"expected {1 << self.num_qubits} amplitudes, got {amps.shape}"
            )
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: sum |amp|^2 = {norm!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits


@dataclass(frozen=True)
class SetPartition:
    """Disjoint nonempty qubit-index sets covering {0, .., n-1}.

    Canonical order: parts sorted by their smallest member, members ascending.
    """

    parts: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for part in self.parts:
            if not part:
                raise ValueError("empty part")
            if set(part) & seen:
                raise ValueError("parts overlap")
            seen.update(part)
        n = len(seen)
        if seen != set(range(n)):
            raise ValueError("parts must cover 0..n-1 exactly")
        canon = tuple(sorted((tuple(sorted(p)) for p in self.parts), key=lambda p: p[0]))
        object.__setattr__(self, "parts", canon)

    @classmethod
    def of(cls, parts: Iterable[Iterable[int]]) -> "SetPartition":
        return cls(tuple(tuple(p) for p in parts))

    @property
    def num_qubits(self) -> int:
        return sum(len(p) for p in self.parts)

    @property
    def num_parts(self) -> int:
        return len(self.parts)

    def indicator_masks(self) -> list[int]:
        return [qubits_mask(p) for p in self.parts]

    def as_lists(self) -> list[list[int]]:
        return [list(p) for p in self.parts]


def haar_random_state(n: int, rng: np.random.Generator, max_qubits: int = MAX_QUBITS) -> PureState:
    """Sample from the Haar measure: i.i.d. standard complex Gaussian amplitudes, normalized."""
    if not 1 <= n <= max_qubits:
        raise ValueError(f"n={n} outside [1, {max_qubits}]")
    z = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return PureState(n, z / np.linalg.norm(z))


def product_state(factors: Sequence[tuple[PureState, Iterable[int]]]) -> PureState:
    """Tensor factors together, each onto its own (possibly non-contiguous) qubit set.

    The amplitude at global index i is the product of each factor's amplitude
    at the sub-index gathered from i's bits at that factor's qubit positions.
    """
    assignments = [(st, tuple(sorted(qs))) for st, qs in factors]
    partition = SetPartition.of([qs for _, qs in assignments])  # validates cover/disjoint
    n = partition.num_qubits
    for st, qs in assignments:
        if st.num_qubits != len(qs):
            raise ValueError(f"factor has {st.num_qubits} qubits but is assigned {len(qs)}")
    idx = np.arange(1 << n, dtype=np.int64)
    amps = np.ones(1 << n, dtype=np.complex128)
    for st, qs in assignments:
        sub = np.zeros(1 << n, dtype=np.int64)
        for j, q in enumerate(qs):
            sub |= ((idx >> q) & 1) << j
        amps *= st.amplitudes[sub]
    return PureState(n, amps)


def apply_qubit_permutation(state: PureState, perm: Sequence[int]) -> PureState:
    """Route qubit i of the input to qubit perm[i] of the output."""
    n = state.num_qubits
    if sorted(perm) != list(range(n)):
        raise ValueError("perm is not a permutation of 0..n-1")
    idx = np.arange(1 << n, dtype=np.int64)
    routed = np.zeros(1 << n, dtype=np.int64)
    for i, p in enumerate(perm):
        routed |= ((idx >> i) & 1) << p
    out = np.empty(1 << n, dtype=np.complex128)
    out[routed] = state.amplitudes
    return PureState(n, out)


# Factor specs for planting. Each part gets one of:
#   "haar"                              a Haar-random factor
#   {"schmidt": [l1, ..], "split": a}   factor with the given Schmidt spectrum
#                                       across its first `split` qubits
#                                       (default: half, rounded up)
#   array-like of complex amplitudes    an explicit factor
FactorSpec = Union[str, dict, Sequence[complex], np.ndarray]


@dataclass(frozen=True)
class PlantedInstance:
    """A state assembled as a product across a known partition, for experiments.

    epsilon_certified is sqrt(1 - p*) with p* the largest nontrivial internal
    purity over all factors; every purity the solvers rely on is bounded by
    1 - epsilon_certified^2.
    """

    state: PureState
    truth: SetPartition
    epsilon_certified: float
    factor_spec: str = "haar"

    @property
    def num_qubits(self) -> int:
        return self.state.num_qubits

    def validate(self, tol: float = PURITY_ONE_TOL) -> None:
        """Check purity 1 across every planted part boundary."""
        from .purity import purity as purity_of

        for mask in self.truth.indicator_masks():
            p = purity_of(self.state, mask)
            if abs(p - 1.0) > tol:
                raise ValueError(f"purity across part mask {mask} is {p}, not 1")


def _schmidt_factor(size: int, coeffs: Sequence[float], split: int | None,
                    rng: np.random.Generator) -> PureState:
    lam = np.asarray(coeffs, dtype=float)
    if np.any(lam < 0) or abs(lam.sum() - 1.0) > 1e-9:
        raise ValueError("Schmidt coefficients must be nonnegative and sum to 1")
    a = split if split is not None else (size + 1) // 2
    if not 1 <= a <= size - 1:
        raise ValueError(f"split {a} invalid for a {size}-qubit factor")
    da, db = 1 << a, 1 << (size - a)
    r = len(lam)
    if r > min(da, db):
        raise ValueError("more Schmidt coefficients than the smaller side supports")
    u = _random_isometry(da, r, rng)
    v = _random_isometry(db, r, rng)
    amps = np.zeros(1 << size, dtype=np.complex128)
    for i in range(r):
        amps += np.sqrt(lam[i]) * np.kron(v[:, i], u[:, i])  # low bits = first split
    return PureState(size, amps)


def _random_isometry(d: int, r: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    q, rr = np.linalg.qr(z)
    return q * (np.diagonal(rr) / np.abs(np.diagonal(rr)))


def plant_instance(
    n: int,
    partition: SetPartition,
    factor_spec: FactorSpec | Sequence[FactorSpec] = "haar",
    rng: np.random.Generator | None = None,
    epsilon_floor: float = 1e-6,
) -> PlantedInstance:
    """Assemble a product state across `partition` and certify its promise parameter.

    Parts of size 1 are rejected: a single qubit has no internal cut, so the
    certified-promise workflow is undefined for it. Build a PlantedInstance
    directly if an externally supplied promise is wanted instead.
    """
    from .purity import epsilon_certificate

    if partition.num_qubits != n:
        raise ValueError("partition does not match n")
    if any(len(p) < 2 for p in partition.parts):
        raise ValueError("parts of size 1 carry no internal cut; cannot certify a promise")

    specs: list[FactorSpec]
    if isinstance(factor_spec, str) or isinstance(factor_spec, dict):
        specs = [factor_spec] * partition.num_parts
    else:
        specs = list(factor_spec)
        if len(specs) != partition.num_parts:
            raise ValueError("one factor spec per part required")

    labels = set()
    factors = []
    for part, spec in zip(partition.parts, specs):
        size = len(part)
        if isinstance(spec, str):
            if spec != "haar":
                raise ValueError(f"unknown factor spec {spec!r}")
            if rng is None:
                raise ValueError("haar factors need an rng")
            factors.append((haar_random_state(size, rng), part))
            labels.add("haar")
        elif isinstance(spec, dict):
            if rng is None:
                raise ValueError("schmidt factors need an rng")
            factors.append(
                (_schmidt_factor(size, spec["schmidt"], spec.get("split"), rng), part)
            )
            labels.add("schmidt-spectrum")
        else:
            factors.append((PureState(size, np.asarray(spec, dtype=np.complex128)), part))
            labels.add("explicit")

    state = product_state(factors)
    eps = epsilon_certificate(state, partition)
    if eps < epsilon_floor:
        raise ValueError(
            f"certified epsilon {eps:.3g} below floor {epsilon_floor:.3g}: degenerate instance"
        )
    label = labels.pop() if len(labels) == 1 else "mixed"
    instance = PlantedInstance(state, partition, eps, label)
    instance.validate()
    return instance
