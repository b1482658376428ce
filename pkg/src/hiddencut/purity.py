"""Subsystem purities, the full entanglement-feature vector, promise
certificates and the brute-force cut-search oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevec import MAX_QUBITS, PureState, SetPartition, full_mask, mask_qubits

PURE_TOL = 1e-8  # default purity-equals-1 detection threshold


class InconsistentMaskSetError(ValueError):
    """The collected pure masks are not explained by any set partition."""


@dataclass(frozen=True)
class EntanglementFeature:
    """Length-2^n vector of purities indexed by cut mask.

    values[x] is the purity of the reduced state on the qubits selected by x;
    values[0] = values[2^n - 1] = 1 exactly, and values respect complement
    symmetry bit-for-bit (the complement entry is copied, not recomputed).
    """

    num_qubits: int
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.shape != (1 << self.num_qubits,):
            raise ValueError("values length must be 2^n")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)


def purity(state: PureState, mask: int) -> float:
    """Purity of the reduced state on the qubits selected by `mask`.

    Computed as the squared Frobenius norm of the Gram matrix M M^dag, where M
    is the amplitude vector reshaped to (selected qubits) x (rest). The Gram
    matrix is built on the smaller side of the bipartition, so the cost is
    2^(n + min(|S|, n-|S|)) and never forms a 4^n object.
    """
    n = state.num_qubits
    if not 0 <= mask <= full_mask(n):
        raise ValueError(f"mask {mask} out of range for n={n}")
    if mask == 0 or mask == full_mask(n):
        return 1.0
    if 2 * mask.bit_count() > n:
        mask ^= full_mask(n)
    sel = mask_qubits(mask)
    rest = [q for q in range(n) if q not in sel]
    tensor = state.amplitudes.reshape((2,) * n)
    # reshape axis j corresponds to qubit n-1-j; any fixed ordering of the row
    # and column bits leaves the Gram spectrum unchanged
    axes = [n - 1 - q for q in sel] + [n - 1 - q for q in rest]
    m = tensor.transpose(axes).reshape(1 << len(sel), 1 << len(rest))
    gram = m @ m.conj().T
    return float(np.vdot(gram, gram).real)


def entanglement_feature(state: PureState, max_qubits: int = MAX_QUBITS) -> EntanglementFeature:
    """Purities across all 2^n cut masks, halving work via complement symmetry."""
    n = state.num_qubits
    if n > max_qubits:
        raise ValueError(f"n={n} exceeds feature guard {max_qubits}")
    size = 1 << n
    values = np.empty(size, dtype=np.float64)
    fm = full_mask(n)
    for mask in range(size):
        comp = mask ^ fm
        values[mask] = values[comp] if comp < mask else purity(state, mask)
    return EntanglementFeature(n, values)


def epsilon_certificate(state: PureState, partition: SetPartition) -> float:
    """sqrt(1 - p*) with p* the largest purity across any factor-internal cut.

    Every purity across a mask that cuts a factor nontrivially is then at most
    1 - eps^2, which is the bound all sample-complexity choices rest on.
    Parts of size 1 have no internal cut and are rejected.
    """
    if partition.num_qubits != state.num_qubits:
        raise ValueError("partition does not match state")
    if any(len(p) < 2 for p in partition.parts):
        raise ValueError("every part needs size >= 2 for an internal-cut certificate")
    p_star = 0.0
    for part in partition.parts:
        qubits = list(part)
        # submasks avoiding the part's first qubit cover each complement pair once
        for sub in range(1, 1 << (len(qubits) - 1)):
            mask = 0
            for j, q in enumerate(qubits[1:]):
                mask |= ((sub >> j) & 1) << q
            p_star = max(p_star, purity(state, mask))
    return float(np.sqrt(max(0.0, 1.0 - p_star)))


def brute_force_cut_search(state: PureState, tol: float = PURE_TOL,
                           max_qubits: int = MAX_QUBITS) -> SetPartition:
    """Exhaustive verification oracle: recover the finest partition whose
    part-indicator span is exactly the set of purity-1 masks.

    Qubits land in the same part iff their bits agree in every collected mask.
    Raises InconsistentMaskSetError when no partition explains the mask set,
    which signals that `tol` is too loose.
    """
    n = state.num_qubits
    if n > max_qubits:
        raise ValueError(f"n={n} exceeds search guard {max_qubits}")
    values = entanglement_feature(state, max_qubits=max_qubits).values
    pure = [x for x in range(1 << n) if values[x] >= 1.0 - tol]

    groups: dict[tuple[int, ...], list[int]] = {}
    for q in range(n):
        sig = tuple((m >> q) & 1 for m in pure)
        groups.setdefault(sig, []).append(q)
    parts = SetPartition.of(groups.values())

    # by construction every collected mask is constant on each part, so the
    # collected set sits inside the 2^m part-constant masks; equality needs
    # exactly that count
    if len(pure) != 1 << parts.num_parts:
        raise InconsistentMaskSetError(
            f"{len(pure)} pure masks but {parts.num_parts} parts imply "
            f"{1 << parts.num_parts}; tol too loose?"
        )
    return parts
