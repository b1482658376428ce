"""Brute-force simulation of the Fourier sampling circuit on the full
(n + t*n)-qubit register, as an independent cross-check of the analytic
distributions at tiny sizes.

Register layout (little-endian): ancilla/group qubits occupy global bits
0..n-1; copy j of the data state occupies bits n + j*n .. n + (j+1)*n - 1.
Only three gate types appear, so gates are index-remapping kernels rather
than a general gate engine. The t/2 controlled pair-swaps per ancilla are
applied sequentially; a log-depth fan-out arrangement would compose to the
identical unitary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevec import PureState
from .wht import FourierDistribution, NumericalIntegrityError

MAX_TOTAL_QUBITS = 24
_SQRT2_INV = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class CircuitLimits:
    max_total_qubits: int = MAX_TOTAL_QUBITS


def _apply_hadamard(vec: np.ndarray, qubit: int) -> None:
    size = vec.size
    v = vec.reshape(size // (2 << qubit), 2, 1 << qubit)
    lo = v[:, 0, :].copy()
    hi = v[:, 1, :].copy()
    v[:, 0, :] = (lo + hi) * _SQRT2_INV
    v[:, 1, :] = (lo - hi) * _SQRT2_INV


def _apply_controlled_swap(vec: np.ndarray, idx: np.ndarray,
                           control: int, q1: int, q2: int) -> None:
    sel = (((idx >> control) & 1) == 1) & (((idx >> q1) & 1) != ((idx >> q2) & 1))
    vec[sel] = vec[idx[sel] ^ ((1 << q1) | (1 << q2))]


def simulate_fourier_sampling_circuit(
    state: PureState, t: int, limits: CircuitLimits = CircuitLimits(),
    group_state: np.ndarray | None = None,
) -> FourierDistribution:
    """Exact ancilla-register marginal of the sampling circuit on t copies.

    Builds |0^n> (x) |psi>^(x t), Hadamards the ancillas, applies for each
    ancilla k the controlled pairing action (swap qubit k of copies 2j and
    2j+1 for every pair j), Hadamards again, and marginalizes the ancillas.

    When `group_state` is given it is loaded into the group register directly
    and the leading Hadamard layer is skipped: that is the adaptive variant,
    whose rounds start from a superposition over a subspace instead of the
    uniform one.
    """
    n = state.num_qubits
    if t < 2 or t % 2:
        raise ValueError(f"t must be an even integer >= 2, got {t}")
    total = n * (1 + t)
    if total > limits.max_total_qubits:
        raise ValueError(
            f"n(1+t) = {total} qubits exceeds the {limits.max_total_qubits}-qubit guard"
        )

    if group_state is None:
        anc = np.zeros(1 << n, dtype=np.complex128)
        anc[0] = 1.0
    else:
        anc = np.ascontiguousarray(group_state, dtype=np.complex128)
        if anc.shape != (1 << n,) or abs(np.vdot(anc, anc).real - 1.0) > 1e-10:
            raise ValueError("group_state must be a normalized 2^n vector")
    full = anc
    for _ in range(t):
        full = np.kron(state.amplitudes, full)  # new copy lands on the high bits

    idx = np.arange(full.size, dtype=np.int64)
    if group_state is None:
        for k in range(n):
            _apply_hadamard(full, k)
    for k in range(n):
        for j in range(t // 2):
            q1 = n + (2 * j) * n + k
            q2 = n + (2 * j + 1) * n + k
            _apply_controlled_swap(full, idx, k, q1, q2)
    for k in range(n):
        _apply_hadamard(full, k)

    probs = (np.abs(full) ** 2).reshape(-1, 1 << n).sum(axis=0)
    total = float(probs.sum())
    if abs(total - 1.0) > 1e-10:
        raise NumericalIntegrityError(f"register norm drifted to {total!r}")
    return FourierDistribution(n, probs / total, t)
