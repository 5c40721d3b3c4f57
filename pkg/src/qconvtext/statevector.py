"""Dense statevector simulation of small qubit registers.

This is the reference implementation: every operation is a pure function
that validates its inputs and returns a fresh :class:`Statevector`.  The
training hot path lives in :mod:`qconvtext.executor`, which is checked
against these functions in the test suite.

Conventions, fixed once and used everywhere:

* Qubit 0 is the most significant bit of the basis index, so for a
  3-qubit register the basis state ``|100>`` has index 4.
* Measurements are analytic Pauli-Z expectation values, never sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DegenerateVectorError, NumericError

MAX_QUBITS = 12


@dataclass(frozen=True)
class Statevector:
    """An n-qubit pure state as 2^n complex amplitudes.

    Invariants: ``len(amplitudes) == 2**n_qubits`` and the squared
    amplitudes sum to 1 within 1e-10.  Both are enforced on construction.
    """

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if not (1 <= self.n_qubits <= MAX_QUBITS):
            raise ConfigurationError(
                f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}"
            )
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (2**self.n_qubits,):
            raise ConfigurationError(
                f"expected {2**self.n_qubits} amplitudes, got shape {amps.shape}"
            )
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > 1e-10:
            raise ConfigurationError(f"state is not normalized: |psi|^2 = {norm_sq!r}")

    def probabilities(self) -> np.ndarray:
        """|amplitude|^2 for each basis index."""
        return np.abs(self.amplitudes) ** 2


def _check_qubit(state: Statevector, q: int, name: str = "qubit") -> None:
    if not (0 <= q < state.n_qubits):
        raise ConfigurationError(
            f"{name} index {q} out of range for {state.n_qubits}-qubit state"
        )


def init_zero(n_qubits: int) -> Statevector:
    """The all-zeros basis state |0...0> on ``n_qubits`` qubits."""
    if not (1 <= n_qubits <= MAX_QUBITS):
        raise ConfigurationError(
            f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}"
        )
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(n_qubits, amps)


def apply_ry(state: Statevector, q: int, theta: float) -> Statevector:
    """Rotate qubit ``q`` around the y axis.

    The gate matrix is ``[[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]]``;
    it is real, so real states stay real.
    """
    _check_qubit(state, q)
    if not math.isfinite(theta):
        raise NumericError(f"rotation angle must be finite, got {theta!r}")
    c = math.cos(0.5 * theta)
    s = math.sin(0.5 * theta)
    mask = 1 << (state.n_qubits - 1 - q)
    idx = np.arange(2**state.n_qubits)
    lo = idx[(idx & mask) == 0]
    hi = lo | mask
    amps = state.amplitudes
    out = np.empty_like(amps)
    out[lo] = c * amps[lo] - s * amps[hi]
    out[hi] = s * amps[lo] + c * amps[hi]
    return Statevector(state.n_qubits, out)


def apply_cnot(state: Statevector, control: int, target: int) -> Statevector:
    """Flip the target bit of every basis state whose control bit is 1."""
    _check_qubit(state, control, "control")
    _check_qubit(state, target, "target")
    if control == target:
        raise ConfigurationError("control and target must be different qubits")
    n = state.n_qubits
    cmask = 1 << (n - 1 - control)
    tmask = 1 << (n - 1 - target)
    idx = np.arange(2**n)
    src = np.where((idx & cmask) != 0, idx ^ tmask, idx)
    return Statevector(n, state.amplitudes[src])


def angle_encode(values: np.ndarray) -> Statevector:
    """Write a real vector into per-qubit Ry rotation angles on |0...0>.

    Equivalent to ``init_zero(n)`` followed by ``apply_ry(q=i, theta=values[i])``
    for each entry; the resulting per-qubit <Z> is ``cos(values[i])``.
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.ndim != 1 or vals.size == 0:
        raise ConfigurationError("angle_encode expects a nonempty 1-D vector")
    if not np.all(np.isfinite(vals)):
        raise NumericError("angle_encode requires finite values")
    state = init_zero(vals.size)
    for q, theta in enumerate(vals):
        state = apply_ry(state, q, float(theta))
    return state


def amplitude_encode(values: np.ndarray, n_qubits: int) -> Statevector:
    """Place a real vector (zero-padded, L2-normalized) into the amplitudes.

    ``n_qubits`` must equal ceil(log2(len(values))); entry i of the input
    lands on basis index i.
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.ndim != 1 or vals.size < 2:
        raise ConfigurationError("amplitude_encode expects a 1-D vector of length >= 2")
    if not np.all(np.isfinite(vals)):
        raise NumericError("amplitude_encode requires finite values")
    needed = int(math.ceil(math.log2(vals.size)))
    if n_qubits != needed:
        raise ConfigurationError(
            f"n_qubits must be ceil(log2(N)) = {needed} for N = {vals.size}, got {n_qubits}"
        )
    norm = float(np.linalg.norm(vals))
    if norm <= 1e-12:
        raise DegenerateVectorError("cannot amplitude-encode a (near-)zero vector")
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[: vals.size] = vals / norm
    return Statevector(n_qubits, amps)


def z_expectation(state: Statevector, q: int) -> float:
    """Analytic <Z> of qubit ``q``: +1 weight where its bit is 0, -1 where 1."""
    _check_qubit(state, q)
    mask = 1 << (state.n_qubits - 1 - q)
    idx = np.arange(2**state.n_qubits)
    signs = np.where((idx & mask) == 0, 1.0, -1.0)
    return float(np.dot(state.probabilities(), signs))
