"""Circuit execution API: counting, norm tracking, workspace reuse.

Every call to one of the ``execute_*`` functions runs exactly one circuit
(encode, ansatz, measure) and increments the global execution counter.
This one-call-one-circuit discipline is deliberate: the model family's
efficiency claims are stated in circuit executions, so wall-clock and
counter move together.

Workspaces are reused per register size and the returned expectation
vectors are written into caller-provided buffers, keeping the per-call
cost down to the circuit itself.  Not thread-safe; run concurrent work in
separate processes (seed sweeps do).
"""

from __future__ import annotations

import math
from contextlib import contextmanager

import numpy as np

from . import kernels
from .errors import ConfigurationError

SQRT_HALF = math.sqrt(0.5)


class ExecutionCounter:
    """Tally of circuit executions since the last reset."""

    __slots__ = ("value",)

    def __init__(self) -> None:
        self.value = 0

    def reset(self) -> None:
        self.value = 0


EXECUTIONS = ExecutionCounter()


class _NormTracker:
    __slots__ = ("count", "max_deviation")

    def __init__(self) -> None:
        self.count = 0
        self.max_deviation = 0.0

    def record(self, norm_sq: float) -> None:
        self.count += 1
        dev = abs(norm_sq - 1.0)
        if dev > self.max_deviation:
            self.max_deviation = dev


_norm_tracker: _NormTracker | None = None


@contextmanager
def norm_tracking():
    """Record |psi|^2 deviation from 1 for every execution in the block."""
    global _norm_tracker
    tracker = _NormTracker()
    prev = _norm_tracker
    _norm_tracker = tracker
    try:
        yield tracker
    finally:
        _norm_tracker = prev


def ring_permutation(n: int) -> np.ndarray:
    """Gather map for one closed CNOT ring (q -> q+1 mod n, q = 0..n-1).

    Returns ``perm`` such that ``new_state[i] = old_state[perm[i]]``.  A
    2-qubit ring is the single CNOT(0 -> 1); one qubit has no ring.
    """
    dim = 1 << n
    idx = np.arange(dim)
    if n == 1:
        return idx
    if n == 2:
        controls = [0]
    else:
        controls = list(range(n))
    dest = idx.copy()
    for q in controls:
        t = (q + 1) % n
        cmask = 1 << (n - 1 - q)
        tmask = 1 << (n - 1 - t)
        dest = np.where((dest & cmask) != 0, dest ^ tmask, dest)
    perm = np.empty(dim, dtype=np.int64)
    perm[dest] = idx
    return perm


class Workspace:
    """Reusable buffers for one register size."""

    __slots__ = ("n", "dim", "perm", "state", "scratch", "z")

    def __init__(self, n: int) -> None:
        self.n = n
        self.dim = 1 << n
        self.perm = ring_permutation(n)
        self.state = np.empty(self.dim, dtype=np.float64)
        self.scratch = np.empty(self.dim, dtype=np.float64)
        self.z = np.empty(n, dtype=np.float64)


_workspaces: dict[int, Workspace] = {}


def workspace(n: int) -> Workspace:
    ws = _workspaces.get(n)
    if ws is None:
        if not (1 <= n <= 12):
            raise ConfigurationError(f"register size {n} outside supported range 1..12")
        ws = Workspace(n)
        _workspaces[n] = ws
    return ws


def half_angle_tables(angles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """cos/sin of half angles, shaped like the input."""
    half = 0.5 * np.asarray(angles, dtype=np.float64)
    return np.cos(half), np.sin(half)


def shift_plus(c: float, s: float) -> tuple[float, float]:
    """Half-angle table entry after shifting the angle by +pi/2."""
    return SQRT_HALF * (c - s), SQRT_HALF * (s + c)


def shift_minus(c: float, s: float) -> tuple[float, float]:
    """Half-angle table entry after shifting the angle by -pi/2."""
    return SQRT_HALF * (c + s), SQRT_HALF * (s - c)


def execute_angle(
    enc_c: np.ndarray,
    enc_s: np.ndarray,
    ans_c: np.ndarray,
    ans_s: np.ndarray,
    out: np.ndarray,
) -> None:
    """Run one angle-encoded circuit; <Z> per qubit lands in ``out``."""
    ws = workspace(enc_c.shape[0])
    norm_sq = kernels.run_angle_circuit(
        enc_c, enc_s, ans_c, ans_s, ws.perm, ws.state, ws.scratch, out
    )
    EXECUTIONS.value += 1
    if _norm_tracker is not None:
        _norm_tracker.record(norm_sq)


def execute_basis(
    index: int,
    n: int,
    ans_c: np.ndarray,
    ans_s: np.ndarray,
    out: np.ndarray,
) -> None:
    """Run one circuit on basis state |index>; <Z> per qubit lands in ``out``."""
    ws = workspace(n)
    norm_sq = kernels.run_basis_circuit(
        index, ans_c, ans_s, ws.perm, ws.state, ws.scratch, out
    )
    EXECUTIONS.value += 1
    if _norm_tracker is not None:
        _norm_tracker.record(norm_sq)


def execute_amplitudes(
    amps: np.ndarray,
    ans_c: np.ndarray,
    ans_s: np.ndarray,
    out: np.ndarray,
) -> None:
    """Run one circuit on pre-normalized amplitudes (length 2^n)."""
    n = ans_c.shape[1]
    ws = workspace(n)
    if amps.shape[0] != ws.dim:
        raise ConfigurationError(
            f"amplitude vector length {amps.shape[0]} != 2^{n}"
        )
    norm_sq = kernels.run_amplitude_circuit(
        amps, ans_c, ans_s, ws.perm, ws.state, ws.scratch, out
    )
    EXECUTIONS.value += 1
    if _norm_tracker is not None:
        _norm_tracker.record(norm_sq)
