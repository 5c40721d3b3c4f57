"""Numba-compiled circuit execution kernels.

One kernel call executes one circuit: prepare the encoded state, apply the
entangling ansatz, read out all per-qubit Pauli-Z expectations.  All gates
here (Ry, CNOT) have real matrices and all encodings are real, so states
are plain float64 vectors.

Angles enter as half-angle cosine/sine tables rather than raw radians so
that parameter-shift evaluations can reuse a base table (shifting an angle
by +/- pi/2 rotates its half-angle table entry by pi/4, a two-flop update).

The ansatz layer is: one Ry per qubit, then a closed ring of CNOTs
(control q -> target q+1 mod n).  The ring collapses to a single CNOT for
two qubits and disappears for one; it is applied as a precomputed basis
permutation (see :func:`qconvtext.executor.ring_permutation`).
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _apply_ansatz(state, scratch, ans_c, ans_s, perm):
    depth, n = ans_c.shape
    dim = state.shape[0]
    for d in range(depth):
        for q in range(n):
            c = ans_c[d, q]
            s = ans_s[d, q]
            half = 1 << (n - 1 - q)
            step = half << 1
            for base in range(0, dim, step):
                for i in range(base, base + half):
                    j = i + half
                    a = state[i]
                    b = state[j]
                    state[i] = c * a - s * b
                    state[j] = s * a + c * b
        if n >= 2:
            for i in range(dim):
                scratch[i] = state[perm[i]]
            for i in range(dim):
                state[i] = scratch[i]


@njit(cache=True)
def _measure_all_z(state, z):
    n = z.shape[0]
    dim = state.shape[0]
    norm_sq = 0.0
    for q in range(n):
        z[q] = 0.0
    for i in range(dim):
        p = state[i] * state[i]
        norm_sq += p
        for q in range(n):
            if i & (1 << (n - 1 - q)):
                z[q] -= p
            else:
                z[q] += p
    return norm_sq


@njit(cache=True)
def run_angle_circuit(enc_c, enc_s, ans_c, ans_s, perm, state, scratch, z):
    """Product-state angle encoding, ansatz, all-Z readout. Returns |psi|^2."""
    n = enc_c.shape[0]
    state[0] = 1.0
    size = 1
    for q in range(n):
        c = enc_c[q]
        s = enc_s[q]
        for i in range(size - 1, -1, -1):
            a = state[i]
            state[2 * i] = a * c
            state[2 * i + 1] = a * s
        size <<= 1
    _apply_ansatz(state, scratch, ans_c, ans_s, perm)
    return _measure_all_z(state, z)


@njit(cache=True)
def run_basis_circuit(index, ans_c, ans_s, perm, state, scratch, z):
    """Basis-state preparation |index>, ansatz, all-Z readout."""
    dim = state.shape[0]
    for i in range(dim):
        state[i] = 0.0
    state[index] = 1.0
    _apply_ansatz(state, scratch, ans_c, ans_s, perm)
    return _measure_all_z(state, z)


@njit(cache=True)
def run_amplitude_circuit(amps, ans_c, ans_s, perm, state, scratch, z):
    """Pre-normalized amplitude encoding, ansatz, all-Z readout."""
    dim = state.shape[0]
    for i in range(dim):
        state[i] = amps[i]
    _apply_ansatz(state, scratch, ans_c, ans_s, perm)
    return _measure_all_z(state, z)
