"""Quantum layers: entangling ansatz, embeddings, 1-D convolutions, dense.

Each layer maps real vectors to real vectors by executing variational
circuits: encode, apply the shared BasicEntangler ansatz (per-qubit Ry
rotations followed by a closed CNOT ring, repeated ``depth`` times), and
read out per-qubit Pauli-Z expectations.

The ``*_forward`` functions run circuits through :mod:`qconvtext.executor`
(so they are counted); the ``*_jacobian`` functions produce exact
parameter-shift Jacobians with respect to both encoding inputs and ansatz
angles, which is what lets the model chain gradients through stacked
layers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import statevector as sv
from .errors import ConfigurationError, DegenerateVectorError, VocabularyError
from .executor import (
    execute_amplitudes,
    execute_angle,
    execute_basis,
    half_angle_tables,
    shift_minus,
    shift_plus,
)


@dataclass(frozen=True)
class AnsatzParameters:
    """Rotation angles for a BasicEntangler circuit: ``angles[depth][qubit]``."""

    n_qubits: int
    depth: int
    angles: np.ndarray

    def __post_init__(self) -> None:
        if not (1 <= self.n_qubits <= 12):
            raise ConfigurationError(f"n_qubits {self.n_qubits} outside 1..12")
        if self.depth < 1:
            raise ConfigurationError(f"depth must be >= 1, got {self.depth}")
        angles = np.asarray(self.angles, dtype=np.float64)
        object.__setattr__(self, "angles", angles)
        if angles.shape != (self.depth, self.n_qubits):
            raise ConfigurationError(
                f"angles shape {angles.shape} != ({self.depth}, {self.n_qubits})"
            )
        if not np.all(np.isfinite(angles)):
            raise ConfigurationError("ansatz angles must be finite")

    @property
    def param_count(self) -> int:
        return self.depth * self.n_qubits


@dataclass(frozen=True)
class ConvSpec:
    """Shape of a 1-D quantum convolution stack."""

    kernel_size: int
    stride: int = 1
    n_layers: int = 1
    padding: str = "same-zero"

    def __post_init__(self) -> None:
        if self.kernel_size < 1 or self.stride < 1 or self.n_layers < 1:
            raise ConfigurationError("kernel_size, stride and n_layers must be >= 1")
        if self.padding != "same-zero":
            raise ConfigurationError(f"unsupported padding {self.padding!r}")

    def output_length(self, m: int) -> int:
        return -(-m // self.stride)


@dataclass(frozen=True)
class ChannelSequence:
    """A C-channel length-m real sequence with a token-validity mask.

    Masked-out columns are zero by construction; padded positions therefore
    enter convolution windows as zero angles while staying excluded from
    any downstream pooling.
    """

    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        mask = np.asarray(self.mask, dtype=bool)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)
        if values.ndim != 2:
            raise ConfigurationError("values must be a [channels, length] matrix")
        if mask.shape != (values.shape[1],):
            raise ConfigurationError(
                f"mask length {mask.shape} does not match sequence length {values.shape[1]}"
            )
        if values[:, ~mask].size and np.any(values[:, ~mask] != 0.0):
            raise ConfigurationError("masked-out columns must be zero")

    @property
    def channels(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> int:
        return self.values.shape[1]


def ring_pairs(n: int) -> list[tuple[int, int]]:
    """CNOT (control, target) pairs of the closed ring for n qubits."""
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    return [(q, (q + 1) % n) for q in range(n)]


def apply_basic_entangler(state: sv.Statevector, p: AnsatzParameters) -> sv.Statevector:
    """Reference entangler on a :class:`Statevector` (gate by gate)."""
    if state.n_qubits != p.n_qubits:
        raise ConfigurationError(
            f"state has {state.n_qubits} qubits but ansatz expects {p.n_qubits}"
        )
    for d in range(p.depth):
        for q in range(p.n_qubits):
            state = sv.apply_ry(state, q, float(p.angles[d, q]))
        for control, target in ring_pairs(p.n_qubits):
            state = sv.apply_cnot(state, control, target)
    return state


# ---------------------------------------------------------------------------
# embeddings and dense layer
# ---------------------------------------------------------------------------


def _embedding_qubits(vocab_size: int) -> int:
    if vocab_size < 2:
        raise ConfigurationError(f"vocabulary size must be >= 2, got {vocab_size}")
    return int(math.ceil(math.log2(vocab_size)))


def quantum_word_embed(
    one_hot_index: int, vocab_size: int, p: AnsatzParameters
) -> np.ndarray:
    """Embed a vocabulary index: basis state |index>, ansatz, per-qubit <Z>.

    Amplitude-encoding a one-hot vector is exactly basis-state preparation,
    so the embedding dimension is ceil(log2(vocab_size)).
    """
    n = _embedding_qubits(vocab_size)
    if p.n_qubits != n:
        raise ConfigurationError(
            f"ansatz has {p.n_qubits} qubits, vocabulary of {vocab_size} needs {n}"
        )
    if not (0 <= one_hot_index < vocab_size):
        raise VocabularyError(f"index {one_hot_index} outside vocabulary of {vocab_size}")
    ans_c, ans_s = half_angle_tables(p.angles)
    out = np.empty(n, dtype=np.float64)
    execute_basis(int(one_hot_index), n, ans_c, ans_s, out)
    return out


def quantum_sentence_embed(tfidf: np.ndarray, p: AnsatzParameters) -> np.ndarray:
    """Embed a TF-IDF vector via amplitude encoding, ansatz, per-qubit <Z>."""
    vec = np.asarray(tfidf, dtype=np.float64)
    n = _embedding_qubits(vec.size)
    if p.n_qubits != n:
        raise ConfigurationError(
            f"ansatz has {p.n_qubits} qubits, vector of length {vec.size} needs {n}"
        )
    amps = pad_normalize_amplitudes(vec, n)
    ans_c, ans_s = half_angle_tables(p.angles)
    out = np.empty(n, dtype=np.float64)
    execute_amplitudes(amps, ans_c, ans_s, out)
    return out


def pad_normalize_amplitudes(vec: np.ndarray, n_qubits: int) -> np.ndarray:
    """Zero-pad to 2^n and L2-normalize; rejects (near-)zero vectors."""
    norm = float(np.linalg.norm(vec))
    if norm <= 1e-12:
        raise DegenerateVectorError("cannot amplitude-encode a (near-)zero vector")
    amps = np.zeros(1 << n_qubits, dtype=np.float64)
    amps[: vec.size] = vec / norm
    return amps


def quantum_fully_connected(x: np.ndarray, p: AnsatzParameters) -> np.ndarray:
    """Angle-encode x, apply the ansatz, return all per-qubit <Z>."""
    vec = np.asarray(x, dtype=np.float64)
    if vec.shape != (p.n_qubits,):
        raise ConfigurationError(
            f"input of shape {vec.shape} does not match {p.n_qubits} qubits"
        )
    if not np.all(np.isfinite(vec)):
        raise ConfigurationError("inputs must be finite")
    enc_c, enc_s = half_angle_tables(vec)
    ans_c, ans_s = half_angle_tables(p.angles)
    out = np.empty(p.n_qubits, dtype=np.float64)
    execute_angle(enc_c, enc_s, ans_c, ans_s, out)
    return out


# ---------------------------------------------------------------------------
# convolutions
# ---------------------------------------------------------------------------


def conv_windows(values: np.ndarray, spec: ConvSpec) -> np.ndarray:
    """Zero-padded sliding windows: [channels, output_length, kernel_size].

    Symmetric "same" zero padding, so with stride 1 every input position
    gets an output position.
    """
    channels, m = values.shape
    k, s = spec.kernel_size, spec.stride
    pad_left = (k - 1) // 2
    pad_right = k - 1 - pad_left
    padded = np.zeros((channels, m + pad_left + pad_right), dtype=np.float64)
    padded[:, pad_left : pad_left + m] = values
    m_out = spec.output_length(m)
    windows = np.empty((channels, m_out, k), dtype=np.float64)
    for t in range(m_out):
        windows[:, t, :] = padded[:, t * s : t * s + k]
    return windows


def _output_mask(mask: np.ndarray, spec: ConvSpec) -> np.ndarray:
    return mask if spec.stride == 1 else mask[:: spec.stride]


def _zsum(z: np.ndarray, k: int) -> float:
    # faster than z.sum() for the tiny kernel registers used here
    total = 0.0
    for q in range(k):
        total += z[q]
    return total


def window_scalar_forward(windows: np.ndarray, p: AnsatzParameters) -> np.ndarray:
    """Sum-of-<Z> readout for each window; windows is [..., K]."""
    lead_shape = windows.shape[:-1]
    k = windows.shape[-1]
    flat = windows.reshape(-1, k)
    ans_c, ans_s = half_angle_tables(p.angles)
    enc_c_all, enc_s_all = half_angle_tables(flat)
    z = np.empty(k, dtype=np.float64)
    out = np.empty(flat.shape[0], dtype=np.float64)
    for i in range(flat.shape[0]):
        execute_angle(enc_c_all[i], enc_s_all[i], ans_c, ans_s, z)
        out[i] = _zsum(z, k)
    return out.reshape(lead_shape)


def quantum_depthwise_conv1d(
    x: ChannelSequence, p: AnsatzParameters, spec: ConvSpec
) -> ChannelSequence:
    """Slide one shared quantum kernel independently over every channel.

    Each window is angle-encoded on kernel_size qubits, transformed by the
    shared ansatz, and read out as the sum of all per-qubit <Z>.  Channel
    count is preserved and runs C x output_length circuits.
    """
    if p.n_qubits != spec.kernel_size:
        raise ConfigurationError(
            f"kernel ansatz has {p.n_qubits} qubits but kernel_size is {spec.kernel_size}"
        )
    windows = conv_windows(x.values, spec)
    out = window_scalar_forward(windows, p)
    mask = _output_mask(x.mask, spec)
    out[:, ~mask] = 0.0
    return ChannelSequence(out, mask)


def quantum_standard_conv1d(
    x: ChannelSequence,
    kernels: list[list[AnsatzParameters]],
    spec: ConvSpec,
) -> ChannelSequence:
    """Full grid of quantum kernels: output j sums one kernel per input channel.

    Runs C_in x C_out circuits per window, against C for the depthwise form.
    """
    c_out = len(kernels)
    if c_out == 0 or any(len(row) != x.channels for row in kernels):
        raise ConfigurationError(
            f"kernel grid must be [C_out][{x.channels}] for {x.channels} input channels"
        )
    for row in kernels:
        for kern in row:
            if kern.n_qubits != spec.kernel_size:
                raise ConfigurationError("every kernel must have kernel_size qubits")
    windows = conv_windows(x.values, spec)
    m_out = windows.shape[1]
    out = np.zeros((c_out, m_out), dtype=np.float64)
    for j in range(c_out):
        for i in range(x.channels):
            out[j] += window_scalar_forward(windows[i], kernels[j][i])
    mask = _output_mask(x.mask, spec)
    out[:, ~mask] = 0.0
    return ChannelSequence(out, mask)


# ---------------------------------------------------------------------------
# parameter-shift jacobians (training path)
# ---------------------------------------------------------------------------


def _ansatz_jacobian(
    run,
    ans_c: np.ndarray,
    ans_s: np.ndarray,
    n_out: int,
) -> np.ndarray:
    """Jacobian [n_out, depth, n] of a circuit's <Z> vector w.r.t. ansatz angles.

    ``run(out)`` must execute the circuit with the current (mutated) tables.
    Table entries are shifted in place by +/- pi/2 and restored.
    """
    depth, n = ans_c.shape
    jac = np.empty((n_out, depth, n), dtype=np.float64)
    z_plus = np.empty(n_out, dtype=np.float64)
    z_minus = np.empty(n_out, dtype=np.float64)
    for d in range(depth):
        for q in range(n):
            c0, s0 = ans_c[d, q], ans_s[d, q]
            ans_c[d, q], ans_s[d, q] = shift_plus(c0, s0)
            run(z_plus)
            ans_c[d, q], ans_s[d, q] = shift_minus(c0, s0)
            run(z_minus)
            ans_c[d, q], ans_s[d, q] = c0, s0
            jac[:, d, q] = 0.5 * (z_plus - z_minus)
    return jac


def word_embed_forward(indices: np.ndarray, p: AnsatzParameters) -> np.ndarray:
    """Embeddings [T, E] for a sequence of vocabulary indices."""
    ans_c, ans_s = half_angle_tables(p.angles)
    n = p.n_qubits
    out = np.empty((len(indices), n), dtype=np.float64)
    for t, idx in enumerate(indices):
        execute_basis(int(idx), n, ans_c, ans_s, out[t])
    return out


def word_embed_jacobian(indices: np.ndarray, p: AnsatzParameters) -> np.ndarray:
    """d embedding / d ansatz angles, one [E, depth, E] block per token."""
    ans_c, ans_s = half_angle_tables(p.angles)
    n = p.n_qubits
    jac = np.empty((len(indices), n, p.depth, n), dtype=np.float64)
    for t, idx in enumerate(indices):
        i = int(idx)
        jac[t] = _ansatz_jacobian(
            lambda out: execute_basis(i, n, ans_c, ans_s, out), ans_c, ans_s, n
        )
    return jac


def sentence_embed_forward(amps: np.ndarray, p: AnsatzParameters) -> np.ndarray:
    ans_c, ans_s = half_angle_tables(p.angles)
    out = np.empty(p.n_qubits, dtype=np.float64)
    execute_amplitudes(amps, ans_c, ans_s, out)
    return out


def sentence_embed_jacobian(amps: np.ndarray, p: AnsatzParameters) -> np.ndarray:
    ans_c, ans_s = half_angle_tables(p.angles)
    return _ansatz_jacobian(
        lambda out: execute_amplitudes(amps, ans_c, ans_s, out),
        ans_c,
        ans_s,
        p.n_qubits,
    )


def fully_connected_forward(x: np.ndarray, p: AnsatzParameters) -> np.ndarray:
    enc_c, enc_s = half_angle_tables(x)
    ans_c, ans_s = half_angle_tables(p.angles)
    out = np.empty(p.n_qubits, dtype=np.float64)
    execute_angle(enc_c, enc_s, ans_c, ans_s, out)
    return out


def fully_connected_jacobian(
    x: np.ndarray, p: AnsatzParameters
) -> tuple[np.ndarray, np.ndarray]:
    """(d z / d x as [n, n], d z / d ansatz as [n, depth, n])."""
    n = p.n_qubits
    enc_c, enc_s = half_angle_tables(x)
    ans_c, ans_s = half_angle_tables(p.angles)

    def run(out: np.ndarray) -> None:
        execute_angle(enc_c, enc_s, ans_c, ans_s, out)

    jac_x = np.empty((n, n), dtype=np.float64)
    z_plus = np.empty(n, dtype=np.float64)
    z_minus = np.empty(n, dtype=np.float64)
    for q in range(n):
        c0, s0 = enc_c[q], enc_s[q]
        enc_c[q], enc_s[q] = shift_plus(c0, s0)
        run(z_plus)
        enc_c[q], enc_s[q] = shift_minus(c0, s0)
        run(z_minus)
        enc_c[q], enc_s[q] = c0, s0
        jac_x[:, q] = 0.5 * (z_plus - z_minus)
    jac_theta = _ansatz_jacobian(run, ans_c, ans_s, n)
    return jac_x, jac_theta


def window_scalar_jacobians(
    windows: np.ndarray, p: AnsatzParameters
) -> tuple[np.ndarray, np.ndarray]:
    """Per-window gradients of the sum-of-<Z> readout.

    ``windows`` is [..., K]; returns (d scalar / d window values shaped
    [..., K], d scalar / d ansatz shaped [..., depth, K]).
    """
    k = p.n_qubits
    lead_shape = windows.shape[:-1]
    flat = windows.reshape(-1, k)
    n_windows = flat.shape[0]
    ans_c, ans_s = half_angle_tables(p.angles)
    enc_c_all, enc_s_all = half_angle_tables(flat)
    g_enc = np.empty((n_windows, k), dtype=np.float64)
    g_ans = np.empty((n_windows, p.depth, k), dtype=np.float64)
    z = np.empty(k, dtype=np.float64)
    for w in range(n_windows):
        enc_c, enc_s = enc_c_all[w], enc_s_all[w]
        for q in range(k):
            c0, s0 = enc_c[q], enc_s[q]
            enc_c[q], enc_s[q] = shift_plus(c0, s0)
            execute_angle(enc_c, enc_s, ans_c, ans_s, z)
            plus = _zsum(z, k)
            enc_c[q], enc_s[q] = shift_minus(c0, s0)
            execute_angle(enc_c, enc_s, ans_c, ans_s, z)
            enc_c[q], enc_s[q] = c0, s0
            g_enc[w, q] = 0.5 * (plus - _zsum(z, k))
        for d in range(p.depth):
            for q in range(k):
                c0, s0 = ans_c[d, q], ans_s[d, q]
                ans_c[d, q], ans_s[d, q] = shift_plus(c0, s0)
                execute_angle(enc_c, enc_s, ans_c, ans_s, z)
                plus = _zsum(z, k)
                ans_c[d, q], ans_s[d, q] = shift_minus(c0, s0)
                execute_angle(enc_c, enc_s, ans_c, ans_s, z)
                ans_c[d, q], ans_s[d, q] = c0, s0
                g_ans[w, d, q] = 0.5 * (plus - _zsum(z, k))
    return g_enc.reshape(*lead_shape, k), g_ans.reshape(*lead_shape, p.depth, k)


# ---------------------------------------------------------------------------
# parameter accounting
# ---------------------------------------------------------------------------


def layer_param_count(kind: str, **dims: int) -> int:
    """Trainable angle count for one layer description.

    Kinds: ``entangler`` (depth, n_qubits), ``depthwise-conv`` (n_layers,
    depth, kernel_size), ``standard-conv`` (n_layers, depth, kernel_size,
    c_in, c_out).
    """
    if kind == "entangler":
        return dims["depth"] * dims["n_qubits"]
    if kind == "depthwise-conv":
        return dims["n_layers"] * dims["depth"] * dims["kernel_size"]
    if kind == "standard-conv":
        return (
            dims["n_layers"]
            * dims["c_in"]
            * dims["c_out"]
            * dims["depth"]
            * dims["kernel_size"]
        )
    raise ConfigurationError(f"unknown layer kind {kind!r}")
