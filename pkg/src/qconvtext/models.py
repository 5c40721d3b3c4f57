"""Model assembly: two-branch fused text classifiers and their variants.

The full quantum model ("msff-qdconv") runs a word-level branch (quantum
word embeddings, a stack of depthwise quantum convolutions, masked mean
over token positions) and a sentence-level branch (quantum sentence
embedding of the TF-IDF vector), sums the two feature vectors
element-wise, and decodes class probabilities from the first ``c``
expectations of a quantum fully connected layer.

Variants: "qdconv" drops the sentence branch, "qse" drops the word branch
(the missing branch contributes a zero vector before the head), and
"msff-qconv" swaps the depthwise convolution for a full standard quantum
convolution grid.  "msff-conv" / "msff-dconv" are classical counterparts
with the same topology and linear modules in place of circuits.

Gradients for quantum variants are exact: per-layer parameter-shift
Jacobians (including encoding-angle derivatives) chained in reverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError
from .layers import (
    AnsatzParameters,
    ConvSpec,
    conv_windows,
    fully_connected_forward,
    fully_connected_jacobian,
    pad_normalize_amplitudes,
    sentence_embed_forward,
    sentence_embed_jacobian,
    window_scalar_forward,
    window_scalar_jacobians,
    word_embed_forward,
    word_embed_jacobian,
)
from .textdata import PreparedExample, embedding_qubits

QUANTUM_VARIANTS = ("msff-qdconv", "qdconv", "qse", "msff-qconv")
CLASSICAL_VARIANTS = ("msff-conv", "msff-dconv")
VARIANTS = QUANTUM_VARIANTS + CLASSICAL_VARIANTS

LOG_EPS = 1e-12

# Published reference results for the two benchmark presets.  The trainable
# angle count here comes from the per-layer formulas; the reference tables
# report one more parameter on every quantum row (19/90/91/666), an offset
# that is noted in reports rather than padded away.
REFERENCE_PARAM_COUNTS = {
    ("mc", "msff-qdconv"): 19,
    ("mc", "msff-qconv"): 91,
    ("mc", "msff-dconv"): 211,
    ("mc", "msff-conv"): 287,
    ("rp", "msff-qdconv"): 90,
    ("rp", "msff-qconv"): 666,
    ("rp", "msff-dconv"): 1403,
    ("rp", "msff-conv"): 1703,
}
REFERENCE_TEST_ACCURACY = {
    ("mc", "msff-qdconv"): 100.0,
    ("rp", "msff-qdconv"): 96.77,
    ("mc", "msff-qconv"): 90.0,
    ("rp", "msff-qconv"): 74.19,
    ("mc", "msff-dconv"): 100.0,
    ("rp", "msff-dconv"): 61.29,
    ("mc", "msff-conv"): 100.0,
    ("rp", "msff-conv"): 87.10,
}
# Strongest published model in the reference comparison that is not
# reimplemented here (accuracy percent on the harder benchmark).
STRONGEST_BASELINE_RP = 87.10


@dataclass(frozen=True)
class ModelConfig:
    """Architecture hyperparameters; qubit counts derive from the data."""

    dataset: str
    variant: str
    vocab_size: int
    seq_len: int
    n_classes: int = 2
    d_qemb: int = 1
    d_qconv: int = 1
    d_qfc: int = 1
    kernel_size: int = 3
    stride: int = 1
    n_conv_layers: int = 1
    idf_variant: str = "smooth"

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ConfigurationError(
                f"unknown variant {self.variant!r}; expected one of {VARIANTS}"
            )
        if self.vocab_size < 2 or self.seq_len < 1 or self.n_classes < 2:
            raise ConfigurationError("vocab_size >= 2, seq_len >= 1, n_classes >= 2 required")
        for name in ("d_qemb", "d_qconv", "d_qfc", "kernel_size", "n_conv_layers"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1")
        if self.stride != 1:
            raise ConfigurationError(
                "model assembly requires stride 1 (standalone conv layers support any stride)"
            )
        if self.n_classes > self.embed_dim:
            raise ConfigurationError(
                f"{self.n_classes} classes need at least {self.n_classes} head qubits, "
                f"have {self.embed_dim}"
            )

    @property
    def embed_dim(self) -> int:
        return embedding_qubits(self.vocab_size)

    @property
    def n_qemb(self) -> int:
        return self.embed_dim

    @property
    def n_qconv(self) -> int:
        return self.kernel_size

    @property
    def n_qfc(self) -> int:
        return self.embed_dim

    @property
    def has_word_branch(self) -> bool:
        return self.variant != "qse"

    @property
    def has_sentence_branch(self) -> bool:
        return self.variant != "qdconv"

    @property
    def is_classical(self) -> bool:
        return self.variant in CLASSICAL_VARIANTS

    def conv_spec(self) -> ConvSpec:
        return ConvSpec(self.kernel_size, self.stride, self.n_conv_layers)

    def echo(self) -> dict:
        """Every hyperparameter, spelled out for reports and checkpoints."""
        return {
            "dataset": self.dataset,
            "variant": self.variant,
            "N": self.vocab_size,
            "m": self.seq_len,
            "c": self.n_classes,
            "E": self.embed_dim,
            "D_qemb": self.d_qemb,
            "D_qconv": self.d_qconv,
            "D_qfc": self.d_qfc,
            "n_qemb": self.n_qemb,
            "n_qconv": self.n_qconv,
            "n_qfc": self.n_qfc,
            "K": self.kernel_size,
            "S": self.stride,
            "L": self.n_conv_layers,
            "idf_variant": self.idf_variant,
        }


PRESET_ARCHITECTURES = {
    "mc": dict(
        vocab_size=17, seq_len=4, n_classes=2,
        d_qemb=1, d_qconv=1, d_qfc=1,
        kernel_size=3, stride=1, n_conv_layers=1,
    ),
    "rp": dict(
        vocab_size=115, seq_len=5, n_classes=2,
        d_qemb=5, d_qconv=2, d_qfc=1,
        kernel_size=3, stride=1, n_conv_layers=2,
    ),
}


def preset_config(dataset: str, variant: str = "msff-qdconv", **overrides) -> ModelConfig:
    if dataset not in PRESET_ARCHITECTURES:
        raise ConfigurationError(f"unknown preset {dataset!r}; expected 'mc' or 'rp'")
    fields = dict(PRESET_ARCHITECTURES[dataset])
    unknown = set(overrides) - set(fields) - {"idf_variant"}
    if unknown:
        raise ConfigurationError(f"unknown config overrides: {sorted(unknown)}")
    fields.update(overrides)
    return ModelConfig(dataset=dataset, variant=variant, **fields)


@dataclass(frozen=True)
class ClassProbabilities:
    """Probability vector over classes; nonnegative, sums to one."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=np.float64)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or np.any(probs < 0) or abs(float(probs.sum()) - 1.0) > 1e-9:
            raise ConfigurationError("class probabilities must be nonnegative and sum to 1")

    @property
    def predicted(self) -> int:
        return int(np.argmax(self.probs))


# ---------------------------------------------------------------------------
# parameter containers
# ---------------------------------------------------------------------------


def param_layout(config: ModelConfig) -> list[tuple[str, tuple[int, ...]]]:
    """Canonical (name, shape) list; flattening follows this order."""
    e, k = config.embed_dim, config.kernel_size
    layout: list[tuple[str, tuple[int, ...]]] = []
    if config.is_classical:
        layout.append(("emb", (config.vocab_size, e)))
        layout.append(("sent_w", (config.vocab_size, e)))
        layout.append(("sent_b", (e,)))
        for layer in range(config.n_conv_layers):
            if config.variant == "msff-conv":
                layout.append((f"conv{layer}_kern", (e, e, k)))
                layout.append((f"conv{layer}_bias", (e,)))
            else:
                layout.append((f"conv{layer}_kern", (k,)))
                layout.append((f"conv{layer}_bias", (1,)))
        layout.append(("head_w", (e, config.n_classes)))
        layout.append(("head_b", (config.n_classes,)))
        return layout
    if config.has_word_branch:
        layout.append(("wemb", (config.d_qemb, e)))
    if config.has_sentence_branch:
        layout.append(("semb", (config.d_qemb, e)))
    if config.has_word_branch:
        for layer in range(config.n_conv_layers):
            if config.variant == "msff-qconv":
                layout.append((f"conv{layer}", (e, e, config.d_qconv, k)))
            else:
                layout.append((f"conv{layer}", (config.d_qconv, k)))
    layout.append(("qfc", (config.d_qfc, e)))
    return layout


def count_parameters(config: ModelConfig) -> int:
    return sum(int(np.prod(shape)) for _, shape in param_layout(config))


def reference_count_note(config: ModelConfig) -> str | None:
    ref = REFERENCE_PARAM_COUNTS.get((config.dataset, config.variant))
    if ref is None:
        return None
    ours = count_parameters(config)
    if ours == ref:
        return f"matches the reference count {ref}"
    return f"reference tables report {ref} ({ref - ours:+d} vs the per-layer formulas)"


def _glorot(rng: np.random.Generator, shape, fan_in: int, fan_out: int) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def init_params(config: ModelConfig, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Fresh parameters: angles uniform in [0, 2pi); classical weights Glorot."""
    params: dict[str, np.ndarray] = {}
    e, k = config.embed_dim, config.kernel_size
    for name, shape in param_layout(config):
        if not config.is_classical:
            params[name] = rng.uniform(0.0, 2.0 * math.pi, size=shape)
        elif name.endswith("_bias") or name == "sent_b" or name == "head_b":
            params[name] = np.zeros(shape)
        elif name == "head_w":
            params[name] = _glorot(rng, shape, e, config.n_classes)
        elif name.endswith("_kern"):
            fan = e * k if config.variant == "msff-conv" else k
            params[name] = _glorot(rng, shape, fan, fan)
        else:  # emb, sent_w
            params[name] = _glorot(rng, shape, config.vocab_size, e)
    return params


def flatten_params(config: ModelConfig, params: dict[str, np.ndarray]) -> np.ndarray:
    return np.concatenate([params[name].ravel() for name, _ in param_layout(config)])


def unflatten_params(config: ModelConfig, vec: np.ndarray) -> dict[str, np.ndarray]:
    params: dict[str, np.ndarray] = {}
    pos = 0
    for name, shape in param_layout(config):
        size = int(np.prod(shape))
        params[name] = np.array(vec[pos : pos + size]).reshape(shape)
        pos += size
    if pos != vec.size:
        raise ConfigurationError(f"parameter vector has {vec.size} entries, expected {pos}")
    return params


def _entangler(config: ModelConfig, angles: np.ndarray, n: int) -> AnsatzParameters:
    return AnsatzParameters(n_qubits=n, depth=angles.shape[0], angles=angles)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


# ---------------------------------------------------------------------------
# quantum forward / backward
# ---------------------------------------------------------------------------


def _quantum_forward(config: ModelConfig, params: dict, ex: PreparedExample):
    """Forward pass returning (probs, cache) with everything backward needs."""
    e, m = config.embed_dim, config.seq_len
    spec = ConvSpec(config.kernel_size, 1, 1)
    t_valid = int(ex.mask.sum())
    cache: dict = {"t_valid": t_valid, "spec": spec}

    if config.has_word_branch:
        tokens = ex.valid_indices
        wemb = _entangler(config, params["wemb"], e)
        emb = word_embed_forward(tokens, wemb)  # [T, E]
        x = np.zeros((e, m))
        x[:, :t_valid] = emb.T
        layer_windows = []
        for layer in range(config.n_conv_layers):
            windows = conv_windows(x, spec)  # [C, m, K]
            layer_windows.append(windows)
            if config.variant == "msff-qconv":
                kern = params[f"conv{layer}"]  # [E, E, D, K]
                out = np.zeros((e, m))
                for j in range(e):
                    for i in range(e):
                        p = _entangler(config, kern[j, i], config.kernel_size)
                        out[j] += window_scalar_forward(windows[i], p)
                x = out
            else:
                p = _entangler(config, params[f"conv{layer}"], config.kernel_size)
                x = window_scalar_forward(windows, p)
            x[:, t_valid:] = 0.0
        wbar = x[:, :t_valid].mean(axis=1)
        cache["layer_windows"] = layer_windows
        cache["tokens"] = tokens
    else:
        wbar = np.zeros(e)

    if config.has_sentence_branch:
        amps = pad_normalize_amplitudes(ex.tfidf, e)
        semb = _entangler(config, params["semb"], e)
        s = sentence_embed_forward(amps, semb)
        cache["amps"] = amps
    else:
        s = np.zeros(e)

    fused = wbar + s
    qfc = _entangler(config, params["qfc"], e)
    y = fully_connected_forward(fused, qfc)
    logits = y[: config.n_classes]
    probs = _softmax(logits)
    cache["fused"] = fused
    return probs, cache


def _quantum_backward(
    config: ModelConfig, params: dict, ex: PreparedExample, probs: np.ndarray, cache: dict
) -> dict[str, np.ndarray]:
    e, m = config.embed_dim, config.seq_len
    t_valid = cache["t_valid"]
    d_logits = probs.copy()
    d_logits[ex.label] -= 1.0
    dy = np.zeros(e)
    dy[: config.n_classes] = d_logits

    qfc = _entangler(config, params["qfc"], e)
    jac_fused, jac_qfc = fully_connected_jacobian(cache["fused"], qfc)
    grads: dict[str, np.ndarray] = {"qfc": np.einsum("e,edq->dq", dy, jac_qfc)}
    d_fused = jac_fused.T @ dy

    if config.has_sentence_branch:
        semb = _entangler(config, params["semb"], e)
        jac_semb = sentence_embed_jacobian(cache["amps"], semb)
        grads["semb"] = np.einsum("e,edq->dq", d_fused, jac_semb)

    if config.has_word_branch:
        k = config.kernel_size
        dx = np.zeros((e, m))
        dx[:, :t_valid] = d_fused[:, None] / t_valid
        for layer in reversed(range(config.n_conv_layers)):
            windows = cache["layer_windows"][layer]
            if config.variant == "msff-qconv":
                kern = params[f"conv{layer}"]
                g_kern = np.zeros_like(kern)
                padded = np.zeros((e, m + k - 1))
                for j in range(e):
                    for i in range(e):
                        p = _entangler(config, kern[j, i], k)
                        g_enc, g_ans = window_scalar_jacobians(windows[i], p)
                        g_kern[j, i] = np.einsum("t,tdk->dk", dx[j], g_ans)
                        contrib = dx[j][:, None] * g_enc  # [m, K]
                        for kk in range(k):
                            padded[i, kk : kk + m] += contrib[:, kk]
                grads[f"conv{layer}"] = g_kern
            else:
                p = _entangler(config, params[f"conv{layer}"], k)
                g_enc, g_ans = window_scalar_jacobians(windows, p)
                grads[f"conv{layer}"] = np.einsum("ct,ctdk->dk", dx, g_ans)
                padded = np.zeros((e, m + k - 1))
                for kk in range(k):
                    padded[:, kk : kk + m] += dx * g_enc[:, :, kk]
            pad_left = (k - 1) // 2
            dx = padded[:, pad_left : pad_left + m]
            dx[:, t_valid:] = 0.0
        wemb = _entangler(config, params["wemb"], e)
        jac_w = word_embed_jacobian(cache["tokens"], wemb)  # [T, E, D, E]
        grads["wemb"] = np.einsum("ct,tcdq->dq", dx[:, :t_valid], jac_w)
    return grads


# ---------------------------------------------------------------------------
# classical forward / backward
# ---------------------------------------------------------------------------


def _classical_forward(config: ModelConfig, params: dict, ex: PreparedExample):
    e, m = config.embed_dim, config.seq_len
    spec = ConvSpec(config.kernel_size, 1, 1)
    t_valid = int(ex.mask.sum())
    tokens = ex.valid_indices
    x = np.zeros((e, m))
    x[:, :t_valid] = params["emb"][tokens].T
    layer_windows = []
    for layer in range(config.n_conv_layers):
        windows = conv_windows(x, spec)
        layer_windows.append(windows)
        kern = params[f"conv{layer}_kern"]
        bias = params[f"conv{layer}_bias"]
        if config.variant == "msff-conv":
            x = np.einsum("itk,jik->jt", windows, kern) + bias[:, None]
        else:
            x = np.einsum("itk,k->it", windows, kern) + bias[0]
        x[:, t_valid:] = 0.0
    wbar = x[:, :t_valid].mean(axis=1)
    s = ex.tfidf @ params["sent_w"] + params["sent_b"]
    fused = wbar + s
    logits = fused @ params["head_w"] + params["head_b"]
    probs = _softmax(logits)
    cache = {
        "t_valid": t_valid,
        "tokens": tokens,
        "layer_windows": layer_windows,
        "fused": fused,
    }
    return probs, cache


def _classical_backward(
    config: ModelConfig, params: dict, ex: PreparedExample, probs: np.ndarray, cache: dict
) -> dict[str, np.ndarray]:
    e, m, k = config.embed_dim, config.seq_len, config.kernel_size
    t_valid = cache["t_valid"]
    d_logits = probs.copy()
    d_logits[ex.label] -= 1.0
    grads: dict[str, np.ndarray] = {
        "head_w": np.outer(cache["fused"], d_logits),
        "head_b": d_logits.copy(),
    }
    d_fused = params["head_w"] @ d_logits
    grads["sent_w"] = np.outer(ex.tfidf, d_fused)
    grads["sent_b"] = d_fused.copy()
    dx = np.zeros((e, m))
    dx[:, :t_valid] = d_fused[:, None] / t_valid
    for layer in reversed(range(config.n_conv_layers)):
        windows = cache["layer_windows"][layer]
        kern = params[f"conv{layer}_kern"]
        padded = np.zeros((e, m + k - 1))
        if config.variant == "msff-conv":
            grads[f"conv{layer}_kern"] = np.einsum("jt,itk->jik", dx, windows)
            grads[f"conv{layer}_bias"] = dx.sum(axis=1)
            d_windows = np.einsum("jt,jik->itk", dx, kern)
        else:
            grads[f"conv{layer}_kern"] = np.einsum("it,itk->k", dx, windows)
            grads[f"conv{layer}_bias"] = np.array([dx.sum()])
            d_windows = dx[:, :, None] * kern[None, None, :]
        for kk in range(k):
            padded[:, kk : kk + m] += d_windows[:, :, kk]
        pad_left = (k - 1) // 2
        dx = padded[:, pad_left : pad_left + m]
        dx[:, t_valid:] = 0.0
    d_emb = np.zeros_like(params["emb"])
    for t, token in enumerate(cache["tokens"]):
        d_emb[token] += dx[:, t]
    grads["emb"] = d_emb
    return grads


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------


def predict_probs(config: ModelConfig, params: dict, ex: PreparedExample) -> np.ndarray:
    if config.is_classical:
        probs, _ = _classical_forward(config, params, ex)
    else:
        probs, _ = _quantum_forward(config, params, ex)
    return probs


def forward(config: ModelConfig, params: dict, ex: PreparedExample) -> ClassProbabilities:
    """Class probabilities for one prepared example (any variant)."""
    return ClassProbabilities(predict_probs(config, params, ex))


def forward_variant_qdconv(
    config: ModelConfig, params: dict, ex: PreparedExample
) -> ClassProbabilities:
    return forward(replace(config, variant="qdconv"), params, ex)


def forward_variant_qse(
    config: ModelConfig, params: dict, ex: PreparedExample
) -> ClassProbabilities:
    return forward(replace(config, variant="qse"), params, ex)


def forward_classical(
    config: ModelConfig, params: dict, ex: PreparedExample
) -> ClassProbabilities:
    if not config.is_classical:
        raise ConfigurationError(f"{config.variant} is not a classical variant")
    return forward(config, params, ex)


def loss_and_grad(
    config: ModelConfig, params: dict, ex: PreparedExample
) -> tuple[float, dict[str, np.ndarray], np.ndarray]:
    """(cross-entropy loss, gradient per parameter array, class probs)."""
    if config.is_classical:
        probs, cache = _classical_forward(config, params, ex)
        grads = _classical_backward(config, params, ex, probs, cache)
    else:
        probs, cache = _quantum_forward(config, params, ex)
        grads = _quantum_backward(config, params, ex, probs, cache)
    loss = -math.log(float(probs[ex.label]) + LOG_EPS)
    return loss, grads, probs


# ---------------------------------------------------------------------------
# circuit execution accounting (closed forms, checked against the counter)
# ---------------------------------------------------------------------------


def forward_circuit_count(config: ModelConfig, n_tokens: int) -> int:
    """Circuits per forward pass of one example with ``n_tokens`` valid tokens."""
    if config.is_classical:
        return 0
    e, m = config.embed_dim, config.seq_len
    total = 1  # fully connected head
    if config.has_word_branch:
        total += n_tokens
        per_window = e * e if config.variant == "msff-qconv" else e
        total += config.n_conv_layers * per_window * m
    if config.has_sentence_branch:
        total += 1
    return total


def backward_circuit_count(config: ModelConfig, n_tokens: int) -> int:
    """Shifted evaluations per gradient of one example (forward not included)."""
    if config.is_classical:
        return 0
    e, m, k = config.embed_dim, config.seq_len, config.kernel_size
    total = 2 * (e + config.d_qfc * e)  # head: encoding + ansatz shifts
    if config.has_sentence_branch:
        total += 2 * config.d_qemb * e
    if config.has_word_branch:
        scalars = (e * e if config.variant == "msff-qconv" else e) * m
        total += config.n_conv_layers * 2 * scalars * (k + config.d_qconv * k)
        total += n_tokens * 2 * config.d_qemb * e
    return total
