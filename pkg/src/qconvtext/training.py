"""Training harness: loss, Adam, the epoch loop, evaluation, reporting.

Runs are fully determined by (seed, configs): parameters start uniform in
[0, 2pi) for angles, data is reshuffled every epoch from the same seeded
generator, batch gradients are plain means, and reductions happen in a
fixed order.  Per-epoch seconds measure the training phase only (parameter
updates), not the test-set evaluation that follows each epoch.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import ConfigurationError, DataError, NumericError
from .executor import EXECUTIONS
from .models import (
    ClassProbabilities,
    ModelConfig,
    backward_circuit_count,
    count_parameters,
    flatten_params,
    forward_circuit_count,
    init_params,
    loss_and_grad,
    predict_probs,
    preset_config,
    reference_count_note,
    unflatten_params,
)
from .textdata import (
    PreparedExample,
    build_corpus_stats,
    build_vocab,
    load_benchmark,
    prepare_examples,
)

PRESET_TRAINING = {
    "mc": dict(epochs=40, batch_size=8, learning_rate=0.05),
    "rp": dict(epochs=100, batch_size=6, learning_rate=0.05),
}

REPORT_SCHEMA = "qconvtext-report-v1"
CHECKPOINT_SCHEMA = "qconvtext-checkpoint-v1"


@dataclass(frozen=True)
class TrainingConfig:
    dataset: str
    variant: str
    epochs: int
    batch_size: int
    learning_rate: float
    seed: int = 0

    def __post_init__(self) -> None:
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigurationError("epochs and batch_size must be >= 1")
        if not (self.learning_rate > 0):
            raise ConfigurationError("learning_rate must be positive")


def preset_training(dataset: str, variant: str = "msff-qdconv", **overrides) -> TrainingConfig:
    if dataset not in PRESET_TRAINING:
        raise ConfigurationError(f"unknown preset {dataset!r}; expected 'mc' or 'rp'")
    fields = dict(PRESET_TRAINING[dataset])
    unknown = set(overrides) - set(fields) - {"seed"}
    if unknown:
        raise ConfigurationError(f"unknown training overrides: {sorted(unknown)}")
    fields.update(overrides)
    return TrainingConfig(dataset=dataset, variant=variant, **fields)


def cross_entropy(probs, label: int) -> float:
    """-ln(p[label] + 1e-12); accepts ClassProbabilities or a plain vector."""
    vec = probs.probs if isinstance(probs, ClassProbabilities) else np.asarray(probs)
    return -math.log(float(vec[label]) + 1e-12)


# ---------------------------------------------------------------------------
# Adam
# ---------------------------------------------------------------------------


@dataclass
class AdamState:
    """First/second moment accumulators and the step counter."""

    m: np.ndarray
    v: np.ndarray
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros(cls, size: int) -> "AdamState":
        return cls(m=np.zeros(size), v=np.zeros(size))


def adam_step(
    params: np.ndarray, grads: np.ndarray, state: AdamState, lr: float
) -> np.ndarray:
    """One bias-corrected Adam update; mutates ``state``, returns new params."""
    if not np.all(np.isfinite(grads)):
        raise NumericError("non-finite gradient")
    state.step += 1
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads * grads
    m_hat = state.m / (1.0 - state.beta1**state.step)
    v_hat = state.v / (1.0 - state.beta2**state.step)
    return params - lr * m_hat / (np.sqrt(v_hat) + state.eps)


# ---------------------------------------------------------------------------
# data assembly
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunData:
    """Prepared splits plus the token counts used for circuit accounting."""

    train: list[PreparedExample]
    test: list[PreparedExample]
    dev: list[PreparedExample] | None
    vocab_size: int
    max_tokens: int


def build_run_data(config: ModelConfig, root: str | None = None) -> RunData:
    """Load the benchmark and prepare examples for ``config``.

    The vocabulary spans all splits (its size fixes the qubit counts, and
    test-only tokens must be encodable); document frequencies come from
    the training split only.
    """
    splits = load_benchmark(config.dataset, root)
    vocab = build_vocab(splits.all_examples())
    if vocab.size != config.vocab_size:
        raise DataError(
            f"config expects vocabulary of {config.vocab_size}, data has {vocab.size}"
        )
    max_tokens = splits.max_tokens()
    if max_tokens > config.seq_len:
        raise DataError(
            f"config sequence length {config.seq_len} is shorter than longest sentence ({max_tokens})"
        )
    stats = build_corpus_stats(splits.train, vocab)
    prep = lambda exs: prepare_examples(exs, vocab, stats, config.seq_len, config.idf_variant)
    return RunData(
        train=prep(splits.train),
        test=prep(splits.test),
        dev=prep(splits.dev) if splits.dev is not None else None,
        vocab_size=vocab.size,
        max_tokens=max_tokens,
    )


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class TrainRunReport:
    config: dict
    training: dict
    seed: int
    parameter_count: int
    train_loss: list[float] = field(default_factory=list)
    train_accuracy: list[float] = field(default_factory=list)
    test_accuracy: list[float] = field(default_factory=list)
    epoch_seconds: list[float] = field(default_factory=list)
    final_test_accuracy: float = 0.0
    total_circuit_executions: int = 0
    aborted: bool = False
    abort_reason: str | None = None
    reference_note: str | None = None

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "config": self.config,
            "training": self.training,
            "seed": self.seed,
            "parameter_count": self.parameter_count,
            "reference_note": self.reference_note,
            "epochs": [
                {
                    "epoch": i + 1,
                    "train_loss": self.train_loss[i],
                    "train_accuracy": self.train_accuracy[i],
                    "test_accuracy": self.test_accuracy[i],
                    "seconds": self.epoch_seconds[i],
                }
                for i in range(len(self.train_loss))
            ],
            "final_test_accuracy": self.final_test_accuracy,
            "total_circuit_executions": self.total_circuit_executions,
            "aborted": self.aborted,
            "abort_reason": self.abort_reason,
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    def save_loss_curve(self, path) -> None:
        """Two-column plain text (epoch, training loss) for plotting."""
        with open(path, "w", encoding="utf-8") as fh:
            for i, loss in enumerate(self.train_loss, start=1):
                fh.write(f"{i} {loss:.10f}\n")

    @property
    def mean_epoch_seconds(self) -> float:
        return float(np.mean(self.epoch_seconds)) if self.epoch_seconds else 0.0


def save_checkpoint(path, config: ModelConfig, params: dict, seed: int) -> None:
    """Config echo + flat parameter vector + seed, as JSON."""
    payload = {
        "schema": CHECKPOINT_SCHEMA,
        "config": asdict(config),
        "seed": seed,
        "parameters": flatten_params(config, params).tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_checkpoint(path) -> tuple[ModelConfig, dict, int]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("schema") != CHECKPOINT_SCHEMA:
        raise DataError(f"not a checkpoint file: {path}")
    config = ModelConfig(**payload["config"])
    params = unflatten_params(config, np.asarray(payload["parameters"], dtype=np.float64))
    return config, params, int(payload["seed"])


# ---------------------------------------------------------------------------
# evaluation and the training loop
# ---------------------------------------------------------------------------


def evaluate(config: ModelConfig, params: dict, examples: list[PreparedExample]) -> float:
    """Fraction of argmax-correct predictions."""
    correct = 0
    for ex in examples:
        if int(np.argmax(predict_probs(config, params, ex))) == ex.label:
            correct += 1
    return correct / len(examples)


def train(
    tc: TrainingConfig,
    config: ModelConfig,
    data: RunData | None = None,
    root: str | None = None,
) -> tuple[TrainRunReport, dict]:
    """Run the full protocol; returns (report, final params).

    A report is produced even when the run aborts on a non-finite loss or
    gradient (flagged, with the abort reason recorded).
    """
    if tc.dataset != config.dataset or tc.variant != config.variant:
        raise ConfigurationError("training config does not match model config")
    if data is None:
        data = build_run_data(config, root)
    rng = np.random.default_rng(tc.seed)
    params = init_params(config, rng)
    vec = flatten_params(config, params)
    adam = AdamState.zeros(vec.size)

    report = TrainRunReport(
        config=config.echo(),
        training={
            "epochs": tc.epochs,
            "batch_size": tc.batch_size,
            "learning_rate": tc.learning_rate,
        },
        seed=tc.seed,
        parameter_count=count_parameters(config),
        reference_note=reference_count_note(config),
    )
    executions_start = EXECUTIONS.value
    n_train = len(data.train)

    for _ in range(tc.epochs):
        t0 = time.perf_counter()
        order = rng.permutation(n_train)
        loss_sum = 0.0
        correct = 0
        abort: str | None = None
        for start in range(0, n_train, tc.batch_size):
            batch = order[start : start + tc.batch_size]
            grad_sum = np.zeros_like(vec)
            for i in batch:
                ex = data.train[int(i)]
                loss, grads, probs = loss_and_grad(config, params, ex)
                loss_sum += loss
                correct += int(np.argmax(probs)) == ex.label
                grad_sum += flatten_params(config, grads)
            if not math.isfinite(loss_sum):
                abort = "non-finite loss"
                break
            try:
                vec = adam_step(vec, grad_sum / len(batch), adam, tc.learning_rate)
            except NumericError as err:
                abort = str(err)
                break
            params = unflatten_params(config, vec)
        train_seconds = time.perf_counter() - t0
        if abort is not None:
            report.aborted = True
            report.abort_reason = abort
            break
        report.train_loss.append(loss_sum / n_train)
        report.train_accuracy.append(correct / n_train)
        report.epoch_seconds.append(train_seconds)
        report.test_accuracy.append(evaluate(config, params, data.test))

    report.final_test_accuracy = report.test_accuracy[-1] if report.test_accuracy else 0.0
    report.total_circuit_executions = EXECUTIONS.value - executions_start
    return report, params


def expected_circuit_count(
    config: ModelConfig,
    epochs: int,
    train_token_counts: list[int],
    test_token_counts: list[int],
) -> int:
    """Closed-form total for a full run: per epoch, every training example
    costs one forward plus its shifted gradient evaluations, and the test
    split costs one forward each for the accuracy entry."""
    per_epoch = 0
    for t in train_token_counts:
        per_epoch += forward_circuit_count(config, t) + backward_circuit_count(config, t)
    for t in test_token_counts:
        per_epoch += forward_circuit_count(config, t)
    return epochs * per_epoch


def token_counts(examples: list[PreparedExample]) -> list[int]:
    return [int(ex.mask.sum()) for ex in examples]


# ---------------------------------------------------------------------------
# seed sweeps (parallel across processes; each run is internally deterministic)
# ---------------------------------------------------------------------------


def _sweep_worker(args: tuple) -> dict:
    config, tc, root = args
    report, _ = train(tc, config, root=root)
    return report.to_dict()


def run_seed_sweep(
    config: ModelConfig,
    tc: TrainingConfig,
    seeds: list[int],
    root: str | None = None,
    max_workers: int | None = None,
) -> list[dict]:
    """Train one run per seed; returns report dicts in seed order."""
    jobs = [(config, replace(tc, seed=s), root) for s in seeds]
    if max_workers is None:
        max_workers = min(len(jobs), os.cpu_count() or 1)
    if max_workers <= 1 or len(jobs) == 1:
        return [_sweep_worker(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(_sweep_worker, jobs))


def sweep_summary(reports: list[dict]) -> dict:
    accs = [r["final_test_accuracy"] for r in reports]
    return {
        "seeds": [r["seed"] for r in reports],
        "final_test_accuracies": accs,
        "best_test_accuracy": max(accs),
        "median_test_accuracy": float(np.median(accs)),
        "mean_epoch_seconds": float(
            np.mean([e["seconds"] for r in reports for e in r["epochs"]])
        ),
        "parameter_count": reports[0]["parameter_count"],
        "total_circuit_executions": sum(r["total_circuit_executions"] for r in reports),
        "aborted_runs": sum(1 for r in reports if r["aborted"]),
    }


def make_preset_run(
    dataset: str, variant: str = "msff-qdconv", seed: int = 0, **overrides
) -> tuple[ModelConfig, TrainingConfig]:
    """Convenience: (ModelConfig, TrainingConfig) from a named preset."""
    model_over = {k: v for k, v in overrides.items() if k in (
        "vocab_size", "seq_len", "n_classes", "d_qemb", "d_qconv", "d_qfc",
        "kernel_size", "stride", "n_conv_layers", "idf_variant")}
    train_over = {k: v for k, v in overrides.items() if k in ("epochs", "batch_size", "learning_rate")}
    unknown = set(overrides) - set(model_over) - set(train_over)
    if unknown:
        raise ConfigurationError(f"unknown preset overrides: {sorted(unknown)}")
    config = preset_config(dataset, variant, **model_over)
    tc = preset_training(dataset, variant, seed=seed, **train_over)
    return config, tc
