"""Quantum text classification with depthwise quantum convolution.

Statevector-simulated variational circuits assembled into a two-branch
text classifier (word-level quantum convolutions fused with a TF-IDF
sentence embedding), its ablation variants, classical counterparts, and a
reproducible training harness with bundled benchmark datasets.
"""

from .errors import (
    ConfigurationError,
    DataError,
    DegenerateVectorError,
    NumericError,
    QConvTextError,
    VerificationError,
    VocabularyError,
)
from .gradients import ScalarCircuit, finite_diff_grad, full_gradient, parameter_shift_grad
from .layers import (
    AnsatzParameters,
    ChannelSequence,
    ConvSpec,
    apply_basic_entangler,
    layer_param_count,
    quantum_depthwise_conv1d,
    quantum_fully_connected,
    quantum_sentence_embed,
    quantum_standard_conv1d,
    quantum_word_embed,
)
from .models import (
    ClassProbabilities,
    ModelConfig,
    VARIANTS,
    count_parameters,
    forward,
    forward_classical,
    forward_variant_qdconv,
    forward_variant_qse,
    init_params,
    loss_and_grad,
    preset_config,
)
from .statevector import (
    Statevector,
    amplitude_encode,
    angle_encode,
    apply_cnot,
    apply_ry,
    init_zero,
    z_expectation,
)
from .textdata import (
    LabeledExample,
    Vocabulary,
    build_corpus_stats,
    build_vocab,
    load_benchmark,
    load_dataset,
    pad_and_index,
    tfidf_vector,
)
from .training import (
    TrainingConfig,
    TrainRunReport,
    adam_step,
    cross_entropy,
    evaluate,
    preset_training,
    train,
)

__version__ = "0.1.0"
