"""Exact gradients of scalar circuit outputs, plus a finite-difference oracle.

The parameter-shift rule is exact for any angle that parameterizes an Ry
gate feeding Pauli-Z expectations, which covers every circuit in this
package, including the data-encoding angles.  Differentiating encoding
angles is what lets stacked quantum layers chain gradients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class ScalarCircuit:
    """A deterministic map from an angle vector to one real output."""

    evaluate: Callable[[np.ndarray], float]
    arity: int


def _shifted(angles: np.ndarray, i: int, delta: float) -> np.ndarray:
    out = np.array(angles, dtype=np.float64, copy=True)
    out[i] += delta
    return out


def parameter_shift_grad(circuit: ScalarCircuit, angles: np.ndarray, i: int) -> float:
    """d(output)/d(angle i) via evaluations at +/- pi/2."""
    if not (0 <= i < circuit.arity):
        raise IndexError(f"angle index {i} out of range for arity {circuit.arity}")
    plus = circuit.evaluate(_shifted(angles, i, 0.5 * math.pi))
    minus = circuit.evaluate(_shifted(angles, i, -0.5 * math.pi))
    return 0.5 * (plus - minus)


def finite_diff_grad(
    circuit: ScalarCircuit, angles: np.ndarray, i: int, h: float = 1e-4
) -> float:
    """Central difference [f(a+h) - f(a-h)] / 2h, the independent oracle."""
    if not (0 <= i < circuit.arity):
        raise IndexError(f"angle index {i} out of range for arity {circuit.arity}")
    plus = circuit.evaluate(_shifted(angles, i, h))
    minus = circuit.evaluate(_shifted(angles, i, -h))
    return (plus - minus) / (2.0 * h)


def full_gradient(circuit: ScalarCircuit, angles: np.ndarray) -> np.ndarray:
    """Parameter-shift gradient at every index, encoding angles included."""
    angles = np.asarray(angles, dtype=np.float64)
    if angles.shape != (circuit.arity,):
        raise ValueError(f"expected {circuit.arity} angles, got shape {angles.shape}")
    grad = np.empty(circuit.arity, dtype=np.float64)
    for i in range(circuit.arity):
        grad[i] = parameter_shift_grad(circuit, angles, i)
    return grad
