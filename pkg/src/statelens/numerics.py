"""Small shared numeric helpers (stable softmax family)."""

from __future__ import annotations

import numpy as np
from scipy.special import expit as sigmoid  # noqa: F401  (re-exported)


def softmax(a: np.ndarray, axis: int = -1) -> np.ndarray:
    """Numerically stable softmax along `axis`."""
    shifted = a - np.max(a, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


def log_softmax(a: np.ndarray, axis: int = -1) -> np.ndarray:
    """Numerically stable log(softmax(a)) along `axis`."""
    shifted = a - np.max(a, axis=axis, keepdims=True)
    return shifted - np.log(np.sum(np.exp(shifted), axis=axis, keepdims=True))
