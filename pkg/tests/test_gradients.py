"""Analytic BPTT gradients against central finite differences."""

import time

import numpy as np

from statelens.lstm import LstmParams, sequence_gradients, sequence_loss


def finite_difference_grads(params, inputs, targets, h=1e-5):
    """Central differences of sequence_loss over every parameter tensor."""
    fd = {}
    for name, tensor in params.named_tensors():
        grad = np.zeros_like(tensor)
        it = np.nditer(tensor, flags=["multi_index"])
        while not it.finished:
            idx = it.multi_index
            original = tensor[idx]
            tensor[idx] = original + h
            up = sequence_loss(params, inputs, targets)
            tensor[idx] = original - h
            down = sequence_loss(params, inputs, targets)
            tensor[idx] = original
            grad[idx] = (up - down) / (2 * h)
            it.iternext()
        fd[name] = grad
    return fd


def max_relative_error(analytic, numeric, floor=1e-6):
    denom = np.maximum(floor, np.maximum(np.abs(analytic), np.abs(numeric)))
    return float(np.max(np.abs(analytic - numeric) / denom))


def run_gradient_check(hidden_size=4, num_layers=2, T=5, vocab_size=7, seed=123):
    params = LstmParams.init(vocab_size, hidden_size, num_layers, seed=seed)
    rng = np.random.default_rng(seed + 1)
    inputs = rng.integers(0, vocab_size, size=T)
    targets = rng.integers(0, vocab_size, size=T)
    _, grads = sequence_gradients(params, inputs, targets)
    fd = finite_difference_grads(params, inputs, targets)
    errors = {
        name: max_relative_error(tensor, fd[name]) for name, tensor in grads.named_tensors()
    }
    return errors


class TestGradientCheck:
    def test_bptt_matches_finite_differences(self):
        """Max relative error < 1e-4 for every parameter tensor, N=4 U=2 T=5."""
        start = time.monotonic()
        errors = run_gradient_check()
        elapsed = time.monotonic() - start
        worst = max(errors.values())
        assert worst < 1e-4, f"worst tensor error {worst:.3e}: {errors}"
        assert elapsed < 60.0

    def test_gradients_cover_every_tensor(self):
        params = LstmParams.init(7, 4, 2, seed=0)
        names = [name for name, _ in params.named_tensors()]
        assert names[0] == "embedding" and names[-2:] == ["W_y", "b_y"]
        assert "layer1.W_f" in names and "layer2.b_c" in names
        assert len(names) == 1 + 8 * 2 + 2

    def test_loss_decreases_along_negative_gradient(self):
        params = LstmParams.init(6, 4, 2, seed=3)
        inputs = np.array([1, 2, 3, 4])
        targets = np.array([2, 3, 4, 5])
        loss0, grads = sequence_gradients(params, inputs, targets)
        lr = 0.1
        params.embedding -= lr * grads.embedding
        for layer, glayer in zip(params.layers, grads.layers):
            layer.W -= lr * glayer.W
            layer.b -= lr * glayer.b
        params.W_y -= lr * grads.W_y
        params.b_y -= lr * grads.b_y
        assert sequence_loss(params, inputs, targets) < loss0
