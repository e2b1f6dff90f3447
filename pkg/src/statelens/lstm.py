"""Stacked LSTM recurrence with every named state vector recorded, softmax
output classifier, full-sequence forward passes, BPTT gradients, SGD training,
and perplexity evaluation.

Per layer and timestep the recurrence produces eight vectors:

    f = sigmoid(W_f [x, h_prev] + b_f)        forget gate
    i = sigmoid(W_i [x, h_prev] + b_i)        remember gate
    o = sigmoid(W_o [x, h_prev] + b_o)        output gate
    c_tilde = tanh(W_c [x, h_prev] + b_c)     cell input
    l = f * c_prev                            long-term memory
    s = i * c_tilde                           short-term memory
    c = l + s                                 cell state
    h = o * tanh(c)                           output state

where x is the embedding row (layer 1) or the previous layer's h (layers > 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .numerics import log_softmax, sigmoid, softmax


class ShapeError(ValueError):
    """A tensor does not have the shape the recurrence requires."""


class TrainingDivergedError(RuntimeError):
    """Training loss became non-finite."""

    def __init__(self, step: int):
        super().__init__(f"training loss became non-finite at update step {step}")
        self.step = step


# ---------------------------------------------------------------------------
# State kinds


LAYER_KIND_NAMES = ("f", "i", "o", "c_tilde", "l", "s", "c", "h")

KIND_LABELS = {
    "embedding": "Word Embedding",
    "f": "Forget Gate",
    "i": "Remember Gate",
    "o": "Output Gate",
    "c_tilde": "Cell Input",
    "l": "Long-term Memory",
    "s": "Short-term Memory",
    "c": "Cell State",
    "h": "Output State",
    "y": "Model Prediction",
}


@dataclass(frozen=True)
class StateKind:
    """One named vector definition: the embedding, or a per-layer LSTM vector.

    `layer` is 1-based for LSTM vectors and 0 for the embedding.
    """

    name: str
    layer: int

    @property
    def key(self) -> str:
        if self.name in ("embedding", "y"):
            return self.name
        return f"{self.name}:{self.layer}"

    @property
    def label(self) -> str:
        return KIND_LABELS[self.name]


EMBEDDING_KIND = StateKind("embedding", 0)
OUTPUT_KIND = StateKind("y", 0)  # the classifier's own prediction, not probed


def state_kinds(num_layers: int) -> tuple[StateKind, ...]:
    """All probeable kinds in dependence order: embedding first, then per
    layer (f, i, o, c_tilde) before (l, s) before c before h."""
    kinds = [EMBEDDING_KIND]
    for layer in range(1, num_layers + 1):
        kinds.extend(StateKind(name, layer) for name in LAYER_KIND_NAMES)
    return tuple(kinds)


def parse_kind_key(key: str) -> StateKind:
    if key == "embedding":
        return EMBEDDING_KIND
    if key == "y":
        return OUTPUT_KIND
    name, _, layer = key.partition(":")
    if name not in LAYER_KIND_NAMES or not layer.isdigit():
        raise ValueError(f"not a state-kind key: {key!r}")
    return StateKind(name, int(layer))


# ---------------------------------------------------------------------------
# Parameters


_GATE_SLOTS = {"f": 0, "i": 1, "o": 2, "c": 3}  # row blocks of the stacked matrices


@dataclass
class LayerParams:
    """One layer's gate parameters, stored stacked as W (4N x 2N), b (4N,).

    The four named N x 2N matrices and N-vectors are views into the stack, so
    mutating either representation stays consistent.
    """

    W: np.ndarray
    b: np.ndarray

    def _block(self, arr: np.ndarray, gate: str) -> np.ndarray:
        n = self.hidden_size
        s = _GATE_SLOTS[gate] * n
        return arr[s : s + n]

    @property
    def hidden_size(self) -> int:
        return self.W.shape[0] // 4

    W_f = property(lambda self: self._block(self.W, "f"))
    W_i = property(lambda self: self._block(self.W, "i"))
    W_o = property(lambda self: self._block(self.W, "o"))
    W_c = property(lambda self: self._block(self.W, "c"))
    b_f = property(lambda self: self._block(self.b, "f"))
    b_i = property(lambda self: self._block(self.b, "i"))
    b_o = property(lambda self: self._block(self.b, "o"))
    b_c = property(lambda self: self._block(self.b, "c"))

    @classmethod
    def from_parts(cls, W_f, W_i, W_o, W_c, b_f, b_i, b_o, b_c) -> "LayerParams":
        return cls(
            W=np.concatenate([np.asarray(m, dtype=np.float64) for m in (W_f, W_i, W_o, W_c)]),
            b=np.concatenate([np.asarray(v, dtype=np.float64) for v in (b_f, b_i, b_o, b_c)]),
        )


@dataclass
class LstmParams:
    """Full model: embedding table, per-layer gate parameters, output classifier."""

    embedding: np.ndarray  # (V, N)
    layers: list[LayerParams]
    W_y: np.ndarray  # (V, N)
    b_y: np.ndarray  # (V,)

    @property
    def vocab_size(self) -> int:
        return self.embedding.shape[0]

    @property
    def hidden_size(self) -> int:
        return self.embedding.shape[1]

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    @classmethod
    def init(
        cls,
        vocab_size: int,
        hidden_size: int,
        num_layers: int,
        seed: int,
        dtype=np.float64,
    ) -> "LstmParams":
        """Uniform weights in [-1/sqrt(N), +1/sqrt(N)], zero biases except the
        forget-gate bias which starts at +1."""
        if min(vocab_size, hidden_size, num_layers) < 1:
            raise ValueError("vocab_size, hidden_size, num_layers must be positive")
        rng = np.random.default_rng(seed)
        n = hidden_size
        bound = 1.0 / np.sqrt(n)
        uniform = lambda shape: rng.uniform(-bound, bound, size=shape).astype(dtype)
        layers = []
        for _ in range(num_layers):
            layer = LayerParams(W=uniform((4 * n, 2 * n)), b=np.zeros(4 * n, dtype=dtype))
            layer.b_f[:] = 1.0
            layers.append(layer)
        return cls(
            embedding=uniform((vocab_size, n)),
            layers=layers,
            W_y=uniform((vocab_size, n)),
            b_y=np.zeros(vocab_size, dtype=dtype),
        )

    def zeros_like(self) -> "LstmParams":
        return LstmParams(
            embedding=np.zeros_like(self.embedding),
            layers=[
                LayerParams(W=np.zeros_like(l.W), b=np.zeros_like(l.b)) for l in self.layers
            ],
            W_y=np.zeros_like(self.W_y),
            b_y=np.zeros_like(self.b_y),
        )

    def named_tensors(self) -> Iterator[tuple[str, np.ndarray]]:
        """Every parameter tensor under a stable name (gate matrices unstacked)."""
        yield "embedding", self.embedding
        for u, layer in enumerate(self.layers, start=1):
            for gate in ("f", "i", "o", "c"):
                yield f"layer{u}.W_{gate}", layer._block(layer.W, gate)
            for gate in ("f", "i", "o", "c"):
                yield f"layer{u}.b_{gate}", layer._block(layer.b, gate)
        yield "W_y", self.W_y
        yield "b_y", self.b_y

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(t)) for _, t in self.named_tensors())


# ---------------------------------------------------------------------------
# States


@dataclass(frozen=True)
class LayerState:
    f: np.ndarray
    i: np.ndarray
    o: np.ndarray
    c_tilde: np.ndarray
    l: np.ndarray
    s: np.ndarray
    c: np.ndarray
    h: np.ndarray


@dataclass(frozen=True)
class StateRecord:
    """Every named vector for one timestep: the consumed embedding plus the
    eight per-layer vectors."""

    timestep: int
    embedding: np.ndarray
    layers: tuple[LayerState, ...]

    def vector(self, kind: StateKind) -> np.ndarray:
        if kind.name == "embedding":
            return self.embedding
        return getattr(self.layers[kind.layer - 1], kind.name)


def initial_state(params: LstmParams) -> tuple[np.ndarray, np.ndarray]:
    """Zero (h, c), each shaped (num_layers, hidden_size)."""
    shape = (params.num_layers, params.hidden_size)
    return np.zeros(shape, dtype=params.embedding.dtype), np.zeros(
        shape, dtype=params.embedding.dtype
    )


# ---------------------------------------------------------------------------
# Forward passes


def _check_shape(name: str, arr: np.ndarray, expected: tuple[int, ...]) -> None:
    if tuple(arr.shape) != expected:
        raise ShapeError(f"{name} has shape {tuple(arr.shape)}, expected {expected}")


class _WindowCache:
    """Per-layer activations of one forward window, kept for BPTT."""

    __slots__ = ("Z", "F", "I", "O", "G", "C", "TanhC", "Cprev", "H")

    def __init__(self, T: int, n: int, dtype):
        self.Z = np.empty((T, 2 * n), dtype=dtype)
        self.F = np.empty((T, n), dtype=dtype)
        self.I = np.empty((T, n), dtype=dtype)
        self.O = np.empty((T, n), dtype=dtype)
        self.G = np.empty((T, n), dtype=dtype)  # c_tilde
        self.C = np.empty((T, n), dtype=dtype)
        self.TanhC = np.empty((T, n), dtype=dtype)
        self.Cprev = np.empty((T, n), dtype=dtype)
        self.H = np.empty((T, n), dtype=dtype)


def _forward_window(
    params: LstmParams,
    input_rows: np.ndarray,
    h0: np.ndarray,
    c0: np.ndarray,
) -> tuple[list[_WindowCache], np.ndarray, np.ndarray]:
    """Run the recurrence over input_rows (T, N); returns per-layer caches and
    the final (h, c) state."""
    T = input_rows.shape[0]
    n = params.hidden_size
    dtype = input_rows.dtype
    h_final = np.empty_like(h0)
    c_final = np.empty_like(c0)
    caches = []
    x = input_rows
    for u, layer in enumerate(params.layers):
        cache = _WindowCache(T, n, dtype)
        h_prev = h0[u]
        c_prev = c0[u]
        W, b = layer.W, layer.b
        for t in range(T):
            z = np.concatenate([x[t], h_prev])
            a = W @ z + b
            f = sigmoid(a[:n])
            i = sigmoid(a[n : 2 * n])
            o = sigmoid(a[2 * n : 3 * n])
            g = np.tanh(a[3 * n :])
            c = f * c_prev + i * g
            tanh_c = np.tanh(c)
            h = o * tanh_c
            cache.Z[t] = z
            cache.F[t] = f
            cache.I[t] = i
            cache.O[t] = o
            cache.G[t] = g
            cache.C[t] = c
            cache.TanhC[t] = tanh_c
            cache.Cprev[t] = c_prev
            cache.H[t] = h
            h_prev, c_prev = h, c
        h_final[u] = h_prev
        c_final[u] = c_prev
        caches.append(cache)
        x = cache.H
    return caches, h_final, c_final


def lstm_step(
    input_vec: np.ndarray,
    prev: tuple[np.ndarray, np.ndarray],
    params: LstmParams,
    timestep: int = 0,
) -> StateRecord:
    """One recurrence step over all layers; `prev` is the (h, c) pair from
    initial_state() or a previous record."""
    n = params.hidden_size
    input_vec = np.asarray(input_vec)
    h_prev, c_prev = (np.asarray(a) for a in prev)
    _check_shape("input", input_vec, (n,))
    _check_shape("prev_h", h_prev, (params.num_layers, n))
    _check_shape("prev_c", c_prev, (params.num_layers, n))
    caches, _, _ = _forward_window(params, input_vec[np.newaxis, :], h_prev, c_prev)
    return _record_from_caches(caches, 0, input_vec, timestep)


def _record_from_caches(
    caches: list[_WindowCache], t: int, embedding_row: np.ndarray, timestep: int
) -> StateRecord:
    layers = []
    for cache in caches:
        f, i, g = cache.F[t], cache.I[t], cache.G[t]
        layers.append(
            LayerState(
                f=f,
                i=i,
                o=cache.O[t],
                c_tilde=g,
                l=f * cache.Cprev[t],
                s=i * g,
                c=cache.C[t],
                h=cache.H[t],
            )
        )
    return StateRecord(timestep=timestep, embedding=embedding_row, layers=tuple(layers))


def classify(h_final: np.ndarray, params: LstmParams) -> np.ndarray:
    """softmax(W_y h + b_y): the model's next-token distribution."""
    h_final = np.asarray(h_final)
    _check_shape("h_final", h_final, (params.hidden_size,))
    return softmax(params.W_y @ h_final + params.b_y)


def forward_sequence(seq, params: LstmParams):
    """Consume every id of a TokenSequence (or raw id list), returning one
    StateRecord and one next-token distribution per timestep."""
    ids = np.asarray(getattr(seq, "ids", seq), dtype=np.intp)
    if ids.size == 0:
        raise ValueError("cannot run the recurrence over an empty sequence")
    if ids.max() >= params.vocab_size or ids.min() < 0:
        raise ShapeError(f"token id out of range for vocab_size={params.vocab_size}")
    rows = params.embedding[ids]
    h0, c0 = initial_state(params)
    caches, _, _ = _forward_window(params, rows, h0, c0)
    records = [_record_from_caches(caches, t, rows[t], t) for t in range(len(ids))]
    # classify per step (not one batched matmul) so emitted distributions are
    # bitwise identical to classify(h_t) recomputed independently
    dists = np.stack([classify(caches[-1].H[t], params) for t in range(len(ids))])
    return records, dists


# ---------------------------------------------------------------------------
# Loss and gradients (BPTT)


class _WindowGrads:
    """Gradients of one BPTT window. The embedding gradient is kept as the
    touched rows only (it is row-sparse within a window)."""

    __slots__ = ("emb_ids", "emb_rows", "layer_W", "layer_b", "W_y", "b_y")

    def arrays(self):
        yield self.emb_rows
        yield from self.layer_W
        yield from self.layer_b
        yield self.W_y
        yield self.b_y

    def scale(self, factor: float) -> None:
        for arr in self.arrays():
            arr *= factor

    def squared_norm(self) -> float:
        return sum(float(np.sum(a * a)) for a in self.arrays())


def _window_loss_grads(
    params: LstmParams,
    input_ids: np.ndarray,
    target_ids: np.ndarray,
    h0: np.ndarray,
    c0: np.ndarray,
):
    """Mean next-token cross-entropy over one window plus its gradients;
    returns (loss, grads, carried h, carried c)."""
    T = len(input_ids)
    n = params.hidden_size
    rows = params.embedding[input_ids]
    caches, h_final, c_final = _forward_window(params, rows, h0, c0)

    H_top = caches[-1].H
    logits = H_top @ params.W_y.T + params.b_y
    logp = log_softmax(logits, axis=1)
    loss = -float(np.mean(logp[np.arange(T), target_ids]))

    grads = _WindowGrads()
    dlogits = np.exp(logp)
    dlogits[np.arange(T), target_ids] -= 1.0
    dlogits /= T
    grads.W_y = dlogits.T @ H_top
    grads.b_y = dlogits.sum(axis=0)
    grads.layer_W = [None] * params.num_layers
    grads.layer_b = [None] * params.num_layers

    dX = dlogits @ params.W_y  # gradient on the top layer's h, (T, N)
    for u in reversed(range(params.num_layers)):
        cache = caches[u]
        W = params.layers[u].W
        dh_carry = np.zeros(n, dtype=rows.dtype)
        dc_carry = np.zeros(n, dtype=rows.dtype)
        dA = np.empty((T, 4 * n), dtype=rows.dtype)
        dX_lower = np.empty((T, n), dtype=rows.dtype)
        for t in reversed(range(T)):
            f, i, o, g = cache.F[t], cache.I[t], cache.O[t], cache.G[t]
            tanh_c = cache.TanhC[t]
            dh = dX[t] + dh_carry
            do = dh * tanh_c
            dc = dc_carry + dh * o * (1.0 - tanh_c * tanh_c)
            df = dc * cache.Cprev[t]
            di = dc * g
            dg = dc * i
            dc_carry = dc * f
            da = dA[t]
            da[:n] = df * f * (1.0 - f)
            da[n : 2 * n] = di * i * (1.0 - i)
            da[2 * n : 3 * n] = do * o * (1.0 - o)
            da[3 * n :] = dg * (1.0 - g * g)
            dz = W.T @ da
            dh_carry = dz[n:]
            dX_lower[t] = dz[:n]
        grads.layer_W[u] = dA.T @ cache.Z
        grads.layer_b[u] = dA.sum(axis=0)
        dX = dX_lower
    grads.emb_ids, inverse = np.unique(input_ids, return_inverse=True)
    grads.emb_rows = np.zeros((len(grads.emb_ids), n), dtype=rows.dtype)
    np.add.at(grads.emb_rows, inverse, dX)
    return loss, grads, h_final, c_final


def sequence_loss(params: LstmParams, input_ids, target_ids) -> float:
    """Mean next-token cross-entropy over a full sequence (no truncation)."""
    input_ids = np.asarray(input_ids, dtype=np.intp)
    target_ids = np.asarray(target_ids, dtype=np.intp)
    rows = params.embedding[input_ids]
    h0, c0 = initial_state(params)
    caches, _, _ = _forward_window(params, rows, h0, c0)
    logits = caches[-1].H @ params.W_y.T + params.b_y
    logp = log_softmax(logits, axis=1)
    return -float(np.mean(logp[np.arange(len(input_ids)), target_ids]))


def sequence_gradients(params: LstmParams, input_ids, target_ids):
    """Analytic BPTT gradients of sequence_loss; returns (loss, grads) with
    grads in the same (dense) layout as the parameters."""
    input_ids = np.asarray(input_ids, dtype=np.intp)
    target_ids = np.asarray(target_ids, dtype=np.intp)
    h0, c0 = initial_state(params)
    loss, wgrads, _, _ = _window_loss_grads(params, input_ids, target_ids, h0, c0)
    grads = params.zeros_like()
    grads.embedding[wgrads.emb_ids] = wgrads.emb_rows
    for layer, dW, db in zip(grads.layers, wgrads.layer_W, wgrads.layer_b):
        layer.W[:] = dW
        layer.b[:] = db
    grads.W_y[:] = wgrads.W_y
    grads.b_y[:] = wgrads.b_y
    return loss, grads


# ---------------------------------------------------------------------------
# Training


@dataclass
class TrainConfig:
    hidden_size: int = 64
    num_layers: int = 2
    epochs: int = 10
    lr: float = 1.0
    lr_decay: float = 0.85
    clip: float = 5.0
    bptt: int = 20
    seed: int = 1234
    float32: bool = False

    def validate(self) -> None:
        positives = {
            "hidden_size": self.hidden_size,
            "num_layers": self.num_layers,
            "epochs": self.epochs,
            "lr": self.lr,
            "lr_decay": self.lr_decay,
            "clip": self.clip,
            "bptt": self.bptt,
        }
        for name, value in positives.items():
            if value <= 0:
                raise ValueError(f"config field {name} must be positive, got {value}")


@dataclass
class TrainResult:
    params: LstmParams
    epoch_losses: list[float] = field(default_factory=list)


def _clip_gradients(grads: _WindowGrads, clip: float) -> None:
    """Global-norm clipping; untouched embedding rows contribute zero."""
    norm = np.sqrt(grads.squared_norm())
    if norm > clip:
        grads.scale(clip / norm)


def train_lstm(
    sequences: Sequence[Sequence[int]],
    vocab_size: int,
    config: TrainConfig,
    log=None,
) -> TrainResult:
    """SGD with gradient-norm clipping over truncated BPTT windows.

    Hidden state carries across windows within a sentence and resets at each
    sentence boundary. Deterministic for a fixed seed: initialization and the
    per-epoch sentence shuffle share one seeded generator.
    """
    config.validate()
    dtype = np.float32 if config.float32 else np.float64
    seqs = [np.asarray(s, dtype=np.intp) for s in sequences if len(s) >= 2]
    if not seqs:
        raise ValueError("training corpus has no sequence with at least two tokens")
    params = LstmParams.init(
        vocab_size, config.hidden_size, config.num_layers, seed=config.seed, dtype=dtype
    )
    rng = np.random.default_rng(config.seed)
    result = TrainResult(params=params)
    step = 0
    for epoch in range(config.epochs):
        lr = config.lr * (config.lr_decay**epoch)
        order = rng.permutation(len(seqs))
        total_nll = 0.0
        total_tokens = 0
        for seq_idx in order:
            ids = seqs[seq_idx]
            inputs, targets = ids[:-1], ids[1:]
            h, c = initial_state(params)
            for start in range(0, len(inputs), config.bptt):
                stop = min(start + config.bptt, len(inputs))
                loss, grads, h, c = _window_loss_grads(
                    params, inputs[start:stop], targets[start:stop], h, c
                )
                step += 1
                if not np.isfinite(loss):
                    raise TrainingDivergedError(step)
                _clip_gradients(grads, config.clip)
                params.embedding[grads.emb_ids] -= lr * grads.emb_rows
                for layer, dW, db in zip(params.layers, grads.layer_W, grads.layer_b):
                    layer.W -= lr * dW
                    layer.b -= lr * db
                params.W_y -= lr * grads.W_y
                params.b_y -= lr * grads.b_y
                total_nll += loss * (stop - start)
                total_tokens += stop - start
        epoch_loss = total_nll / total_tokens
        result.epoch_losses.append(epoch_loss)
        if log is not None:
            log(f"epoch {epoch + 1}/{config.epochs}  lr {lr:.4g}  "
                f"loss {epoch_loss:.4f}  ppl {np.exp(epoch_loss):.2f}")
        if not params.all_finite():
            raise TrainingDivergedError(step)
    return result


# ---------------------------------------------------------------------------
# Perplexity


@dataclass(frozen=True)
class PerplexityResult:
    """exp of the mean negative log probability, plus how many zero
    probabilities had to be floored to epsilon."""

    value: float
    floored: int = 0

    def __float__(self) -> float:
        return self.value


def eval_perplexity(probs: Iterable[float], eps: float = 1e-12) -> PerplexityResult:
    """Perplexity of the assigned true-token probabilities, in log space."""
    p = np.asarray(list(probs) if not isinstance(probs, np.ndarray) else probs, dtype=np.float64)
    if p.size == 0:
        raise ValueError("perplexity needs at least one probability")
    floored = int(np.count_nonzero(p <= 0.0))
    if floored:
        p = np.where(p <= 0.0, eps, p)
    return PerplexityResult(value=float(np.exp(-np.mean(np.log(p)))), floored=floored)


def true_token_probabilities(params: LstmParams, sequences) -> np.ndarray:
    """p(ids[t+1] | ids[..t]) for every within-sentence position, concatenated
    over all sequences."""
    chunks = []
    for seq in sequences:
        ids = np.asarray(getattr(seq, "ids", seq), dtype=np.intp)
        if len(ids) < 2:
            continue
        _, dists = forward_sequence(ids, params)
        chunks.append(dists[np.arange(len(ids) - 1), ids[1:]])
    if not chunks:
        raise ValueError("no prediction targets in the given sequences")
    return np.concatenate(chunks)


def model_perplexity(params: LstmParams, sequences) -> PerplexityResult:
    """Corpus perplexity of the model's own next-token predictions."""
    return eval_perplexity(true_token_probabilities(params, sequences))
