"""Linear softmax probes: one independent classifier per hidden-state kind,
trained on (state vector, next token) pairs extracted from a frozen model."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .lstm import (
    LstmParams,
    PerplexityResult,
    StateKind,
    eval_perplexity,
    forward_sequence,
    state_kinds,
)
from .numerics import log_softmax, softmax


class ProbeError(ValueError):
    """Probe datasets or models are inconsistent with the model they probe."""


class ProbeDivergedError(RuntimeError):
    def __init__(self, step: int):
        super().__init__(f"probe training loss became non-finite at step {step}")
        self.step = step


@dataclass
class ProbeDataset:
    """(vector, next-token) pairs for one state kind and corpus split."""

    kind: StateKind
    vectors: np.ndarray  # (M, N)
    targets: np.ndarray  # (M,)
    split: str = "train"

    def __len__(self) -> int:
        return len(self.targets)

    @property
    def pairs(self):
        return zip(self.vectors, self.targets)


@dataclass
class ProbeModel:
    """Per-kind linear softmax classifier over the vocabulary."""

    kind: StateKind
    W: np.ndarray  # (V, N)
    b: np.ndarray  # (V,)


def extract_probe_datasets(
    train_sequences,
    test_sequences,
    params: LstmParams,
    target_mode: str = "next",
) -> dict[StateKind, tuple[ProbeDataset, ProbeDataset]]:
    """Run the frozen model over both corpus splits and collect, per kind, one
    (state vector at t, token at t+1) pair per within-sentence position.

    `target_mode="current"` instead pairs each state with the token that
    produced it (input-label semantics); the default is the next-token
    semantic the probes are evaluated under.
    """
    if target_mode not in ("next", "current"):
        raise ValueError(f"target_mode must be 'next' or 'current', got {target_mode!r}")
    kinds = state_kinds(params.num_layers)
    out: dict[StateKind, tuple[ProbeDataset, ProbeDataset]] = {}
    per_split = {}
    for split, sequences in (("train", train_sequences), ("test", test_sequences)):
        collected: dict[StateKind, list[np.ndarray]] = {k: [] for k in kinds}
        targets: list[np.ndarray] = []
        for seq in sequences:
            ids = np.asarray(getattr(seq, "ids", seq), dtype=np.intp)
            if len(ids) < 2:
                continue
            records, _ = forward_sequence(ids, params)
            upto = len(ids) - 1  # the state at the final id has no next token
            for kind in kinds:
                vecs = np.stack([records[t].vector(kind) for t in range(upto)])
                collected[kind].append(vecs)
            targets.append(ids[1:] if target_mode == "next" else ids[:-1])
        if not targets:
            raise ProbeError(f"no probe pairs could be extracted from the {split} split")
        y = np.concatenate(targets)
        per_split[split] = {
            kind: ProbeDataset(
                kind=kind, vectors=np.concatenate(vecs), targets=y.copy(), split=split
            )
            for kind, vecs in collected.items()
        }
    for kind in kinds:
        out[kind] = (per_split["train"][kind], per_split["test"][kind])
    return out


@dataclass
class ProbeConfig:
    epochs: int = 5
    lr: float = 0.5
    l2: float = 1e-5
    batch_size: int = 256
    seed: int = 1234

    def validate(self) -> None:
        for name in ("epochs", "lr", "batch_size"):
            if getattr(self, name) <= 0:
                raise ValueError(f"probe config field {name} must be positive")
        if self.l2 < 0:
            raise ValueError("probe config field l2 must be non-negative")


def probe_loss_and_grads(W: np.ndarray, b: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float):
    """Mean cross-entropy (plus L2 on W) and its gradients for one batch."""
    logits = X @ W.T + b
    logp = log_softmax(logits, axis=1)
    m = len(y)
    loss = -float(np.mean(logp[np.arange(m), y])) + 0.5 * l2 * float(np.sum(W * W))
    dlogits = np.exp(logp)
    dlogits[np.arange(m), y] -= 1.0
    dlogits /= m
    dW = dlogits.T @ X + l2 * W
    db = dlogits.sum(axis=0)
    return loss, dW, db


def train_probe(
    dataset: ProbeDataset,
    vocab_size: int,
    config: ProbeConfig,
    log=None,
) -> ProbeModel:
    """Mini-batch SGD on multinomial logistic regression, from zero init.

    Deterministic given the seed (which only drives batch shuffling).
    """
    config.validate()
    if len(dataset) == 0:
        raise ProbeError(f"probe dataset for {dataset.kind.key} is empty")
    X, y = dataset.vectors, dataset.targets
    dim = X.shape[1]
    W = np.zeros((vocab_size, dim), dtype=np.float64)
    b = np.zeros(vocab_size, dtype=np.float64)
    rng = np.random.default_rng(config.seed)
    step = 0
    for epoch in range(config.epochs):
        order = rng.permutation(len(y))
        epoch_loss = 0.0
        for start in range(0, len(y), config.batch_size):
            batch = order[start : start + config.batch_size]
            loss, dW, db = probe_loss_and_grads(W, b, X[batch], y[batch], config.l2)
            step += 1
            if not np.isfinite(loss):
                raise ProbeDivergedError(step)
            W -= config.lr * dW
            b -= config.lr * db
            epoch_loss += loss * len(batch)
        if log is not None:
            log(f"  probe {dataset.kind.key}: epoch {epoch + 1}/{config.epochs} "
                f"loss {epoch_loss / len(y):.4f}")
    return ProbeModel(kind=dataset.kind, W=W, b=b)


def probe_predict(probe: ProbeModel, v: np.ndarray) -> np.ndarray:
    """softmax(W v + b): the probe's distribution over the vocabulary."""
    v = np.asarray(v)
    if v.shape != (probe.W.shape[1],):
        raise ProbeError(
            f"probe {probe.kind.key} expects a vector of length {probe.W.shape[1]}, "
            f"got shape {tuple(v.shape)}"
        )
    return softmax(probe.W @ v + probe.b)


def probe_true_token_probabilities(probe: ProbeModel, dataset: ProbeDataset) -> np.ndarray:
    """p(target | vector) for every pair in the dataset, batched."""
    probs = np.empty(len(dataset), dtype=np.float64)
    bs = 4096
    for start in range(0, len(dataset), bs):
        X = dataset.vectors[start : start + bs]
        y = dataset.targets[start : start + bs]
        logp = log_softmax(X @ probe.W.T + probe.b, axis=1)
        probs[start : start + len(y)] = np.exp(logp[np.arange(len(y)), y])
    return probs


@dataclass(frozen=True)
class ProbeScore:
    kind: StateKind
    train_ppl: PerplexityResult
    test_ppl: PerplexityResult


def evaluate_probe_table(
    probes: dict[StateKind, ProbeModel],
    datasets: dict[StateKind, tuple[ProbeDataset, ProbeDataset]],
) -> dict[StateKind, ProbeScore]:
    """Per-kind train/test perplexity for every kind in `datasets`."""
    missing = sorted(k.key for k in datasets if k not in probes)
    if missing:
        raise ProbeError(f"missing trained probes for kinds: {missing}")
    table: dict[StateKind, ProbeScore] = {}
    for kind, (train_ds, test_ds) in datasets.items():
        probe = probes[kind]
        table[kind] = ProbeScore(
            kind=kind,
            train_ppl=eval_perplexity(probe_true_token_probabilities(probe, train_ds)),
            test_ppl=eval_perplexity(probe_true_token_probabilities(probe, test_ds)),
        )
    return table


def train_all_probes(
    datasets: dict[StateKind, tuple[ProbeDataset, ProbeDataset]],
    vocab_size: int,
    config: ProbeConfig,
    log=None,
) -> dict[StateKind, ProbeModel]:
    """Train one probe per kind; each kind gets its own seed derived from the
    base seed and the kind key, so results do not depend on training order."""
    probes = {}
    for kind, (train_ds, _) in datasets.items():
        kind_seed = np.random.SeedSequence(
            [config.seed, *[ord(ch) for ch in kind.key]]
        ).generate_state(1)[0]
        kind_config = ProbeConfig(
            epochs=config.epochs,
            lr=config.lr,
            l2=config.l2,
            batch_size=config.batch_size,
            seed=int(kind_seed),
        )
        probes[kind] = train_probe(train_ds, vocab_size, kind_config, log=log)
    return probes
