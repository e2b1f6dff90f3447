"""Versioned structured-text artifacts: model file, probe bundle, perplexity
table. Floats are written with shortest round-trip decimals (repr), so a
64-bit model survives save/load bit-exactly."""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from .corpus import Vocabulary
from .lstm import LayerParams, LstmParams, PerplexityResult, StateKind, parse_kind_key
from .probes import ProbeModel, ProbeScore

MODEL_MAGIC = "statelens-model"
PROBES_MAGIC = "statelens-probes"
FORMAT_VERSION = 1


class FormatError(ValueError):
    """A model/probe/table file does not match the documented format."""


def _format_tensor(name: str, arr: np.ndarray) -> list[str]:
    arr2d = np.atleast_2d(np.asarray(arr, dtype=np.float64))
    lines = [f"tensor {name} {arr2d.shape[0]} {arr2d.shape[1]}"]
    lines.extend(" ".join(repr(v) for v in row) for row in arr2d.tolist())
    return lines


class _LineReader:
    def __init__(self, text: str, path):
        self.lines = text.splitlines()
        self.pos = 0
        self.path = path

    def next(self) -> str:
        if self.pos >= len(self.lines):
            raise FormatError(f"{self.path}: unexpected end of file")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def expect(self, prefix: str) -> list[str]:
        line = self.next()
        parts = line.split()
        if not parts or parts[0] != prefix:
            raise FormatError(f"{self.path}:{self.pos}: expected '{prefix} ...', got {line!r}")
        return parts[1:]


def _read_tensor(reader: _LineReader, expected_name: str, dtype=np.float64, rank: int = 2) -> np.ndarray:
    rows, cols = (int(v) for v in _read_tensor_header(reader, expected_name))
    if rank == 1 and rows != 1:
        raise FormatError(f"{reader.path}: tensor {expected_name} should be a single-row vector")
    data = np.empty((rows, cols), dtype=np.float64)
    for r in range(rows):
        values = reader.next().split()
        if len(values) != cols:
            raise FormatError(
                f"{reader.path}:{reader.pos}: tensor {expected_name} row {r} has "
                f"{len(values)} values, expected {cols}"
            )
        data[r] = [float(v) for v in values]
    out = data if dtype == np.float64 else data.astype(dtype)
    return out[0] if rank == 1 else out


def _read_tensor_header(reader: _LineReader, expected_name: str) -> tuple[str, str]:
    args = reader.expect("tensor")
    if len(args) != 3 or args[0] != expected_name:
        raise FormatError(
            f"{reader.path}:{reader.pos}: expected tensor {expected_name}, got {args}"
        )
    return args[1], args[2]


# ---------------------------------------------------------------------------
# Model file


def serialize_model(params: LstmParams, vocab: Vocabulary) -> str:
    if vocab.size != params.vocab_size:
        raise FormatError(
            f"vocabulary size {vocab.size} does not match model vocab_size {params.vocab_size}"
        )
    lines = [
        f"{MODEL_MAGIC} {FORMAT_VERSION}",
        f"vocab_size {params.vocab_size}",
        f"hidden_size {params.hidden_size}",
        f"num_layers {params.num_layers}",
        f"vocab {vocab.size}",
    ]
    lines.extend(f"{tok} {vocab.counts.get(tok, 0)}" for tok in vocab.tokens)
    for name, tensor in params.named_tensors():
        lines.extend(_format_tensor(name, tensor))
    return "\n".join(lines) + "\n"


def save_model(path: str | Path, params: LstmParams, vocab: Vocabulary) -> None:
    Path(path).write_text(serialize_model(params, vocab), encoding="utf-8")


def load_model(path: str | Path, float32: bool = False) -> tuple[LstmParams, Vocabulary]:
    path = Path(path)
    reader = _LineReader(path.read_text(encoding="utf-8"), path)
    magic = reader.next().split()
    if magic[:1] != [MODEL_MAGIC]:
        raise FormatError(f"{path}: not a model file (got {' '.join(magic[:1])!r})")
    if magic[1:] != [str(FORMAT_VERSION)]:
        raise FormatError(f"{path}: unsupported model format version {magic[1:]}")
    vocab_size = int(reader.expect("vocab_size")[0])
    hidden_size = int(reader.expect("hidden_size")[0])
    num_layers = int(reader.expect("num_layers")[0])
    n_tokens = int(reader.expect("vocab")[0])
    if n_tokens != vocab_size:
        raise FormatError(f"{path}: vocab listing length {n_tokens} != vocab_size {vocab_size}")
    tokens = []
    counts = {}
    for _ in range(n_tokens):
        tok, _, count = reader.next().partition(" ")
        tokens.append(tok)
        counts[tok] = int(count)
    vocab = Vocabulary(
        tokens=tuple(tokens), counts=counts, _index={t: i for i, t in enumerate(tokens)}
    )

    dtype = np.float32 if float32 else np.float64
    embedding = _read_tensor(reader, "embedding", dtype)
    layers = []
    for u in range(1, num_layers + 1):
        parts = {}
        for kind in ("W_f", "W_i", "W_o", "W_c"):
            parts[kind] = _read_tensor(reader, f"layer{u}.{kind}", dtype)
        for kind in ("b_f", "b_i", "b_o", "b_c"):
            parts[kind] = _read_tensor(reader, f"layer{u}.{kind}", dtype, rank=1)
        layers.append(LayerParams.from_parts(**parts))
    W_y = _read_tensor(reader, "W_y", dtype)
    b_y = _read_tensor(reader, "b_y", dtype, rank=1)
    params = LstmParams(embedding=embedding, layers=layers, W_y=W_y, b_y=b_y)
    if params.hidden_size != hidden_size or params.vocab_size != vocab_size:
        raise FormatError(f"{path}: tensor shapes disagree with the header")
    return params, vocab


def file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# Probe bundle


def serialize_probes(probes: dict[StateKind, ProbeModel], model_hash: str) -> str:
    lines = [
        f"{PROBES_MAGIC} {FORMAT_VERSION}",
        f"model_hash {model_hash}",
        f"num_probes {len(probes)}",
    ]
    for kind in sorted(probes, key=lambda k: (k.layer, k.name)):
        probe = probes[kind]
        lines.append(f"probe {kind.key}")
        lines.extend(_format_tensor("W", probe.W))
        lines.extend(_format_tensor("b", probe.b))
    return "\n".join(lines) + "\n"


def save_probes(path: str | Path, probes: dict[StateKind, ProbeModel], model_hash: str) -> None:
    Path(path).write_text(serialize_probes(probes, model_hash), encoding="utf-8")


def load_probes(path: str | Path) -> tuple[dict[StateKind, ProbeModel], str]:
    path = Path(path)
    reader = _LineReader(path.read_text(encoding="utf-8"), path)
    magic = reader.next().split()
    if magic != [PROBES_MAGIC, str(FORMAT_VERSION)]:
        raise FormatError(f"{path}: not a version-{FORMAT_VERSION} probe bundle")
    model_hash = reader.expect("model_hash")[0]
    n = int(reader.expect("num_probes")[0])
    probes: dict[StateKind, ProbeModel] = {}
    for _ in range(n):
        key = reader.expect("probe")[0]
        kind = parse_kind_key(key)
        W = _read_tensor(reader, "W")
        b = _read_tensor(reader, "b", rank=1)
        probes[kind] = ProbeModel(kind=kind, W=W, b=b)
    return probes, model_hash


# ---------------------------------------------------------------------------
# Perplexity table


TABLE_HEADER = "kind\tlayer\ttrain_ppl\ttest_ppl"


def serialize_table(table: dict[StateKind, ProbeScore]) -> str:
    lines = [TABLE_HEADER]
    for kind in sorted(table, key=lambda k: (k.layer, k.name)):
        score = table[kind]
        lines.append(
            f"{kind.name}\t{kind.layer}\t{score.train_ppl.value!r}\t{score.test_ppl.value!r}"
        )
    return "\n".join(lines) + "\n"


def save_table(path: str | Path, table: dict[StateKind, ProbeScore]) -> None:
    Path(path).write_text(serialize_table(table), encoding="utf-8")


def load_table(path: str | Path) -> dict[StateKind, ProbeScore]:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != TABLE_HEADER:
        raise FormatError(f"{path}: missing table header {TABLE_HEADER!r}")
    table = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        name, layer, train_ppl, test_ppl = line.split("\t")
        kind = StateKind(name, int(layer))
        table[kind] = ProbeScore(
            kind=kind,
            train_ppl=PerplexityResult(float(train_ppl)),
            test_ppl=PerplexityResult(float(test_ppl)),
        )
    return table
