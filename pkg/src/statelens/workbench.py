"""Loads trained artifacts into one immutable snapshot and runs the full
sentence analysis: encode -> forward pass -> per-kind probe predictions ->
visual encodings, in the grid layout the UI renders."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import TagMap, Vocabulary, encode_sentence
from .encoding import PseEncoding, default_k_dominance, encode_pse
from .lstm import (
    OUTPUT_KIND,
    LstmParams,
    StateKind,
    forward_sequence,
    state_kinds,
)
from .modelio import file_sha256, load_model, load_probes, load_table
from .probes import ProbeModel, ProbeScore, probe_predict


class ArtifactError(RuntimeError):
    """Model/probe/table artifacts are missing or inconsistent."""


@dataclass(frozen=True)
class KindColumn:
    kind: StateKind
    column: int

    def describe(self, score: ProbeScore | None) -> dict:
        return {
            "key": self.kind.key,
            "name": self.kind.name,
            "layer": self.kind.layer,
            "label": self.kind.label,
            "column": self.column,
            "train_ppl": None if score is None else score.train_ppl.value,
            "test_ppl": None if score is None else score.test_ppl.value,
        }


@dataclass(frozen=True)
class AnalyzeResult:
    sentence: str
    tokens: tuple[str, ...]  # per-row input labels, EOS marker included
    grid: tuple[tuple[PseEncoding, ...], ...]  # T rows x one cell per kind
    outputs: tuple[PseEncoding, ...]  # the classifier's own prediction per row
    k_bars: int
    k_dominance: int


class Workbench:
    """One loaded model + probe bundle + tag maps, shared across requests.

    Instances are immutable after construction; every query keeps its state
    local, so concurrent readers are safe.
    """

    def __init__(
        self,
        params: LstmParams,
        vocab: Vocabulary,
        probes: dict[StateKind, ProbeModel],
        tagmap: TagMap,
        table: dict[StateKind, ProbeScore] | None = None,
        k_bars: int = 3,
        k_dominance: int | None = None,
    ):
        self.params = params
        self.vocab = vocab
        self.probes = probes
        self.tagmap = tagmap
        self.table = table
        self.k_bars = min(k_bars, vocab.size)
        self.k_dominance = min(
            k_dominance if k_dominance is not None else default_k_dominance(vocab.size),
            vocab.size,
        )
        self.kinds = state_kinds(params.num_layers)
        missing = [k.key for k in self.kinds if k not in probes]
        if missing:
            raise ArtifactError(f"probe bundle is missing kinds: {missing}")
        self.columns = tuple(
            KindColumn(kind=kind, column=i) for i, kind in enumerate(self.kinds)
        )
        self.output_column = len(self.kinds)

    @classmethod
    def load(
        cls,
        model_path: str | Path,
        probes_path: str | Path,
        lexicon_path: str | Path,
        colormap_path: str | Path,
        table_path: str | Path | None = None,
        k_bars: int = 3,
        k_dominance: int | None = None,
    ) -> "Workbench":
        for label, path in (
            ("model", model_path),
            ("probe bundle", probes_path),
            ("tag lexicon", lexicon_path),
            ("colormap", colormap_path),
        ):
            if not Path(path).is_file():
                raise ArtifactError(f"{label} file not found: {path}")
        params, vocab = load_model(model_path)
        probes, model_hash = load_probes(probes_path)
        actual_hash = file_sha256(model_path)
        if model_hash != actual_hash:
            raise ArtifactError(
                f"probe bundle was trained against model {model_hash[:12]}..., "
                f"but {model_path} hashes to {actual_hash[:12]}..."
            )
        tagmap = TagMap.load(lexicon_path, colormap_path)
        table = load_table(table_path) if table_path else None
        return cls(
            params=params,
            vocab=vocab,
            probes=probes,
            tagmap=tagmap,
            table=table,
            k_bars=k_bars,
            k_dominance=k_dominance,
        )

    def analyze(self, sentence: str, k_bars: int | None = None) -> AnalyzeResult:
        """Full grid for one sentence: per timestep, one encoding per kind
        plus the model's own prediction."""
        k = self.k_bars if k_bars is None else max(1, min(k_bars, self.vocab.size))
        seq = encode_sentence(sentence, self.vocab)
        records, dists = forward_sequence(seq, self.params)
        grid = []
        outputs = []
        for t, record in enumerate(records):
            row = []
            for kind in self.kinds:
                dist = probe_predict(self.probes[kind], record.vector(kind))
                row.append(
                    encode_pse(
                        dist, kind, t, self.vocab, self.tagmap,
                        k_bars=k, k_dominance=self.k_dominance,
                    )
                )
            grid.append(tuple(row))
            outputs.append(
                encode_pse(
                    dists[t], OUTPUT_KIND, t, self.vocab, self.tagmap,
                    k_bars=k, k_dominance=self.k_dominance,
                )
            )
        return AnalyzeResult(
            sentence=sentence,
            tokens=seq.source_tokens,
            grid=tuple(grid),
            outputs=tuple(outputs),
            k_bars=k,
            k_dominance=self.k_dominance,
        )

    # ------------------------------------------------------------------
    # JSON shapes (shared by the HTTP service and documented in the README)

    def layout_hints(self) -> list[dict]:
        scores = self.table or {}
        hints = [col.describe(scores.get(col.kind)) for col in self.columns]
        hints.append(
            {
                "key": OUTPUT_KIND.key,
                "name": OUTPUT_KIND.name,
                "layer": None,
                "label": OUTPUT_KIND.label,
                "column": self.output_column,
                "train_ppl": None,
                "test_ppl": None,
            }
        )
        return hints

    def model_info(self) -> dict:
        legend = [
            {"tag": tag, "color": color.hex()} for tag, color in self.tagmap.tag_colors.items()
        ]
        return {
            "vocab_size": self.vocab.size,
            "hidden_size": self.params.hidden_size,
            "num_layers": self.params.num_layers,
            "k_bars": self.k_bars,
            "k_dominance": self.k_dominance,
            "kinds": self.layout_hints(),
            "legend": legend,
            "default_tag": self.tagmap.default_tag,
        }

    def analysis_json(self, result: AnalyzeResult) -> dict:
        return {
            "sentence": result.sentence,
            "tokens": list(result.tokens),
            "k_bars": result.k_bars,
            "k_dominance": result.k_dominance,
            "layout_hints": self.layout_hints(),
            "grid": [[encoding_json(cell) for cell in row] for row in result.grid],
            "outputs": [encoding_json(cell) for cell in result.outputs],
        }


def encoding_json(enc: PseEncoding) -> dict:
    return {
        "kind": enc.kind.key,
        "timestep": enc.timestep,
        "bars": [
            {
                "token": bar.token,
                "id": bar.token_id,
                "p": bar.probability,
                "tag": bar.tag,
                "color": bar.color.hex(),
            }
            for bar in enc.bars
        ],
        "dominant_color": enc.dominant_color.hex(),
        "dominance": enc.dominance,
        "swatch": enc.swatch.hex(),
    }
