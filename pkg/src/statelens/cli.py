"""Command-line pipeline: train the model, fit probes, evaluate, export SVG
grids, and serve the HTTP API. Stages communicate only through the documented
artifact files, so any stage can be rerun from its inputs."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path

from .corpus import TagMap, build_vocabulary, encode_sentence, load_corpus
from .lstm import TrainConfig, model_perplexity, train_lstm
from .modelio import (
    file_sha256,
    load_model,
    load_probes,
    save_model,
    save_probes,
    save_table,
    serialize_table,
)
from .probes import ProbeConfig, evaluate_probe_table, extract_probe_datasets, train_all_probes
from .svgexport import render_grid_svg
from .workbench import ArtifactError, Workbench


def default_data(name: str) -> str:
    return str(files("statelens.data").joinpath(name))


@dataclass
class PipelineConfig:
    """Fully resolved pipeline settings: defaults, then config file, then flags."""

    # input/output paths
    train_corpus: str = ""
    test_corpus: str = ""
    tag_lexicon: str = ""
    colormap: str = ""
    out_dir: str = "artifacts"
    # model hyperparameters (desk-scale profile)
    hidden_size: int = 64
    num_layers: int = 2
    epochs: int = 18
    lr: float = 1.0
    lr_decay: float = 0.9
    clip: float = 5.0
    bptt: int = 20
    seed: int = 1234
    min_count: int = 2
    vocab_max: int = 2000
    float32: bool = False
    # probe hyperparameters
    probe_epochs: int = 12
    probe_lr: float = 1.5
    probe_l2: float = 1e-5
    probe_batch: int = 256
    probe_seed: int = 1234
    probe_targets: str = "next"
    # encoding
    k_bars: int = 3
    k_dominance: int | None = None
    # service
    host: str = "127.0.0.1"
    port: int = 8000
    ui_dir: str | None = None

    def __post_init__(self):
        self.train_corpus = self.train_corpus or default_data("train.txt")
        self.test_corpus = self.test_corpus or default_data("test.txt")
        self.tag_lexicon = self.tag_lexicon or default_data("tags.tsv")
        self.colormap = self.colormap or default_data("colors.cfg")

    # artifact locations inside out_dir
    @property
    def model_path(self) -> Path:
        return Path(self.out_dir) / "model.txt"

    @property
    def probes_path(self) -> Path:
        return Path(self.out_dir) / "probes.txt"

    @property
    def table_path(self) -> Path:
        return Path(self.out_dir) / "perplexity.tsv"

    @property
    def svg_path(self) -> Path:
        return Path(self.out_dir) / "grid.svg"

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            hidden_size=self.hidden_size,
            num_layers=self.num_layers,
            epochs=self.epochs,
            lr=self.lr,
            lr_decay=self.lr_decay,
            clip=self.clip,
            bptt=self.bptt,
            seed=self.seed,
            float32=self.float32,
        )

    def probe_config(self) -> ProbeConfig:
        return ProbeConfig(
            epochs=self.probe_epochs,
            lr=self.probe_lr,
            l2=self.probe_l2,
            batch_size=self.probe_batch,
            seed=self.probe_seed,
        )


def load_config(path: str | None, overrides: dict) -> PipelineConfig:
    """Defaults <- optional JSON config file <- non-None CLI overrides."""
    values: dict = {}
    if path is not None:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f.name for f in dataclasses.fields(PipelineConfig)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys in {path}: {sorted(unknown)}")
        values.update(raw)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return PipelineConfig(**values)


def resolved_json(config: PipelineConfig) -> str:
    return json.dumps(dataclasses.asdict(config), indent=2)


def _encode_corpus(lines, vocab):
    return [encode_sentence(line, vocab) for line in lines]


# ---------------------------------------------------------------------------
# Commands (each returns data for tests; `main` handles printing/exit codes)


def cmd_train(config: PipelineConfig, log=print):
    train_lines = load_corpus(config.train_corpus)
    test_lines = load_corpus(config.test_corpus)
    vocab = build_vocabulary(train_lines, config.min_count, max_size=config.vocab_max)
    log(f"vocabulary: {vocab.size} tokens")
    train_seqs = _encode_corpus(train_lines, vocab)
    test_seqs = _encode_corpus(test_lines, vocab)
    result = train_lstm([s.ids for s in train_seqs], vocab.size, config.train_config(), log=log)
    test_ppl = model_perplexity(result.params, test_seqs)
    config.model_path.parent.mkdir(parents=True, exist_ok=True)
    save_model(config.model_path, result.params, vocab)
    log(f"test perplexity {test_ppl.value!r}")
    log(f"model written to {config.model_path}")
    return result.params, vocab, test_ppl


def cmd_probe(config: PipelineConfig, log=print):
    params, vocab = load_model(config.model_path, float32=config.float32)
    model_hash = file_sha256(config.model_path)
    train_seqs = _encode_corpus(load_corpus(config.train_corpus), vocab)
    test_seqs = _encode_corpus(load_corpus(config.test_corpus), vocab)
    log("extracting per-kind probe datasets")
    datasets = extract_probe_datasets(
        train_seqs, test_seqs, params, target_mode=config.probe_targets
    )
    log(f"training {len(datasets)} probes")
    probes = train_all_probes(datasets, vocab.size, config.probe_config(), log=log)
    table = evaluate_probe_table(probes, datasets)
    save_probes(config.probes_path, probes, model_hash)
    save_table(config.table_path, table)
    log(serialize_table(table).rstrip())
    log(f"probe bundle written to {config.probes_path}")
    log(f"perplexity table written to {config.table_path}")
    return probes, table


def cmd_eval(config: PipelineConfig, log=print):
    params, vocab = load_model(config.model_path, float32=config.float32)
    test_seqs = _encode_corpus(load_corpus(config.test_corpus), vocab)
    test_ppl = model_perplexity(params, test_seqs)
    log(f"model test perplexity {test_ppl.value!r} ({test_ppl.floored} floored)")
    table = None
    if config.probes_path.is_file():
        probes, bundle_hash = load_probes(config.probes_path)
        if bundle_hash != file_sha256(config.model_path):
            raise ArtifactError("probe bundle does not match the model file")
        train_seqs = _encode_corpus(load_corpus(config.train_corpus), vocab)
        datasets = extract_probe_datasets(
            train_seqs, test_seqs, params, target_mode=config.probe_targets
        )
        table = evaluate_probe_table(probes, datasets)
        log(serialize_table(table).rstrip())
    return test_ppl, table


def _load_workbench(config: PipelineConfig) -> Workbench:
    return Workbench.load(
        model_path=config.model_path,
        probes_path=config.probes_path,
        lexicon_path=config.tag_lexicon,
        colormap_path=config.colormap,
        table_path=config.table_path if config.table_path.is_file() else None,
        k_bars=config.k_bars,
        k_dominance=config.k_dominance,
    )


def cmd_export(config: PipelineConfig, sentence: str, out: str | None = None, log=print):
    workbench = _load_workbench(config)
    result = workbench.analyze(sentence)
    svg = render_grid_svg(result)
    out_path = Path(out) if out else config.svg_path
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(svg, encoding="utf-8")
    log(f"grid figure written to {out_path}")
    return out_path, result


def cmd_serve(config: PipelineConfig, log=print):
    import uvicorn

    from .service import create_app

    workbench = _load_workbench(config)
    app = create_app(workbench, ui_dir=config.ui_dir)
    log(f"serving on http://{config.host}:{config.port}")
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")


# ---------------------------------------------------------------------------
# Argument parsing


_FLAG_TYPES = {
    str: str,
    int: int,
    float: float,
}


def _add_config_flags(parser: argparse.ArgumentParser, names: list[str]) -> None:
    for name in names:
        field = PipelineConfig.__dataclass_fields__[name]
        flag = "--" + name.replace("_", "-")
        if field.type in ("bool",):
            parser.add_argument(flag, action="store_const", const=True, default=None)
        else:
            base = {"int": int, "float": float, "str": str, "int | None": int,
                    "str | None": str}.get(field.type, str)
            parser.add_argument(flag, type=base, default=None)


_STAGE_FLAGS = {
    "train": [
        "train_corpus", "test_corpus", "out_dir", "hidden_size", "num_layers",
        "epochs", "lr", "lr_decay", "clip", "bptt", "seed", "min_count",
        "vocab_max", "float32",
    ],
    "probe": [
        "train_corpus", "test_corpus", "out_dir", "probe_epochs", "probe_lr",
        "probe_l2", "probe_batch", "probe_seed", "probe_targets", "float32",
    ],
    "eval": ["train_corpus", "test_corpus", "out_dir", "probe_targets", "float32"],
    "export": ["out_dir", "tag_lexicon", "colormap", "k_bars", "k_dominance"],
    "serve": [
        "out_dir", "tag_lexicon", "colormap", "k_bars", "k_dominance",
        "host", "port", "ui_dir",
    ],
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="statelens",
        description="Train, probe, inspect and serve a small LSTM language model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command, flags in _STAGE_FLAGS.items():
        p = sub.add_parser(command)
        p.add_argument("--config", default=None, help="JSON config file")
        _add_config_flags(p, flags)
        if command == "export":
            p.add_argument("--sentence", required=True)
            p.add_argument("--out", default=None, help="output SVG path")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config")
    sentence = args.pop("sentence", None)
    out = args.pop("out", None)
    try:
        config = load_config(config_path, args)
        print(resolved_json(config))
        if command == "train":
            cmd_train(config)
        elif command == "probe":
            cmd_probe(config)
        elif command == "eval":
            cmd_eval(config)
        elif command == "export":
            if not sentence or not sentence.strip():
                raise ValueError("--sentence must not be empty")
            cmd_export(config, sentence, out)
        elif command == "serve":
            cmd_serve(config)
    except (OSError, ValueError, ArtifactError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
