"""Shared fixtures: bundled desk corpus, tag/color maps, and a small trained
model reused by probe/encoding/service tests."""

from importlib.resources import files

import numpy as np
import pytest

from statelens.corpus import TagMap, Vocabulary, build_vocabulary, encode_sentence, load_corpus
from statelens.lstm import TrainConfig, train_lstm


def data_path(name: str):
    return files("statelens.data").joinpath(name)


@pytest.fixture(scope="session")
def desk_corpus_lines():
    return load_corpus(data_path("train.txt"))


@pytest.fixture(scope="session")
def desk_test_lines():
    return load_corpus(data_path("test.txt"))


@pytest.fixture(scope="session")
def desk_tagmap():
    return TagMap.load(data_path("tags.tsv"), data_path("colors.cfg"))


@pytest.fixture(scope="session")
def small_model(desk_corpus_lines, desk_test_lines):
    """A quickly trained 2-layer model on a slice of the desk corpus, plus its
    vocabulary and encoded train/test splits. Good enough for contract tests;
    the acceptance suite trains the full default profile."""
    train_lines = desk_corpus_lines[:400]
    test_lines = desk_test_lines[:80]
    vocab = build_vocabulary(train_lines, min_count=2)
    train_seqs = [encode_sentence(line, vocab) for line in train_lines]
    test_seqs = [encode_sentence(line, vocab) for line in test_lines]
    config = TrainConfig(hidden_size=24, num_layers=2, epochs=3, lr=0.8, seed=7)
    result = train_lstm([s.ids for s in train_seqs], vocab.size, config)
    return {
        "params": result.params,
        "vocab": vocab,
        "train_seqs": train_seqs,
        "test_seqs": test_seqs,
        "config": config,
    }


@pytest.fixture(scope="session")
def small_workbench(small_model, desk_tagmap):
    """Workbench over the small model with lightly trained probes."""
    from statelens.probes import (
        ProbeConfig,
        evaluate_probe_table,
        extract_probe_datasets,
        train_all_probes,
    )
    from statelens.workbench import Workbench

    datasets = extract_probe_datasets(
        small_model["train_seqs"][:150],
        small_model["test_seqs"][:40],
        small_model["params"],
    )
    probes = train_all_probes(
        datasets, small_model["vocab"].size, ProbeConfig(epochs=2, lr=0.5, seed=3)
    )
    table = evaluate_probe_table(probes, datasets)
    return Workbench(
        params=small_model["params"],
        vocab=small_model["vocab"],
        probes=probes,
        tagmap=desk_tagmap,
        table=table,
        k_bars=3,
    )
