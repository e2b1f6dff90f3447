"""Workbench loading, artifact integrity, and analysis structure."""

import numpy as np
import pytest

from statelens.cli import PipelineConfig, cmd_probe, cmd_train
from statelens.corpus import CorpusError
from statelens.lstm import OUTPUT_KIND
from statelens.workbench import ArtifactError, Workbench


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory, desk_corpus_lines, desk_test_lines):
    root = tmp_path_factory.mktemp("wb")
    (root / "train.txt").write_text("\n".join(desk_corpus_lines[:100]) + "\n")
    (root / "test.txt").write_text("\n".join(desk_test_lines[:20]) + "\n")
    config = PipelineConfig(
        train_corpus=str(root / "train.txt"),
        test_corpus=str(root / "test.txt"),
        out_dir=str(root / "artifacts"),
        hidden_size=10,
        epochs=1,
        probe_epochs=1,
        seed=5,
    )
    quiet = lambda *a, **k: None
    cmd_train(config, log=quiet)
    cmd_probe(config, log=quiet)
    return config


class TestLoad:
    def test_loads_and_analyzes(self, artifacts):
        wb = Workbench.load(
            artifacts.model_path,
            artifacts.probes_path,
            artifacts.tag_lexicon,
            artifacts.colormap,
            table_path=artifacts.table_path,
        )
        result = wb.analyze("the cat sat")
        assert len(result.grid) == 4
        assert len(result.grid[0]) == 17
        assert result.outputs[0].kind == OUTPUT_KIND
        assert result.tokens == ("the", "cat", "sat", "<eos>")

    def test_missing_file_reported(self, artifacts, tmp_path):
        with pytest.raises(ArtifactError, match="model file not found"):
            Workbench.load(
                tmp_path / "nope.txt",
                artifacts.probes_path,
                artifacts.tag_lexicon,
                artifacts.colormap,
            )

    def test_hash_mismatch_rejected(self, artifacts, tmp_path):
        tampered = tmp_path / "model.txt"
        text = artifacts.model_path.read_text()
        tampered.write_text(text + "\n")
        with pytest.raises(ArtifactError, match="hashes to"):
            Workbench.load(
                tampered,
                artifacts.probes_path,
                artifacts.tag_lexicon,
                artifacts.colormap,
            )

    def test_empty_sentence_propagates(self, artifacts):
        wb = Workbench.load(
            artifacts.model_path,
            artifacts.probes_path,
            artifacts.tag_lexicon,
            artifacts.colormap,
        )
        with pytest.raises(CorpusError, match="empty"):
            wb.analyze("   ")

    def test_layout_hints_dependence_order(self, artifacts):
        wb = Workbench.load(
            artifacts.model_path,
            artifacts.probes_path,
            artifacts.tag_lexicon,
            artifacts.colormap,
        )
        hints = wb.layout_hints()
        assert [h["column"] for h in hints] == list(range(18))
        assert hints[0]["key"] == "embedding"
        assert hints[-1]["key"] == "y"
        keys = [h["key"] for h in hints]
        for layer in (1, 2):
            base = keys.index(f"f:{layer}")
            assert keys[base : base + 8] == [
                f"f:{layer}", f"i:{layer}", f"o:{layer}", f"c_tilde:{layer}",
                f"l:{layer}", f"s:{layer}", f"c:{layer}", f"h:{layer}",
            ]
