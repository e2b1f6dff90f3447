"""Pipeline commands: artifacts, determinism, config resolution, exit codes."""

import json
import re

import numpy as np
import pytest

from statelens.cli import (
    PipelineConfig,
    cmd_eval,
    cmd_export,
    cmd_probe,
    cmd_train,
    load_config,
    main,
)
from statelens.corpus import encode_sentence, load_corpus
from statelens.lstm import model_perplexity
from statelens.modelio import file_sha256, load_model

QUIET = staticmethod(lambda *a, **k: None)


def tiny_config(tmp_path, data_dir, **overrides) -> PipelineConfig:
    defaults = dict(
        train_corpus=str(data_dir / "train.txt"),
        test_corpus=str(data_dir / "test.txt"),
        out_dir=str(tmp_path / "artifacts"),
        hidden_size=12,
        epochs=2,
        lr=0.8,
        seed=99,
        probe_epochs=1,
        probe_seed=99,
    )
    defaults.update(overrides)
    return PipelineConfig(**defaults)


@pytest.fixture(scope="module")
def tiny_data(tmp_path_factory, desk_corpus_lines, desk_test_lines):
    data_dir = tmp_path_factory.mktemp("corpus")
    (data_dir / "train.txt").write_text("\n".join(desk_corpus_lines[:120]) + "\n")
    (data_dir / "test.txt").write_text("\n".join(desk_test_lines[:25]) + "\n")
    return data_dir


@pytest.fixture(scope="module")
def trained(tmp_path_factory, tiny_data):
    """One tiny pipeline run shared by the read-only command tests."""
    out_root = tmp_path_factory.mktemp("run")
    config = tiny_config(out_root, tiny_data)
    quiet = lambda *a, **k: None
    params, vocab, test_ppl = cmd_train(config, log=quiet)
    cmd_probe(config, log=quiet)
    return config, params, vocab, test_ppl


class TestCmdTrain:
    def test_model_file_round_trips(self, trained):
        config, params, vocab, _ = trained
        loaded, loaded_vocab = load_model(config.model_path)
        assert loaded_vocab.tokens == vocab.tokens
        for (_, a), (_, b) in zip(params.named_tensors(), loaded.named_tensors()):
            np.testing.assert_array_equal(a, b)

    def test_rerun_produces_identical_file_hash(self, tmp_path, tiny_data):
        quiet = lambda *a, **k: None
        c1 = tiny_config(tmp_path / "a", tiny_data)
        c2 = tiny_config(tmp_path / "b", tiny_data)
        cmd_train(c1, log=quiet)
        cmd_train(c2, log=quiet)
        assert file_sha256(c1.model_path) == file_sha256(c2.model_path)

    def test_reported_ppl_matches_reload_and_recompute(self, trained):
        config, _, _, reported = trained
        params, vocab = load_model(config.model_path)
        test_seqs = [encode_sentence(l, vocab) for l in load_corpus(config.test_corpus)]
        recomputed = model_perplexity(params, test_seqs)
        assert recomputed.value == reported.value


class TestCmdProbe:
    def test_table_has_17_rows(self, trained):
        config = trained[0]
        lines = config.table_path.read_text().strip().splitlines()
        assert len(lines) == 1 + 17

    def test_final_layer_h_not_worst_and_bundle_checks(self, trained):
        config = trained[0]
        from statelens.modelio import load_probes, load_table

        probes, model_hash = load_probes(config.probes_path)
        assert model_hash == file_sha256(config.model_path)
        assert len(probes) == 17

    def test_rerun_identical_artifacts(self, tmp_path, tiny_data):
        quiet = lambda *a, **k: None
        c1 = tiny_config(tmp_path / "a", tiny_data)
        c2 = tiny_config(tmp_path / "b", tiny_data)
        for c in (c1, c2):
            cmd_train(c, log=quiet)
            cmd_probe(c, log=quiet)
        assert file_sha256(c1.probes_path) == file_sha256(c2.probes_path)
        assert file_sha256(c1.table_path) == file_sha256(c2.table_path)

    def test_missing_model_fails(self, tmp_path, tiny_data):
        config = tiny_config(tmp_path, tiny_data)
        with pytest.raises(OSError):
            cmd_probe(config, log=lambda *a, **k: None)


class TestCmdEval:
    def test_eval_recomputes_and_checks_table(self, trained):
        config, _, _, reported = trained
        test_ppl, table = cmd_eval(config, log=lambda *a, **k: None)
        assert test_ppl.value == reported.value
        assert table is not None and len(table) == 17


class TestCmdExport:
    def test_svg_swatch_count(self, trained, tmp_path):
        config = trained[0]
        out = tmp_path / "grid.svg"
        _, result = cmd_export(config, "the cat sat", out=str(out), log=lambda *a, **k: None)
        svg = out.read_text()
        T = len(result.grid)
        assert T == 4  # 3 words + EOS
        assert len(re.findall(r'class="swatch"', svg)) == T * 17

    def test_swatch_fills_match_encodings(self, trained, tmp_path):
        config = trained[0]
        out = tmp_path / "grid.svg"
        _, result = cmd_export(config, "the cat", out=str(out), log=lambda *a, **k: None)
        svg = out.read_text()
        for row in result.grid:
            for cell in row:
                pattern = (
                    f'class="swatch" data-kind="{cell.kind.key}" data-t="{cell.timestep}"'
                )
                match = re.search(re.escape(pattern) + r'[^>]*fill="(#[0-9a-f]{6})"', svg)
                assert match, pattern
                assert match.group(1) == cell.swatch.hex()

    def test_deterministic_bytes(self, trained, tmp_path):
        config = trained[0]
        quiet = lambda *a, **k: None
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        cmd_export(config, "the cat sat", out=str(a), log=quiet)
        cmd_export(config, "the cat sat", out=str(b), log=quiet)
        assert a.read_bytes() == b.read_bytes()


class TestMainEntrypoint:
    def test_export_requires_sentence_text(self, trained, capsys):
        config = trained[0]
        code = main(
            ["export", "--out-dir", str(config.out_dir), "--sentence", "  ",
             "--tag-lexicon", config.tag_lexicon, "--colormap", config.colormap]
        )
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_model_is_an_error_exit(self, tmp_path, capsys):
        code = main(["eval", "--out-dir", str(tmp_path / "nothing")])
        assert code == 1
        err = capsys.readouterr().err
        assert "error:" in err

    def test_serve_with_missing_artifacts_fails_before_binding(self, tmp_path, capsys):
        code = main(["serve", "--out-dir", str(tmp_path / "nothing"), "--port", "1"])
        assert code == 1
        assert "not found" in capsys.readouterr().err

    def test_resolved_config_is_printed(self, trained, tmp_path, capsys):
        config = trained[0]
        code = main(
            ["export", "--out-dir", str(config.out_dir), "--sentence", "the cat",
             "--out", str(tmp_path / "o.svg"),
             "--tag-lexicon", config.tag_lexicon, "--colormap", config.colormap]
        )
        assert code == 0
        printed = capsys.readouterr().out
        resolved = json.loads(printed[: printed.index("}\n") + 2])
        assert resolved["out_dir"] == str(config.out_dir)


class TestConfigResolution:
    def test_file_then_flag_precedence(self, tmp_path):
        config_file = tmp_path / "config.json"
        config_file.write_text(json.dumps({"hidden_size": 31, "epochs": 9}))
        config = load_config(str(config_file), {"epochs": 2})
        assert config.hidden_size == 31  # from file
        assert config.epochs == 2  # flag wins

    def test_unknown_keys_rejected(self, tmp_path):
        config_file = tmp_path / "config.json"
        config_file.write_text(json.dumps({"hidden_sizes": 31}))
        with pytest.raises(ValueError, match="unknown config key"):
            load_config(str(config_file), {})

    def test_defaults_point_at_bundled_data(self):
        config = PipelineConfig()
        assert config.train_corpus.endswith("train.txt")
        assert config.colormap.endswith("colors.cfg")
