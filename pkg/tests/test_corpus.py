"""Vocabulary construction, sentence encoding, and tag lookup."""

from collections import Counter

import numpy as np
import pytest

from statelens.colors import Color
from statelens.corpus import (
    EOS_TOKEN,
    NUM_TOKEN,
    UNK_TOKEN,
    CorpusError,
    TagMap,
    Vocabulary,
    build_vocabulary,
    decode_ids,
    encode_sentence,
    is_numeral,
    load_colormap,
    load_tag_lexicon,
    tag_of,
    tokenize,
)

GREEN = Color.parse("#2ca25f")
GRAY = Color.parse("#aaaaaa")


def simple_tagmap():
    return TagMap.from_dicts(
        token_tags={"cat": "NOUN"},
        tag_colors={"NOUN": GREEN, "default": GRAY},
    )


class TestBuildVocabulary:
    def test_threshold_boundary(self):
        vocab = build_vocabulary("a a b", min_count=2)
        assert set(vocab.tokens) == {"a", UNK_TOKEN, NUM_TOKEN, EOS_TOKEN}
        seq = encode_sentence("b", vocab)
        assert seq.ids[0] == vocab.unk_id

    def test_specials_have_fixed_ids(self):
        vocab = build_vocabulary("a a b", min_count=1)
        assert vocab.unk_id == 0 and vocab.num_id == 1 and vocab.eos_id == 2
        assert vocab.tokens[0] == UNK_TOKEN
        assert len({vocab.unk_id, vocab.num_id, vocab.eos_id}) == 3

    def test_numeral_rule(self):
        vocab = build_vocabulary("x 1987 x 12.5 x", min_count=1)
        assert NUM_TOKEN in vocab.tokens
        seq = encode_sentence("1987 12.5", vocab)
        assert seq.ids[:2] == (vocab.num_id, vocab.num_id)
        assert vocab.counts[NUM_TOKEN] == 2

    @pytest.mark.parametrize(
        "token,expect",
        [
            ("1987", True),
            ("12.5", True),
            ("1,000", True),
            ("-3", True),
            ("+7", True),
            ("12.", False),
            ("a1", False),
            ("1.2.3", False),
            ("", False),
        ],
    )
    def test_is_numeral(self, token, expect):
        assert is_numeral(token) is expect

    def test_ordering_count_then_lexicographic(self):
        vocab = build_vocabulary("b b c c a a a", min_count=1)
        assert vocab.tokens[3:] == ("a", "b", "c")

    def test_empty_corpus_rejected(self):
        with pytest.raises(CorpusError):
            build_vocabulary("   \n \n", min_count=1)

    def test_count_oracle_on_desk_corpus(self, desk_corpus_lines):
        """V equals distinct retained tokens + 3 specials, counted independently."""
        min_count = 2
        vocab = build_vocabulary(desk_corpus_lines, min_count=min_count)

        counter = Counter()
        for line in desk_corpus_lines:
            for tok in line.lower().split():
                counter[tok] += 1
        retained = {
            tok
            for tok, c in counter.items()
            if c >= min_count and not is_numeral(tok) and tok not in vocab.tokens[:3]
        }
        assert vocab.size == len(retained) + 3

    def test_counts_conserve_corpus_total(self, desk_corpus_lines):
        vocab = build_vocabulary(desk_corpus_lines, min_count=2)
        total = sum(len(tokenize(line)) for line in desk_corpus_lines)
        non_eos = sum(c for tok, c in vocab.counts.items() if tok != EOS_TOKEN)
        assert non_eos == total

    def test_deterministic(self, desk_corpus_lines):
        a = build_vocabulary(desk_corpus_lines, min_count=2)
        b = build_vocabulary(desk_corpus_lines, min_count=2)
        assert a.tokens == b.tokens and a.counts == b.counts

    def test_max_size_cap(self):
        vocab = build_vocabulary("a a a b b c", min_count=1, max_size=4)
        assert vocab.size == 4
        assert vocab.tokens[3] == "a"


class TestEncodeSentence:
    @pytest.fixture()
    def vocab(self):
        return build_vocabulary("the cat sat on the mat", min_count=1)

    def test_known_tokens(self, vocab):
        seq = encode_sentence("The cat", vocab)
        assert seq.ids == (vocab.id_of("the"), vocab.id_of("cat"), vocab.eos_id)
        assert seq.source_tokens == ("The", "cat", EOS_TOKEN)

    def test_oov_and_numeral(self, vocab):
        seq = encode_sentence("zzzz 42", vocab)
        assert seq.ids == (vocab.unk_id, vocab.num_id, vocab.eos_id)

    def test_round_trip(self, vocab):
        once = encode_sentence("the cat sat on 42 zzzz", vocab)
        again = encode_sentence(decode_ids(once.ids, vocab), vocab)
        assert again.ids == once.ids

    def test_empty_sentence_rejected(self, vocab):
        with pytest.raises(CorpusError, match="empty"):
            encode_sentence("   ", vocab)

    def test_ids_always_below_vocab_size(self, vocab, desk_corpus_lines):
        for line in desk_corpus_lines[:200]:
            seq = encode_sentence(line, vocab)
            assert max(seq.ids) < vocab.size
            assert seq.ids[-1] == vocab.eos_id


class TestTagMap:
    def test_known_token(self):
        tagmap = simple_tagmap()
        assert tag_of("cat", tagmap) == ("NOUN", GREEN)

    def test_unknown_token_gets_default(self):
        tagmap = simple_tagmap()
        assert tag_of("qwerty", tagmap) == ("default", GRAY)

    def test_every_vocab_token_resolves(self, desk_corpus_lines, desk_tagmap):
        vocab = build_vocabulary(desk_corpus_lines, min_count=2)
        for token in vocab.tokens:
            tag, color = tag_of(token, desk_tagmap)
            assert tag in desk_tagmap.tag_colors
            assert color == desk_tagmap.tag_colors[tag]

    def test_missing_tag_color_rejected(self):
        with pytest.raises(CorpusError, match="without a color"):
            TagMap.from_dicts({"cat": "NOUN"}, {"default": GRAY})

    def test_color_order_follows_file(self, tmp_path):
        colormap = tmp_path / "colors.cfg"
        colormap.write_text(
            "# tag colors\nVERB = #8856a7\nNOUN = #2ca25f\ndefault = #aaaaaa\n"
        )
        colors, default_tag = load_colormap(colormap)
        tagmap = TagMap.from_dicts({"run": "VERB", "cat": "NOUN"}, colors, default_tag)
        assert tagmap.color_order[0] == Color.parse("#8856a7")
        assert tagmap.num_colors == 3

    def test_lexicon_parsing(self, tmp_path):
        lex = tmp_path / "tags.tsv"
        lex.write_text("# comment\ncat\tNOUN\nRuns\tVERB\n")
        tags = load_tag_lexicon(lex)
        assert tags == {"cat": "NOUN", "runs": "VERB"}

    def test_malformed_lexicon_line(self, tmp_path):
        lex = tmp_path / "tags.tsv"
        lex.write_text("cat NOUN\n")
        with pytest.raises(CorpusError):
            load_tag_lexicon(lex)
