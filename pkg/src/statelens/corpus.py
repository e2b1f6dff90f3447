"""Corpus ingestion: vocabulary construction with UNK/NUM folding, sentence
encoding to id sequences, and token -> tag -> color lookup."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .colors import Color

UNK_TOKEN = "<unk>"
NUM_TOKEN = "<num>"
EOS_TOKEN = "<eos>"

# optional sign, digits, at most one '.' or ',' group: 1987, 12.5, 1,000, -3
_NUMERAL_RE = re.compile(r"^[+-]?\d+([.,]\d+)?$")


class CorpusError(ValueError):
    """Unusable corpus input: empty text or malformed lexicon/colormap files."""


def tokenize(text: str) -> list[str]:
    """Lowercase and split on whitespace (punctuation assumed pre-separated)."""
    return text.lower().split()


def is_numeral(token: str) -> bool:
    return _NUMERAL_RE.match(token) is not None


@dataclass(frozen=True)
class Vocabulary:
    """Token <-> id mapping. Ids 0..2 are the UNK/NUM/EOS specials, the rest
    are corpus tokens ordered by descending count (ties lexicographic)."""

    tokens: tuple[str, ...]
    counts: dict[str, int] = field(repr=False)
    _index: dict[str, int] = field(repr=False)

    unk_id = 0
    num_id = 1
    eos_id = 2

    @property
    def size(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def id_of(self, token: str) -> int:
        """Id of an in-vocabulary token (no UNK/NUM folding; see encode_sentence)."""
        return self._index[token]

    def token_of(self, token_id: int) -> str:
        return self.tokens[token_id]


def build_vocabulary(
    corpus: str | Iterable[str],
    min_count: int,
    max_size: int | None = None,
) -> Vocabulary:
    """Build a Vocabulary from raw text (a string or an iterable of sentence lines).

    Tokens matching the numeral rule fold into NUM; tokens seen fewer than
    `min_count` times (or beyond `max_size`) fold into UNK. EOS counts one per
    non-empty sentence.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be a positive integer, got {min_count}")
    lines = corpus.splitlines() if isinstance(corpus, str) else corpus

    counts: Counter[str] = Counter()
    num_count = 0
    unk_count = 0
    n_sentences = 0
    for line in lines:
        toks = tokenize(line)
        if not toks:
            continue
        n_sentences += 1
        for tok in toks:
            if tok == UNK_TOKEN:
                unk_count += 1
            elif tok == NUM_TOKEN or is_numeral(tok):
                num_count += 1
            elif tok == EOS_TOKEN:
                continue
            else:
                counts[tok] += 1
    if n_sentences == 0:
        raise CorpusError("corpus is empty after tokenization")

    retained = [(tok, c) for tok, c in counts.items() if c >= min_count]
    retained.sort(key=lambda item: (-item[1], item[0]))
    if max_size is not None:
        retained = retained[: max(0, max_size - 3)]
    unk_count += sum(counts.values()) - sum(c for _, c in retained)

    tokens = (UNK_TOKEN, NUM_TOKEN, EOS_TOKEN) + tuple(tok for tok, _ in retained)
    out_counts = {UNK_TOKEN: unk_count, NUM_TOKEN: num_count, EOS_TOKEN: n_sentences}
    out_counts.update(retained)
    index = {tok: i for i, tok in enumerate(tokens)}
    return Vocabulary(tokens=tokens, counts=out_counts, _index=index)


@dataclass(frozen=True)
class TokenSequence:
    """Encoded sentence: ids with EOS appended, original tokens preserved."""

    ids: tuple[int, ...]
    source_tokens: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.ids)


def encode_sentence(sentence: str, vocab: Vocabulary) -> TokenSequence:
    """Whitespace-tokenize, lowercase, fold numerals/OOV, append EOS."""
    raw_tokens = sentence.split()
    if not raw_tokens:
        raise CorpusError("cannot encode an empty sentence")
    ids = []
    for raw in raw_tokens:
        tok = raw.lower()
        if tok != NUM_TOKEN and is_numeral(tok):
            ids.append(vocab.num_id)
        elif tok in vocab:
            ids.append(vocab.id_of(tok))
        else:
            ids.append(vocab.unk_id)
    ids.append(vocab.eos_id)
    return TokenSequence(ids=tuple(ids), source_tokens=tuple(raw_tokens) + (EOS_TOKEN,))


def decode_ids(ids: Sequence[int], vocab: Vocabulary) -> str:
    """Inverse of encode_sentence up to UNK/NUM folding; drops the trailing EOS."""
    toks = [vocab.token_of(i) for i in ids]
    if toks and toks[-1] == EOS_TOKEN:
        toks = toks[:-1]
    return " ".join(toks)


def load_corpus(path: str | Path) -> list[str]:
    """Read a UTF-8 corpus file, one sentence per line; blank lines dropped."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [line.strip() for line in text.splitlines()]
    return [line for line in lines if line]


@dataclass(frozen=True)
class TagMap:
    """Token -> tag lexicon plus tag -> color mapping with a default tag.

    `color_order` preserves first-appearance order of colors in the colormap
    file; it breaks ties when distributions split evenly across colors.
    """

    token_tags: dict[str, str] = field(repr=False)
    tag_colors: dict[str, Color]
    default_tag: str
    color_order: tuple[Color, ...]

    def __post_init__(self):
        if self.default_tag not in self.tag_colors:
            raise CorpusError(f"default tag {self.default_tag!r} has no color")
        missing = {t for t in self.token_tags.values() if t not in self.tag_colors}
        if missing:
            raise CorpusError(f"tags without a color: {sorted(missing)}")

    @property
    def num_colors(self) -> int:
        return len(self.color_order)

    def color_rank(self, color: Color) -> int:
        return self.color_order.index(color)

    def tag_of(self, token: str) -> tuple[str, Color]:
        tag = self.token_tags.get(token.lower(), self.default_tag)
        return tag, self.tag_colors[tag]

    @classmethod
    def from_dicts(
        cls, token_tags: dict[str, str], tag_colors: dict[str, Color], default_tag: str = "default"
    ) -> "TagMap":
        order: list[Color] = []
        for color in tag_colors.values():
            if color not in order:
                order.append(color)
        return cls(
            token_tags={t.lower(): tag for t, tag in token_tags.items()},
            tag_colors=dict(tag_colors),
            default_tag=default_tag,
            color_order=tuple(order),
        )

    @classmethod
    def load(cls, lexicon_path: str | Path, colormap_path: str | Path) -> "TagMap":
        token_tags = load_tag_lexicon(lexicon_path)
        tag_colors, default_tag = load_colormap(colormap_path)
        return cls.from_dicts(token_tags, tag_colors, default_tag)


def tag_of(token: str, tagmap: TagMap) -> tuple[str, Color]:
    """Tag and color of a token; unknown tokens get the default tag."""
    return tagmap.tag_of(token)


def load_tag_lexicon(path: str | Path) -> dict[str, str]:
    """Read `token<TAB>tag` lines; '#'-prefixed lines are comments."""
    result: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise CorpusError(f"{path}:{lineno}: expected 'token<TAB>tag', got {line!r}")
        result[parts[0].lower()] = parts[1]
    return result


def load_colormap(path: str | Path) -> tuple[dict[str, Color], str]:
    """Read `tag = #RRGGBB` lines; the `default` entry is required.

    Returns the tag -> color mapping in file order plus the default tag name.
    """
    colors: dict[str, Color] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CorpusError(f"{path}:{lineno}: expected 'tag = #RRGGBB', got {line!r}")
        tag, _, value = line.partition("=")
        tag = tag.strip()
        try:
            colors[tag] = Color.parse(value)
        except ValueError as exc:
            raise CorpusError(f"{path}:{lineno}: {exc}") from exc
    if "default" not in colors:
        raise CorpusError(f"{path}: colormap must define a 'default' entry")
    return colors, "default"
