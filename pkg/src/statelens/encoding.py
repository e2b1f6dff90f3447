"""Visual encoding of a probability distribution: ordered top-k bars colored
by tag, the dominant color group, and a swatch interpolated between that
color and white according to how dominant the group is."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .colors import Color, toward_white
from .corpus import TagMap, Vocabulary
from .lstm import StateKind


class EncodingConfigError(ValueError):
    """Invalid k or interpolation parameters."""


@dataclass(frozen=True)
class Bar:
    token: str
    token_id: int
    probability: float
    tag: str
    color: Color


@dataclass(frozen=True)
class PseEncoding:
    """One cell of the grid: bars for display plus the summary swatch."""

    kind: StateKind
    timestep: int
    bars: tuple[Bar, ...]
    dominant_color: Color
    dominance: float
    swatch: Color


def top_k(dist: np.ndarray, k: int) -> list[tuple[int, float]]:
    """The k highest-probability (token id, probability) pairs, descending;
    ties broken by ascending id; zero-probability entries dropped."""
    dist = np.asarray(dist)
    if k <= 0:
        raise EncodingConfigError(f"k must be a positive integer, got {k}")
    if k > len(dist):
        raise EncodingConfigError(f"k={k} exceeds the distribution size {len(dist)}")
    # lexsort: primary key last, so order is by -p then ascending id
    order = np.lexsort((np.arange(len(dist)), -dist))[:k]
    return [(int(i), float(dist[i])) for i in order if dist[i] > 0.0]


def make_bars(pairs: list[tuple[int, float]], vocab: Vocabulary, tagmap: TagMap) -> tuple[Bar, ...]:
    bars = []
    for token_id, p in pairs:
        token = vocab.token_of(token_id)
        tag, color = tagmap.tag_of(token)
        bars.append(Bar(token=token, token_id=token_id, probability=p, tag=tag, color=color))
    return tuple(bars)


def dominant_color(bars: tuple[Bar, ...], tagmap: TagMap) -> tuple[Color, float]:
    """Color group with the largest probability sum among the bars, and its
    share of the bars' total mass; ties go to the color appearing first in
    the colormap file."""
    if not bars:
        raise ValueError("dominant_color needs at least one bar")
    sums: dict[Color, float] = {}
    for bar in bars:
        sums[bar.color] = sums.get(bar.color, 0.0) + bar.probability
    total = sum(sums.values())
    winner = min(sums, key=lambda color: (-sums[color], tagmap.color_rank(color)))
    return winner, sums[winner] / total


def interpolate_swatch(color: Color, dominance: float, num_mapped_colors: int) -> Color:
    """Swatch on the white->color segment.

    The saturation parameter t maps dominance affinely so that mass uniform
    over the m mapped colors (dominance = 1/m) gives pure white and full
    dominance gives the pure color.
    """
    if not (0.0 <= dominance <= 1.0):
        raise EncodingConfigError(f"dominance {dominance} outside [0, 1]")
    if num_mapped_colors < 1:
        raise EncodingConfigError(f"num_mapped_colors must be >= 1, got {num_mapped_colors}")
    t = swatch_saturation(dominance, num_mapped_colors)
    return toward_white(color, t)


def swatch_saturation(dominance: float, num_mapped_colors: int) -> float:
    """t = clamp((dominance - 1/m) / (1 - 1/m), 0, 1); t = dominance for m = 1."""
    m = num_mapped_colors
    if m == 1:
        return float(dominance)
    floor = 1.0 / m
    return float(min(1.0, max(0.0, (dominance - floor) / (1.0 - floor))))


def encode_pse(
    dist: np.ndarray,
    kind: StateKind,
    timestep: int,
    vocab: Vocabulary,
    tagmap: TagMap,
    k_bars: int,
    k_dominance: int | None = None,
) -> PseEncoding:
    """Compose top_k, dominant_color and interpolate_swatch into one record.

    `k_bars` limits the bars kept for display; `k_dominance` (defaulting to
    k_bars) is the usually-larger top-k over which the dominant color group
    and the swatch interpolation are computed.
    """
    display_bars = make_bars(top_k(dist, k_bars), vocab, tagmap)
    if k_dominance is None or k_dominance == k_bars:
        dominance_bars = display_bars
    else:
        dominance_bars = make_bars(top_k(dist, k_dominance), vocab, tagmap)
    color, dominance = dominant_color(dominance_bars, tagmap)
    swatch = interpolate_swatch(color, dominance, tagmap.num_colors)
    return PseEncoding(
        kind=kind,
        timestep=timestep,
        bars=display_bars,
        dominant_color=color,
        dominance=dominance,
        swatch=swatch,
    )


def default_k_dominance(vocab_size: int) -> int:
    """10% of the vocabulary, at least 1."""
    return max(1, round(0.10 * vocab_size))
