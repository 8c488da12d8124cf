"""Channel-wise first/second-moment statistics swap for feature maps.

A feature map is an H x W x C array. The swap renormalizes each channel of
a content map to zero mean and unit variance over the spatial positions,
then rescales and shifts it to the style map's channel moments:

    out = style_std * (content - content_mean) / max(content_std, eps) + style_mean

Population moments (divisor H*W) are used. The epsilon floor guards the
degenerate constant-channel case (std 0) and leaves non-degenerate
channels untouched, so moment transfer is exact up to float rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_EPSILON = 1e-5


class FeatureShapeError(ValueError):
    pass


@dataclass(frozen=True)
class ChannelMoments:
    mean: np.ndarray  # length C
    std: np.ndarray   # length C, population std


def _as_feature_map(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 3:
        raise FeatureShapeError(f"feature map must be H x W x C, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1 or arr.shape[2] < 1:
        raise FeatureShapeError(f"all dims must be >= 1, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise FeatureShapeError("feature map contains non-finite values")
    return arr


def channel_moments(values) -> ChannelMoments:
    """Per-channel mean and population std over the spatial dimensions."""
    arr = _as_feature_map(values)
    flat = arr.reshape(-1, arr.shape[2])
    return ChannelMoments(mean=flat.mean(axis=0), std=flat.std(axis=0))


def stat_swap(content, style, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Re-impose the style map's channel moments onto the content map."""
    c = _as_feature_map(content)
    s = _as_feature_map(style)
    if c.shape[2] != s.shape[2]:
        raise FeatureShapeError(
            f"channel count mismatch: content {c.shape[2]} vs style {s.shape[2]}"
        )
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    cm = channel_moments(c)
    sm = channel_moments(s)
    denom = np.maximum(cm.std, epsilon)
    return sm.std * (c - cm.mean) / denom + sm.mean
