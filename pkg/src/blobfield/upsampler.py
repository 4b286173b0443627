"""Learned 2x upsampling block: bilinear plus pixel-shuffled modulated conv.

``upsample(X) = bilinear_2x(X) + pixel_shuffle_2x(mod_conv_1x1(X))``; with
zero conv weights the block reduces exactly to bilinear interpolation,
which is also its intended initialization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bg3d
from .errors import ChannelsNotDivisible, InvariantViolation, ShapeMismatch


@dataclass(frozen=True)
class UpsamplerParams:
    """Weights of the learned branch for channel count C.

    conv_weights: (4C, C) kernel bank of the 1x1 convolution.
    mod_affine_w, mod_affine_b: affine map from a blob feature vector to the
    length-C modulation vector.
    demodulate: StyleGAN2-style row renormalization; off by default, the
    plain modulated convolution is the normative path.
    """

    conv_weights: np.ndarray
    mod_affine_w: np.ndarray
    mod_affine_b: np.ndarray
    demodulate: bool = False

    def __post_init__(self):
        cw = np.asarray(self.conv_weights, dtype=np.float64)
        aw = np.asarray(self.mod_affine_w, dtype=np.float64)
        ab = np.asarray(self.mod_affine_b, dtype=np.float64)
        if cw.ndim != 2 or cw.shape[0] != 4 * cw.shape[1]:
            raise InvariantViolation("conv_weights", f"expected (4C, C), got {cw.shape}")
        channels = cw.shape[1]
        if aw.ndim != 2 or aw.shape[0] != channels:
            raise InvariantViolation("mod_affine_w", f"expected ({channels}, d_s), got {aw.shape}")
        if ab.shape != (channels,):
            raise InvariantViolation("mod_affine_b", f"expected ({channels},), got {ab.shape}")
        for name, arr in (("conv_weights", cw), ("mod_affine_w", aw), ("mod_affine_b", ab)):
            if not np.all(np.isfinite(arr)):
                raise InvariantViolation(name, "values must be finite")
            arr.setflags(write=False)
        object.__setattr__(self, "conv_weights", cw)
        object.__setattr__(self, "mod_affine_w", aw)
        object.__setattr__(self, "mod_affine_b", ab)

    @property
    def channels(self) -> int:
        return self.conv_weights.shape[1]

    @property
    def feature_dim(self) -> int:
        return self.mod_affine_w.shape[1]

    @classmethod
    def zero_init(cls, channels: int, feature_dim: int, demodulate: bool = False) -> "UpsamplerParams":
        """Zero conv weights and an identity-like modulation affine.

        The affine is the identity truncated or zero-padded to (C, d_s) with
        zero bias, so untrained modulation passes features through.
        """
        affine = np.eye(channels, feature_dim)
        return cls(
            conv_weights=np.zeros((4 * channels, channels)),
            mod_affine_w=affine,
            mod_affine_b=np.zeros(channels),
            demodulate=demodulate,
        )


def _ensure_3d(grid: np.ndarray) -> tuple[np.ndarray, bool]:
    if grid.ndim == 2:
        return grid[:, :, None], True
    if grid.ndim == 3:
        return grid, False
    raise ShapeMismatch(f"expected (H, W) or (H, W, C), got {grid.shape}")


def _lerp_rows(grid: np.ndarray, out_size: int) -> np.ndarray:
    # half-pixel centers: output i samples input at (i + 0.5)/2 - 0.5
    src = grid.shape[0]
    pos = (np.arange(out_size) + 0.5) / 2.0 - 0.5
    lo = np.floor(pos).astype(np.int64)
    frac = pos - lo
    lo_c = np.clip(lo, 0, src - 1)
    hi_c = np.clip(lo + 1, 0, src - 1)
    base = grid[lo_c]
    # a0 + f*(a1 - a0) keeps constants exact, including at clamped edges
    return base + frac.reshape((-1,) + (1,) * (grid.ndim - 1)) * (grid[hi_c] - base)


def bilinear_2x(grid: np.ndarray) -> np.ndarray:
    """2x bilinear upsampling, half-pixel centers, edge-clamped."""
    grid3, squeeze = _ensure_3d(np.asarray(grid, dtype=np.float64))
    h, w, _ = grid3.shape
    out = _lerp_rows(grid3, 2 * h)
    out = _lerp_rows(out.transpose(1, 0, 2), 2 * w).transpose(1, 0, 2)
    return out[:, :, 0] if squeeze else out


def mod_conv_1x1(grid: np.ndarray, params: UpsamplerParams, blob_feature) -> np.ndarray:
    """Per-pixel 1x1 convolution with feature-modulated weights; (H, W, 4C)."""
    grid3, _ = _ensure_3d(np.asarray(grid, dtype=np.float64))
    feature = np.asarray(blob_feature, dtype=np.float64)
    if grid3.shape[2] != params.channels:
        raise ShapeMismatch(f"grid has {grid3.shape[2]} channels, params expect {params.channels}")
    if feature.shape != (params.feature_dim,):
        raise ShapeMismatch(f"feature length {feature.shape} != {params.feature_dim}")
    modulation = params.mod_affine_w @ feature + params.mod_affine_b
    weights = params.conv_weights * modulation[None, :]
    if params.demodulate:
        norm = np.sqrt((weights * weights).sum(axis=1) + 1e-8)
        weights = weights / norm[:, None]
    return grid3 @ weights.T


def pixel_shuffle_2x(grid: np.ndarray) -> np.ndarray:
    """Rearrange (H, W, 4C) to (2H, 2W, C); channel block 4c..4c+3 fills the
    2x2 neighborhood of channel c in row-major order."""
    grid = np.asarray(grid)
    if grid.ndim != 3 or grid.shape[2] % 4:
        raise ChannelsNotDivisible(f"channel count must divide by 4, got {grid.shape}")
    h, w, c4 = grid.shape
    c = c4 // 4
    blocks = grid.reshape(h, w, c, 2, 2)
    return blocks.transpose(0, 3, 1, 4, 2).reshape(2 * h, 2 * w, c)


def upsample_block(grid: np.ndarray, params: UpsamplerParams, blob_feature) -> np.ndarray:
    """Eq-style sum of the bilinear branch and the learned branch."""
    grid_arr = np.asarray(grid, dtype=np.float64)
    grid3, squeeze = _ensure_3d(grid_arr)
    learned = pixel_shuffle_2x(mod_conv_1x1(grid3, params, blob_feature))
    out = bilinear_2x(grid3) + learned
    return out[:, :, 0] if squeeze else out


PARAM_TENSOR_NAMES = ("conv_weights", "mod_affine_w", "mod_affine_b")


def save_params(params: UpsamplerParams) -> bytes:
    """Persist to the BG3D tensor container (f32 payloads)."""
    return bg3d.write_tensors({
        "conv_weights": params.conv_weights,
        "mod_affine_w": params.mod_affine_w,
        "mod_affine_b": params.mod_affine_b,
    })


def load_params(data: bytes, demodulate: bool = False) -> UpsamplerParams:
    tensors = bg3d.read_tensors(data)
    missing = [n for n in PARAM_TENSOR_NAMES if n not in tensors]
    if missing:
        raise ShapeMismatch(f"missing tensors: {missing}")
    return UpsamplerParams(
        conv_weights=tensors["conv_weights"].astype(np.float64),
        mod_affine_w=tensors["mod_affine_w"].astype(np.float64),
        mod_affine_b=tensors["mod_affine_b"].astype(np.float64),
        demodulate=demodulate,
    )
