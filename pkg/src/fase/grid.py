"""Grids, loss masks, weighting and region-wise quality measures.

Conventions used everywhere in this package:

* a 2-D extrapolation area of M rows by N columns, row index m in
  {0..M-1}, column index n in {0..N-1}, row-major storage;
* the loss mask is boolean with True marking a LOST sample (area B),
  False marking a known support sample (area A);
* the geometric center sits at the fractional point ((M-1)/2, (N-1)/2)
  so even-sized areas are handled without a half-sample bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MaskError, ParameterError, ShapeError

PSNR_PEAK = 255.0
PSNR_SENTINEL_DB = 99.0


def as_field(values) -> np.ndarray:
    """Coerce to a 2-D complex128 array (no copy when already compliant)."""
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise ShapeError(f"field must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ShapeError("field must be non-empty")
    return np.ascontiguousarray(arr, dtype=np.complex128)


def as_mask(flags) -> np.ndarray:
    """Coerce to a 2-D boolean loss mask (True = lost sample)."""
    arr = np.asarray(flags)
    if arr.ndim != 2:
        raise ShapeError(f"mask must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ShapeError("mask must be non-empty")
    return np.ascontiguousarray(arr, dtype=bool)


@dataclass(frozen=True)
class ExtrapConfig:
    """Knobs of a single extrapolation run.

    Attributes:
        iterations: fixed iteration count I; the loop always runs exactly
            this many times (no data-dependent stopping).
        gamma: orthogonality-deficiency compensation in (0, 1]; each
            selected projection coefficient is scaled by this factor.
        rho_hat: isotropic decay base of the support weighting in (0, 1];
            1.0 weights all support samples equally.

    Ties in the selection metric are always broken toward the lowest
    atom index; that rule is fixed, not configurable.
    """

    iterations: int = 250
    gamma: float = 0.5
    rho_hat: float = 0.8

    def __post_init__(self):
        if not isinstance(self.iterations, (int, np.integer)) or self.iterations < 1:
            raise ParameterError(f"iterations must be a positive integer, got {self.iterations!r}")
        if not (0.0 < self.gamma <= 1.0):
            raise ParameterError(f"gamma must lie in (0, 1], got {self.gamma!r}")
        if not (0.0 < self.rho_hat <= 1.0):
            raise ParameterError(f"rho_hat must lie in (0, 1], got {self.rho_hat!r}")


def center_distances(m_rows: int, n_cols: int) -> np.ndarray:
    """Euclidean distance of every sample from the fractional area center."""
    dm = np.arange(m_rows, dtype=np.float64) - (m_rows - 1) / 2.0
    dn = np.arange(n_cols, dtype=np.float64) - (n_cols - 1) / 2.0
    return np.hypot(dm[:, None], dn[None, :])


def build_weight_field(mask, rho_hat: float) -> np.ndarray:
    """Build the spatial weighting w for a loss mask.

    Support samples get rho_hat ** distance-to-center, lost samples get
    exactly 0.0 so they contribute nothing to any weighted sum.

    Raises:
        ParameterError: rho_hat outside (0, 1].
        MaskError: every sample is marked lost (no support to work from).
    """
    mask = as_mask(mask)
    if not (0.0 < rho_hat <= 1.0):
        raise ParameterError(f"rho_hat must lie in (0, 1], got {rho_hat!r}")
    if mask.all():
        raise MaskError("loss mask marks every sample lost; nothing to extrapolate from")
    w = rho_hat ** center_distances(*mask.shape)
    w[mask] = 0.0
    return w


def psnr_over_region(reference, candidate, region) -> float:
    """PSNR (dB, peak 255) between two fields, restricted to a sample set.

    `region` is a boolean array; True samples enter the mean squared error.
    Complex inputs are compared on their real parts, matching how lost
    samples of real-valued signals are reconstructed.

    Returns the sentinel 99.0 dB when the restricted MSE is exactly zero.
    """
    ref = np.asarray(reference)
    cand = np.asarray(candidate)
    reg = as_mask(region)
    if ref.shape != cand.shape or ref.shape != reg.shape:
        raise ShapeError(
            f"shape mismatch: reference {ref.shape}, candidate {cand.shape}, region {reg.shape}"
        )
    if not reg.any():
        raise ParameterError("region is empty; PSNR over zero samples is undefined")
    diff = ref.real.astype(np.float64) - cand.real.astype(np.float64)
    mse = float(np.mean(diff[reg] ** 2))
    if mse == 0.0:
        return PSNR_SENTINEL_DB
    return 10.0 * math.log10(PSNR_PEAK * PSNR_PEAK / mse)
