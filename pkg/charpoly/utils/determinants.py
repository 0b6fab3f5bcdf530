"""Determinants of matrices whose entries are ScaledComplex."""

import math
import warnings

import numpy as np
import scipy.linalg

from charpoly.utils.scaled import ONE, ZERO, ScaledComplex, split_arrays


def scaled_det(entries: list[list[ScaledComplex]]) -> ScaledComplex:
    """LU with partial pivoting after factoring per-row and per-column
    log-magnitudes out of the entries."""
    size = len(entries)
    if size == 0:
        return ONE
    log_mag, phase = split_arrays(entries)
    if log_mag.shape != (size, size):
        raise ValueError(f"Determinant of a non-square {log_mag.shape} matrix")
    row_scale = np.max(log_mag, axis=1)
    if np.any(row_scale == -np.inf):
        return ZERO
    shifted = log_mag - row_scale[:, None]
    col_scale = np.max(shifted, axis=0)
    if np.any(col_scale == -np.inf):
        return ZERO
    shifted = shifted - col_scale[None, :]
    mantissa = np.exp(shifted) * phase
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, pivots = scipy.linalg.lu_factor(mantissa, check_finite=False)
    diagonal = np.diag(lu)
    if np.any(diagonal == 0):
        return ZERO
    swaps = int(np.count_nonzero(pivots != np.arange(size)))
    sign = -1.0 if swaps % 2 else 1.0
    magnitudes = np.abs(diagonal)
    log_det = float(np.sum(np.log(magnitudes)))
    det_phase = complex(np.prod(diagonal / magnitudes)) * sign
    det_phase /= abs(det_phase)
    total = log_det + float(np.sum(row_scale)) + float(np.sum(col_scale))
    if not math.isfinite(total):
        return ZERO
    return ScaledComplex(log_mag=total, phase=det_phase)
