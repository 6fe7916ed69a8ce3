"""Real-input 3-D discrete Fourier transforms on cubic grids.

Convention: unnormalized forward transform, 1/n^3 on the inverse (the
numpy default).  Only the non-negative half of the last axis is stored;
Hermitian symmetry of the remaining bins is implied, never materialized.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class HalfSpectrum:
    """Half-complex spectrum of one or more real cubic fields.

    ``coefficients`` has shape ``(..., n, n, n//2 + 1)``; leading axes are
    channels or batch.  ``edge_length`` is the cube edge n in voxels.
    """

    coefficients: np.ndarray
    edge_length: int


def _check_cubic(field: np.ndarray) -> int:
    if field.ndim < 3:
        raise ValueError(f"expected at least 3 dimensions, got {field.ndim}")
    nx, ny, nz = field.shape[-3:]
    if not (nx == ny == nz):
        raise ValueError(f"field is not cubic: trailing shape {(nx, ny, nz)}")
    if nx < 2:
        raise ValueError(f"edge length must be >= 2, got {nx}")
    return nx


def rfft3(field: np.ndarray) -> HalfSpectrum:
    """Forward transform of a real cubic field (last three axes).

    The (0,0,0) coefficient equals the plain sum of the field values.
    """
    n = _check_cubic(field)
    if not np.all(np.isfinite(field)):
        raise ValueError("field contains non-finite values")
    coeff = np.fft.rfftn(field, axes=(-3, -2, -1))
    return HalfSpectrum(coefficients=coeff, edge_length=n)


def irfft3(spectrum: HalfSpectrum, n: int) -> np.ndarray:
    """Inverse of :func:`rfft3`; applies the 1/n^3 normalization."""
    coeff = spectrum.coefficients
    expected = (n, n, n // 2 + 1)
    if spectrum.edge_length != n or coeff.shape[-3:] != expected:
        raise ValueError(
            f"spectrum shape {coeff.shape[-3:]} inconsistent with n={n} "
            f"(expected trailing {expected})"
        )
    return np.fft.irfftn(coeff, s=(n, n, n), axes=(-3, -2, -1))


def hermitian_multiplicity(n: int) -> np.ndarray:
    """How many full-spectrum bins each stored half-spectrum bin stands for.

    2 for interior last-axis bins (their negative-frequency partners are
    implied), 1 on the k3 = 0 plane and, for even n, the k3 = n/2 plane.
    Useful for Parseval sums and adjoint scalings.
    """
    h = n // 2 + 1
    mult = np.full((n, n, h), 2.0)
    mult[:, :, 0] = 1.0
    if n % 2 == 0:
        mult[:, :, -1] = 1.0
    return mult


def rfft3_adjoint(spectrum_grad: np.ndarray, n: int) -> np.ndarray:
    """Adjoint of the forward transform as a real-linear map.

    ``spectrum_grad`` carries d(loss)/d(Re X) + i d(loss)/d(Im X) per stored
    bin; the return value is d(loss)/d(field).
    """
    scale = n**3 / hermitian_multiplicity(n)
    return np.fft.irfftn(spectrum_grad * scale, s=(n, n, n), axes=(-3, -2, -1))


def irfft3_adjoint(field_grad: np.ndarray, n: int) -> np.ndarray:
    """Adjoint of the inverse transform; returns a half-spectrum gradient."""
    scale = hermitian_multiplicity(n) / n**3
    return np.fft.rfftn(field_grad, axes=(-3, -2, -1)) * scale
