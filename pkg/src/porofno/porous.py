"""Synthetic binary porous media via the truncated-Gaussian procedure.

Pipeline per sample: draw an i.i.d. standard-normal cube, smooth it with
a truncated Gaussian kernel (circular convolution), threshold at the
quantile that hits the drawn porosity target.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .spectral import irfft3, rfft3

# Reference edge length at which the default smoothing parameters apply;
# smaller grids get proportionally scaled kernels (see resolve_smoothing).
_REFERENCE_EDGE = 48
_FULL_SCALE_MIN_EDGE = 40


@dataclass
class GenConfig:
    """Parameters of the porous-media generator."""

    edge_length: int = 48
    smoothing_sigma: float = 5.0
    kernel_extent: int = 17
    porosity_range: tuple[float, float] = (0.125, 0.200)
    voxel_size: float = 0.003  # meters per voxel edge
    seed: int = 0

    def validate(self) -> None:
        lo, hi = self.porosity_range
        if not (0.0 < lo < hi < 1.0):
            raise ConfigError(f"porosity_range must satisfy 0 < lo < hi < 1, got {self.porosity_range}")
        if self.kernel_extent % 2 == 0:
            raise ConfigError(f"kernel_extent must be odd, got {self.kernel_extent}")
        if self.edge_length < 2:
            raise ConfigError(f"edge_length must be >= 2, got {self.edge_length}")
        if self.voxel_size <= 0:
            raise ConfigError("voxel_size must be positive")
        if self.smoothing_sigma <= 0:
            raise ConfigError("smoothing_sigma must be positive")


@dataclass
class LabeledSample:
    """A voxel grid with its porosity and (possibly pending) permeability."""

    voxels: np.ndarray  # bool (n, n, n), True = pore
    porosity: float
    permeability_md: float  # NaN while unlabeled
    seed: int
    edge_length: int


def resolve_smoothing(cfg: GenConfig, n: int) -> tuple[float, int]:
    """Smoothing parameters effective at edge length n.

    Below the full-scale regime the kernel is shrunk by n / 48 so the
    grain structure stays resolvable on small grids; the extent is rounded
    to the nearest odd number and floored at 3.
    """
    if n >= _FULL_SCALE_MIN_EDGE:
        sigma, extent = cfg.smoothing_sigma, cfg.kernel_extent
    else:
        factor = n / _REFERENCE_EDGE
        sigma = cfg.smoothing_sigma * factor
        raw = cfg.kernel_extent * factor
        # nearest odd number (2k + 1), floored at 3
        extent = max(3, 2 * int(np.floor((raw - 1.0) / 2.0 + 0.5)) + 1)
    if extent > n:
        extent = n if n % 2 == 1 else n - 1
    return sigma, extent


def sample_gaussian_field(n: int, seed: int) -> np.ndarray:
    """Deterministic i.i.d. standard-normal cube of shape (n, n, n)."""
    if n < 2:
        raise ConfigError(f"edge length must be >= 2, got {n}")
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, n, n))


def gaussian_kernel(sigma: float, extent: int) -> np.ndarray:
    """Truncated, sum-normalized 3-D Gaussian of odd cubic extent."""
    if extent % 2 == 0:
        raise ConfigError(f"kernel extent must be odd, got {extent}")
    half = extent // 2
    r = np.arange(-half, half + 1, dtype=float)
    g1 = np.exp(-0.5 * (r / sigma) ** 2)
    kern = g1[:, None, None] * g1[None, :, None] * g1[None, None, :]
    return kern / kern.sum()


def smooth_field(field: np.ndarray, sigma: float, extent: int) -> np.ndarray:
    """Circular (periodic) convolution with the truncated Gaussian kernel."""
    n = field.shape[0]
    if field.shape != (n, n, n):
        raise ValueError(f"field is not cubic: {field.shape}")
    if extent > n:
        raise ConfigError(f"kernel extent {extent} exceeds grid edge {n}")
    kern = gaussian_kernel(sigma, extent)
    # embed kernel circularly, centered at the origin voxel
    padded = np.zeros((n, n, n))
    half = extent // 2
    idx = (np.arange(-half, half + 1)) % n
    padded[np.ix_(idx, idx, idx)] = kern
    prod = rfft3(field)
    prod.coefficients = prod.coefficients * rfft3(padded).coefficients
    return irfft3(prod, n)


def binarize_to_porosity(field: np.ndarray, phi_target: float) -> tuple[np.ndarray, float]:
    """Threshold a field so exactly round(phi * n^3) lowest values are pore.

    Ties are broken by flat index (stable sort), which makes the result a
    total, reproducible function of the input.
    """
    if not (0.0 < phi_target < 1.0):
        raise ConfigError(f"porosity target must be in (0, 1), got {phi_target}")
    n3 = field.size
    count = int(np.floor(phi_target * n3 + 0.5))
    voxels = np.zeros(n3, dtype=bool)
    if count > 0:
        order = np.argsort(field.ravel(), kind="stable")
        voxels[order[:count]] = True
    return voxels.reshape(field.shape), count / n3


def sample_seeds(master_seed: int, index: int) -> tuple[int, int]:
    """Derive (field_seed, porosity_seed) for one sample index."""
    state = np.random.SeedSequence((master_seed, index)).generate_state(2, dtype=np.uint64)
    return int(state[0]), int(state[1])


def generate_sample(cfg: GenConfig, index: int) -> LabeledSample:
    """Run the full generation pipeline for one sample index."""
    n = cfg.edge_length
    field_seed, phi_seed = sample_seeds(cfg.seed, index)
    lo, hi = cfg.porosity_range
    phi_target = float(np.random.default_rng(phi_seed).uniform(lo, hi))
    sigma, extent = resolve_smoothing(cfg, n)
    raw = sample_gaussian_field(n, field_seed)
    smooth = smooth_field(raw, sigma, extent)
    voxels, phi_actual = binarize_to_porosity(smooth, phi_target)
    return LabeledSample(
        voxels=voxels,
        porosity=phi_actual,
        permeability_md=float("nan"),
        seed=field_seed,
        edge_length=n,
    )


def generate_dataset(cfg: GenConfig, count: int) -> list[LabeledSample]:
    """Generate ``count`` unlabeled samples, deterministically from cfg."""
    cfg.validate()
    if count < 1:
        raise ConfigError(f"count must be >= 1, got {count}")
    return [generate_sample(cfg, i) for i in range(count)]
