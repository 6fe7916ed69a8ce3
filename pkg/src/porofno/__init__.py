"""Size-invariant permeability regression for 3-D digital porous media.

Pipeline: synthesize binary porous cubes (truncated-Gaussian fields),
label them with a D3Q19 lattice-Boltzmann Stokes solver via Darcy's law,
and train a Fourier-operator network whose channel-wise global pooling
head accepts cubes of any edge length.
"""

__version__ = "0.1.0"

from .errors import ConfigError, DataError, DivergenceError, GridSizeError

__all__ = [
    "ConfigError",
    "DataError",
    "DivergenceError",
    "GridSizeError",
    "__version__",
]
