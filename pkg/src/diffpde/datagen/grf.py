"""Spectral sampling of periodic Gaussian random fields.

A field is drawn from the stationary Gaussian measure whose Fourier-series
coefficients satisfy E|c_k|^2 = sigma_g^2 (4 pi^2 |k|^2 + tau^2)^(-d), with
the k = 0 mode suppressed so every draw has zero spatial mean.  Sampling goes
through the FFT of white physical noise, which carries exact Hermitian
symmetry, so the output is real to machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..fields import DOMAIN_TORUS, FieldError, ScalarField2D

# Kernel parameter presets: (tau, d, sigma_g).
_KERNELS = {
    "darcy": (3.0, 2.0, 1.0),
    "ns": (7.0, 2.5, 7.0**1.5),
}


@dataclass(frozen=True)
class GrfSpec:
    """Spectral density parameters and seed for one random-field draw."""

    tau: float
    d: float
    sigma_g: float
    seed: int

    def __post_init__(self):
        if not self.tau > 0:
            raise FieldError(f"tau must be positive, got {self.tau}")
        if not self.d > 1:
            raise FieldError(f"exponent d must exceed 1 for a summable spectrum, got {self.d}")
        if self.sigma_g < 0:
            raise FieldError(f"sigma_g must be nonnegative, got {self.sigma_g}")

    @classmethod
    def preset(cls, kernel: str, seed: int) -> "GrfSpec":
        if kernel not in _KERNELS:
            raise FieldError(f"unknown GRF kernel {kernel!r}")
        tau, d, sigma_g = _KERNELS[kernel]
        return cls(tau=tau, d=d, sigma_g=sigma_g, seed=int(seed))


def spectral_density(spec: GrfSpec, k_sq: np.ndarray) -> np.ndarray:
    """Analytic density sigma_g^2 (4 pi^2 |k|^2 + tau^2)^(-d) at squared
    integer wavenumbers |k|^2."""
    return spec.sigma_g**2 * (4.0 * np.pi**2 * k_sq + spec.tau**2) ** (-spec.d)


def sample_grf(spec: GrfSpec, nx: int, ny: int) -> ScalarField2D:
    """One deterministic draw of the field on an nx-by-ny periodic grid."""
    rng = np.random.default_rng(spec.seed)
    white = rng.standard_normal((ny, nx))
    kx = np.fft.fftfreq(nx, d=1.0 / nx)
    ky = np.fft.fftfreq(ny, d=1.0 / ny)
    k_sq = kx[None, :] ** 2 + ky[:, None] ** 2
    amp = np.sqrt(spectral_density(spec, k_sq))
    amp[0, 0] = 0.0  # zero-mean gauge
    # FFT of real white noise has E|Z_k|^2 = nx*ny; rescale so the series
    # coefficients c_k = FFT(w)/(nx*ny) carry exactly the analytic density.
    coeff = amp * np.fft.fft2(white) * np.sqrt(float(nx * ny))
    field = np.fft.ifft2(coeff).real
    return ScalarField2D.from_grid(field, domain=DOMAIN_TORUS)
