"""PSD estimation: biased autocorrelation, lag windows, windowed transform.

The estimate at frequency f is the transform of the biased sample
autocorrelation tapered by an even lag window,

    s_hat(f) = sum_{|m| < M} g[m] r_hat[m] exp(-i 2 pi f m),

evaluated on a uniform grid f = j/F with F a power of two, so the whole sum
collapses into a single FFT of a length-F buffer holding the symmetric lag
sequence. r_hat divides by M (not M - |m|), which keeps the implied
autocorrelation sequence positive semidefinite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import fft_real

WINDOW_SCAN_POINTS = 4096
DEFAULT_GAUSSIAN_STD = 50.0
WINDOW_KINDS = ("gaussian", "bartlett", "rectangular")

_IMAG_RESIDUE_TOL = 1e-9


def next_pow2(n: int) -> int:
    """Smallest power of two >= n."""
    if n < 1:
        raise ValueError("n must be positive")
    return 1 << (int(n) - 1).bit_length()


@dataclass(frozen=True)
class WindowSpec:
    """Even lag window g[0..M-1] (negative lags implied) with g[0] = 1.

    spectral_bound is sup_f of the window transform
    g(f) = sum_{|m| < M} g[m] cos(2 pi f m); theory_valid records whether the
    transform is nonnegative, which the performance guarantees require.
    """

    kind: str
    length: int
    values: np.ndarray
    spectral_bound: float
    theory_valid: bool
    std: float | None = None


@dataclass(frozen=True)
class PsdEstimate:
    """PSD samples on the uniform grid f = j/F, j = 0..F-1.

    acf_zero keeps the lag-zero autocorrelation of the source observation
    (its empirical power); the grid mean of `values` equals it.
    """

    values: np.ndarray
    acf_zero: float

    @property
    def grid_size(self) -> int:
        return int(self.values.shape[0])


def _embed_even_lags(zero_lag: float, positive_lags: np.ndarray, grid: int) -> np.ndarray:
    """Pack the even lag sequence into an FFT buffer of the given size."""
    m = positive_lags.shape[0] + 1
    if grid < 2 * m:
        raise ValueError(f"grid of {grid} points cannot hold lags up to {m - 1}")
    buf = np.zeros(grid)
    buf[0] = zero_lag
    if m > 1:
        buf[1:m] = positive_lags
        buf[grid - m + 1:] = positive_lags[::-1]
    return buf


def _window_transform_scan(values: np.ndarray) -> np.ndarray:
    """Sample the window transform on WINDOW_SCAN_POINTS frequencies in [0, 1)."""
    grid = max(WINDOW_SCAN_POINTS, next_pow2(2 * values.shape[0]))
    buf = _embed_even_lags(values[0], values[1:], grid)
    spectrum = np.fft.fft(buf).real
    return spectrum[:: grid // WINDOW_SCAN_POINTS]


def make_window(kind: str, length: int, std: float | None = None) -> WindowSpec:
    """Build a lag window for observations of `length` samples.

    gaussian: g[m] = exp(-m^2 / (2 std^2)); bartlett: g[m] = 1 - m/length;
    rectangular: g[m] = 1. The rectangular window's transform (a Dirichlet
    kernel) changes sign, so it comes back with theory_valid=False.
    """
    if length < 2:
        raise ValueError("window length must be >= 2")
    lags = np.arange(length, dtype=float)
    if kind == "gaussian":
        if std is None:
            std = DEFAULT_GAUSSIAN_STD
        if std <= 0:
            raise ValueError("gaussian window std must be positive")
        values = np.exp(-(lags**2) / (2.0 * std * std))
    elif kind == "bartlett":
        values = 1.0 - lags / length
    elif kind == "rectangular":
        values = np.ones(length)
    else:
        raise ValueError(f"unknown window kind {kind!r}; expected one of {WINDOW_KINDS}")
    if kind != "gaussian":
        std = None
    scan = _window_transform_scan(values)
    return WindowSpec(
        kind=kind,
        length=length,
        values=values,
        spectral_bound=float(scan.max()),
        theory_valid=bool(scan.min() >= -1e-6),
        std=std,
    )


def estimate_acf(samples) -> np.ndarray:
    """Biased sample autocorrelation r[m] = (1/M) sum_n x[n+m] x[n], m = 0..M-1."""
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1 or x.shape[0] < 2:
        raise ValueError("observation must be a 1-D vector with at least 2 samples")
    if not np.all(np.isfinite(x)):
        raise ValueError("observation samples must be finite")
    m = x.shape[0]
    grid = next_pow2(2 * m)  # enough zero padding to keep lags non-circular
    spectrum = np.fft.rfft(x, grid)
    corr = np.fft.irfft(spectrum * spectrum.conj(), grid)[:m]
    return corr / m


def bt_psd(samples, window: WindowSpec, grid_size: int) -> PsdEstimate:
    """Windowed-autocorrelation PSD estimate on the grid f = j/grid_size.

    grid_size must be a power of two and at least twice the observation
    length so the symmetric lag sequence embeds without aliasing.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1:
        raise ValueError("observation must be a 1-D vector")
    m = x.shape[0]
    if window.length != m:
        raise ValueError(f"window was built for length {window.length}, observation has {m}")
    f = int(grid_size)
    if f < 2 * m or f & (f - 1):
        raise ValueError(f"grid size must be a power of two >= {2 * m}, got {grid_size}")
    acf = estimate_acf(x)
    buf = _embed_even_lags(acf[0], window.values[1:] * acf[1:], f)
    spectrum = fft_real(buf)
    values = spectrum.real
    scale = float(np.abs(values).max())
    if scale > 0.0 and float(np.abs(spectrum.imag).max()) > _IMAG_RESIDUE_TOL * scale:
        raise RuntimeError("FFT of the even lag sequence left a nontrivial imaginary part")
    return PsdEstimate(values=values, acf_zero=float(acf[0]))


def normalize_unit_power(psd: PsdEstimate) -> PsdEstimate:
    """Rescale so the PSD averages to one over the grid (unit power)."""
    power = float(np.mean(psd.values))
    if power <= 0.0:
        raise ValueError("cannot normalize a PSD with nonpositive power")
    return PsdEstimate(values=psd.values / power, acf_zero=psd.acf_zero / power)


def estimate_dataset_psds(
    observations,
    window: WindowSpec | None = None,
    grid_size: int | None = None,
    unit_power: bool = False,
) -> list[PsdEstimate]:
    """PSD estimates for a stack of equal-length observations (one per row).

    Defaults: gaussian window with std 50 and a grid of next_pow2(4 M) points.
    """
    obs = np.asarray(observations, dtype=float)
    if obs.ndim == 1:
        obs = obs[None, :]
    if obs.ndim != 2:
        raise ValueError("observations must be a 2-D array, one observation per row")
    m = obs.shape[1]
    if window is None:
        window = make_window("gaussian", m, std=DEFAULT_GAUSSIAN_STD)
    if grid_size is None:
        grid_size = next_pow2(4 * m)
    psds = [bt_psd(row, window, grid_size) for row in obs]
    if unit_power:
        psds = [normalize_unit_power(p) for p in psds]
    return psds
