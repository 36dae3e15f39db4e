"""Synthetic stationary Gaussian ARMA data with known ground truth.

A model is an ARMA filter driven by unit-variance white Gaussian noise. Its
exact PSD is tabulated once on a dense grid (2^16 points), which makes exact
power normalization, autocorrelations, and inter-model distances cheap and
free of estimation error. Simulation runs the filter recursion past a burn-in
and optionally adds white Gaussian measurement noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .numerics import RngStream

FINE_GRID = 1 << 16


def _check_stable(ar: np.ndarray) -> None:
    """Reject AR polynomials with roots on or outside the unit circle."""
    if ar.size == 1:
        return
    roots = np.roots(ar)
    radius = float(np.abs(roots).max()) if roots.size else 0.0
    if not radius < 1.0:
        raise ValueError(f"unstable AR polynomial: largest root radius {radius:.6g} >= 1")


def arma_psd(ar, ma, grid_size: int) -> np.ndarray:
    """PSD |B(f)|^2 / |A(f)|^2 of a stable ARMA filter at f = j/grid_size.

    B and A are the polynomials in exp(-i 2 pi f) built from the MA and AR
    coefficient vectors; the driving noise has unit variance.
    """
    a = np.atleast_1d(np.asarray(ar, dtype=float))
    b = np.atleast_1d(np.asarray(ma, dtype=float))
    if a.ndim != 1 or b.ndim != 1 or a.size == 0 or b.size == 0:
        raise ValueError("coefficient vectors must be non-empty and 1-D")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("coefficients must be finite")
    if a[0] == 0.0:
        raise ValueError("leading AR coefficient must be nonzero")
    if grid_size < max(a.size, b.size):
        raise ValueError("grid is too small for the coefficient vectors")
    _check_stable(a)
    num = np.abs(np.fft.fft(b, grid_size)) ** 2
    den = np.abs(np.fft.fft(a, grid_size)) ** 2
    return num / den


@dataclass(frozen=True)
class GenerativeModel:
    """ARMA generative model with its exact PSD tabulated on the fine grid."""

    ar: np.ndarray
    ma: np.ndarray
    normalized: bool
    fine_grid_psd: np.ndarray

    @property
    def power(self) -> float:
        """Process power: the fine-grid mean of the exact PSD."""
        return float(np.mean(self.fine_grid_psd))


def make_model(ar, ma) -> GenerativeModel:
    """Validate the coefficients and tabulate the exact PSD."""
    a = np.atleast_1d(np.asarray(ar, dtype=float)).copy()
    b = np.atleast_1d(np.asarray(ma, dtype=float)).copy()
    psd = arma_psd(a, b, FINE_GRID)
    return GenerativeModel(ar=a, ma=b, normalized=False, fine_grid_psd=psd)


def normalize_model(model: GenerativeModel) -> GenerativeModel:
    """Scale the MA coefficients so the process has unit power."""
    power = model.power
    if power <= 0.0:
        raise ValueError("cannot normalize a model with zero power")
    return GenerativeModel(
        ar=model.ar,
        ma=model.ma / np.sqrt(power),
        normalized=True,
        fine_grid_psd=model.fine_grid_psd / power,
    )


def true_acf(model: GenerativeModel, max_lag: int) -> np.ndarray:
    """Exact autocorrelation r[0..max_lag], the inverse transform of the PSD."""
    if not 0 <= max_lag < FINE_GRID // 2:
        raise ValueError(f"max_lag must be in 0..{FINE_GRID // 2 - 1}")
    return np.fft.ifft(model.fine_grid_psd).real[: max_lag + 1]


def _burn_in(model: GenerativeModel) -> int:
    return max(1000, 50 * (model.ar.size + model.ma.size))


def _simulate_with(
    model: GenerativeModel,
    noise_variance: float,
    length: int,
    count: int,
    mode: str,
    stride: int | None,
    gen: np.random.Generator,
) -> np.ndarray:
    noise_std = float(np.sqrt(noise_variance))
    burn = _burn_in(model)
    if mode == "independent":
        out = np.empty((count, length))
        for i in range(count):
            innovations = gen.standard_normal(burn + length)
            path = lfilter(model.ma, model.ar, innovations)[burn:]
            if noise_std > 0.0:
                path = path + noise_std * gen.standard_normal(length)
            out[i] = path
        return out
    if mode == "segments":
        if stride is None or stride < 1:
            raise ValueError("segment mode needs a stride >= 1")
        total = burn + length + (count - 1) * stride
        innovations = gen.standard_normal(total)
        path = lfilter(model.ma, model.ar, innovations)
        if noise_std > 0.0:
            path = path + noise_std * gen.standard_normal(total)
        starts = burn + stride * np.arange(count)
        return np.stack([path[s : s + length] for s in starts])
    raise ValueError(f"unknown simulation mode {mode!r}; expected 'independent' or 'segments'")


def simulate(
    model: GenerativeModel,
    noise_variance: float,
    length: int,
    count: int,
    rng: RngStream,
    mode: str = "independent",
    stride: int | None = None,
) -> np.ndarray:
    """Observations of the model process, one per row of the result.

    Independent mode draws a fresh realization per observation; segment mode
    slices `count` windows (offset by `stride`) out of one long realization,
    so consecutive observations may overlap. White Gaussian measurement noise
    of the given variance is added samplewise in both modes.
    """
    if length < 2:
        raise ValueError("observation length must be >= 2")
    if count < 1:
        raise ValueError("count must be positive")
    if noise_variance < 0.0:
        raise ValueError("noise variance must be nonnegative")
    _check_stable(model.ar)
    return _simulate_with(model, noise_variance, length, count, mode, stride, rng.generator())


@dataclass(frozen=True)
class LabeledDataset:
    """Observations (one per row) with the index of the model that produced each."""

    observations: np.ndarray
    labels: np.ndarray

    @property
    def n_obs(self) -> int:
        return int(self.observations.shape[0])

    @property
    def obs_len(self) -> int:
        return int(self.observations.shape[1])


def make_benchmark_dataset(
    models,
    n_per_model: int,
    length: int,
    noise_variance: float,
    rng: RngStream,
) -> LabeledDataset:
    """n_per_model independent observations from each model, shuffled together."""
    models = list(models)
    if not models:
        raise ValueError("need at least one model")
    if n_per_model < 1:
        raise ValueError("n_per_model must be positive")
    if length < 2:
        raise ValueError("observation length must be >= 2")
    if noise_variance < 0.0:
        raise ValueError("noise variance must be nonnegative")
    gen = rng.generator()
    blocks = []
    labels = []
    for index, model in enumerate(models):
        _check_stable(model.ar)
        blocks.append(_simulate_with(model, noise_variance, length, n_per_model, "independent", None, gen))
        labels.append(np.full(n_per_model, index, dtype=int))
    observations = np.concatenate(blocks)
    truth = np.concatenate(labels)
    perm = gen.permutation(observations.shape[0])
    return LabeledDataset(observations=observations[perm], labels=truth[perm])


def benchmark_models() -> list[GenerativeModel]:
    """The built-in "arma3" trio of overlapping unit-power models.

    Two MA(3) models and one AR(3) model whose spectra overlap substantially,
    which makes the clustering task genuinely hard at short observation
    lengths and easy at long ones.
    """
    specs = [
        ([1.0], [0.75, 1.0, -1.75, 0.5]),
        ([1.0], [0.5, 1.25, -1.5, 0.75]),
        ([1.0, -0.2, 0.4, 0.1], [1.0]),
    ]
    return [normalize_model(make_model(a, b)) for a, b in specs]
