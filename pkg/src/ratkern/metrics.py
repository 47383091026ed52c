"""Full-reference image quality metrics: PSNR, SSIM and FSIM.

All metrics take two :class:`~ratkern.resample.ImageF` images of equal size
and peak.  SSIM follows the original single-scale formulation (11x11
Gaussian window, valid-region statistics).  FSIM follows the reference
phase-congruency implementation with its default constants.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import convolve2d

from .exceptions import DegenerateRange, DimMismatch, TooSmall
from .resample import ImageF

__all__ = [
    "INFINITE_PSNR",
    "MetricReport",
    "psnr",
    "ssim",
    "fsim",
    "phase_congruency",
    "normalize_unity",
    "evaluate_all",
    "METRICS",
]

#: Returned by :func:`psnr` for identical images.
INFINITE_PSNR = math.inf


def _check_pair(a: ImageF, b: ImageF) -> None:
    if a.shape != b.shape:
        raise DimMismatch(f"image sizes differ: {a.shape} vs {b.shape}")
    if a.peak != b.peak:
        raise DimMismatch(f"image peaks differ: {a.peak} vs {b.peak}")


def psnr(a: ImageF, b: ImageF) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` for identical images."""
    _check_pair(a, b)
    mse = float(np.mean((a.samples - b.samples) ** 2))
    if mse == 0.0:
        return INFINITE_PSNR
    return 10.0 * math.log10(a.peak**2 / mse)


# ---------------------------------------------------------------------------
# SSIM


def _gaussian_1d(size: int, sigma: float) -> np.ndarray:
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(x**2) / (2.0 * sigma**2))
    return g / g.sum()


def _filter_valid(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    # Separable valid-region filtering with a symmetric 1-D window.
    n = len(g)
    rows = sum(g[i] * x[i : x.shape[0] - n + 1 + i, :] for i in range(n))
    return sum(g[j] * rows[:, j : x.shape[1] - n + 1 + j] for j in range(n))


def ssim_map(a: ImageF, b: ImageF, *, window: int = 11, sigma: float = 1.5, k1: float = 0.01, k2: float = 0.03):
    _check_pair(a, b)
    if min(a.shape) < window:
        raise TooSmall(f"SSIM needs at least {window}x{window} pixels, got {a.shape}")
    g = _gaussian_1d(window, sigma)
    x, y = a.samples, b.samples
    c1 = (k1 * a.peak) ** 2
    c2 = (k2 * a.peak) ** 2
    mx, my = _filter_valid(x, g), _filter_valid(y, g)
    sxx = _filter_valid(x * x, g) - mx * mx
    syy = _filter_valid(y * y, g) - my * my
    sxy = _filter_valid(x * y, g) - mx * my
    return ((2 * mx * my + c1) * (2 * sxy + c2)) / ((mx * mx + my * my + c1) * (sxx + syy + c2))


def ssim(a: ImageF, b: ImageF, *, window: int = 11, sigma: float = 1.5, k1: float = 0.01, k2: float = 0.03) -> float:
    """Mean structural similarity index.

    Parameters
    ----------
    a, b : ImageF
        Images of equal size (at least ``window`` pixels per side) and peak.
    window, sigma : int, float
        Gaussian window size and width.
    k1, k2 : float
        Stabilizing constants; ``C1 = (k1 * peak)**2``, ``C2 = (k2 * peak)**2``.
    """
    return float(np.mean(ssim_map(a, b, window=window, sigma=sigma, k1=k1, k2=k2)))


# ---------------------------------------------------------------------------
# FSIM


def _freq_grid(rows: int, cols: int):
    def axis(n):
        if n % 2:
            return np.arange(-(n - 1) / 2, (n - 1) / 2 + 1) / (n - 1)
        return np.arange(-n / 2, n / 2) / n

    x, y = np.meshgrid(axis(cols), axis(rows))
    return x, y


def _lowpass(rows: int, cols: int, cutoff: float = 0.45, n: int = 15) -> np.ndarray:
    x, y = _freq_grid(rows, cols)
    radius = np.sqrt(x**2 + y**2)
    return np.fft.ifftshift(1.0 / (1.0 + (radius / cutoff) ** (2 * n)))


@lru_cache(maxsize=8)
def _filter_bank(rows, cols, nscale, norient, min_wavelength, mult, sigma_onf, dtheta_on_sigma):
    """Image-independent part of the phase congruency computation.

    Returns, per orientation, the list of frequency-domain filters, the mean
    squared smallest-scale filter value and the two noise-energy sums.
    """
    theta_sigma = math.pi / norient / dtheta_on_sigma
    x, y = _freq_grid(rows, cols)
    radius = np.fft.ifftshift(np.sqrt(x**2 + y**2))
    theta = np.fft.ifftshift(np.arctan2(-y, x))
    radius[0, 0] = 1.0
    sintheta, costheta = np.sin(theta), np.cos(theta)

    lp = _lowpass(rows, cols)
    log_gabor = []
    for s in range(nscale):
        fo = 1.0 / (min_wavelength * mult**s)
        lg = np.exp(-(np.log(radius / fo) ** 2) / (2 * math.log(sigma_onf) ** 2)) * lp
        lg[0, 0] = 0.0
        log_gabor.append(lg)

    bank = []
    for o in range(norient):
        angl = o * math.pi / norient
        ds = sintheta * math.cos(angl) - costheta * math.sin(angl)
        dc = costheta * math.cos(angl) + sintheta * math.sin(angl)
        spread = np.exp(-(np.abs(np.arctan2(ds, dc)) ** 2) / (2 * theta_sigma**2))
        filters = [lg * spread for lg in log_gabor]
        spatial = [np.real(np.fft.ifft2(f)) * math.sqrt(rows * cols) for f in filters]
        em_n = float(np.sum(filters[0] ** 2))
        sum_an2 = sum(float(np.sum(f**2)) for f in spatial)
        sum_aiaj = sum(
            float(np.sum(spatial[i] * spatial[j])) for i in range(nscale - 1) for j in range(i + 1, nscale)
        )
        bank.append((filters, em_n, sum_an2, sum_aiaj))
    return bank


def phase_congruency(
    im: np.ndarray,
    *,
    nscale: int = 4,
    norient: int = 4,
    min_wavelength: float = 6,
    mult: float = 2,
    sigma_onf: float = 0.55,
    dtheta_on_sigma: float = 1.2,
    k: float = 2.0,
    epsilon: float = 1e-4,
) -> np.ndarray:
    """Phase congruency map from a log-Gabor filter bank (the FSIM variant)."""
    rows, cols = im.shape
    bank = _filter_bank(rows, cols, nscale, norient, min_wavelength, mult, sigma_onf, dtheta_on_sigma)
    imagefft = np.fft.fft2(im)

    energy_all = np.zeros((rows, cols))
    an_all = np.zeros((rows, cols))
    for filters, em_n, est_sum_an2, est_sum_aiaj in bank:
        eo = [np.fft.ifft2(imagefft * f) for f in filters]
        sum_e = sum(r.real for r in eo)
        sum_o = sum(r.imag for r in eo)
        sum_an = sum(np.abs(r) for r in eo)

        x_energy = np.sqrt(sum_e**2 + sum_o**2) + epsilon
        mean_e, mean_o = sum_e / x_energy, sum_o / x_energy
        energy = np.zeros((rows, cols))
        for resp in eo:
            e, od = resp.real, resp.imag
            energy += e * mean_e + od * mean_o - np.abs(e * mean_o - od * mean_e)

        # Noise compensation from the smallest-scale response.
        median_e2n = float(np.median(np.abs(eo[0]) ** 2))
        noise_power = -median_e2n / math.log(0.5) / em_n
        est_noise_energy2 = 2 * noise_power * est_sum_an2 + 4 * noise_power * est_sum_aiaj
        tau = math.sqrt(max(est_noise_energy2, 0.0) / 2)
        threshold = tau * math.sqrt(math.pi / 2) + k * math.sqrt((2 - math.pi / 2) * tau**2)
        threshold /= 1.7  # empirical rescaling for this PC measure
        energy_all += np.maximum(energy - threshold, 0.0)
        an_all += sum_an

    with np.errstate(invalid="ignore", divide="ignore"):
        pc = energy_all / an_all
    pc[an_all == 0] = 0.0
    return pc


_SCHARR_X = np.array([[3, 0, -3], [10, 0, -10], [3, 0, -3]]) / 16.0
_SCHARR_Y = _SCHARR_X.T.copy()


def _gradient_magnitude(y: np.ndarray) -> np.ndarray:
    gx = convolve2d(y, _SCHARR_X, mode="same")
    gy = convolve2d(y, _SCHARR_Y, mode="same")
    return np.sqrt(gx**2 + gy**2)


def fsim(a: ImageF, b: ImageF, *, t1: float = 0.85, t2: float = 160.0) -> float:
    """Feature similarity index (luminance only).

    Images with a peak other than 255 are rescaled to the 0..255 range first,
    since ``t2`` is calibrated for 8-bit gradients.  Images larger than 256
    pixels on the short side are box-averaged and subsampled by
    ``round(min(h, w) / 256)``.
    """
    _check_pair(a, b)
    if min(a.shape) < 32:
        raise TooSmall(f"FSIM needs at least 32x32 pixels, got {a.shape}")
    scale = 255.0 / a.peak
    y1, y2 = a.samples * scale, b.samples * scale
    f = max(1, round(min(a.shape) / 256))
    if f > 1:
        box = np.full((f, f), 1.0 / (f * f))
        y1 = convolve2d(y1, box, mode="same")[::f, ::f]
        y2 = convolve2d(y2, box, mode="same")[::f, ::f]
    pc1, pc2 = phase_congruency(y1), phase_congruency(y2)
    g1, g2 = _gradient_magnitude(y1), _gradient_magnitude(y2)
    pc_sim = (2 * pc1 * pc2 + t1) / (pc1**2 + pc2**2 + t1)
    g_sim = (2 * g1 * g2 + t2) / (g1**2 + g2**2 + t2)
    pcm = np.maximum(pc1, pc2)
    total = float(np.sum(pcm))
    if total == 0.0:
        # No phase structure anywhere (flat images): fall back to an unweighted mean.
        return float(np.mean(g_sim * pc_sim))
    return float(np.sum(g_sim * pc_sim * pcm) / total)


# ---------------------------------------------------------------------------
# aggregation


def normalize_unity(values, *, return_flag: bool = False):
    """Map values linearly onto ``[0, 1]`` via ``(v - min) / (max - min)``.

    If all values are equal they are mapped to 0 and a
    :class:`~ratkern.exceptions.DegenerateRange` warning is issued.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("cannot normalize an empty list")
    lo, hi = float(np.min(v)), float(np.max(v))
    degenerate = not hi > lo
    if degenerate:
        warnings.warn("all values are equal; mapped to 0", DegenerateRange, stacklevel=2)
        out = np.zeros_like(v)
    else:
        out = (v - lo) / (hi - lo)
    return (out, degenerate) if return_flag else out


@dataclass(frozen=True)
class MetricReport:
    psnr: float
    ssim: float
    fsim: float

    def to_dict(self) -> dict:
        d = asdict(self)
        if math.isinf(self.psnr):
            d["psnr"] = "inf"
        return d


METRICS = {"psnr": psnr, "ssim": ssim, "fsim": fsim}


def evaluate_all(reference: ImageF, test: ImageF) -> MetricReport:
    return MetricReport(psnr(reference, test), ssim(reference, test), fsim(reference, test))
