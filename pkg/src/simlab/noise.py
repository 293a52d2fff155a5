"""
Non-stationary, non-Gaussian error fields.

noise1: upper half i.i.d. N(0,1) pixels, lower half N(0,1) shared by 4x4
        blocks; Gaussian kernel; x50.
noise2: same pre-field, Laplace kernel; x100.
noise3: upper half Laplace(0, b=1) (variance 2), lower half Student t(10);
        Gaussian kernel; x25.

Smoothing happens before scaling. Kernels are truncated at ``truncation`` ·
bandwidth, renormalized to sum 1, and applied with symmetric (reflective)
padding at the domain edge.
"""

import numpy as np
from scipy import signal

from src.core.grid import GridGeometry, ScalarField
from src.models.reports import NoiseSpec


def noise_geometry(spec: NoiseSpec) -> GridGeometry:
    return GridGeometry.square(spec.pixels, spec.extent)


def kernel(spec: NoiseSpec) -> np.ndarray:
    """Discrete smoothing kernel on the pixel lattice, summing to one."""
    pitch = spec.extent / spec.pixels
    support = spec.truncation * spec.bandwidth
    r = int(np.floor(support / pitch))
    d = pitch * np.arange(-r, r + 1)
    dist = np.hypot(*np.meshgrid(d, d))
    if spec.kernel == "gaussian":
        k = np.exp(-(dist**2) / (2.0 * spec.bandwidth**2))
    else:
        k = np.exp(-dist / spec.bandwidth)
    k[dist > support] = 0.0
    return k / k.sum()


def pre_field(spec: NoiseSpec, rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` unsmoothed, unscaled fields, shape (count, pixels, pixels); row 0 is the bottom."""
    P = spec.pixels
    half = P // 2
    out = np.empty((count, P, P))
    if spec.kind in ("noise1", "noise2"):
        out[:, half:, :] = rng.standard_normal((count, P - half, P))
        blocks = rng.standard_normal((count, half // 4, P // 4))
        out[:, :half, :] = np.repeat(np.repeat(blocks, 4, axis=1), 4, axis=2)
    else:
        out[:, half:, :] = rng.laplace(0.0, 1.0, size=(count, P - half, P))
        out[:, :half, :] = rng.standard_t(10, size=(count, half, P))
    return out


def smooth(fields: np.ndarray, kern: np.ndarray) -> np.ndarray:
    """Convolve each (P, P) slice with the kernel using reflective padding."""
    r = kern.shape[0] // 2
    padded = np.pad(fields, ((0, 0), (r, r), (r, r)), mode="symmetric")
    return signal.fftconvolve(padded, kern[None, :, :], mode="valid", axes=(1, 2))


def gen_noise_stack(spec: NoiseSpec, rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` independent error fields, shape (count, pixels, pixels)."""
    return spec.scaling * smooth(pre_field(spec, rng, count), kernel(spec))


def gen_noise(spec: NoiseSpec, seed: int) -> ScalarField:
    """One error field; the same seed reproduces the same bits."""
    rng = np.random.Generator(np.random.Philox(int(seed)))
    return ScalarField(noise_geometry(spec), gen_noise_stack(spec, rng, 1)[0])


def noise_sigma(spec: NoiseSpec, reps: int = 4000, seed: int = 0, batch: int = 250) -> ScalarField:
    """Monte-Carlo per-pixel standard deviation of the noise kind."""
    rng = np.random.Generator(np.random.Philox(int(seed)))
    total = np.zeros((spec.pixels, spec.pixels))
    done = 0
    while done < reps:
        k = min(batch, reps - done)
        eps = gen_noise_stack(spec, rng, k)
        total += (eps**2).sum(axis=0)
        done += k
    return ScalarField(noise_geometry(spec), np.sqrt(total / reps))
