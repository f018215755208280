"""Frequency selective reconstruction (FSR).

The image is processed in raster order in small blocks. Each block is
extrapolated from a larger window around it by building a sparse model
out of 2-D DFT basis functions, fitted to the available pixels with a
spatial weighting that decays with the distance from the window centre:

* originally known pixels get weight ``rho ** d``,
* pixels filled by earlier blocks get ``delta * rho ** d``,
* everything else (unknown, or outside the image) gets 0.

Each iteration picks the basis function whose weighted projection onto
the residual removes the most weighted residual energy, adds ``gamma``
times that projection to the model and subtracts it from the residual.
Atoms are taken in conjugate-symmetric pairs so the model stays real.

Because all basis functions have unit magnitude, the weighted projections
of the residual onto every atom are the DFT of ``weight * residual``
divided by the total weight, and subtracting one atom shifts the DFT of
the weights. The loop therefore runs entirely in the frequency domain.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numba
import numpy as np

from ..sampling import SampledImage

__all__ = ["FsrParams", "fsr_block", "reconstruct_fsr"]


@dataclass(frozen=True)
class FsrParams:
    block_size: int = 4
    border: int = 14
    transform_size: int = 32
    iterations: int = 100
    rho: float = 0.7
    gamma: float = 0.5
    delta: float = 0.5
    frequency_prior: bool = True

    def __post_init__(self):
        if self.block_size < 1 or self.border < 0:
            raise ValueError("block_size must be >= 1 and border >= 0")
        if self.block_size + 2 * self.border != self.transform_size:
            raise ValueError("block_size + 2 * border must equal transform_size")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if not 0 < self.rho < 1:
            raise ValueError("rho must lie in (0, 1)")
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        if not 0 <= self.delta < 1:
            raise ValueError("delta must lie in [0, 1)")

    @classmethod
    def from_overrides(cls, **kw) -> "FsrParams":
        """Build from keyword overrides, deriving ``border`` when omitted."""
        kw = {k: v for k, v in kw.items() if v is not None}
        base = cls()
        bs = kw.get("block_size", base.block_size)
        ts = kw.get("transform_size", base.transform_size)
        if "border" not in kw and (bs != base.block_size or ts != base.transform_size):
            kw["border"] = (ts - bs) // 2
        return cls(**kw)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def frequency_weights(params: FsrParams) -> np.ndarray:
    """Selection prior over DFT bins, 1 at DC falling to 0 at the corner.

    ``(1 - sqrt(2)/2 * |f|) ** 2`` with each frequency component ``f``
    normalised to [-1, 1]. All ones when ``frequency_prior`` is off.
    """
    n = params.transform_size
    if not params.frequency_prior:
        return np.ones((n, n))
    f = np.fft.fftfreq(n) * 2.0
    rad = np.hypot(f[:, None], f[None, :])
    return (1.0 - np.sqrt(2.0) / 2.0 * rad) ** 2


def spatial_weights(params: FsrParams) -> np.ndarray:
    n = params.transform_size
    c = (n - 1) / 2.0
    r, s = np.indices((n, n))
    return params.rho ** np.hypot(r - c, s - c)


@numba.njit(cache=True)
def _twiddles(n):
    tw = np.empty(n, dtype=np.complex128)
    for k in range(n):
        tw[k] = np.exp(-2j * np.pi * k / n)
    return tw


@numba.njit(cache=True)
def _dft_matrix(tw):
    n = tw.shape[0]
    f = np.empty((n, n), dtype=np.complex128)
    for a in range(n):
        for b in range(n):
            f[a, b] = tw[(a * b) % n]
    return f


@numba.njit(cache=True)
def _fit(values, w, iterations, gamma, fw, tw, dft, energies, track):
    """Greedy weighted fit of DFT atoms; returns the coefficient array.

    ``fw`` scales the selection criterion per frequency (all ones for the
    plain energy criterion). ``energies[i]`` receives the weighted residual
    energy before iteration ``i`` (and after the last one at
    ``i == iterations``) when ``track`` is set.
    """
    n = values.shape[0]
    half = n // 2 + 1
    coef = np.zeros((n, n), dtype=np.complex128)
    wsum = w.sum()
    if wsum <= 0.0:
        return coef
    resid = np.where(w > 0.0, values, 0.0)
    spec_r = np.dot(np.dot(dft, (resid * w).astype(np.complex128)), dft)
    spec_w = np.dot(np.dot(dft, w.astype(np.complex128)), dft)
    # spec_w tiled 2x2 so shifted lookups need no modulo
    w2 = np.empty((2 * n, 2 * n), dtype=np.complex128)
    for a in range(2 * n):
        for b in range(2 * n):
            w2[a, b] = spec_w[a % n, b % n]
    for it in range(iterations + 1):
        if track:
            energies[it] = (w * resid * resid).sum()
        if it == iterations:
            break
        # the spectrum of a real signal is conjugate symmetric: rows
        # 0..n/2 cover every bin up to conjugation
        best = -1.0
        bk = 0
        bl = 0
        for k in range(half):
            for l in range(n):
                z = spec_r[k, l]
                v = (z.real * z.real + z.imag * z.imag) * fw[k, l]
                if v > best:
                    best = v
                    bk = k
                    bl = l
        p = spec_r[bk, bl] / wsum
        ck = (n - bk) % n
        cl = (n - bl) % n
        paired = ck != bk or cl != bl
        gp = gamma * p
        gq = gamma * np.conj(p)
        coef[bk, bl] += gp
        if paired:
            coef[ck, cl] += gq
            for k in range(half):
                for l in range(n):
                    spec_r[k, l] -= gp * w2[k - bk + n, l - bl + n] + gq * w2[k - ck + n, l - cl + n]
        else:
            for k in range(half):
                for l in range(n):
                    spec_r[k, l] -= gp * w2[k - bk + n, l - bl + n]
        if track:
            # spatial residual, only needed for the energy diagnostic
            for a in range(n):
                for b in range(n):
                    ph = np.conj(tw[(bk * a + bl * b) % n])
                    atom = gp * ph
                    if paired:
                        atom += gq * np.conj(ph)
                    resid[a, b] -= atom.real
    return coef


@numba.njit(cache=True)
def _evaluate(coef, tw, r0, c0, size):
    """Real part of the model on the ``size x size`` patch at (r0, c0)."""
    n = coef.shape[0]
    out = np.zeros((size, size))
    for k in range(n):
        for l in range(n):
            c = coef[k, l]
            if c == 0:
                continue
            for a in range(size):
                for b in range(size):
                    ph = np.conj(tw[(k * (r0 + a) + l * (c0 + b)) % n])
                    out[a, b] += (c * ph).real
    return out


@numba.njit(cache=True, nogil=True)
def _fsr(vals, state, wt, fw, bs, border, iterations, gamma, delta, height, width):
    """Process all blocks in place; ``state`` 1 = known, 2 = filled, 0 = empty."""
    n = wt.shape[0]
    tw = _twiddles(n)
    dft = _dft_matrix(tw)
    dummy = np.zeros(1)
    w = np.zeros((n, n))
    win = np.zeros((n, n))
    for r0 in range(0, height, bs):
        for c0 in range(0, width, bs):
            todo = False
            for a in range(bs):
                for b in range(bs):
                    if r0 + a < height and c0 + b < width:
                        if state[r0 + a + border, c0 + b + border] == 0:
                            todo = True
            if not todo:
                continue
            for a in range(n):
                for b in range(n):
                    s = state[r0 + a, c0 + b]
                    if s == 1:
                        w[a, b] = wt[a, b]
                    elif s == 2:
                        w[a, b] = delta * wt[a, b]
                    else:
                        w[a, b] = 0.0
                    win[a, b] = vals[r0 + a, c0 + b]
            coef = _fit(win, w, iterations, gamma, fw, tw, dft, dummy, False)
            model = _evaluate(coef, tw, border, border, bs)
            for a in range(bs):
                for b in range(bs):
                    if r0 + a >= height or c0 + b >= width:
                        continue
                    pr = r0 + a + border
                    pc = c0 + b + border
                    if state[pr, pc] == 0:
                        vals[pr, pc] = min(max(model[a, b], 0.0), 255.0)
                        state[pr, pc] = 2
    return vals


def fsr_block(window, weights, params: FsrParams | None = None, track_energy=False):
    """Fit one window; the building block of :func:`reconstruct_fsr`.

    Parameters
    ----------
    window : ndarray (N, N)
        Window values; entries with zero weight are ignored.
    weights : ndarray (N, N)
        Non-negative fitting weights.
    track_energy : bool
        Also return the weighted residual energy before each iteration and
        after the last one.

    Returns
    -------
    model : ndarray (N, N)
        Real part of the fitted model over the whole window.
    energies : ndarray (iterations + 1,), only if ``track_energy``
    """
    params = params or FsrParams()
    n = params.transform_size
    window = np.ascontiguousarray(window, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if window.shape != (n, n) or weights.shape != (n, n):
        raise ValueError(f"window and weights must be {n}x{n}")
    tw = _twiddles(n)
    energies = np.zeros(params.iterations + 1)
    coef = _fit(
        window,
        weights,
        params.iterations,
        params.gamma,
        frequency_weights(params),
        tw,
        _dft_matrix(tw),
        energies,
        track_energy,
    )
    model = _evaluate(coef, tw, 0, 0, n)
    return (model, energies) if track_energy else model


def reconstruct_fsr(sampled: SampledImage, params: FsrParams | None = None) -> np.ndarray:
    """Reconstruct all unknown pixels with FSR; known pixels are kept."""
    params = params or FsrParams()
    h, w = sampled.shape
    bs, border = params.block_size, params.border
    pad_b = border + (-h) % bs
    pad_r = border + (-w) % bs
    pad = ((border, pad_b), (border, pad_r))
    # padding values carry zero weight; the mode only keeps them finite
    vals = np.pad(sampled.values, pad, mode="symmetric")
    state = np.pad(sampled.known.astype(np.int8), pad, mode="constant")
    _fsr(
        vals,
        state,
        spatial_weights(params),
        frequency_weights(params),
        bs,
        border,
        params.iterations,
        params.gamma,
        params.delta,
        h,
        w,
    )
    out = vals[border : border + h, border : border + w].copy()
    left = state[border : border + h, border : border + w] == 0
    if left.any():
        # windows without any usable pixel; happens only for extremely sparse input
        from .interp import reconstruct_nearest

        out[left] = reconstruct_nearest(sampled)[left]
    out[sampled.known] = sampled.values[sampled.known]
    return out
