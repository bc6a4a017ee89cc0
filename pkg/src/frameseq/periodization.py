"""Periodization of the squared frequency profile onto the unit circle.

For spacing ``b`` the periodization is

    Phi_b(xi) = sum over n in Z of phi_hat((xi + n) / b)^2,

a 1-periodic function whose essential bounds decide the frame properties of
the translate family with spacing ``b``.  Profiles here are compactly
supported, so the sum is finite and grid values are exact up to roundoff.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PeriodizedSpectrum",
    "periodize",
    "periodize_at",
    "fourier_coeff",
    "essential_bounds",
    "zero_count",
    "dilation_identity_deviation",
    "smoothness_diagnostic",
    "write_csv",
    "summary",
]


@dataclass
class PeriodizedSpectrum:
    """Grid samples of ``Phi_b`` at midpoints ``xi_j = (j + 1/2) / M``."""

    b: float
    grid_size: int
    values: np.ndarray
    truncation_range: int
    tail_bound: float = 0.0
    # True when Phi_b is exactly constant on every grid cell (step-function
    # profiles with aligned jumps); coefficient extraction is then exact.
    cell_constant: bool = False
    _fft: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        m = self.grid_size
        if m < 16 or (m & (m - 1)) != 0:
            raise ValueError("grid_size must be a power of two >= 16")
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (m,):
            raise ValueError("values must have shape (grid_size,)")
        if np.any(self.values < -1e-12):
            raise ValueError("periodization values must be nonnegative")

    def grid(self):
        """Midpoint grid on [0, 1)."""
        m = self.grid_size
        return (np.arange(m) + 0.5) / m

    def mean(self):
        return float(np.mean(self.values))

    def _coeff_fft(self):
        if self._fft is None:
            self._fft = np.fft.fft(self.values)
        return self._fft


def _cover_range(profile, b, xi_min, xi_max):
    lo, hi = profile.support()
    n_lo = math.floor(b * lo - xi_max) - 1
    n_hi = math.ceil(b * hi - xi_min) + 1
    return n_lo, n_hi


def periodize_at(profile, b, xi):
    """``Phi_b`` evaluated exactly at arbitrary points ``xi`` (vectorized)."""
    if b <= 0:
        raise ValueError("spacing b must be positive")
    xi = np.asarray(xi, dtype=float)
    n_lo, n_hi = _cover_range(profile, b, float(xi.min()), float(xi.max()))
    out = np.zeros_like(xi)
    for n in range(n_lo, n_hi + 1):
        vals = profile.eval((xi + n) / b)
        out += vals * vals
    return out


def periodize(profile, b, grid_size=4096, tail_tol=1e-12):
    """Sample ``Phi_b`` on the midpoint grid of size ``grid_size``.

    Profiles are compactly supported, so the translate sum is finite: the
    truncation range covers the support exactly and ``tail_bound`` is 0.
    ``tail_tol`` is kept for interface stability; it only matters for
    inputs with unbounded support, which this profile type cannot express.
    """
    if b <= 0:
        raise ValueError("spacing b must be positive")
    m = int(grid_size)
    if m < 16 or (m & (m - 1)) != 0:
        raise ValueError("grid_size must be a power of two >= 16")
    grid = (np.arange(m) + 0.5) / m
    values = periodize_at(profile, b, grid)
    n_lo, n_hi = _cover_range(profile, b, 0.0, 1.0)
    return PeriodizedSpectrum(
        b=float(b),
        grid_size=m,
        values=values,
        truncation_range=max(abs(n_lo), abs(n_hi)),
        tail_bound=0.0,
        cell_constant=_cells_align(profile, b, m),
    )


def _cells_align(profile, b, m):
    """True when every jump of ``Phi_b`` lands on a grid-cell boundary.

    Holds for step-function profiles (constant and sampled pieces) whose
    breakpoints map to multiples of ``1/m`` under ``xi -> b xi``; midpoint
    samples then determine the function exactly rather than approximately.
    """

    def on_grid(x):
        return abs(b * x * m - round(b * x * m)) <= 1e-9

    for p in profile.pieces:
        if p.affine is not None:
            return False
        if not (on_grid(p.lo) and on_grid(p.hi)):
            return False
        if p.samples is not None:
            width = (p.hi - p.lo) / p.samples.size
            k = round(b * width * m)
            if k < 1 or abs(b * width * m - k) > 1e-9:
                return False
    return True


def fourier_coeff(ps, n):
    """Fourier coefficient ``Phi_b_hat(n)`` of the grid data.

    Computed as ``(1/M) sum_j values[j] e^{-2 pi i n xi_j}`` through one
    cached FFT plus the midpoint phase.  Complex in general; the imaginary
    part vanishes (to roundoff) exactly when the data is even on the circle.
    """
    n = int(n)
    m = ps.grid_size
    if abs(n) >= m // 2:
        raise ValueError(f"coefficient index |{n}| >= M/2 = {m // 2} would alias")
    coeffs = ps._coeff_fft()
    c = complex(np.exp(-1j * math.pi * n / m) * coeffs[n % m] / m)
    if ps.cell_constant:
        # exact map from midpoint samples to the step function's coefficient
        c *= float(np.sinc(n / m))
    return c


def essential_bounds(ps, zero_thresh=None):
    """Grid essential bounds ``(inf over nonzero, sup, zero fraction)``.

    ``zero_thresh`` defaults to ``1e-8 * sup``.  Grid points at or below the
    threshold count as zeros; ``inf_nonzero`` is ``inf`` when every point is
    a zero.
    """
    sup = float(np.max(ps.values))
    if zero_thresh is None:
        zero_thresh = 1e-8 * sup
    mask = ps.values <= zero_thresh
    zero_fraction = float(np.mean(mask))
    if zero_fraction == 1.0:
        inf_nonzero = math.inf
    else:
        inf_nonzero = float(np.min(ps.values[~mask]))
    return inf_nonzero, sup, zero_fraction


def zero_count(ps, zero_thresh=None):
    """Number of cyclic runs of grid zeros and their intervals in xi.

    Returns ``(count, intervals)`` where each interval is the union of the
    grid cells whose midpoints sit at or below the threshold.  Refuses when
    more than half the circle is at zero level, since run counting is then
    meaningless.
    """
    sup = float(np.max(ps.values))
    if zero_thresh is None:
        zero_thresh = 1e-8 * sup
    mask = ps.values <= zero_thresh
    frac = float(np.mean(mask))
    if frac > 0.5:
        raise ValueError(
            f"zero fraction {frac:.3f} > 0.5: most of the circle is at zero level, "
            "run counting is not meaningful"
        )
    m = ps.grid_size
    if not mask.any():
        return 0, []
    idx = np.flatnonzero(mask)
    # split into runs of consecutive indices
    breaks = np.flatnonzero(np.diff(idx) > 1)
    starts = np.concatenate(([0], breaks + 1))
    ends = np.concatenate((breaks, [idx.size - 1]))
    runs = [(int(idx[s]), int(idx[e])) for s, e in zip(starts, ends)]
    # cyclic wrap: a run ending at M-1 merges with one starting at 0
    if len(runs) > 1 and runs[0][0] == 0 and runs[-1][1] == m - 1:
        first = runs.pop(0)
        last = runs.pop()
        runs.append((last[0], first[1] + m))
    # a wrapped run is reported with hi > 1, meaning it continues past xi = 1
    intervals = [(s / m, (e + 1) / m) for s, e in runs]
    return len(runs), intervals


def dilation_identity_deviation(profile, b, m_factor, grid_size=4096):
    """Max grid deviation of ``Phi_{m b}(xi)`` vs ``sum_k Phi_b((xi + k)/m)``.

    The two sides are independent finite sums of squared profile values, so
    for exact-arithmetic-clean profiles the deviation is pure roundoff.
    """
    m_factor = int(m_factor)
    if m_factor < 2:
        raise ValueError("dilation factor must be an integer >= 2")
    ps_coarse = periodize(profile, m_factor * b, grid_size)
    grid = ps_coarse.grid()
    acc = np.zeros_like(grid)
    for k in range(m_factor):
        acc += periodize_at(profile, b, (grid + k) / m_factor)
    return float(np.max(np.abs(ps_coarse.values - acc)))


def smoothness_diagnostic(ps, n_max=64):
    """Decay-rate diagnostic of the coefficients ``|Phi_b_hat(n)|``.

    Fits the log-log slope of coefficient magnitude against n; a steep slope
    or coefficients at the roundoff floor indicate a smooth periodization.
    """
    ns = np.arange(1, n_max + 1)
    mags = np.array([abs(fourier_coeff(ps, int(n))) for n in ns])
    scale = max(float(np.max(mags)), 1e-300)
    good = mags > max(1e-14, 1e-10 * scale)
    if good.sum() >= 4:
        slope = float(np.polyfit(np.log(ns[good]), np.log(mags[good]), 1)[0])
    else:
        slope = -math.inf
    return {
        "n": ns,
        "magnitude": mags,
        "decay_exponent": slope,
        "rapidly_decaying": bool(slope < -2.5 or not good.any()),
    }


def write_csv(ps, path):
    """Emit rows ``(xi_j, Phi_b(xi_j))`` with 12-significant-digit floats."""
    grid = ps.grid()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["xi", "phi"])
        for x, v in zip(grid, ps.values):
            writer.writerow([format(x, ".12g"), format(v, ".12g")])


def summary(ps, zero_thresh=None):
    """JSON-ready summary of a periodization."""
    inf_nz, sup, zf = essential_bounds(ps, zero_thresh)
    return {
        "b": ps.b,
        "grid_size": ps.grid_size,
        "truncation_range": ps.truncation_range,
        "tail_bound": ps.tail_bound,
        "inf_nonzero": inf_nz if math.isfinite(inf_nz) else None,
        "sup": sup,
        "zero_fraction": zf,
        "mean": ps.mean(),
    }
