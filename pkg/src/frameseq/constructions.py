"""Named generator profiles and the sparse dyadic-block family.

The profile builders cover the two hand-made spacing-asymmetry examples
(a plateau tapering to zero, and a ramp paired with a carefully placed
plateau) plus the standard box, tent, and indicator shapes.  The dyadic
blocks machinery produces the sparse index set whose translate family has
an upper frame bound but no lower one: block waves concentrate on small
sets, the infimum spectrum is positive everywhere, yet the weighted norms
``w_n`` collapse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .periodization import PeriodizedSpectrum, periodize
from .spectrum import FourierProfile, Piece

__all__ = [
    "indicator_profile",
    "box_profile",
    "tent_profile",
    "plateau_taper_profile",
    "ramp_plateau_profile",
    "DyadicBlocks",
    "BlockWave",
    "block_wave",
    "BlocksSpectrum",
    "infimum_spectrum",
    "verify_lower_collapse",
    "GalleryEntry",
    "gallery_profiles",
]

EPS_RESOLUTION = 2.0**-20


def indicator_profile(lo, hi):
    """Profile equal to 1 on [lo, hi) and 0 elsewhere."""
    if not hi > lo:
        raise ValueError(f"empty support [{lo}, {hi})")
    return FourierProfile(pieces=[Piece(float(lo), float(hi), const=1.0)])


def box_profile():
    return indicator_profile(0.0, 1.0)


def tent_profile():
    """Rise 0 to 1 on [0, 1/2], fall back to 0 on [1/2, 1]."""
    return FourierProfile(
        pieces=[
            Piece(0.0, 0.5, affine=(2.0, 0.0)),
            Piece(0.5, 1.0, affine=(-2.0, 2.0)),
        ]
    )


def plateau_taper_profile(a, b):
    """Constant 1 on [0, 1/a], affine down to 0 at 1/b, zero elsewhere.

    For spacing ``a`` the translates of each point of the circle meet the
    plateau, so the periodization stays bounded below; for the coarser
    spacing ``b`` the infimum collapses at the taper's foot.  Requires
    ``0 < b < a``.
    """
    a, b = float(a), float(b)
    if not (0.0 < b < a):
        raise ValueError(f"need 0 < b < a, got a={a}, b={b}")
    slope = a * b / (b - a)
    return FourierProfile(
        pieces=[
            Piece(0.0, 1.0 / a, const=1.0),
            Piece(1.0 / a, 1.0 / b, affine=(slope, -slope / b)),
        ]
    )


def _plateau_clear(a, ratio, eps, n_scan):
    """No translate (xi + n)/a, xi in (0, eps), meets [1/b, 1/b + eps].

    Membership rewrites to xi in [ratio - n, ratio - n + a*eps] with
    ratio = a/b, so the interval intersection with (0, eps) is checked in
    closed form for every |n| <= n_scan.
    """
    for n in range(-n_scan, n_scan + 1):
        t = ratio - n
        if t < eps and t > -a * eps:
            return False
    return True


def ramp_plateau_profile(a, b):
    """Ramp ``xi`` on [0, 1/a] plus a unit plateau of scanned width at 1/b.

    The plateau width ``eps`` is the largest dyadic-bisection value (to
    resolution 2^-20) such that no ``a``-spacing translate of (0, eps)
    meets the plateau: the periodization at spacing ``a`` then collapses
    with the ramp while spacing ``b`` keeps a positive infimum off its
    zero set.  Requires ``0 < b < a`` with ``a/b`` not an integer.
    Returns ``(profile, eps)``.
    """
    a, b = float(a), float(b)
    if not (0.0 < b < a):
        raise ValueError(f"need 0 < b < a, got a={a}, b={b}")
    ratio = a / b
    if abs(ratio - round(ratio)) <= 1e-9:
        raise ValueError(f"a/b = {ratio:g} is an integer; no plateau placement exists")
    n_scan = math.ceil(4.0 * a) + 16
    lo, hi = 0.0, 1.0
    if _plateau_clear(a, ratio, hi, n_scan):
        lo = hi
    else:
        while hi - lo > EPS_RESOLUTION / 4.0:
            mid = 0.5 * (lo + hi)
            if _plateau_clear(a, ratio, mid, n_scan):
                lo = mid
            else:
                hi = mid
    eps = lo
    if eps < EPS_RESOLUTION:
        raise RuntimeError(
            f"no admissible plateau width above resolution {EPS_RESOLUTION:g} "
            f"for a={a}, b={b}"
        )
    return (
        FourierProfile(
            pieces=[
                Piece(0.0, 1.0 / a, affine=(1.0, 0.0)),
                Piece(1.0 / b, 1.0 / b + eps, const=1.0),
            ]
        ),
        eps,
    )


# ----------------------------------------------------------------------------
# dyadic blocks
# ----------------------------------------------------------------------------


def _block_exponents(alpha, n_max):
    ns = np.arange(1, n_max + 1)
    return np.maximum(np.floor(alpha * ns - np.sqrt(ns)).astype(int), 0)


@dataclass
class DyadicBlocks:
    """Index set ``union over n of {2^n + k 2^(m_n) : 1 <= k <= 2^(n - m_n)}``.

    ``m_n = max(floor(alpha n - sqrt n), 0)`` thins block ``n`` from full
    density down to ``2^(n - m_n)`` points, giving overall density exponent
    about ``1 - alpha``.  Block ``n`` lives in ``(2^n, 2^(n+1)]``, so blocks
    never overlap and the realized set is strictly increasing.
    """

    alpha: float
    n_max: int
    m: np.ndarray = field(init=False)

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must lie in (0, 1)")
        self.n_max = int(self.n_max)
        if not (1 <= self.n_max <= 24):
            raise ValueError("n_max must lie in [1, 24]")
        self.m = _block_exponents(self.alpha, self.n_max)
        start = math.ceil(1.0 / (4.0 * self.alpha**2)) + 1
        tail = self.m[start - 1 :]
        if tail.size > 1 and np.any(np.diff(tail) < 0):
            raise AssertionError("block exponents decreased in the stable range")

    def block(self, n):
        """The ``n``-th block as a sorted integer array."""
        if not (1 <= n <= self.n_max):
            raise ValueError(f"block index {n} outside [1, {self.n_max}]")
        m = int(self.m[n - 1])
        k = np.arange(1, 2 ** (n - m) + 1, dtype=np.int64)
        return (1 << n) + k * (1 << m)

    def realize(self):
        lam = np.concatenate([self.block(n) for n in range(1, self.n_max + 1)])
        if np.any(np.diff(lam) <= 0):
            raise AssertionError("realized index set is not strictly increasing")
        return lam


@dataclass
class BlockWave:
    """Unit-norm exponential sum supported on one block of the index set."""

    alpha: float
    n: int
    m: int
    freqs: np.ndarray
    coeffs: np.ndarray
    values: np.ndarray  # closed-form evaluation on the midpoint grid
    grid_size: int

    def sum_values(self, xs):
        """Direct term-by-term evaluation (the cross-check route)."""
        xs = np.asarray(xs, dtype=float)
        return np.exp(2j * np.pi * np.outer(xs, self.freqs)) @ self.coeffs


def block_wave(alpha, n, grid_size):
    """Construct the block wave ``f_n`` with its closed-form grid values.

    ``f_n = 2^((m-n)/2) sum_k e^{2 pi i (2^n + k 2^m) xi}`` over the block
    frequencies; on the midpoint grid the geometric sum collapses to a
    ratio of sines, which is what the returned ``values`` hold.  The grid
    mean of ``|values|^2`` must equal 1 (midpoint sums of low-degree
    exponentials are exact); deviation beyond 1e-9 raises.
    """
    n = int(n)
    if n < 1:
        raise ValueError("block index must be >= 1")
    M = int(grid_size)
    if M < 2 ** (n + 2):
        raise ValueError(f"grid {M} too coarse for block {n}; need >= {2 ** (n + 2)}")
    m = int(_block_exponents(alpha, n)[-1])
    count = 2 ** (n - m)
    freqs = (1 << n) + np.arange(1, count + 1, dtype=np.int64) * (1 << m)
    coeffs = np.full(count, 2.0 ** ((m - n) / 2.0))
    xi = (np.arange(M) + 0.5) / M
    # sum_{k=1..K} z^k = e^{i(K+1)theta/2} sin(K theta/2)/sin(theta/2),
    # theta = 2 pi 2^m xi; midpoints never hit the sine's zeros.
    half = np.pi * (1 << m) * xi
    ratio = np.sin(count * half) / np.sin(half)
    phase = np.exp(2j * np.pi * (1 << n) * xi + 1j * (count + 1) * half)
    values = coeffs[0] * phase * ratio
    norm_dev = abs(float(np.mean(np.abs(values) ** 2)) - 1.0)
    if norm_dev > 1e-9:
        raise AssertionError(f"block wave norm deviates by {norm_dev:.3e} on the grid")
    return BlockWave(
        alpha=float(alpha),
        n=n,
        m=m,
        freqs=freqs,
        coeffs=coeffs,
        values=values,
        grid_size=M,
    )


def _concentration_threshold(n, m):
    """Level separating each block wave's plateau from its small-value set."""
    return 2.0 ** ((n - m - 0.5 * math.sqrt(n)) / 2.0)


@dataclass
class BlocksSpectrum:
    alpha: float
    n_max: int
    grid_size: int
    spectrum: PeriodizedSpectrum
    profile: FourierProfile
    rows: list  # per-n: flagged measure and excluded energy
    identity_deviation: float


def infimum_spectrum(alpha, n_max, grid_size):
    """Positive spectrum ``2^(-max flagged level)`` from the block waves.

    Grid points where ``|f_n|`` reaches the concentration threshold are
    flagged at level ``n``; the spectrum takes ``2^-n`` at the deepest
    flag (1 where never flagged), so it is positive everywhere while each
    ``f_n`` spends most of its energy where the spectrum is ``2^-n``.  The
    square root is emitted as a sampled profile whose own periodization at
    spacing 1 must reproduce the spectrum to 1e-12; a larger deviation
    raises.
    """
    n_max = int(n_max)
    M = int(grid_size)
    if M < 2 ** (n_max + 2):
        raise ValueError(f"grid {M} too coarse for n_max={n_max}; need >= {2 ** (n_max + 2)}")
    phi = np.ones(M)
    rows = []
    for n in range(1, n_max + 1):
        w = block_wave(alpha, n, M)
        thr = _concentration_threshold(n, w.m)
        mod2 = np.abs(w.values) ** 2
        mask = mod2 >= thr * thr
        phi[mask] = 2.0**-n
        rows.append(
            {
                "n": n,
                "m": w.m,
                "threshold": thr,
                "flagged_measure": float(np.mean(mask)),
                "excluded_energy": float(np.mean(mod2[~mask])) * float(np.mean(~mask)),
            }
        )
    if not np.all(phi > 0.0):
        raise AssertionError("spectrum hit zero on the grid")
    profile = FourierProfile(pieces=[Piece(0.0, 1.0, samples=np.sqrt(phi))])
    check = periodize(profile, 1.0, grid_size=M)
    dev = float(np.max(np.abs(check.values - phi)))
    if dev > 1e-12:
        raise AssertionError(f"periodized profile deviates from the spectrum by {dev:.3e}")
    ps = PeriodizedSpectrum(
        b=1.0,
        grid_size=M,
        values=phi,
        truncation_range=1,
        tail_bound=0.0,
        cell_constant=True,
    )
    return BlocksSpectrum(
        alpha=float(alpha),
        n_max=n_max,
        grid_size=M,
        spectrum=ps,
        profile=profile,
        rows=rows,
        identity_deviation=dev,
    )


def verify_lower_collapse(alpha, n_range, grid_size):
    """Weighted norms ``w_n = integral of |f_n|^2 Phi`` across a block range.

    The upper-half claim (density exponent at most ``1 - alpha`` plus
    slack 0.1) is recorded with its fit; the lower-half claim requires the
    weighted norms to at least halve from the bottom of the range to the
    top, and a failure raises.  Both together give the conclusion: upper
    frame bound present, lower bound failing.
    """
    n_list = sorted(int(n) for n in n_range)
    if len(n_list) < 2:
        raise ValueError("need at least two block indices for a trend")
    built = infimum_spectrum(alpha, n_list[-1], grid_size)
    phi = built.spectrum.values
    rows = []
    for n in n_list:
        w = block_wave(alpha, n, built.grid_size)
        rows.append({"n": n, "w": float(np.mean(np.abs(w.values) ** 2 * phi))})
    w_bottom, w_top = rows[0]["w"], rows[-1]["w"]
    if not w_top < 0.5 * w_bottom:
        raise RuntimeError(
            f"weighted norms failed to halve: w_{n_list[0]} = {w_bottom:.6g}, "
            f"w_{n_list[-1]} = {w_top:.6g}"
        )
    from .translation_sets import TranslationSet, density_exponent_fit

    ts = TranslationSet.dyadic_blocks(alpha, n_list[-1])
    exponent, fit_windows = density_exponent_fit(ts)
    bound = 1.0 - alpha + 0.1
    density_ok = exponent <= bound
    if density_ok:
        conclusion = (
            "upper frame bound present (density growth in check), lower bound "
            "failing (weighted norms collapse): not a frame sequence"
        )
    else:
        conclusion = (
            f"inconclusive: density exponent fit {exponent:.3f} exceeded {bound:.3f}"
        )
    return {
        "alpha": float(alpha),
        "grid_size": built.grid_size,
        "rows": rows,
        "w_ratio": w_top / w_bottom,
        "density_exponent": exponent,
        "density_bound": bound,
        "density_ok": density_ok,
        "fit_windows": fit_windows,
        "conclusion": conclusion,
    }


# ----------------------------------------------------------------------------
# gallery
# ----------------------------------------------------------------------------


@dataclass
class GalleryEntry:
    name: str
    profile: FourierProfile
    cases: tuple  # (spacing b, index set, expected classification)


def gallery_profiles(include_blocks=True, blocks_grid=2**14, blocks_n_max=10):
    """The standing example table: profile, spacings, expected verdicts."""
    from .translation_sets import TranslationSet

    z = TranslationSet.integers(512)
    entries = [
        GalleryEntry("box", box_profile(), ((1.0, z, "orthonormal"),)),
        GalleryEntry(
            "tent",
            tent_profile(),
            ((1.0, z, "not a frame sequence"), (2.0, z, "exact frame sequence")),
        ),
        GalleryEntry(
            "plateau-taper",
            plateau_taper_profile(2.0, 1.0),
            ((1.0, z, "not a frame sequence"), (2.0, z, "exact frame sequence")),
        ),
        GalleryEntry(
            "ramp-plateau",
            ramp_plateau_profile(3.0, 2.0)[0],
            ((2.0, z, "frame sequence (non-exact)"), (3.0, z, "not a frame sequence")),
        ),
        GalleryEntry(
            "half-indicator",
            indicator_profile(0.0, 0.5),
            ((1.0, z, "frame sequence (non-exact)"),),
        ),
    ]
    if include_blocks:
        built = infimum_spectrum(0.5, blocks_n_max, blocks_grid)
        ts = TranslationSet.dyadic_blocks(0.5, blocks_n_max)
        entries.append(
            GalleryEntry("dyadic-blocks", built.profile, ((1.0, ts, "upper bound only"),))
        )
    return entries
