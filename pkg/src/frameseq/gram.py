"""Finite Gram matrices of translate families and the classification rules.

The inner products of translates are Fourier coefficients of the periodized
spectrum, so a whole Gram matrix follows from one FFT.  A 5% sample of the
entries is re-derived through the closed-form autocorrelation integral; the
two routes agreeing is the structural self-check of the package, and their
disagreement raises :class:`InconsistencyError` rather than a warning.

Classification runs on the periodization side (grid refinement trends) for
lattice index sets, where the decision rules are exact, and on Gram
eigenvalue trends over nested windows for generic integer sets, where only
windowed evidence is available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .periodization import PeriodizedSpectrum, essential_bounds, fourier_coeff, periodize
from .spectrum import FourierProfile, autocorrelation
from .translation_sets import TranslationSet

__all__ = [
    "InconsistencyError",
    "Budgets",
    "GramOperator",
    "FrameBounds",
    "PhiBounds",
    "FrameReport",
    "build_gram",
    "frame_bound_estimates",
    "bounds_from_phi",
    "classify",
    "truncation_decay",
    "weighted_norm_identity_check",
]

EIGENSOLVE_CAP = 2048
GRID_CAP = 2**22


class InconsistencyError(RuntimeError):
    """The two computational routes disagree beyond tolerance."""


@dataclass(frozen=True)
class Budgets:
    grid_size: int = 4096  # base periodization grid; refined by doubling
    refinements: int = 2  # number of grid doublings for trend rules
    window: int = 64  # base Gram window (half width on lattices)
    doublings: int = 3  # Gram window doublings for trend rules
    tol: float = 1e-8  # entry cross-check tolerance
    kernel_tol: float = 1e-6  # relative eigenvalue cut
    max_dim: int = EIGENSOLVE_CAP


@dataclass
class GramOperator:
    matrix: np.ndarray
    b: float
    indices: np.ndarray
    route: str  # "periodization-grid" or "autocorrelation"
    grid_size: int | None
    tol: float
    checked_shifts: list
    max_check_deviation: float

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def norm_phi_sq(self):
        return float(np.real(self.matrix[0, 0]))

    def principal(self, k):
        """Leading k-by-k principal submatrix as a GramOperator (same metadata)."""
        if not (1 <= k <= self.dim):
            raise ValueError(f"principal window {k} outside [1, {self.dim}]")
        return GramOperator(
            matrix=self.matrix[:k, :k],
            b=self.b,
            indices=self.indices[:k],
            route=self.route,
            grid_size=self.grid_size,
            tol=self.tol,
            checked_shifts=self.checked_shifts,
            max_check_deviation=self.max_check_deviation,
        )


def _next_pow2(x):
    return 1 << max(4, math.ceil(math.log2(max(x, 1))))


def _realize(lam):
    if isinstance(lam, TranslationSet):
        return lam.realize()
    arr = np.asarray(lam)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("index set must be a nonempty 1-d array")
    out = np.sort(arr)
    if np.unique(out).size != out.size:
        raise ValueError("index set has repeated points")
    return out


def _coeff_table(ps, S):
    """Fourier coefficients c_n for n in [-S, S] as one vectorized slice."""
    M = ps.grid_size
    if 2 * S >= M:
        raise ValueError(f"coefficient range {S} needs grid > {2 * S}")
    ns = np.arange(-S, S + 1)
    fft = ps._coeff_fft()
    out = np.exp(-1j * np.pi * ns / M) * fft[np.mod(ns, M)] / M
    if ps.cell_constant:
        out *= np.sinc(ns / M)
    return out


def _square_jumps(profile):
    """``(position, |jump|)`` of ``phi_hat^2`` at boundaries and sample steps.

    Interior steps of a sampled piece are reported individually so callers
    can test their grid alignment; alignment of the piece's cell width and
    left edge covers them all at once, which ``_misaligned_jump_total``
    exploits.
    """
    out = []
    prev_hi, prev_val = None, 0.0
    for p in profile.pieces:
        if p.const is not None:
            v0 = v1 = p.const
        elif p.affine is not None:
            v0 = p.affine[0] * p.lo + p.affine[1]
            v1 = p.affine[0] * p.hi + p.affine[1]
        else:
            v0, v1 = float(p.samples[0]), float(p.samples[-1])
        contiguous = prev_hi is not None and abs(p.lo - prev_hi) <= 1e-12
        if prev_hi is not None and not contiguous and prev_val != 0.0:
            out.append((prev_hi, prev_val**2))
        left = prev_val if contiguous else 0.0
        out.append((p.lo, abs(v0**2 - left**2)))
        if p.samples is not None and p.samples.size > 1:
            w = (p.hi - p.lo) / p.samples.size
            sq = p.samples.astype(float) ** 2
            pos = p.lo + w * np.arange(1, p.samples.size)
            out.extend(zip(pos.tolist(), np.abs(np.diff(sq)).tolist()))
        prev_hi, prev_val = p.hi, v1
    if prev_val != 0.0:
        out.append((prev_hi, prev_val**2))
    return [(u, s) for u, s in out if s > 0.0]


def _misaligned_jump_total(profile, b, m):
    """Total ``phi_hat^2`` jump mass mapping off the grid-cell boundaries."""
    aligned_sample_pieces = all(
        p.samples is None
        or (
            abs(b * p.lo * m - round(b * p.lo * m)) <= 1e-6
            and abs(b * (p.hi - p.lo) / p.samples.size * m
                    - round(b * (p.hi - p.lo) / p.samples.size * m)) <= 1e-6
            and round(b * (p.hi - p.lo) / p.samples.size * m) >= 1
        )
        for p in profile.pieces
    )
    if not aligned_sample_pieces:
        return math.inf  # misaligned step pieces: do not enumerate cell by cell
    total = 0.0
    for u, size in _square_jumps(profile):
        x = b * u * m
        if abs(x - round(x)) > 1e-6:
            total += size
    return total


def build_gram(profile, b, lam, tol=1e-8, ps=None, rng_seed=0):
    """Gram matrix of ``(tau_{lam_i b} phi)_i`` with a dual-route spot check.

    Integer index sets go through the periodized-spectrum coefficients
    (fast path, one FFT); a deterministic 5% sample of the distinct shifts
    is recomputed from the closed-form autocorrelation integral and must
    agree within ``10 * tol`` or :class:`InconsistencyError` is raised.
    Non-integer sets have no periodization route and are built entirely
    from the autocorrelation integral.
    """
    if not isinstance(profile, FourierProfile):
        raise TypeError("build_gram needs a FourierProfile")
    if b <= 0:
        raise ValueError("spacing b must be positive")
    lam = _realize(lam)
    n = lam.size
    if n > EIGENSOLVE_CAP:
        raise ValueError(f"window of {n} translates exceeds the dense cap {EIGENSOLVE_CAP}")

    if lam.dtype != np.int64:
        return _build_gram_autocorr(profile, b, lam, tol)

    span = int(lam[-1] - lam[0])
    needed = max(4096, 4 * max(span, 1), math.isqrt(int(6 * max(span, 1) / tol)) + 1)
    base = _next_pow2(needed)
    if base > GRID_CAP:
        raise ValueError(
            f"span {span} needs coefficient grid {base} beyond the cap {GRID_CAP}"
        )
    # Jumps of Phi_b off the grid leak ~|jump|/M into every DFT coefficient,
    # unlike the smooth-profile alias error the base sizing models.  Grow the
    # grid until misaligned jumps are within half the spot-check budget, or
    # give up on the grid route entirely.
    grid = None
    if (
        ps is not None
        and ps.b == b
        and ps.grid_size >= base
        and _misaligned_jump_total(profile, b, ps.grid_size) <= 5.0 * tol * ps.grid_size
    ):
        grid = ps
    else:
        M = base
        while M <= GRID_CAP:
            if _misaligned_jump_total(profile, b, M) <= 5.0 * tol * M:
                grid = periodize(profile, b, grid_size=M)
                break
            M *= 2
    if grid is None:
        return _build_gram_autocorr(profile, b, lam, tol)
    M = grid.grid_size

    cm = _coeff_table(grid, span) / b
    diffs = lam[None, :] - lam[:, None]  # entry (i, j) holds coeff at lam_j - lam_i
    g = cm[diffs + span]
    if np.max(np.abs(g.imag)) <= 1e-12 * max(np.max(np.abs(g.real)), 1e-300):
        g = np.ascontiguousarray(g.real)

    # dual-route spot check on a deterministic sample of the shifts
    pos = np.unique(diffs[diffs > 0]) if n > 1 else np.array([], dtype=np.int64)
    checked = []
    max_dev = 0.0
    if pos.size:
        k = max(1, math.ceil(0.05 * pos.size))
        rng = np.random.default_rng(rng_seed)
        sample = rng.choice(pos, size=min(k, pos.size), replace=False)
        sample = np.union1d(sample, pos[-1:])  # always include the extreme shift
        for d in sample.tolist():
            exact = np.conj(autocorrelation(profile, d * b))
            got = cm[d + span]
            dev = abs(got - exact)
            checked.append(int(d))
            max_dev = max(max_dev, dev)
            if dev > 10 * tol:
                raise InconsistencyError(
                    f"Gram entry at shift {d}: coefficient route {got:.12g}, "
                    f"autocorrelation route {exact:.12g}, deviation {dev:.3e} "
                    f"> {10 * tol:.1e}"
                )
    return GramOperator(
        matrix=g,
        b=float(b),
        indices=lam,
        route="periodization-grid",
        grid_size=M,
        tol=tol,
        checked_shifts=checked,
        max_check_deviation=float(max_dev),
    )


def _build_gram_autocorr(profile, b, lam, tol):
    n = lam.size
    diffs = lam[None, :] - lam[:, None]
    vals = {}
    for d in np.unique(np.abs(diffs)):
        vals[float(d)] = np.conj(autocorrelation(profile, float(d) * b))
    g = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            d = diffs[i, j]
            c = vals[float(abs(d))]
            g[i, j] = c if d >= 0 else np.conj(c)
    if np.max(np.abs(g.imag)) <= 1e-12 * max(np.max(np.abs(g.real)), 1e-300):
        g = np.ascontiguousarray(g.real)
    return GramOperator(
        matrix=g,
        b=float(b),
        indices=lam,
        route="autocorrelation",
        grid_size=None,
        tol=tol,
        checked_shifts=[],
        max_check_deviation=0.0,
    )


@dataclass
class FrameBounds:
    A_est: float  # smallest eigenvalue above the kernel cut (0 if degenerate)
    B_est: float
    min_eigenvalue: float  # raw, may be tiny negative from round-off
    numerical_rank: int
    kernel_dim: int
    dim: int
    kernel_tol: float
    degenerate: bool


def frame_bound_estimates(g, kernel_tol=1e-6):
    """Extremal eigenvalues of the Gram window; kernel cut is relative.

    ``A_est`` is the smallest eigenvalue strictly above
    ``kernel_tol * B_est``, the finite-window surrogate for the lower frame
    bound on the orthogonal complement of the kernel.  All eigenvalues below
    the cut produce a degenerate report rather than an error.
    """
    if kernel_tol < 0:
        raise ValueError("kernel_tol must be >= 0")
    if g.dim > EIGENSOLVE_CAP:
        raise ValueError(f"dimension {g.dim} exceeds the eigen-solve cap {EIGENSOLVE_CAP}")
    eigs = np.linalg.eigvalsh(g.matrix)
    b_est = float(eigs[-1])
    cut = kernel_tol * max(b_est, 0.0)
    above = eigs[eigs > cut]
    if above.size == 0:
        return FrameBounds(
            A_est=0.0,
            B_est=b_est,
            min_eigenvalue=float(eigs[0]),
            numerical_rank=0,
            kernel_dim=g.dim,
            dim=g.dim,
            kernel_tol=kernel_tol,
            degenerate=True,
        )
    return FrameBounds(
        A_est=float(above[0]),
        B_est=b_est,
        min_eigenvalue=float(eigs[0]),
        numerical_rank=int(above.size),
        kernel_dim=int(g.dim - above.size),
        dim=g.dim,
        kernel_tol=kernel_tol,
        degenerate=False,
    )


@dataclass
class PhiBounds:
    A: float  # inf of the nonzero grid values, divided by b
    B: float  # sup divided by b
    zero_fraction: float
    grid_size: int
    b: float


def bounds_from_phi(ps, zero_thresh=None):
    """Frame-bound candidates read off the periodized spectrum grid."""
    inf_nz, sup, zf = essential_bounds(ps, zero_thresh=zero_thresh)
    return PhiBounds(
        A=float(inf_nz / ps.b) if np.isfinite(inf_nz) else float("inf"),
        B=float(sup / ps.b),
        zero_fraction=float(zf),
        grid_size=ps.grid_size,
        b=ps.b,
    )


@dataclass
class FrameReport:
    classification: str
    A_est: float | None
    B_est: float | None
    numerical_rank: int | None
    evidence: list
    b: float
    index_kind: str
    grid_sizes: list
    windows: list
    notes: list = field(default_factory=list)

    def to_json(self):
        def num(x):
            if x is None:
                return None
            return float(x)

        return {
            "classification": self.classification,
            "A_est": num(self.A_est),
            "B_est": num(self.B_est),
            "numerical_rank": self.numerical_rank,
            "b": float(self.b),
            "index_kind": self.index_kind,
            "grid_sizes": list(self.grid_sizes),
            "windows": list(self.windows),
            "evidence": self.evidence,
            "notes": list(self.notes),
        }


def _phi_refinement_scan(profile, b, budgets):
    """Essential bounds across doubling grids; the raw material of trend rules.

    ``inf_positive`` is the minimum over strictly positive grid values: the
    quantity whose refinement trend separates a spectrum bounded away from
    zero on its support (stable) from one vanishing continuously (collapsing
    like a power of the grid step).  The thresholded ``inf_nonzero`` from
    ``essential_bounds`` is unsuitable for the trend because the threshold
    itself truncates the collapse.
    """
    rows = []
    for k in range(budgets.refinements + 1):
        m = budgets.grid_size * (1 << k)
        ps = periodize(profile, b, grid_size=m)
        inf_nz, sup, zf = essential_bounds(ps)
        positive = ps.values[ps.values > 0.0]
        rows.append(
            {
                "grid": m,
                "inf_nonzero": float(inf_nz),
                "inf_positive": float(positive.min()) if positive.size else 0.0,
                "sup": float(sup),
                "zero_fraction": float(zf),
                "max_dev_from_b": float(np.max(np.abs(ps.values / b - 1.0))),
            }
        )
    return rows


def _lattice_rules(rows, b):
    """Decision on a full lattice from grid-refinement trends.

    Returns (classification, A, B, evidence_rows).
    """
    evidence = []
    infs = [r["inf_positive"] for r in rows]
    zfs = [r["zero_fraction"] for r in rows]
    fine = rows[-1]

    # constant spectrum (everywhere, zeros included): orthonormal translates
    dev = max(r["max_dev_from_b"] for r in rows)
    evidence.append({"rule": "periodization-constant", "max_rel_dev": float(dev)})
    if dev <= 1e-9:
        return "orthonormal", 1.0, 1.0, evidence

    ratio = infs[-1] / infs[-2] if infs[-2] > 0 else 0.0
    evidence.append(
        {
            "rule": "infimum-refinement-trend",
            "inf_positive": infs,
            "last_ratio": float(ratio),
            "zero_fraction": zfs,
        }
    )
    collapsing = infs[-1] <= 0.55 * infs[-2] or infs[-1] <= 0.0
    stable = infs[-1] >= 0.9 * infs[-2] and infs[-1] > 0.0

    if collapsing:
        return "not a frame sequence", None, fine["sup"] / b, evidence
    if stable:
        a_val = fine["inf_positive"] / b
        b_val = fine["sup"] / b
        if zfs[-1] < 0.005:
            evidence.append({"rule": "zero-set-fraction", "value": zfs[-1], "verdict": "null"})
            return "exact frame sequence", a_val, b_val, evidence
        if zfs[-1] >= 0.01 and abs(zfs[-1] - zfs[0]) <= 0.1 * zfs[-1] + 1e-12:
            evidence.append({"rule": "zero-set-fraction", "value": zfs[-1], "verdict": "positive"})
            return "frame sequence (non-exact)", a_val, b_val, evidence
    return "undetermined", None, fine["sup"] / b, evidence


def _gram_agreement(profile, b, lam, phi_fine, budgets, evidence):
    """Cross-validate the Gram window against the periodization bounds.

    Finite windows of the lattice form live inside the convex hull of the
    grid symbol values, so the eigenvalue estimates must sit below the sup
    bound and above the grid minimum.  A violation is an implementation
    fault, not a math ambiguity, hence the hard error.
    """
    g = build_gram(profile, b, lam, tol=budgets.tol)
    fb = frame_bound_estimates(g, kernel_tol=budgets.kernel_tol)
    b_phi = phi_fine["sup"] / b
    slack = 1e-9 * max(1.0, b_phi)
    if fb.B_est > b_phi + slack:
        raise InconsistencyError(
            f"Gram upper estimate {fb.B_est:.12g} exceeds periodization bound {b_phi:.12g}"
        )
    if fb.min_eigenvalue < -1e-8 * max(g.norm_phi_sq, 1e-300):
        raise InconsistencyError(
            f"Gram window not positive semidefinite: min eigenvalue {fb.min_eigenvalue:.3e}"
        )
    evidence.append(
        {
            "rule": "pathway-agreement",
            "window": int(lam.size),
            "B_gram": float(fb.B_est),
            "B_phi": float(b_phi),
            "min_eigenvalue": float(fb.min_eigenvalue),
        }
    )
    return fb


def classify(profile, b, ts, budgets=None):
    """Frame-property decision for the translate family on the index set.

    Lattice sets (all integers, a subgroup, the naturals) are decided by
    grid-refinement trends of the periodized spectrum, with a Gram window
    cross-check.  Generic integer sets fall back to eigenvalue trends over
    nested windows and are honestly ``undetermined`` when those trends
    conflict.  Non-integer explicit sets carry no lattice structure and are
    always ``undetermined`` (with window evidence attached).
    """
    budgets = budgets or Budgets()
    if not isinstance(ts, TranslationSet):
        ts = TranslationSet.explicit(np.asarray(ts, dtype=float).tolist())
    kind = ts.kind

    if kind == "subgroup":
        m = dict(ts.params)["m"]
        inner = classify(profile, b * m, TranslationSet.integers(dict(ts.params)["half_width"]), budgets)
        inner.evidence.insert(
            0,
            {"rule": "subgroup-rescaling", "m": int(m), "effective_spacing": float(b * m)},
        )
        inner.b = float(b)
        inner.index_kind = "subgroup"
        inner.notes.append(f"subgroup step {m} analyzed as the full lattice at spacing {b * m:g}")
        return inner

    if kind in ("integers", "naturals"):
        rows = _phi_refinement_scan(profile, b, budgets)
        label, a_val, b_val, evidence = _lattice_rules(rows, b)
        grids = [r["grid"] for r in rows]
        w = budgets.window
        lam = (
            np.arange(-w, w + 1, dtype=np.int64)
            if kind == "integers"
            else np.arange(1, w + 1, dtype=np.int64)
        )
        fb = _gram_agreement(profile, b, lam, rows[-1], budgets, evidence)
        if kind == "naturals" and label in ("frame sequence (non-exact)", "not a frame sequence"):
            evidence.append(
                {
                    "rule": "restricted-index-exactness",
                    "lattice_verdict": label,
                    "consequence": "one-sided families are frames only when the full lattice family is exact",
                }
            )
            label, a_val = "not a frame sequence", None
        return FrameReport(
            classification=label,
            A_est=a_val,
            B_est=b_val,
            numerical_rank=fb.numerical_rank,
            evidence=evidence,
            b=float(b),
            index_kind=kind,
            grid_sizes=grids,
            windows=[int(lam.size)],
            notes=[],
        )

    # generic sets: eigenvalue trends over nested windows
    lam = ts.realize()
    evidence = []
    if lam.dtype != np.int64:
        g = build_gram(profile, b, lam[: min(lam.size, 256)], tol=budgets.tol)
        fb = frame_bound_estimates(g, kernel_tol=budgets.kernel_tol)
        evidence.append(
            {
                "rule": "eigenvalue-window-trend",
                "windows": [int(g.dim)],
                "A_est": [fb.A_est],
                "B_est": [fb.B_est],
            }
        )
        return FrameReport(
            classification="undetermined",
            A_est=fb.A_est,
            B_est=fb.B_est,
            numerical_rank=fb.numerical_rank,
            evidence=evidence,
            b=float(b),
            index_kind=kind,
            grid_sizes=[],
            windows=[int(g.dim)],
            notes=["no lattice structure for a periodization decision; window evidence only"],
        )

    rows = _phi_refinement_scan(profile, b, budgets)
    label0, _, _, ev0 = _lattice_rules(rows, b)
    evidence.extend(ev0[:1])  # keep the constant-spectrum check
    if label0 == "orthonormal":
        fb = _gram_agreement(profile, b, lam[: min(lam.size, 2 * budgets.window)], rows[-1], budgets, evidence)
        return FrameReport(
            classification="orthonormal",
            A_est=1.0,
            B_est=1.0,
            numerical_rank=fb.numerical_rank,
            evidence=evidence,
            b=float(b),
            index_kind=kind,
            grid_sizes=[r["grid"] for r in rows],
            windows=[],
            notes=["constant periodized spectrum; any subfamily of the lattice family is orthonormal"],
        )

    w0 = min(budgets.window, lam.size)
    windows = []
    k = w0
    while k <= lam.size and k <= budgets.max_dim and len(windows) <= budgets.doublings:
        windows.append(k)
        k *= 2
    if len(windows) < 3:
        return FrameReport(
            classification="undetermined",
            A_est=None,
            B_est=None,
            numerical_rank=None,
            evidence=evidence,
            b=float(b),
            index_kind=kind,
            grid_sizes=[r["grid"] for r in rows],
            windows=windows,
            notes=["not enough nested windows for a trend verdict"],
        )
    a_seq, b_seq, ranks = [], [], []
    g_full = build_gram(profile, b, lam[: windows[-1]], tol=budgets.tol)
    for w in windows:
        fb = frame_bound_estimates(g_full.principal(w), kernel_tol=budgets.kernel_tol)
        a_seq.append(fb.A_est)
        b_seq.append(fb.B_est)
        ranks.append(fb.numerical_rank)
    evidence.append(
        {
            "rule": "eigenvalue-window-trend",
            "windows": windows,
            "A_est": [float(x) for x in a_seq],
            "B_est": [float(x) for x in b_seq],
            "numerical_rank": ranks,
        }
    )
    a_fall = a_seq[-1] / a_seq[0] if a_seq[0] > 0 else 0.0
    b_grow = b_seq[-1] / b_seq[0] if b_seq[0] > 0 else float("inf")
    if b_grow >= 1.5:
        label = "not a frame sequence"
        a_val = None
    elif a_fall <= 0.5 and b_grow <= 1.2:
        label = "upper bound only"
        a_val = None
    elif a_fall >= 0.8 and b_grow <= 1.2:
        label = "exact frame sequence"
        a_val = a_seq[-1]
    else:
        label = "undetermined"
        a_val = None
    return FrameReport(
        classification=label,
        A_est=a_val,
        B_est=b_seq[-1],
        numerical_rank=ranks[-1],
        evidence=evidence,
        b=float(b),
        index_kind=kind,
        grid_sizes=[r["grid"] for r in rows],
        windows=windows,
        notes=["generic-set verdicts are windowed eigenvalue trends, not lattice theorems"],
    )


def truncation_decay(profile, b, n_list, budgets=None):
    """Lower-bound estimates over the one-sided windows ``{1..N}``.

    Only meaningful for families that are frames but not exact over the full
    lattice: their one-sided truncations must lose the lower bound, and this
    function documents the decay.  Any other classification is refused.
    """
    budgets = budgets or Budgets()
    report = classify(profile, b, TranslationSet.integers(budgets.window), budgets)
    if report.classification != "frame sequence (non-exact)":
        raise ValueError(
            "truncation decay applies to non-exact frame sequences over the lattice; "
            f"this family classifies as {report.classification!r}"
        )
    rows = []
    n_max = max(n_list)
    g_big = build_gram(profile, b, np.arange(1, n_max + 1, dtype=np.int64), tol=budgets.tol)
    for n in sorted(n_list):
        fb = frame_bound_estimates(g_big.principal(n), kernel_tol=budgets.kernel_tol)
        rows.append({"N": int(n), "A_est": float(fb.A_est), "numerical_rank": fb.numerical_rank})
    return rows


def weighted_norm_identity_check(profile, b, lam, coeffs, ps=None, grid_size=2**20):
    """Two routes to ``|sum_n c_n tau_{lam_n b} phi|^2``; returns their gap.

    The left side is the Gram quadratic form with entries from the exact
    autocorrelation integral.  The right side is the grid mean of
    ``|f|^2 Phi_b / b`` with ``f(xi) = sum c_n e^{2 pi i lam_n xi}``,
    evaluated through the coefficient identity (exact for trigonometric
    degree below half the grid), so it touches only grid values of the
    periodization.  Agreement is two independent numerical paths agreeing.
    """
    lam = _realize(lam)
    if lam.dtype != np.int64:
        raise ValueError("the grid route needs integer indices")
    c = np.asarray(coeffs, dtype=complex)
    if c.shape != (lam.size,):
        raise ValueError("coefficient vector length must match the index set")

    diffs = lam[None, :] - lam[:, None]
    uniq = np.unique(np.abs(diffs))
    table = {int(d): np.conj(autocorrelation(profile, float(d) * b)) for d in uniq}
    gmat = np.empty(diffs.shape, dtype=complex)
    for d, v in table.items():
        gmat[diffs == d] = v
        if d:
            gmat[diffs == -d] = np.conj(v)
    lhs = float(np.real(np.conj(c) @ gmat @ c))

    span = int(lam[-1] - lam[0])
    if ps is None or ps.b != b or 2 * span >= ps.grid_size:
        if 2 * span >= grid_size:
            raise ValueError("coefficient span too large for the requested grid")
        ps = periodize(profile, b, grid_size=grid_size)
    # the transform of a translate carries e^{-2 pi i}, so the trig sum is
    # f(xi) = sum c_n e^{-2 pi i lam_n xi}; its (i, j) cross term has grid
    # mean against Phi equal to conj(cm[lam_j - lam_i])
    outer = np.outer(c, np.conj(c))
    cm = _coeff_table(ps, span)
    rhs = float(np.real(np.sum(outer * np.conj(cm[diffs + span])))) / b

    dev = abs(lhs - rhs) / max(abs(lhs), 1e-30)
    return {"lhs": lhs, "rhs": rhs, "deviation": dev, "grid_size": ps.grid_size}
