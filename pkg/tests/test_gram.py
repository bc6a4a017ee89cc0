import numpy as np
import pytest

from frameseq.constructions import indicator_profile
from frameseq.gram import (
    EIGENSOLVE_CAP,
    Budgets,
    GramOperator,
    InconsistencyError,
    bounds_from_phi,
    build_gram,
    classify,
    frame_bound_estimates,
    truncation_decay,
    weighted_norm_identity_check,
)
from frameseq.periodization import periodize
from frameseq.spectrum import autocorrelation
from frameseq.translation_sets import TranslationSet

TAPER_AC_1 = -0.101321183642338 + 0.223658011958294j  # frozen quad oracle


def test_box_gram_is_identity(box):
    for b in (1.0, 2.0):
        g = build_gram(box, b, np.arange(-16, 17, dtype=np.int64))
        assert g.route == "periodization-grid"
        assert np.max(np.abs(g.matrix - np.eye(33))) < 1e-12


def test_taper_entries_match_autocorrelation(taper):
    lam = np.arange(0, 8, dtype=np.int64)
    g = build_gram(taper, 1.0, lam)
    assert abs(g.matrix[0, 1] - np.conj(TAPER_AC_1)) < 1e-10
    for i in (0, 2, 5):
        for j in (1, 4, 7):
            want = np.conj(autocorrelation(taper, float(lam[j] - lam[i])))
            assert abs(g.matrix[i, j] - want) < 1e-9
    # Hermitian with the norm on the diagonal
    assert np.max(np.abs(g.matrix - g.matrix.conj().T)) < 1e-14
    assert abs(g.norm_phi_sq - 2.0 / 3.0) < 1e-10


def test_diagonal_invariant_of_spacing(taper):
    for b in (1.0, 2.0, 3.0):
        g = build_gram(taper, b, np.arange(0, 4, dtype=np.int64))
        assert abs(g.norm_phi_sq - taper.norm_squared()) < 1e-10


def test_non_integer_route_and_agreement(taper):
    lam_f = np.arange(0.0, 9.0)
    g_auto = build_gram(taper, 1.0, lam_f)
    assert g_auto.route == "autocorrelation" and g_auto.grid_size is None
    g_grid = build_gram(taper, 1.0, np.arange(0, 9, dtype=np.int64))
    # grid-route alias error is budgeted against tol=1e-8, observed ~1e-10
    assert np.max(np.abs(g_auto.matrix - g_grid.matrix)) < 1e-9


def test_misaligned_jump_falls_back_to_autocorrelation():
    third = indicator_profile(0.0, 1.0 / 3.0)
    g = build_gram(third, 1.0, np.arange(0, 17, dtype=np.int64))
    # the profile's jump at 1/3 never lands on a dyadic grid: grid route unusable
    assert g.route == "autocorrelation"
    fb = frame_bound_estimates(g)
    assert fb.min_eigenvalue > -1e-12


def test_tampered_grid_data_raises(box):
    ps = periodize(box, 1.0, 2**18)
    grid = ps.grid()
    lam = np.arange(-32, 33, dtype=np.int64)
    ps.values = ps.values + 1e-3 * np.cos(2 * np.pi * 64 * grid)
    ps._fft = None
    with pytest.raises(InconsistencyError, match="shift"):
        build_gram(box, 1.0, lam, ps=ps)


def test_build_gram_refusals(box):
    with pytest.raises(ValueError):
        build_gram(box, 1.0, np.arange(EIGENSOLVE_CAP + 1))
    with pytest.raises(ValueError):
        build_gram(box, 1.0, np.array([0, 0, 1]))
    with pytest.raises(ValueError):
        build_gram(box, -1.0, np.arange(4))
    with pytest.raises(TypeError):
        build_gram("box", 1.0, np.arange(4))


def test_frame_bound_estimates_degenerate():
    g = GramOperator(
        matrix=np.zeros((5, 5)),
        b=1.0,
        indices=np.arange(5),
        route="autocorrelation",
        grid_size=None,
        tol=1e-8,
        checked_shifts=[],
        max_check_deviation=0.0,
    )
    fb = frame_bound_estimates(g)
    assert fb.degenerate and fb.A_est == 0.0 and fb.numerical_rank == 0
    assert fb.kernel_dim == 5


def test_eigenvalue_window_interlacing(taper):
    g = build_gram(taper, 1.0, np.arange(1, 65, dtype=np.int64))
    bounds = [frame_bound_estimates(g.principal(k), kernel_tol=0.0) for k in (16, 32, 64)]
    for prev, cur in zip(bounds, bounds[1:]):
        assert cur.A_est <= prev.A_est + 1e-12
        assert cur.B_est >= prev.B_est - 1e-12


def test_bounds_from_phi(half):
    pb = bounds_from_phi(periodize(half, 1.0, 2048))
    assert pb.A == 1.0 and pb.B == 1.0
    assert abs(pb.zero_fraction - 0.5) < 1e-12


# ---------------------------------------------------------------------------
# classification table
# ---------------------------------------------------------------------------


def test_classify_box_orthonormal(box):
    rep = classify(box, 1.0, TranslationSet.integers(64))
    assert rep.classification == "orthonormal"
    assert rep.A_est == 1.0 and rep.B_est == 1.0
    assert any(e["rule"] == "pathway-agreement" for e in rep.evidence)


def test_classify_tent_both_spacings(tent):
    bad = classify(tent, 1.0, TranslationSet.integers(64))
    assert bad.classification == "not a frame sequence"
    good = classify(tent, 2.0, TranslationSet.integers(64))
    assert good.classification == "exact frame sequence"
    assert abs(good.A_est - 0.25) < 1e-6
    assert abs(good.B_est - 0.5) < 1e-3


def test_classify_taper_both_spacings(taper):
    assert classify(taper, 1.0, TranslationSet.integers(64)).classification == "not a frame sequence"
    good = classify(taper, 2.0, TranslationSet.integers(64))
    assert good.classification == "exact frame sequence"
    assert abs(good.A_est - 0.5) < 1e-6
    assert abs(good.B_est - 1.0) < 1e-3


def test_classify_half_lattice_vs_naturals(half):
    rep = classify(half, 1.0, TranslationSet.integers(64))
    assert rep.classification == "frame sequence (non-exact)"
    assert abs(rep.A_est - 1.0) < 1e-9 and abs(rep.B_est - 1.0) < 1e-9
    one_sided = classify(half, 1.0, TranslationSet.naturals(64))
    assert one_sided.classification == "not a frame sequence"
    assert any(e["rule"] == "restricted-index-exactness" for e in one_sided.evidence)


def test_classify_subgroup_rescales(taper):
    rep = classify(taper, 1.0, TranslationSet.subgroup(2, 64))
    assert rep.classification == "exact frame sequence"
    assert rep.evidence[0]["rule"] == "subgroup-rescaling"
    assert rep.evidence[0]["effective_spacing"] == 2.0
    assert rep.b == 1.0 and rep.index_kind == "subgroup"


def test_classify_non_integer_undetermined(taper):
    rep = classify(taper, 1.0, TranslationSet.explicit([0.0, 0.5, 1.0, 2.25, 3.0]))
    assert rep.classification == "undetermined"
    assert rep.notes and "window evidence" in rep.notes[0]


def test_classify_scale_equivariance(tent):
    base = classify(tent, 2.0, TranslationSet.integers(64))
    scaled = classify(tent.scaled(3.0), 2.0, TranslationSet.integers(64))
    assert scaled.classification == base.classification
    assert abs(scaled.A_est - 9.0 * base.A_est) < 1e-9
    assert abs(scaled.B_est - 9.0 * base.B_est) < 1e-9


def test_classify_report_json(half):
    rep = classify(half, 1.0, TranslationSet.integers(32))
    obj = rep.to_json()
    assert obj["classification"] == rep.classification
    assert obj["A_est"] == rep.A_est
    assert isinstance(obj["evidence"], list)


# ---------------------------------------------------------------------------
# truncation decay and the weighted-norm identity
# ---------------------------------------------------------------------------


def test_truncation_decay_on_half(half):
    rows = truncation_decay(half, 1.0, [8, 32, 128])
    a_vals = [r["A_est"] for r in rows]
    assert a_vals[0] > a_vals[1] > a_vals[2] > 0
    assert a_vals[2] < 0.5 * a_vals[0]


def test_truncation_decay_refuses_wrong_class(taper):
    with pytest.raises(ValueError, match="not a frame sequence"):
        truncation_decay(taper, 1.0, [8, 32])


def test_weighted_norm_delta_and_parseval(box, taper):
    lam = np.arange(0, 6, dtype=np.int64)
    delta = np.zeros(6, dtype=complex)
    delta[0] = 1.0
    res = weighted_norm_identity_check(taper, 1.0, lam, delta, grid_size=2**16)
    assert abs(res["lhs"] - taper.norm_squared()) < 1e-12
    assert res["deviation"] < 1e-10
    c = np.array([1.0, -2.0, 0.5, 1j, 0.0, 3.0])
    res_box = weighted_norm_identity_check(box, 1.0, lam, c, grid_size=2**16)
    assert abs(res_box["lhs"] - float(np.sum(np.abs(c) ** 2))) < 1e-10


def test_weighted_norm_random_vectors(taper, rng):
    for _ in range(25):
        lam = np.sort(rng.choice(48, size=12, replace=False)).astype(np.int64)
        c = rng.normal(size=12) + 1j * rng.normal(size=12)
        res = weighted_norm_identity_check(taper, 1.0, lam, c, grid_size=2**18)
        assert res["deviation"] < 1e-8


def test_weighted_norm_refusals(taper):
    with pytest.raises(ValueError):
        weighted_norm_identity_check(taper, 1.0, np.array([0.5, 1.5]), np.ones(2))
    with pytest.raises(ValueError):
        weighted_norm_identity_check(taper, 1.0, np.arange(3), np.ones(4))
