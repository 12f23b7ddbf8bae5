import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import (gaussian, gaussian_w2, random_npsd, w2_bruteforce)
from wfts.errors import BadOrder, EmptyFamily, WeightMismatch, WFDiagnostic
from wfts.spectral import FrequencyGrid, Npsd, TimeSeries
from wfts.transport import (LogMap, QuantileFunction, barycenter_quantile,
                            class_distance, common_grid, exp_map, geodesic,
                            log_map, quantile_function, rebin, wasserstein,
                            wasserstein_matrix, wf_barycenter, wf_distance)

G10 = FrequencyGrid.linspace(0, 10, 11)


# -- quantile functions ------------------------------------------------------

def test_quantile_of_dirac():
    q = quantile_function(Npsd.dirac(G10, 3.0))
    assert np.all(q(np.linspace(0.01, 1, 50)) == 3.0)


def test_quantile_two_point_law():
    g = FrequencyGrid.linspace(0, 1, 2)
    q = quantile_function(Npsd(g, np.array([0.5, 0.5])))
    assert q(0.3) == 0 and q(0.5) == 0 and q(0.5000001) == 1 and q(1.0) == 1


def test_quantile_uniform_jumps():
    g = FrequencyGrid.linspace(0, 3, 4)
    q = quantile_function(Npsd(g, np.full(4, 0.25)))
    assert np.allclose(q.knots, [0.25, 0.5, 0.75, 1.0])
    assert np.array_equal(q.values, [0, 1, 2, 3])
    assert q.masses == pytest.approx([0.25] * 4)


def test_quantile_function_invariants():
    with pytest.raises(ValueError):
        QuantileFunction(np.array([0.5, 0.9]), np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        QuantileFunction(np.array([0.5, 1.0]), np.array([1.0, 0.0]))


# -- W_p ---------------------------------------------------------------------

def test_wasserstein_identity_and_translation():
    s = random_npsd(np.random.default_rng(0), G10)
    for p in (1, 1.5, 2, 3):
        assert wasserstein(s, s, p) == 0
    assert wasserstein(Npsd.dirac(G10, 0), Npsd.dirac(G10, 5)) == pytest.approx(5)


def test_wasserstein_gaussian_closed_form():
    g = FrequencyGrid.linspace(-3, 5, 8001)
    a = gaussian(g, 0.1, np.sqrt(0.025))
    b = gaussian(g, 1.0, np.sqrt(0.25))
    ref = gaussian_w2(0.1, np.sqrt(0.025), 1.0, 0.5)
    assert ref == pytest.approx(0.96275, abs=1e-5)
    assert abs(wasserstein(a, b) - ref) <= 2 * g.spacing


def test_wasserstein_bad_order():
    with pytest.raises(BadOrder):
        wasserstein(Npsd.dirac(G10, 0), Npsd.dirac(G10, 1), p=0.5)


def test_wasserstein_matches_bruteforce_across_grids():
    rng = np.random.default_rng(4)
    a = random_npsd(rng, FrequencyGrid.linspace(-1, 2, 13))
    b = random_npsd(rng, FrequencyGrid.linspace(0, 3, 7))
    assert wasserstein(a, b) == pytest.approx(w2_bruteforce(a, b), abs=1e-4)


def test_w1_is_cdf_area():
    rng = np.random.default_rng(2)
    a, b = random_npsd(rng, G10), random_npsd(rng, G10)
    area = np.sum(np.abs(np.cumsum(a.mass) - np.cumsum(b.mass))[:-1]) * G10.spacing
    assert wasserstein(a, b, p=1) == pytest.approx(area, abs=1e-12)


# masses below ~eps of the total vanish from any double-precision CDF
bin_mass = st.one_of(st.just(0.0), st.floats(1e-9, 1, allow_nan=False))
mass_vectors = st.lists(bin_mass, min_size=6, max_size=6)


def _npsd(w, grid):
    w = np.asarray(w)
    if w.sum() <= 1e-6:
        w = w + 1.0
    return Npsd.from_weights(grid, w)


@settings(max_examples=200, deadline=None)
@given(mass_vectors, mass_vectors, mass_vectors)
def test_metric_axioms(wa, wb, wc):
    g = FrequencyGrid.linspace(-1, 1, 6)
    a, b, c = (_npsd(w, g) for w in (wa, wb, wc))
    ab, ba = wasserstein(a, b), wasserstein(b, a)
    assert ab >= 0
    assert abs(ab - ba) <= 1e-12
    assert wasserstein(a, c) <= ab + wasserstein(b, c) + 1e-9
    assert (ab == 0) == np.array_equal(a.mass, b.mass)


def test_distance_matrix_independent_of_threads(monkeypatch):
    rng = np.random.default_rng(1)
    fam = [random_npsd(rng, G10) for _ in range(9)]
    monkeypatch.setenv("WF_THREADS", "1")
    d1 = wasserstein_matrix(fam)
    monkeypatch.setenv("WF_THREADS", "4")
    d4 = wasserstein_matrix(fam)
    assert np.array_equal(d1, d4)
    assert np.array_equal(d1, d1.T) and np.all(np.diag(d1) == 0)
    assert d1[2, 5] == wasserstein(fam[2], fam[5])


# -- WF distance on series ---------------------------------------------------

def _pulse(n=1024, fs=1.0, width=40.0):
    t = np.arange(n) / fs
    return np.exp(-0.5 * ((t - t.mean()) / width) ** 2) * np.exp(2j * np.pi * 0.05 * t)


def test_wf_identity_and_circular_shift():
    x = TimeSeries(np.random.default_rng(0).standard_normal(256))
    assert wf_distance(x, x) == 0
    assert wf_distance(x, TimeSeries(np.roll(x.samples, 37))) <= 1e-6


def test_wf_frequency_shift():
    y = _pulse()
    t = np.arange(y.size)
    for xi in (0.1, -0.073, 0.2):
        x = np.exp(2j * np.pi * xi * t) * y
        d = wf_distance(TimeSeries(x), TimeSeries(y))
        assert abs(d - abs(xi)) <= 2 / y.size


# -- geodesics ---------------------------------------------------------------

def test_geodesic_endpoints_and_dirac_midpoint():
    g = FrequencyGrid.linspace(0, 4, 41)
    a, b = Npsd.dirac(g, 0), Npsd.dirac(g, 4)
    path = geodesic(a, b)
    assert path(0) is a and path(1) is b
    mid = path(0.25)
    assert mid.mass[g.nearest(1.0)] == pytest.approx(1.0)
    assert path.length() == pytest.approx(4.0)


def test_geodesic_of_gaussians_is_gaussian():
    g = FrequencyGrid.linspace(-4, 6, 4001)
    ma, sa, mb, sb = -1.0, 0.3, 2.0, 0.8
    path = geodesic(gaussian(g, ma, sa), gaussian(g, mb, sb))
    for gm in (0.25, 0.5, 0.8):
        s = path(gm)
        assert s.mean() == pytest.approx((1 - gm) * ma + gm * mb, abs=1e-3)
        assert np.sqrt(s.variance()) == pytest.approx((1 - gm) * sa + gm * sb, rel=0.01)


def test_geodesic_constant_speed():
    rng = np.random.default_rng(7)
    g = FrequencyGrid.linspace(-2, 2, 81)
    gammas = [0, 0.25, 0.5, 0.75, 1]
    for _ in range(20):
        a, b = random_npsd(rng, g), random_npsd(rng, g)
        path = geodesic(a, b)
        pts = [path(x) for x in gammas]
        total = wasserstein(a, b)
        for i in range(5):
            for j in range(5):
                err = wasserstein(pts[i], pts[j]) - abs(gammas[i] - gammas[j]) * total
                assert abs(err) <= 2 * g.spacing


def test_geodesic_exact_quantile_is_affine():
    rng = np.random.default_rng(3)
    a, b = random_npsd(rng, G10), random_npsd(rng, G10)
    path = geodesic(a, b)
    q = path.quantile(0.3)
    assert wasserstein(q, a) == pytest.approx(0.3 * wasserstein(a, b), abs=1e-12)
    assert wasserstein(q, b) == pytest.approx(0.7 * wasserstein(a, b), abs=1e-12)


# -- barycenters -------------------------------------------------------------

def test_barycenter_examples():
    s = random_npsd(np.random.default_rng(0), G10)
    assert wf_barycenter([s]) is s
    bar = wf_barycenter([Npsd.dirac(G10, 0), Npsd.dirac(G10, 10)])
    assert bar.mass[5] == pytest.approx(1)
    with pytest.raises(EmptyFamily):
        wf_barycenter([])
    with pytest.raises(WeightMismatch):
        wf_barycenter([s, s], weights=[1.0])
    with pytest.raises(WeightMismatch):
        wf_barycenter([s, s], weights=[0.7, 0.7])


def test_weighted_barycenter_is_geodesic_point():
    rng = np.random.default_rng(5)
    a, b = random_npsd(rng, G10), random_npsd(rng, G10)
    q = barycenter_quantile([a, b], weights=[0.6, 0.4])
    assert wasserstein(q, geodesic(a, b).quantile(0.4)) < 1e-12


def test_gaussian_family_barycenter():
    g = FrequencyGrid.linspace(-5, 5, 4001)
    rng = np.random.default_rng(11)
    means = rng.uniform(-1, 1, 6)
    stds = rng.uniform(0.2, 0.6, 6)
    bar = wf_barycenter([gaussian(g, m, s) for m, s in zip(means, stds)])
    assert bar.mean() == pytest.approx(means.mean(), abs=0.01 * stds.mean())
    assert np.sqrt(bar.variance()) == pytest.approx(stds.mean(), rel=0.01)


def _frechet(q, family):
    return sum(wasserstein(q, s) ** 2 for s in family) / len(family)


def _perturbed(q, i, delta):
    v = q.values.copy()
    v[i] += delta
    v = np.maximum.accumulate(v) if delta > 0 else np.minimum.accumulate(v[::-1])[::-1]
    return QuantileFunction(q.knots, v)


def test_barycenter_local_optimality():
    rng = np.random.default_rng(8)
    g = FrequencyGrid.linspace(-1, 1, 21)
    for _ in range(10):
        fam = [random_npsd(rng, g) for _ in range(4)]
        q = barycenter_quantile(fam)
        base = _frechet(q, fam)
        for i in rng.choice(q.values.size, size=min(5, q.values.size), replace=False):
            for delta in (-g.spacing, g.spacing):
                assert _frechet(_perturbed(q, i, delta), fam) >= base - 1e-9


# -- class distance ----------------------------------------------------------

def test_class_distance_examples():
    c = [Npsd.dirac(G10, 0), Npsd.dirac(G10, 5)]
    assert class_distance(Npsd.dirac(G10, 2), c) == (pytest.approx(2.0), 0)
    assert class_distance(c[1], c) == (0.0, 1)
    with pytest.raises(EmptyFamily):
        class_distance(c[0], [])


# -- log / exp maps ----------------------------------------------------------

def test_log_map_examples():
    s = random_npsd(np.random.default_rng(9), G10)
    assert np.allclose(log_map(s, s).displacement, 0)
    l = log_map(Npsd.dirac(G10, 3), Npsd.dirac(G10, 0))
    assert np.allclose(l.displacement, 3)


def test_log_map_translation():
    g = FrequencyGrid.linspace(-8, 8, 1601)
    l = log_map(gaussian(g, 1.5, 1.0), gaussian(g, 0.0, 1.0))
    central = np.abs(l.positions) < 2.5
    assert np.allclose(l.displacement[central], 1.5, atol=2 * g.spacing)


def test_exp_map_examples():
    g = FrequencyGrid.linspace(-8, 8, 161)
    base = gaussian(g, 0, 1)
    zero = LogMap(base, np.zeros(base.support.size))
    assert np.allclose(exp_map(zero).mass, base.mass)
    shifted = exp_map(LogMap(base, np.full(base.support.size, 0.3)))
    assert shifted.mean() == pytest.approx(base.mean() + 0.3, abs=1e-9)


def test_exp_map_flags_non_monotone():
    g = FrequencyGrid.linspace(0, 4, 5)
    base = Npsd(g, np.full(5, 0.2))
    with pytest.warns(WFDiagnostic):
        exp_map(LogMap(base, np.array([3.0, 0, 0, 0, 0])))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_exp_log_round_trip(seed):
    rng = np.random.default_rng(seed)
    g = FrequencyGrid.linspace(-1, 1, 41)
    fam = [random_npsd(rng, g) for _ in range(3)]
    bar = wf_barycenter(fam)
    for s in fam:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", WFDiagnostic)
            back = exp_map(log_map(s, bar))
        assert wasserstein(back, s) <= 2 * g.spacing


# -- re-binning --------------------------------------------------------------

def test_rebin_linear_preserves_mean_and_clamps():
    g = FrequencyGrid.linspace(0, 1, 11)
    s = rebin([0.23, 0.71], [0.5, 0.5], g)
    assert s.mean() == pytest.approx(0.47)
    with pytest.warns(WFDiagnostic):
        r = rebin([-3.0, 0.5], [0.5, 0.5], g)
    assert r.mass[0] == pytest.approx(0.5)
    n = rebin([0.23], [1.0], g, method="nearest")
    assert n.mass[2] == 1


def test_common_grid():
    a = FrequencyGrid.linspace(0, 1, 11)
    b = FrequencyGrid.linspace(-1, 0.5, 31)
    g = common_grid(Npsd.dirac(a, 0), Npsd.dirac(b, 0))
    assert g.fmin == pytest.approx(-1) and g.fmax >= 1 - 1e-12
    assert g.spacing == pytest.approx(0.05)
