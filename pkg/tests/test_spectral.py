import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from wfts.errors import (BadGrid, EmptySeries, LagOutOfRange,
                         PhaseLengthMismatch, WFDiagnostic, ZeroPower)
from wfts.spectral import (Acf, FixedPhase, FrequencyGrid, Npsd, Psd,
                           RandomPhase, TimeSeries, acf_from_npsd,
                           empirical_acf, fourier, normalize, npsd,
                           npsd_from_acf, periodogram, reconstruct)


def direct_periodogram(x, fs, freqs):
    t = np.arange(x.size) / fs
    X = np.array([np.sum(x * np.exp(-2j * np.pi * f * t)) for f in freqs])
    return np.abs(X) ** 2 / (x.size * fs)


# -- types -------------------------------------------------------------------

def test_timeseries_rejects_empty_and_bad_rate():
    with pytest.raises(EmptySeries):
        TimeSeries(np.array([]))
    with pytest.raises(ValueError):
        TimeSeries(np.ones(4), sample_rate=0)


def test_grid_must_be_uniform_and_increasing():
    with pytest.raises(BadGrid):
        FrequencyGrid(np.array([0.0, 1.0, 3.0]))
    with pytest.raises(BadGrid):
        FrequencyGrid(np.array([1.0, 0.0]))
    g = FrequencyGrid.dft(8, 2.0)
    assert g.spacing == pytest.approx(0.25)
    assert g.fmin == -1.0 and g.fmax == pytest.approx(0.75)


def test_npsd_must_sum_to_one():
    g = FrequencyGrid.linspace(0, 1, 3)
    with pytest.raises(ValueError):
        Npsd(g, np.array([0.5, 0.2, 0.2]))
    with pytest.raises(ValueError):
        Npsd(g, np.array([1.2, -0.2, 0.0]))


def test_acf_needs_unit_lag_zero():
    with pytest.raises(ValueError):
        Acf(np.array([0.5, 0.1]))


# -- periodogram -------------------------------------------------------------

def test_constant_series_is_dc_only():
    p = periodogram(TimeSeries(np.ones(4)), n_freq=4)
    zero = p.grid.nearest(0.0)
    assert p.power[zero] > 0
    assert np.allclose(np.delete(p.power, zero), 0, atol=1e-15)


def test_cosine_peaks_at_plus_minus_point_one():
    t = np.arange(512)
    p = periodogram(TimeSeries(np.cos(2 * np.pi * 0.1 * t)))
    f = p.grid.frequencies
    share = p.power / p.power.sum()
    for f0 in (-0.1, 0.1):
        # 0.1 sits between DFT bins; the two bracketing bins carry the peak
        lo = np.searchsorted(f, f0) - 1
        assert share[lo] + share[lo + 1] >= 0.45
    top = np.sort(np.argsort(share)[-2:])
    assert np.allclose(f[top], [-0.1, 0.1], atol=p.grid.spacing)
    assert share[top[0]] == pytest.approx(share[top[1]], rel=1e-9)


def test_periodogram_matches_direct_summation():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(37) + 1j * rng.standard_normal(37)
    ts = TimeSeries(x, 3.0)
    p = periodogram(ts, n_freq=64)
    assert np.allclose(p.power, direct_periodogram(x, 3.0, p.grid.frequencies),
                       rtol=1e-10, atol=1e-14)
    g = FrequencyGrid.linspace(-1.2, 1.3, 41)
    q = periodogram(ts, grid=g)
    assert np.allclose(q.power, direct_periodogram(x, 3.0, g.frequencies),
                       rtol=1e-10, atol=1e-14)


def test_two_complex_exponentials_give_equal_peaks():
    fs, n = 4.0, 4096
    a, b = 3.0, 7.0
    t = np.arange(n) / fs
    s = npsd(TimeSeries(np.exp(1j * a * t) + np.exp(1j * b * t), fs),
             window="hann")
    f = s.grid.frequencies
    for w in (a, b):
        near = np.abs(f - w / (2 * np.pi)) < 3 * s.grid.spacing
        assert s.mass[near].sum() == pytest.approx(0.5, abs=0.01)


def test_periodogram_errors():
    with pytest.raises(EmptySeries):
        periodogram(TimeSeries(np.ones(1)))
    with pytest.raises(BadGrid):
        periodogram(TimeSeries(np.ones(8)), n_freq=4)


def test_welch_and_window_options():
    rng = np.random.default_rng(0)
    ts = TimeSeries(rng.standard_normal(1024))
    p = periodogram(ts, segments=7, overlap=0.5, window="hann")
    assert np.all(p.power >= 0) and p.power.sum() > 0
    # averaging reduces the bin-to-bin scatter of a white spectrum
    raw = periodogram(ts, n_freq=len(p.grid) * 4)
    assert np.std(p.power) / p.power.mean() < np.std(raw.power) / raw.power.mean()


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.integers(2, 64),
              elements=st.floats(-10, 10, allow_nan=False)),
       st.integers(0, 63))
def test_circular_shift_keeps_periodogram(x, shift):
    if not np.any(x):
        x = x + 1.0
    p = periodogram(TimeSeries(x)).power
    q = periodogram(TimeSeries(np.roll(x, shift))).power
    assert np.allclose(p, q, atol=1e-9 * max(1.0, p.max()))


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.integers(2, 64),
              elements=st.floats(-10, 10, allow_nan=False)))
def test_real_series_have_even_power(x):
    n = x.size + (x.size % 2 == 0)  # odd grid is symmetric about 0
    p = periodogram(TimeSeries(x), n_freq=n).power
    assert np.allclose(p, p[::-1], atol=1e-9 * max(1.0, p.max()))


# -- normalize ---------------------------------------------------------------

def test_normalize_examples():
    g = FrequencyGrid.linspace(0, 3, 4)
    assert np.allclose(normalize(Psd(g, np.ones(4))).mass, 0.25)
    s = normalize(Psd(g, np.array([2.0, 0, 0, 6])))
    assert np.allclose(s.mass, [0.25, 0, 0, 0.75])
    again = normalize(s.as_psd())
    assert np.array_equal(again.mass, s.mass)
    with pytest.raises(ZeroPower):
        normalize(Psd(g, np.zeros(4)))


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(2, 50),
              elements=st.floats(0, 1e6, allow_nan=False)))
def test_normalize_always_valid(power):
    if power.sum() <= 0:
        power = power + 1.0
    g = FrequencyGrid.linspace(0, 1, power.size)
    s = normalize(Psd(g, power))
    assert np.all(s.mass >= 0)
    assert abs(s.mass.sum() - 1) < 1e-9


# -- ACF ---------------------------------------------------------------------

def test_constant_series_acf():
    r = empirical_acf(TimeSeries(np.ones(4)), 2)
    assert np.allclose(r.values, [1, 0.75, 0.5])


def test_white_noise_lag_zero():
    x = np.random.default_rng(3).standard_normal(200)
    assert empirical_acf(TimeSeries(x), 5).values[0] == 1


def test_cosine_acf_sign_pattern():
    t = np.arange(400)
    r = empirical_acf(TimeSeries(np.cos(2 * np.pi * 0.25 * t)), 4).values.real
    assert r[2] == pytest.approx(-1, abs=0.02)
    assert r[4] == pytest.approx(1, abs=0.02)
    assert abs(r[1]) < 0.02 and abs(r[3]) < 0.02


def test_acf_lag_out_of_range():
    with pytest.raises(LagOutOfRange):
        empirical_acf(TimeSeries(np.ones(4)), 4)


@settings(max_examples=40, deadline=None)
@given(arrays(np.complex128, st.integers(2, 40),
              elements=st.complex_numbers(max_magnitude=10, allow_nan=False,
                                          allow_infinity=False)),
       st.data())
def test_empirical_acf_bounded(x, data):
    if np.sum(np.abs(x) ** 2) < 1e-6:
        x = x + 1.0
    h = data.draw(st.integers(0, x.size - 1))
    r = empirical_acf(TimeSeries(x), h).values
    assert np.all(np.abs(r) <= 1 + 1e-9)


def test_white_acf_gives_flat_npsd():
    g = FrequencyGrid.dft(16)
    s = npsd_from_acf(Acf(np.array([1.0, 0, 0])), g)
    assert np.allclose(s.mass, 1 / 16)


def test_cosine_acf_gives_peaks():
    g = FrequencyGrid.dft(200)
    f0 = 0.1
    r = np.cos(2 * np.pi * f0 * np.arange(100))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WFDiagnostic)
        s = npsd_from_acf(Acf(r), g)
    top = np.sort(g.frequencies[np.argsort(s.mass)[-2:]])
    assert np.allclose(top, [-f0, f0], atol=g.spacing)


def test_clipping_is_reported():
    g = FrequencyGrid.dft(64)
    r = np.cos(2 * np.pi * 0.1 * np.arange(10))
    with pytest.warns(WFDiagnostic):
        _, clipped = npsd_from_acf(Acf(r), g, return_clipped=True)
    assert clipped > 0


def test_npsd_from_acf_needs_grid():
    with pytest.raises(BadGrid):
        npsd_from_acf(Acf(np.array([1.0])), np.linspace(0, 1, 4))


def test_acf_from_npsd_examples():
    g = FrequencyGrid.dft(32)
    r = acf_from_npsd(Npsd.from_weights(g, np.ones(32)), np.arange(5)).values
    assert r[0] == 1 and np.allclose(r[1:], 0, atol=1e-12)
    f0 = g.frequencies[20]
    h = np.arange(6)
    assert np.allclose(acf_from_npsd(Npsd.dirac(g, f0), h).values,
                       np.exp(2j * np.pi * h * f0))
    two = Npsd.from_weights(g, (np.isclose(np.abs(g.frequencies), 0.25)).astype(float))
    r = acf_from_npsd(two, h).values
    assert np.allclose(r, np.cos(2 * np.pi * h * 0.25), atol=1e-12)
    assert np.max(np.abs(r.imag)) < 1e-9


def test_bochner_round_trip_band_limited():
    # finitely many nonzero lags and a positive transform
    r = np.array([1.0, 0.5, 0.2, 0.05])
    g = FrequencyGrid.dft(64)
    s = npsd_from_acf(Acf(r), g)
    back = acf_from_npsd(s, np.arange(8)).values
    assert np.max(np.abs(back[:4] - r)) < 1e-6
    assert np.max(np.abs(back[4:])) < 1e-6


# -- reconstruct -------------------------------------------------------------

def test_reconstruct_dirac_is_complex_exponential():
    g = FrequencyGrid.dft(64)
    f0 = g.frequencies[40]
    x = reconstruct(Npsd.dirac(g, f0))
    t = x.times
    ref = np.exp(2j * np.pi * f0 * t)
    assert np.allclose(x.samples / x.samples[0], ref)
    assert np.sum(np.abs(x.samples) ** 2) == pytest.approx(1.0)


def test_reconstruct_two_diracs_is_cosine():
    g = FrequencyGrid.dft(64)
    s = Npsd.from_weights(g, np.isclose(np.abs(g.frequencies), 0.125).astype(float))
    x = reconstruct(s)
    ref = 2 * np.cos(2 * np.pi * 0.125 * x.times)
    c = x.samples[0] / ref[0]
    assert np.allclose(x.samples, c * ref)


def test_reconstruct_periodogram_matches_npsd():
    rng = np.random.default_rng(5)
    g = FrequencyGrid.dft(50)
    s = Npsd.from_weights(g, rng.random(50))
    x = reconstruct(s, RandomPhase(7))
    assert np.allclose(npsd(x).mass, s.mass, atol=1e-12)


def test_reconstruct_determinism_and_phase_length():
    g = FrequencyGrid.dft(20)
    s = Npsd.from_weights(g, np.arange(1.0, 21.0))
    a = reconstruct(s, RandomPhase(3))
    b = reconstruct(s, RandomPhase(3))
    assert np.array_equal(a.samples, b.samples)
    with pytest.raises(PhaseLengthMismatch):
        reconstruct(s, FixedPhase(np.zeros(5)))


def test_fourier_on_user_grid():
    x = TimeSeries(np.array([1.0, 2.0, 3.0]), 2.0)
    g = FrequencyGrid.linspace(-1, 1, 5)
    X = fourier(x, grid=g)
    t = np.arange(3) / 2.0
    ref = [np.sum(x.samples * np.exp(-2j * np.pi * f * t)) for f in g.frequencies]
    assert np.allclose(X.coefficients, ref)
