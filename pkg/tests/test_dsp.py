import numpy as np
import pytest

from isacsim.dsp import (
    cyclic_correlate,
    design_lowpass,
    dft,
    fir_filter,
    freq_response,
    idft,
    raised_cosine,
)


def direct_dft(x, size):
    x = np.concatenate([x, np.zeros(size - len(x))])
    n = np.arange(size)
    return np.exp(-2j * np.pi * np.outer(n, n) / size) @ x


def direct_cyclic_correlate(y, s):
    n = len(y)
    return np.array([sum(y[l] * np.conj(s[(l - k) % n]) for l in range(n)) for k in range(n)])


def direct_fir(x, taps):
    out = np.zeros(len(x), dtype=complex)
    for n in range(len(x)):
        for l, tap in enumerate(taps, start=1):
            if n - l >= 0:
                out[n] += tap * x[n - l]
    return out


class TestDft:
    def test_impulse_flat_spectrum(self):
        assert np.allclose(dft([1, 0, 0, 0], 4), [1, 1, 1, 1])

    def test_constant_is_dc(self):
        assert np.allclose(dft([1, 1, 1, 1], 4), [4, 0, 0, 0])

    def test_matches_direct_sum(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        ref = direct_dft(x, 64)
        err = np.linalg.norm(dft(x) - ref) / np.linalg.norm(ref)
        assert err < 1e-10

    def test_zero_padding(self):
        x = np.array([1.0, 2.0, 3.0])
        assert np.allclose(dft(x, 8), direct_dft(x, 8), atol=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 16, 100, 137, 1024, 8192])
    def test_roundtrip(self, n):
        rng = np.random.default_rng(n)
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        back = idft(dft(x))
        assert np.linalg.norm(back - x) <= 1e-10 * np.linalg.norm(x)

    def test_parseval(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(300) + 1j * rng.standard_normal(300)
        t = np.sum(np.abs(x) ** 2)
        f = np.sum(np.abs(dft(x)) ** 2) / 300
        assert abs(t - f) <= 1e-9 * t

    def test_invalid_size(self):
        with pytest.raises(ValueError):
            dft([1.0], 0)
        with pytest.raises(ValueError):
            dft([1.0, 2.0], 1)
        with pytest.raises(ValueError):
            idft([1.0, 2.0], 0)


class TestCyclicCorrelate:
    def test_impulse_autocorrelation(self):
        r = cyclic_correlate([1, 0, 0, 0], [1, 0, 0, 0])
        assert np.allclose(r, [1, 0, 0, 0], atol=1e-12)

    def test_matched_shift_peak(self):
        rng = np.random.default_rng(5)
        s = np.exp(2j * np.pi * rng.random(8))
        y = np.roll(s, 3)
        r = np.abs(cyclic_correlate(y, s))
        assert np.argmax(r) == 3
        assert r[3] == pytest.approx(8.0, abs=1e-9)

    def test_matches_direct_sum(self):
        rng = np.random.default_rng(11)
        y = rng.standard_normal(256) + 1j * rng.standard_normal(256)
        s = rng.standard_normal(256) + 1j * rng.standard_normal(256)
        ref = direct_cyclic_correlate(y, s)
        err = np.linalg.norm(cyclic_correlate(y, s) - ref) / np.linalg.norm(ref)
        assert err < 1e-9

    def test_zero_lag_is_inner_product(self):
        rng = np.random.default_rng(13)
        y = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        s = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        assert cyclic_correlate(y, s)[0] == pytest.approx(np.sum(y * np.conj(s)), abs=1e-10)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            cyclic_correlate(np.ones(4), np.ones(5))


class TestRaisedCosine:
    def test_unity_at_origin(self):
        assert raised_cosine(0.0, 0.25, 1e-6) == 1.0

    @pytest.mark.parametrize("beta", [0.0, 0.1, 0.25, 0.5, 1.0])
    def test_zero_isi_on_sample_grid(self, beta):
        ts = 1.627e-8
        for k in range(1, 9):
            assert raised_cosine(k * ts, beta, ts) == 0.0
            assert raised_cosine(-k * ts, beta, ts) == 0.0

    def test_singularity_limit_two_sided(self):
        # evaluate just off the removable singularity and compare with the
        # analytic value returned exactly at it
        beta, ts = 0.35, 1.0
        t0 = ts / (2 * beta)
        exact = raised_cosine(t0, beta, ts)
        lo = raised_cosine(t0 * (1 - 1e-8), beta, ts)
        hi = raised_cosine(t0 * (1 + 1e-8), beta, ts)
        assert exact == pytest.approx((np.pi / 4) * np.sinc(1 / (2 * beta)), abs=1e-12)
        assert abs(exact - lo) < 1e-6 and abs(exact - hi) < 1e-6

    def test_beta_quarter_singularity_is_grid_zero(self):
        # for beta = 0.25 the singular point falls on the 2*Ts grid zero
        ts = 1.0
        exact = raised_cosine(2.0 * ts, 0.25, ts)
        near = raised_cosine(2.0 * ts * (1 + 1e-8), 0.25, ts)
        assert exact == 0.0
        assert abs(near) < 1e-6

    def test_even_symmetry(self):
        rng = np.random.default_rng(17)
        ts = 2.5e-7
        for t in rng.uniform(-5 * ts, 5 * ts, 50):
            assert raised_cosine(t, 0.3, ts) == raised_cosine(-t, 0.3, ts)

    def test_truncation(self):
        ts = 1.0
        assert raised_cosine(2.4, 0.3, ts, truncate=2) == 0.0
        assert raised_cosine(1.4, 0.3, ts, truncate=2) != 0.0

    def test_invalid_roll_off(self):
        with pytest.raises(ValueError):
            raised_cosine(0.0, -0.1, 1.0)
        with pytest.raises(ValueError):
            raised_cosine(0.0, 1.1, 1.0)


class TestFirFilter:
    def test_single_tap_is_unit_delay(self):
        x = np.arange(1.0, 9.0)
        y = fir_filter(x, [1.0])
        assert y[0] == 0.0
        assert np.allclose(y[1:], x[:-1])

    def test_dc_gain_after_transient(self):
        taps = design_lowpass(0.2, 31)
        x = np.ones(200)
        y = fir_filter(x, taps)
        assert np.allclose(y[32:], 1.0, atol=1e-12)

    def test_matches_direct_convolution(self):
        rng = np.random.default_rng(23)
        x = rng.standard_normal(128) + 1j * rng.standard_normal(128)
        taps = rng.standard_normal(16)
        ref = direct_fir(x, taps)
        err = np.linalg.norm(fir_filter(x, taps) - ref) / np.linalg.norm(ref)
        assert err < 1e-10

    def test_linearity(self):
        rng = np.random.default_rng(29)
        x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        y = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        taps = rng.standard_normal(9)
        a, b = 1.7 - 0.3j, -0.8 + 2.1j
        lhs = fir_filter(a * x + b * y, taps)
        rhs = a * fir_filter(x, taps) + b * fir_filter(y, taps)
        assert np.linalg.norm(lhs - rhs) < 1e-10 * np.linalg.norm(rhs)

    def test_empty_taps(self):
        with pytest.raises(ValueError):
            fir_filter(np.ones(4), [])


class TestDesignLowpass:
    def test_degenerate_single_tap(self):
        assert np.array_equal(design_lowpass(0.25, 1), [1.0])

    def test_unit_dc_gain(self):
        taps = design_lowpass(0.1, 63)
        assert abs(freq_response(taps, 0.0)[0] - 1.0) < 1e-12

    def test_stopband_attenuation(self):
        taps = design_lowpass(0.1, 63)
        mag_db = 20 * np.log10(np.abs(freq_response(taps, 0.3)[0]))
        assert mag_db < -40.0

    def test_invalid_cutoff(self):
        with pytest.raises(ValueError):
            design_lowpass(0.0, 63)
        with pytest.raises(ValueError):
            design_lowpass(0.5, 63)
        with pytest.raises(ValueError):
            design_lowpass(0.2, 64)
