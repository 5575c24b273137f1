import numpy as np
import pytest

from isacsim.channel import EffectiveChannel, Target, apply_channel, expand_effective
from isacsim.config import SPEED_OF_LIGHT, desk_config, fullscale_config
from isacsim.sensing import (
    Detection,
    DetectionExhausted,
    RangeDopplerMap,
    bins_to_physical,
    cluster_pseudo_targets,
    detect_peaks,
    dmd_delay_per_row,
    dmd_rdm,
    fccr_rdm,
    load_rdm_csv,
    save_rdm_csv,
    signed_doppler_bin,
)
from isacsim.waveform import fmcw_generate

CFG = desk_config()
TOY = desk_config(n=64, n_cp=8, n_sc=48, n_sym=4, m1=8, b_w=750e3, n_f=15)


def single_path_rx(cfg, delay, doppler_hz=0.0, coeff=1.0 + 0j):
    eff = EffectiveChannel([coeff], [delay], [doppler_hz], cfg.t_s)
    return apply_channel(fmcw_generate(cfg), eff, 0.0, 0), eff


def argmax_bins(rdm):
    return np.unravel_index(np.argmax(rdm.magnitudes), rdm.magnitudes.shape)


class TestFccr:
    def test_static_integer_delay_peak(self):
        rx, _ = single_path_rx(CFG, 7)
        rdm = fccr_rdm(rx, fmcw_generate(CFG), CFG)
        assert argmax_bins(rdm) == (7, 0)

    @pytest.mark.parametrize("kappa", [1, 5, -3])
    def test_doppler_bin_placement(self, kappa):
        f_d = kappa / (CFG.m1 * CFG.t_sym)
        rx, _ = single_path_rx(CFG, 7, doppler_hz=f_d)
        rdm = fccr_rdm(rx, fmcw_generate(CFG), CFG)
        assert argmax_bins(rdm) == (7, kappa % CFG.m1)

    def test_matches_direct_evaluation(self):
        # independent O(N^2) correlate + direct symbol transform on a toy size
        cfg = TOY
        rx, _ = single_path_rx(cfg, 5, doppler_hz=2 / (cfg.m1 * cfg.t_sym))
        ref = fmcw_generate(cfg)
        y = rx.reshape(cfg.n_sym, cfg.n_a)[:, cfg.n_cp :]
        s = ref.reshape(cfg.n_sym, cfg.n_a)[:, cfg.n_cp :]
        n = cfg.n
        r = np.zeros((cfg.n_sym, n), dtype=complex)
        for m in range(cfg.n_sym):
            for lag in range(n):
                r[m, lag] = sum(y[m, l] * np.conj(s[m, (l - lag) % n]) for l in range(n))
        direct = np.zeros((cfg.n_cp, cfg.m1), dtype=complex)
        for lag in range(cfg.n_cp):
            for k in range(cfg.m1):
                direct[lag, k] = sum(
                    r[m, lag] * np.exp(-2j * np.pi * m * k / cfg.m1) for m in range(cfg.n_sym)
                )
        rdm = fccr_rdm(rx, ref, cfg)
        assert np.max(np.abs(rdm.magnitudes - np.abs(direct))) < 1e-6 * np.max(np.abs(direct))

    def test_two_target_amplitude_ratio(self):
        eff = EffectiveChannel([1.0, 10 ** (-6 / 20)], [8, 25], [0.0, 0.0], CFG.t_s)
        rx = apply_channel(fmcw_generate(CFG), eff, 0.0, 0)
        rdm = fccr_rdm(rx, fmcw_generate(CFG), CFG)
        a1 = rdm.magnitudes[8, 0]
        a2 = rdm.magnitudes[25, 0]
        ratio_db = 20 * np.log10(a1 / a2)
        assert abs(ratio_db - 6.0) < 1.0

    def test_delay_shift_covariance(self):
        rx, _ = single_path_rx(CFG, 6)
        rdm0 = fccr_rdm(rx, fmcw_generate(CFG), CFG)
        for d in (1, 4, 11):
            shifted = np.concatenate([np.zeros(d, dtype=complex), rx[:-d]])
            rdm = fccr_rdm(shifted, fmcw_generate(CFG), CFG)
            assert argmax_bins(rdm)[0] == argmax_bins(rdm0)[0] + d

    def test_doppler_covariance(self):
        rx, _ = single_path_rx(CFG, 6, doppler_hz=3 / (CFG.m1 * CFG.t_sym))
        sym_idx = np.arange(CFG.frame_len) // CFG.n_a
        ramped = rx * np.exp(2j * np.pi * sym_idx / CFG.m1)
        k0 = argmax_bins(fccr_rdm(rx, fmcw_generate(CFG), CFG))[1]
        k1 = argmax_bins(fccr_rdm(ramped, fmcw_generate(CFG), CFG))[1]
        assert k1 == (k0 + 1) % CFG.m1

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            fccr_rdm(np.ones(10), fmcw_generate(CFG), CFG)

    def test_delay_rows_limited_to_cp(self):
        rx, _ = single_path_rx(CFG, 3)
        rdm = fccr_rdm(rx, fmcw_generate(CFG), CFG)
        assert rdm.magnitudes.shape == (CFG.n_cp, CFG.m1)


class TestDmd:
    def test_static_path_nearest_row(self):
        rx, _ = single_path_rx(CFG, 20)
        rdm = dmd_rdm(rx, CFG)
        row, col = argmax_bins(rdm)
        assert col == 0
        assert row == int(round(20 / dmd_delay_per_row(CFG)))
        assert rdm.magnitudes.shape == (CFG.n_d, CFG.m1)
        assert np.all(np.isfinite(rdm.magnitudes))

    def test_cross_method_range_consistency(self):
        rx, _ = single_path_rx(CFG, 20)
        r1 = fccr_rdm(rx, fmcw_generate(CFG), CFG)
        r2 = dmd_rdm(rx, CFG)
        range_f = r1.delay_axis[argmax_bins(r1)[0]] * CFG.range_resolution
        range_d = r2.delay_axis[argmax_bins(r2)[0]] * CFG.range_resolution
        cell = dmd_delay_per_row(CFG) * CFG.range_resolution
        assert abs(range_f - range_d) <= cell

    def test_mixing_beat_tone(self):
        # chirp times conjugate of its delayed copy is a single tone at
        # f_bt = slope * tau over the overlap support
        delay = 25
        chirp = fmcw_generate(CFG)[: CFG.n_a]
        delayed = np.concatenate([np.zeros(delay, dtype=complex), chirp[:-delay]])
        mixed = chirp * np.conj(delayed)
        lo, hi = CFG.n_cp + delay, CFG.n
        tone = mixed[lo:hi]
        phase = np.unwrap(np.angle(tone))
        freq = np.mean(np.diff(phase)) / (2 * np.pi * CFG.t_s)
        f_bt = CFG.chirp_slope * delay * CFG.t_s
        bin_hz = 1.0 / ((hi - lo) * CFG.t_s)
        assert abs(freq - f_bt) < bin_hz

    def test_zero_input_all_zero(self):
        rdm = dmd_rdm(np.zeros(CFG.frame_len, dtype=complex), CFG)
        assert np.all(rdm.magnitudes == 0)
        with pytest.raises(DetectionExhausted):
            detect_peaks(rdm, 1)

    def test_divisibility_validated(self):
        cfg = desk_config()
        bad = object.__new__(type(cfg))
        object.__setattr__(bad, "__dict__", dict(cfg.__dict__))
        object.__setattr__(bad, "decim", 7)
        with pytest.raises(ValueError):
            dmd_rdm(np.zeros(cfg.frame_len, dtype=complex), bad)


def make_rdm(mags):
    mags = np.asarray(mags, dtype=float)
    return RangeDopplerMap(
        magnitudes=mags,
        delay_axis=np.arange(mags.shape[0], dtype=float),
        doppler_axis_hz=np.arange(mags.shape[1], dtype=float),
        method="fccr",
        sample_period=CFG.t_s,
        speed_per_hz=CFG.speed_per_hz,
    )


class TestDetectPeaks:
    def test_single_peak(self):
        mags = np.zeros((16, 8))
        mags[5, 2] = 3.0
        (det,) = detect_peaks(make_rdm(mags), 1)
        assert (det.delay_bin, det.doppler_bin, det.amplitude) == (5, 2, 3.0)

    def test_ordering_by_amplitude(self):
        mags = np.zeros((32, 8))
        mags[20, 1] = 5.0
        mags[4, 6] = 10.0
        dets = detect_peaks(make_rdm(mags), 2)
        assert [d.amplitude for d in dets] == [10.0, 5.0]
        assert dets[0].delay_bin == 4 and dets[1].delay_bin == 20

    def test_planted_two_target_recovery(self):
        eff = EffectiveChannel([1.0, 0.5], [8, 25], [0.0, 0.0], CFG.t_s)
        rx = apply_channel(fmcw_generate(CFG), eff, 0.0, 0)
        rdm = fccr_rdm(rx, fmcw_generate(CFG), CFG)
        dets = detect_peaks(rdm, 2, guard=(5, 3))
        assert {(d.delay_bin, d.doppler_bin) for d in dets} == {(8, 0), (25, 0)}

    def test_guard_masks_neighbors(self):
        mags = np.zeros((32, 8))
        mags[10, 3] = 10.0
        mags[11, 3] = 9.0  # inside guard, must be skipped
        mags[25, 3] = 1.0
        dets = detect_peaks(make_rdm(mags), 2, guard=(5, 3))
        assert dets[1].delay_bin == 25

    def test_doppler_guard_wraps(self):
        mags = np.zeros((8, 8))
        mags[4, 7] = 10.0
        mags[4, 0] = 9.0  # wrapped neighbor
        mags[4, 4] = 1.0
        dets = detect_peaks(make_rdm(mags), 2, guard=(0, 1))
        assert dets[1].doppler_bin == 4

    def test_exhausted(self):
        mags = np.zeros((8, 8))
        mags[2, 2] = 1.0
        with pytest.raises(DetectionExhausted):
            detect_peaks(make_rdm(mags), 3, guard=(8, 8))

    def test_tie_breaks_to_lowest_index(self):
        mags = np.zeros((8, 8))
        mags[3, 5] = 2.0
        mags[6, 1] = 2.0
        dets = detect_peaks(make_rdm(mags), 1)
        assert (dets[0].delay_bin, dets[0].doppler_bin) == (3, 5)

    def test_deterministic(self):
        rng = np.random.default_rng(0)
        mags = rng.random((40, 16))
        a = detect_peaks(make_rdm(mags), 4)
        b = detect_peaks(make_rdm(mags), 4)
        assert a == b


class TestClusters:
    def test_delta_zero_is_detection_itself(self):
        mags = np.zeros((16, 8))
        mags[5, 2] = 3.0
        rdm = make_rdm(mags)
        (det,) = detect_peaks(rdm, 1)
        (cluster,) = cluster_pseudo_targets([det], rdm, 0)
        assert cluster.delay_bins.tolist() == [5]
        assert cluster.amplitudes.tolist() == [3.0]

    def test_bins_around_detection(self):
        mags = np.zeros((64, 8))
        mags[31, 0] = 1.0
        rdm = make_rdm(mags)
        (det,) = detect_peaks(rdm, 1)
        (cluster,) = cluster_pseudo_targets([det], rdm, 2)
        assert cluster.delay_bins.tolist() == [29, 30, 31, 32, 33]
        assert cluster.doppler_bin == 0

    def test_fractional_target_amplitudes_match_pulse(self):
        # full-rate sweep: lag-1 chirp autocorrelation ~ sinc(b_w * t_s) -> 0,
        # so the cluster cells carry the pulse weights without neighbor leakage
        cfg = desk_config(b_w=desk_config().sample_rate)
        frac = 0.37
        target = Target(1.0 + 0j, (14 + frac) * cfg.t_s * SPEED_OF_LIGHT / 2, 0.0, 0.0)
        eff = expand_effective([target], cfg.delta, cfg.beta, cfg.t_s)
        rx = apply_channel(fmcw_generate(cfg), eff, 0.0, 0)
        rdm = fccr_rdm(rx, fmcw_generate(cfg), cfg)
        (det,) = detect_peaks(rdm, 1)
        (cluster,) = cluster_pseudo_targets([det], rdm, cfg.delta)
        got = cluster.amplitudes / cluster.amplitudes.max()
        want = np.abs(eff.coeffs) / np.abs(eff.coeffs).max()
        assert np.all(np.abs(got - want) < 0.10)

    def test_cluster_exceeding_axis_rejected(self):
        mags = np.zeros((16, 8))
        mags[1, 0] = 1.0
        rdm = make_rdm(mags)
        (det,) = detect_peaks(rdm, 1)
        with pytest.raises(ValueError):
            cluster_pseudo_targets([det], rdm, 2)


class TestBinsToPhysical:
    def test_origin(self):
        assert bins_to_physical(0, 0, CFG) == (0.0, 0.0)

    def test_fullscale_range_cell(self):
        cfg = fullscale_config()
        range_m, _ = bins_to_physical(1, 0, cfg)
        assert range_m == pytest.approx(2.44, abs=0.005)

    def test_fullscale_speed_cell(self):
        # one Doppler cell at full scale is close to the nominal 0.068 m/s
        # (exactly that value when the CP is neglected in the symbol time)
        cfg = fullscale_config()
        _, speed = bins_to_physical(0, 1, cfg)
        assert speed == pytest.approx(cfg.speed_resolution)
        assert abs(speed - 0.068) < 0.005

    def test_negative_bins_unwrap(self):
        _, speed = bins_to_physical(0, CFG.m1 - 1, CFG)
        assert speed == pytest.approx(-CFG.speed_resolution)
        assert signed_doppler_bin(CFG.m1 - 1, CFG.m1) == -1

    def test_desk_range_cell(self):
        range_m, _ = bins_to_physical(1, 0, CFG)
        assert range_m == pytest.approx(19.53125)


class TestRdmCsv:
    def test_roundtrip(self, tmp_path):
        rx, _ = single_path_rx(CFG, 9)
        rdm = fccr_rdm(rx, fmcw_generate(CFG), CFG)
        path = tmp_path / "map.csv"
        save_rdm_csv(rdm, path)
        delay, doppler, mags = load_rdm_csv(path)
        assert np.allclose(delay, rdm.delay_axis)
        assert np.allclose(doppler, rdm.doppler_axis_hz, rtol=1e-8)
        assert np.allclose(mags, rdm.magnitudes, rtol=1e-8)
        header = path.read_text().splitlines()[0].split(",")
        assert header[0] == "delay_samples"
        assert len(header) == 1 + CFG.m1
