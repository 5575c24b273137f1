"""Monte-Carlo harness: per-trial pipeline, sweeps, aggregation, CSV output.

Every trial is a pure function of (master seed, trial index): targets,
payload bits, pilot values and noise all come from one generator seeded
with that pair, so any two cells evaluated at the same trial index see the
same channel draw (paired comparisons across methods, modes and SNRs), and
results are independent of execution order or worker count.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import baseline as bl
from .chanest import (
    AssociationError,
    PathEstimate,
    nmse_freq,
    nmse_time,
    reconstruct_freq_channel,
    sic_estimate,
    true_freq_channel,
)
from .channel import apply_channel, draw_scenario, expand_effective, snr_to_sigma
from .config import SystemConfig
from .ldpc import load_code
from .rxchain import (
    ber,
    cancel_interference,
    equalize_and_demap,
    hard_bits,
    ofdm_demodulate,
    regenerate_fmcw_interference,
    soft_bits,
)
from .scenario import ScenarioSpec, mode_label
from .sensing import (
    DetectionExhausted,
    cluster_pseudo_targets,
    detect_peaks,
    dmd_delay_per_row,
    dmd_rdm,
    fccr_rdm,
)
from .waveform import active_subcarrier_mask, build_frame, fmcw_generate, ofdm_modulate, superpose

MISS_LIMIT_CELLS = 5  # detections farther than this many range cells count as misses

CSV_HEADER = (
    "scenario,method,mode,snr_db,trials,range_rmse_m,speed_rmse_mps,"
    "miss_rate,nmse_time,nmse_freq,ber_uncoded,ber_coded,seed"
)


@dataclass(frozen=True)
class TrialResult:
    range_errors: np.ndarray  # per target, NaN when missed
    speed_errors: np.ndarray
    missed: np.ndarray
    nmse_time: float
    nmse_freq: float
    ber_uncoded: float
    ber_coded: float
    seed: int
    trial_index: int
    elapsed_s: float


def trial_rng(seed, trial_index):
    return np.random.default_rng([int(seed), int(trial_index)])


def detection_guard(cfg: SystemConfig):
    """Exclusion zone around a detection: one tap cluster in delay, and in
    Doppler the transform mainlobe (first null at m1/n_sym bins)."""
    return (2 * cfg.delta + 1, max(3, cfg.m1 // cfg.n_sym - 1))


def _coded_payload(rng, n_payload_bits, code):
    """Payload = as many codewords as fit, then random tail bits."""
    n_cw = n_payload_bits // code.n
    info = rng.integers(0, 2, n_cw * code.k).astype(np.uint8)
    coded = [code.encode(info[i * code.k : (i + 1) * code.k]) for i in range(n_cw)]
    tail = rng.integers(0, 2, n_payload_bits - n_cw * code.n)
    bits = np.concatenate(coded + [tail]) if n_cw else tail
    return bits.astype(np.int64), info.astype(np.int64), n_cw


def _decode_payload(llrs, n_cw, code):
    out = np.empty(n_cw * code.k, dtype=np.int64)
    recoded = np.empty(n_cw * code.n, dtype=np.int64)
    for i in range(n_cw):
        info_hat = code.decode(llrs[i * code.n : (i + 1) * code.n])
        out[i * code.k : (i + 1) * code.k] = info_hat
        recoded[i * code.n : (i + 1) * code.n] = code.encode(info_hat.astype(np.uint8))
    return out, recoded


def associate_detections(dets, targets, cfg: SystemConfig):
    """Nearest-range one-to-one matching; far detections count as misses."""
    n_t = len(targets)
    range_err = np.full(n_t, np.nan)
    speed_err = np.full(n_t, np.nan)
    missed = np.ones(n_t, dtype=bool)
    limit = MISS_LIMIT_CELLS * cfg.range_resolution
    pairs = sorted(
        (abs(d.range_m - t.range_m), di, ti)
        for di, d in enumerate(dets)
        for ti, t in enumerate(targets)
    )
    used_d, used_t = set(), set()
    for dist, di, ti in pairs:
        if dist > limit or di in used_d or ti in used_t:
            continue
        used_d.add(di)
        used_t.add(ti)
        det, tgt = dets[di], targets[ti]
        range_err[ti] = det.range_m - tgt.range_m
        speed_err[ti] = (det.doppler_hz - tgt.doppler_hz) * cfg.speed_per_hz
        missed[ti] = False
    return range_err, speed_err, missed


def pseudo_paths(dets, rdm, cfg: SystemConfig):
    """Per-detection clusters flattened into (delay, Doppler Hz, amplitude) triples.

    Correlation maps have one row per sample of delay, so clusters read
    straight off the grid; beat-frequency maps are snapped to the nearest
    rows around the detection's integer sample delay. Rows falling off the
    axis are clipped.
    """
    n_rows = rdm.magnitudes.shape[0]
    triples = []
    if rdm.method in ("fccr", "ce", "df"):
        safe = [d for d in dets if cfg.delta <= d.delay_bin < n_rows - cfg.delta]
        for cluster in cluster_pseudo_targets(safe, rdm, cfg.delta):
            for b, a in zip(cluster.delay_bins, cluster.amplitudes):
                triples.append((int(b), cluster.doppler_hz, float(a)))
        return triples
    per_row = dmd_delay_per_row(cfg)
    for d in dets:
        center = int(round(d.delay_samples))
        for k in range(-cfg.delta, cfg.delta + 1):
            lag = center + k
            if lag < 0:
                continue
            row = min(n_rows - 1, max(0, int(round(lag / per_row))))
            triples.append((lag, d.doppler_hz, float(rdm.magnitudes[row, d.doppler_bin])))
    return triples


def _true_path_estimates(eff):
    return [
        PathEstimate(int(d), float(f), complex(h), abs(h))
        for h, d, f in zip(eff.coeffs, eff.integer_delays(), eff.dopplers_hz)
    ]


def run_trial(spec: ScenarioSpec, trial_index, method=None, ic_mode=None, sic=None, snr_db=None):
    """One deterministic trial of one sweep cell.

    Defaults fall back to the first entry of each grid in ``spec``. The
    stage sequence: draw targets, build the frame, apply the channel,
    sense, cluster, estimate path coefficients, reconstruct the channel
    grid, cancel the chirp, demodulate, decode, compute metrics.
    """
    method = method if method is not None else spec.methods[0]
    ic_mode = ic_mode if ic_mode is not None else spec.ic_modes[0]
    sic = sic if sic is not None else spec.sic_modes[0]
    snr_db = snr_db if snr_db is not None else spec.snr_db[0]
    t0 = time.perf_counter()
    if method in ("fccr", "dmd"):
        result = _cofmcw_trial(spec, trial_index, method, ic_mode, sic, snr_db)
    elif method in ("ce", "df"):
        result = _baseline_trial(spec, trial_index, method, snr_db)
    else:
        raise ValueError(f"unknown method {method!r}")
    return TrialResult(
        **result,
        seed=spec.seed,
        trial_index=trial_index,
        elapsed_s=time.perf_counter() - t0,
    )


def _cofmcw_trial(spec, trial_index, method, ic_mode, sic, snr_db):
    cfg = spec.system
    rng = trial_rng(spec.seed, trial_index)
    targets = draw_scenario(spec.targets, cfg, rng)
    eff = expand_effective(targets, cfg.delta, cfg.beta, cfg.t_s, n_cp=cfg.n_cp)

    code = load_code() if spec.coded else None
    n_payload = 2 * cfg.n_sym * cfg.n_sc
    if spec.coded:
        bits, info, n_cw = _coded_payload(rng, n_payload, code)
    else:
        bits = rng.integers(0, 2, n_payload)
        info, n_cw = None, 0
    grid = build_frame(bits, cfg)
    fmcw = fmcw_generate(cfg)
    x = superpose(ofdm_modulate(grid, cfg), fmcw, cfg.p_s)

    sigma = snr_to_sigma(snr_db)
    y = apply_channel(x, eff, sigma, rng)

    rdm = fccr_rdm(y, fmcw, cfg) if method == "fccr" else dmd_rdm(y, cfg)
    try:
        dets = detect_peaks(rdm, len(targets), guard=detection_guard(cfg))
    except DetectionExhausted:
        dets = []
    range_err, speed_err, missed = associate_detections(dets, targets, cfg)

    paths = pseudo_paths(dets, rdm, cfg)
    ests = sic_estimate(y, paths, cfg.p_s, cfg, use_sic=sic) if paths else []
    try:
        nmse_t = nmse_time(ests, eff, cfg) if ests else 1.0
    except AssociationError:
        nmse_t = 1.0
    h_est = reconstruct_freq_channel(ests, cfg)
    h_true = true_freq_channel(eff, cfg)
    active = active_subcarrier_mask(cfg)
    nmse_f = nmse_freq(h_est, h_true, active)

    if ic_mode == "perfect":
        regen = regenerate_fmcw_interference(_true_path_estimates(eff), cfg.p_s, cfg)
    elif ic_mode == "actual":
        regen = regenerate_fmcw_interference(ests, cfg.p_s, cfg)
    else:
        regen = np.zeros(cfg.frame_len, dtype=complex)
    y_clean = cancel_interference(y, regen)

    grid_rx = ofdm_demodulate(y_clean, cfg)
    soft = equalize_and_demap(grid_rx, h_est, cfg.p_s, sigma * cfg.n_sc / cfg.n, equalizer=cfg.equalizer)
    rx_bits = hard_bits(soft, active)
    ber_unc = ber(bits, rx_bits)
    ber_cod = np.nan
    if spec.coded and n_cw:
        llrs = soft_bits(soft, active)
        info_hat, _ = _decode_payload(llrs[: n_cw * code.n], n_cw, code)
        ber_cod = ber(info, info_hat)

    return dict(
        range_errors=range_err,
        speed_errors=speed_err,
        missed=missed,
        nmse_time=nmse_t,
        nmse_freq=nmse_f,
        ber_uncoded=ber_unc,
        ber_coded=ber_cod,
    )


def _baseline_trial(spec, trial_index, method, snr_db):
    cfg = spec.system
    rng = trial_rng(spec.seed, trial_index)
    targets = draw_scenario(spec.targets, cfg, rng)
    eff = expand_effective(targets, cfg.delta, cfg.beta, cfg.t_s, n_cp=cfg.n_cp)

    layout = bl.build_dmrs_layout(cfg, rng)
    n_payload = 2 * int(layout.data_mask.sum())
    code = load_code() if spec.coded else None
    if spec.coded:
        bits, info, n_cw = _coded_payload(rng, n_payload, code)
    else:
        bits = rng.integers(0, 2, n_payload)
        info, n_cw = None, 0
    frame = bl.rebuild_frame(layout, bits, cfg)
    tx = ofdm_modulate(frame, cfg)

    sigma = snr_to_sigma(snr_db)
    y = apply_channel(tx, eff, sigma, rng)

    grid_rx = ofdm_demodulate(y, cfg)
    h_int = bl.interpolate_channel(bl.ls_estimate(grid_rx, layout), layout, cfg)
    soft = equalize_and_demap(grid_rx, h_int, 1.0, sigma * cfg.n_sc / cfg.n, equalizer=cfg.equalizer)
    hard = bl.extract_data_bits_hard(soft.symbols, layout)
    ber_unc = ber(bits, hard)
    ber_cod = np.nan
    feedback_bits = hard
    if spec.coded and n_cw:
        llrs = bl.extract_data_llrs(soft.llr0, soft.llr1, layout)
        info_hat, recoded = _decode_payload(llrs[: n_cw * code.n], n_cw, code)
        ber_cod = ber(info, info_hat)
        feedback_bits = np.concatenate([recoded, hard[n_cw * code.n :]])

    h_true = true_freq_channel(eff, cfg)
    nmse_f = nmse_freq(h_int, h_true, layout.active_mask)

    if method == "ce":
        rdm = bl.ce_based_sensing(h_int, cfg)
    else:
        rdm = bl.df_based_sensing(y, bl.rebuild_frame(layout, feedback_bits, cfg), cfg)
    try:
        dets = detect_peaks(rdm, len(targets), guard=detection_guard(cfg))
    except DetectionExhausted:
        dets = []
    range_err, speed_err, missed = associate_detections(dets, targets, cfg)

    return dict(
        range_errors=range_err,
        speed_errors=speed_err,
        missed=missed,
        nmse_time=np.nan,
        nmse_freq=nmse_f,
        ber_uncoded=ber_unc,
        ber_coded=ber_cod,
    )


# -------------------- aggregation and sweeps --------------------


def aggregate(results):
    """Cell-level metrics from a list of TrialResults (fixed trial order)."""
    r2 = np.concatenate([r.range_errors for r in results]) ** 2
    v2 = np.concatenate([r.speed_errors for r in results]) ** 2
    missed = np.concatenate([r.missed for r in results])
    return dict(
        range_rmse_m=float(np.sqrt(np.nanmean(r2))) if not np.all(np.isnan(r2)) else np.nan,
        speed_rmse_mps=float(np.sqrt(np.nanmean(v2))) if not np.all(np.isnan(v2)) else np.nan,
        miss_rate=float(np.mean(missed)),
        nmse_time=_nanmean([r.nmse_time for r in results]),
        nmse_freq=_nanmean([r.nmse_freq for r in results]),
        ber_uncoded=_nanmean([r.ber_uncoded for r in results]),
        ber_coded=_nanmean([r.ber_coded for r in results]),
    )


def _nanmean(values):
    values = np.asarray(values, dtype=float)
    return float(np.nanmean(values)) if not np.all(np.isnan(values)) else np.nan


def sweep_cells(spec: ScenarioSpec):
    """Deterministic cell order: method-major, then mode, then SNR."""
    return [
        (method, ic, sic, snr)
        for method in spec.methods
        for ic in spec.ic_modes
        for sic in spec.sic_modes
        for snr in spec.snr_db
    ]


def run_cell(spec: ScenarioSpec, method, ic_mode, sic, snr_db):
    results = [
        run_trial(spec, i, method=method, ic_mode=ic_mode, sic=sic, snr_db=snr_db)
        for i in range(spec.trials)
    ]
    return aggregate(results)


def _cell_task(args):
    spec, cell = args
    return run_cell(spec, *cell)


def run_sweep(spec: ScenarioSpec, out_path=None, workers=1):
    """Full sweep over the cell grid; returns CSV text, optionally written.

    Cells are independent; with ``workers > 1`` they run in separate
    processes. Output is merged in canonical cell order, so the CSV is
    byte-identical for any worker count.
    """
    cells = sweep_cells(spec)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(_cell_task, [(spec, c) for c in cells]))
    else:
        stats = [run_cell(spec, *c) for c in cells]
    lines = [CSV_HEADER]
    for (method, ic, sic, snr), st in zip(cells, stats):
        lines.append(
            ",".join(
                [
                    spec.name,
                    method,
                    mode_label(ic, sic),
                    _fmt(snr),
                    str(spec.trials),
                    _fmt(st["range_rmse_m"]),
                    _fmt(st["speed_rmse_mps"]),
                    _fmt(st["miss_rate"]),
                    _fmt(st["nmse_time"]),
                    _fmt(st["nmse_freq"]),
                    _fmt(st["ber_uncoded"]),
                    _fmt(st["ber_coded"]),
                    str(spec.seed),
                ]
            )
        )
    text = "\n".join(lines) + "\n"
    if out_path is not None:
        with open(out_path, "w", encoding="ascii") as fh:
            fh.write(text)
    return text


def _fmt(value):
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return "nan"
    return f"{value:.9g}"
