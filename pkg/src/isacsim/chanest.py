"""Sensing-aided estimation of the effective-channel coefficients.

Given the per-path delay and Doppler estimates from the sensing stage, the
path coefficients are estimated one at a time in descending strength order:
correlate the residual against the regenerated chirp reference of the path,
then subtract the reconstructed contribution before moving to the next path
(successive interference cancellation). A no-cancellation variant simply
correlates every path against the raw input; it exists as the comparison
mode for quantifying what the cancellation buys.
"""

from dataclasses import dataclass

import numpy as np

from .channel import EffectiveChannel
from .config import SystemConfig
from .waveform import fmcw_generate


class AssociationError(RuntimeError):
    """Estimated and true path sets share no (delay, Doppler) key."""


@dataclass(frozen=True)
class PathEstimate:
    delay_samples: int
    doppler_hz: float
    coeff: complex
    amplitude: float  # map magnitude used for ordering


def _shifted(train, lag, length):
    out = np.zeros(length, dtype=complex)
    lag = int(lag)
    if lag < length:
        out[lag:] = train[: length - lag]
    return out


def regenerate_path_reference(delay_samples, doppler_hz, p_s, cfg: SystemConfig, fmcw=None):
    """Reference signal of one path: sqrt(1-p_s) * s_r(n - l) * exp(j*2*pi*f*n*t_s)."""
    if delay_samples < 0:
        raise ValueError("delay must be >= 0")
    if fmcw is None:
        fmcw = fmcw_generate(cfg)
    ref = np.sqrt(1.0 - p_s) * _shifted(fmcw, delay_samples, cfg.frame_len)
    if doppler_hz != 0.0:
        ref = ref * np.exp(2j * np.pi * doppler_hz * cfg.t_s * np.arange(cfg.frame_len))
    return ref


def sic_estimate(y, paths, p_s, cfg: SystemConfig, use_sic=True):
    """Estimate all path coefficients, strongest first.

    ``paths`` is an iterable of (delay_samples, doppler_hz, amplitude)
    triples (or objects with those attributes). Each coefficient is the
    normalized correlation <residual, ref>/||ref||^2; with ``use_sic`` the
    reconstructed path is subtracted from the residual before the next
    estimate, without it every path correlates against the raw input.
    """
    y = np.asarray(y)
    if y.size != cfg.frame_len:
        raise ValueError(f"expected {cfg.frame_len} samples, got {y.size}")
    triples = []
    for p in paths:
        if hasattr(p, "delay_samples"):
            triples.append((int(round(p.delay_samples)), float(p.doppler_hz), float(p.amplitude)))
        else:
            triples.append((int(round(p[0])), float(p[1]), float(p[2])))
    triples.sort(key=lambda t: -t[2])

    fmcw = fmcw_generate(cfg)
    residual = y.astype(complex).copy()
    estimates = []
    for delay, f_d, amp in triples:
        ref = regenerate_path_reference(delay, f_d, p_s, cfg, fmcw=fmcw)
        energy = np.vdot(ref, ref).real
        if energy <= 0.0:
            raise ValueError(f"degenerate reference for delay {delay}: zero energy")
        coeff = np.vdot(ref, residual if use_sic else y) / energy
        if use_sic:
            residual -= coeff * ref
        estimates.append(PathEstimate(delay, f_d, complex(coeff), amp))
    return estimates


def reconstruct_freq_channel(estimates, cfg: SystemConfig):
    """Frequency-domain channel grid from estimated paths.

    H(m, k) = sum_p h_p * exp(-j*2*pi*k*delta_f*tau_p) * exp(j*2*pi*m*t_sym*f_p)
    with tau_p the integer-bin delay l_p * t_s. Valid while the Doppler
    stays well below the subcarrier spacing. Returned shape is
    (n_sym, n); subcarrier index k runs over FFT bins.
    """
    grid = np.zeros((cfg.n_sym, cfg.n), dtype=complex)
    k = np.arange(cfg.n)
    m = np.arange(cfg.n_sym)
    for est in estimates:
        tau = est.delay_samples * cfg.t_s
        col = np.exp(-2j * np.pi * k * cfg.delta_f * tau)
        row = np.exp(2j * np.pi * m * cfg.t_sym * est.doppler_hz)
        grid += est.coeff * np.outer(row, col)
    return grid


def true_freq_channel(eff: EffectiveChannel, cfg: SystemConfig):
    """Frequency-domain grid of the true effective channel (same model)."""
    ests = [
        PathEstimate(int(d), f, complex(h), abs(h))
        for h, d, f in zip(eff.coeffs, eff.integer_delays(), eff.dopplers_hz)
    ]
    return reconstruct_freq_channel(ests, cfg)


def nmse_freq(h_est, h_true, active_mask):
    """sum|H_est - H|^2 / sum|H|^2 over the active subcarriers of all symbols."""
    h_est = np.asarray(h_est)
    h_true = np.asarray(h_true)
    if h_est.shape != h_true.shape:
        raise ValueError(f"grid shapes differ: {h_est.shape} vs {h_true.shape}")
    e = h_est[:, active_mask] - h_true[:, active_mask]
    ref = np.sum(np.abs(h_true[:, active_mask]) ** 2)
    if ref == 0.0:
        raise ValueError("reference channel is all-zero on the active grid; NMSE undefined")
    return float(np.sum(np.abs(e) ** 2) / ref)


def nmse_time(estimates, eff: EffectiveChannel, cfg: SystemConfig):
    """sum_p |h_est_p - h_p|^2 / sum_p |h_p|^2 over the true effective paths.

    Paths are matched by (delay bin, Doppler bin) with the true Doppler
    snapped to its nearest bin; true paths without a matching estimate
    count as estimated zero.
    """
    est_by_key = {}
    for e in estimates:
        key = (int(e.delay_samples), _doppler_key(e.doppler_hz, cfg))
        est_by_key.setdefault(key, 0.0 + 0.0j)
        est_by_key[key] += e.coeff
    num = 0.0
    den = 0.0
    matched = 0
    for h, d, f in zip(eff.coeffs, eff.integer_delays(), eff.dopplers_hz):
        key = (int(d), _doppler_key(f, cfg))
        h_hat = est_by_key.get(key)
        if h_hat is None:
            h_hat = 0.0
        else:
            matched += 1
        num += abs(h_hat - h) ** 2
        den += abs(h) ** 2
    if den == 0.0:
        raise ValueError("true channel has zero energy; NMSE undefined")
    if matched == 0:
        raise AssociationError("no estimated path matches any true (delay, Doppler) bin")
    return float(num / den)


def _doppler_key(doppler_hz, cfg: SystemConfig):
    return int(np.round(doppler_hz * cfg.m1 * cfg.t_sym)) % cfg.m1


def theoretical_rmse_h1(cfg: SystemConfig, sigma_n2):
    """Closed-form RMSE of the strongest-path coefficient estimate.

    Single-target integer-delay regime. The OFDM component acts as
    interference with weight p_s and effective sample correlation n/n_sc,
    while the noise term scales with sigma_n2; both shrink with the total
    frame length n_sym * n_a.
    """
    if cfg.p_s >= 1.0:
        raise ValueError("p_s must be below 1: the chirp carries no power otherwise")
    frame = cfg.n_sym * cfg.n_a
    duty = (cfg.t_u + cfg.t_cp) / (cfg.t_u - cfg.t_cp)
    interference = duty * (cfg.n / cfg.n_sc) * cfg.p_s / ((1.0 - cfg.p_s) * frame)
    noise = sigma_n2 / ((1.0 - cfg.p_s) * frame)
    return float(np.sqrt(interference + noise))
