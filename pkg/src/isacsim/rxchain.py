"""Receive chain: chirp interference cancellation, OFDM demodulation,
equalization and soft demapping, bit-error counting.

Interference cancellation happens in the time domain before demodulation:
the chirp contribution is rebuilt from the estimated (or true) paths and
subtracted sample by sample. Doppler-induced inter-carrier interference is
not compensated anywhere downstream.
"""

from dataclasses import dataclass

import numpy as np

from .chanest import regenerate_path_reference
from .config import SystemConfig
from .waveform import fmcw_generate

SQRT2 = np.sqrt(2.0)


def regenerate_fmcw_interference(estimates, p_s, cfg: SystemConfig):
    """Rebuild the received chirp component from path estimates.

    r(n) = sum_p h_p * sqrt(1-p_s) * s_r(n - l_p) * exp(j*2*pi*f_p*n*t_s).
    An empty estimate list yields silence.
    """
    out = np.zeros(cfg.frame_len, dtype=complex)
    if not estimates:
        return out
    fmcw = fmcw_generate(cfg)
    for est in estimates:
        ref = regenerate_path_reference(est.delay_samples, est.doppler_hz, p_s, cfg, fmcw=fmcw)
        out += est.coeff * ref
    return out


def cancel_interference(y, regen):
    """y_I(n) = y(n) - regen(n); exact removal when the estimates are exact."""
    y = np.asarray(y)
    regen = np.asarray(regen)
    if y.shape != regen.shape:
        raise ValueError(f"length mismatch: {y.shape} vs {regen.shape}")
    return y - regen


def ofdm_demodulate(y, cfg: SystemConfig):
    """Per-symbol CP removal and forward transform, inverse of the modulator.

    Returns the (n_sym, n) grid; scaling sqrt(n_sc)/n undoes the
    modulator's n/sqrt(n_sc).
    """
    y = np.asarray(y)
    if y.size != cfg.frame_len:
        raise ValueError(f"expected {cfg.frame_len} samples, got {y.size}")
    body = y.reshape(cfg.n_sym, cfg.n_a)[:, cfg.n_cp :]
    return np.fft.fft(body, axis=1) * (np.sqrt(cfg.n_sc) / cfg.n)


@dataclass(frozen=True)
class SoftGrid:
    """Equalized symbols plus per-bit LLRs on the full (n_sym, n) grid.

    Positive LLR means bit 0 is more likely; llr0 covers the in-phase bit,
    llr1 the quadrature bit. Bins flagged erased carry LLR exactly 0.
    """

    symbols: np.ndarray
    llr0: np.ndarray
    llr1: np.ndarray
    erased: np.ndarray


def equalize_and_demap(grid, h_grid, p_s, sigma_n2, equalizer="zf"):
    """Single-tap equalization and Gaussian QPSK LLRs.

    Zero-forcing (default): x_hat = Y / (sqrt(p_s) * H); "mmse" weights by
    conj(H)/(|H|^2 + sigma_n2/p_s) instead. The post-equalization noise
    variance is sigma_n2 / (p_s * |H|^2) with sigma_n2 the per-grid-cell
    noise variance. Bins where |H| underflows are erased (LLR 0).
    """
    grid = np.asarray(grid)
    h_grid = np.asarray(h_grid)
    if grid.shape != h_grid.shape:
        raise ValueError(f"grid shapes differ: {grid.shape} vs {h_grid.shape}")
    if p_s <= 0:
        raise ValueError("p_s must be positive to carry data")
    if equalizer not in ("zf", "mmse"):
        raise ValueError(f"unknown equalizer {equalizer!r}")
    h_abs2 = np.abs(h_grid) ** 2
    erased = np.abs(h_grid) < 1e-12
    safe_h = np.where(erased, 1.0, h_grid)
    if equalizer == "zf":
        x_hat = grid / (np.sqrt(p_s) * safe_h)
    else:
        weight = np.conj(safe_h) / (np.abs(safe_h) ** 2 + sigma_n2 / p_s)
        x_hat = weight * grid / np.sqrt(p_s)
    x_hat = np.where(erased, 0.0, x_hat)
    if sigma_n2 > 0:
        nvar = sigma_n2 / (p_s * np.where(erased, 1.0, h_abs2))
        scale = 2.0 * SQRT2 / nvar
    else:
        scale = 1e12  # noiseless: hard-decision confidence
    llr0 = np.where(erased, 0.0, scale * x_hat.real)
    llr1 = np.where(erased, 0.0, scale * x_hat.imag)
    return SoftGrid(symbols=x_hat, llr0=llr0, llr1=llr1, erased=erased)


def soft_bits(soft: SoftGrid, active_mask):
    """Interleaved (llr0, llr1) stream over active bins, row-major by symbol."""
    l0 = soft.llr0[:, active_mask]
    l1 = soft.llr1[:, active_mask]
    out = np.empty(l0.size * 2)
    out[0::2] = l0.ravel()
    out[1::2] = l1.ravel()
    return out


def hard_bits(soft: SoftGrid, active_mask):
    """Hard decisions from LLR signs over active bins (LLR > 0 -> bit 0)."""
    return (soft_bits(soft, active_mask) < 0).astype(np.int64)


def ber(tx_bits, rx_bits):
    """Hamming distance over length."""
    tx_bits = np.asarray(tx_bits)
    rx_bits = np.asarray(rx_bits)
    if tx_bits.shape != rx_bits.shape:
        raise ValueError(f"length mismatch: {tx_bits.shape} vs {rx_bits.shape}")
    if tx_bits.size == 0:
        raise ValueError("empty bit vectors")
    return float(np.mean(tx_bits != rx_bits))
