"""Transmit-side signal generation: OFDM frames, chirp trains, superposition.

The OFDM frame is a standard CP-OFDM signal with QPSK on the active
subcarriers, scaled to unit average sample power. The chirp train places a
linear FM sweep in the middle t_c section of every symbol, with all-zero
gaps of n_cp samples on both sides, so the chirp has an all-zero cyclic
prefix by construction. Each symbol carries the identical sweep from
-b_w/2 to +b_w/2 (local time restarts at each chirp).
"""

import numpy as np

from .config import SystemConfig

INV_SQRT2 = 1.0 / np.sqrt(2.0)


def map_bits_qpsk(bits):
    """Gray-mapped unit-power QPSK: (b0, b1) -> ((1-2*b0) + 1j*(1-2*b1))/sqrt(2)."""
    bits = np.asarray(bits)
    if bits.size % 2:
        raise ValueError(f"bit count must be even, got {bits.size}")
    b = bits.reshape(-1, 2)
    return ((1.0 - 2.0 * b[:, 0]) + 1j * (1.0 - 2.0 * b[:, 1])) * INV_SQRT2


def demap_qpsk_hard(symbols):
    """Hard QPSK demapping, inverse of map_bits_qpsk."""
    s = np.asarray(symbols)
    bits = np.empty((s.size, 2), dtype=np.int64)
    bits[:, 0] = (s.real.ravel() < 0).astype(np.int64)
    bits[:, 1] = (s.imag.ravel() < 0).astype(np.int64)
    return bits.reshape(-1)


def active_subcarrier_mask(cfg: SystemConfig):
    """Boolean mask of the n_sc active FFT bins, centered on DC, DC nulled."""
    mask = np.zeros(cfg.n, dtype=bool)
    n_pos = (cfg.n_sc + 1) // 2
    n_neg = cfg.n_sc // 2
    mask[1 : 1 + n_pos] = True
    if n_neg:
        mask[cfg.n - n_neg :] = True
    return mask


class FrameGrid:
    """QPSK symbols a(m, n) on an n_sym x n grid plus the active-bin mask."""

    def __init__(self, symbols, active_mask):
        symbols = np.asarray(symbols, dtype=complex)
        active_mask = np.asarray(active_mask, dtype=bool)
        if symbols.ndim != 2 or symbols.shape[1] != active_mask.size:
            raise ValueError(f"grid shape {symbols.shape} inconsistent with mask size {active_mask.size}")
        if np.any(symbols[:, ~active_mask] != 0):
            raise ValueError("inactive subcarriers must be exactly zero")
        self.symbols = symbols
        self.active_mask = active_mask

    @property
    def n_sym(self):
        return self.symbols.shape[0]

    @property
    def n(self):
        return self.symbols.shape[1]

    def active_symbols(self):
        """Active-bin symbols in row-major (symbol, subcarrier) order."""
        return self.symbols[:, self.active_mask]


def build_frame(bits, cfg: SystemConfig):
    """Map a payload bit vector onto a FrameGrid (row-major over active bins)."""
    mask = active_subcarrier_mask(cfg)
    need = 2 * cfg.n_sym * cfg.n_sc
    bits = np.asarray(bits)
    if bits.size != need:
        raise ValueError(f"need {need} payload bits, got {bits.size}")
    grid = np.zeros((cfg.n_sym, cfg.n), dtype=complex)
    grid[:, mask] = map_bits_qpsk(bits).reshape(cfg.n_sym, cfg.n_sc)
    return FrameGrid(grid, mask)


def random_frame(cfg: SystemConfig, rng):
    """Random payload frame; returns (FrameGrid, bits)."""
    bits = rng.integers(0, 2, size=2 * cfg.n_sym * cfg.n_sc)
    return build_frame(bits, cfg), bits


def ofdm_modulate(grid: FrameGrid, cfg: SystemConfig):
    """CP-OFDM time-domain frame of n_sym * n_a samples.

    Per symbol: n-point inverse transform of the grid row, then the last
    n_cp samples prepended as cyclic prefix. The scaling n/sqrt(n_sc)
    makes the average sample power 1 for unit-modulus QPSK.
    """
    if grid.n_sym != cfg.n_sym or grid.n != cfg.n:
        raise ValueError(f"grid {grid.symbols.shape} does not match config ({cfg.n_sym}, {cfg.n})")
    body = np.fft.ifft(grid.symbols, axis=1) * (cfg.n / np.sqrt(cfg.n_sc))
    with_cp = np.concatenate([body[:, cfg.n - cfg.n_cp :], body], axis=1)
    return with_cp.reshape(-1)


def fmcw_generate(cfg: SystemConfig):
    """Unit-modulus chirp train of n_sym * n_a samples with all-zero gaps.

    Within each symbol: n_cp zeros, then n - n_cp chirp samples
    exp(j*pi*(b_w/t_c)*t'^2 - j*pi*b_w*t') with t' = k*t_s local to the
    chirp start, then n_cp zeros. The instantaneous frequency sweeps from
    -b_w/2 to +b_w/2 over the chirp.
    """
    k = np.arange(cfg.n_chirp)
    t = k * cfg.t_s
    phase = np.pi * cfg.chirp_slope * t * t - np.pi * cfg.b_w * t
    symbol = np.zeros(cfg.n_a, dtype=complex)
    symbol[cfg.n_cp : cfg.n] = np.exp(1j * phase)
    return np.tile(symbol, cfg.n_sym)


def superpose(ofdm, fmcw, p_s):
    """x(n) = sqrt(1 - p_s)*fmcw(n) + sqrt(p_s)*ofdm(n)."""
    ofdm = np.asarray(ofdm)
    fmcw = np.asarray(fmcw)
    if ofdm.shape != fmcw.shape:
        raise ValueError(f"length mismatch: {ofdm.shape} vs {fmcw.shape}")
    if not 0.0 <= p_s <= 1.0:
        raise ValueError(f"p_s must be in [0, 1], got {p_s}")
    return np.sqrt(1.0 - p_s) * fmcw + np.sqrt(p_s) * ofdm


def power_ratio_db(p_s):
    """OFDM-to-chirp power ratio R = 10*log10(p_s / (1 - p_s)) in dB."""
    if not 0.0 < p_s < 1.0:
        raise ValueError(f"p_s must be strictly inside (0, 1), got {p_s}")
    return 10.0 * np.log10(p_s / (1.0 - p_s))


def p_s_from_ratio_db(ratio_db):
    """Inverse of power_ratio_db."""
    r = 10.0 ** (ratio_db / 10.0)
    return r / (1.0 + r)
