"""Conventional pilot-aided OFDM comparison system.

Slot structure: 14 symbols per slot with reference symbols at slot
positions 3, 8 and 12; each reference symbol carries pilots on half of the
active subcarriers, alternating between even and odd bins from one
reference symbol to the next. Channel estimation is least-squares at the
pilots followed by linear interpolation, first across frequency within a
reference symbol, then across time. Sensing either transforms the
interpolated channel grid directly (CE) or re-runs the correlation
detector with a decision-feedback rebuilt frame as reference (DF).
"""

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .sensing import RangeDopplerMap, _doppler_axis, fccr_rdm
from .waveform import FrameGrid, active_subcarrier_mask, map_bits_qpsk, ofdm_modulate

SLOT_LEN = 14
PILOT_SLOT_POSITIONS = (3, 8, 12)


@dataclass(frozen=True)
class DmrsLayout:
    """Pilot placement and values for one frame."""

    pilot_symbols: np.ndarray  # time indices of reference symbols
    mask: np.ndarray  # (n_sym, n) True at pilot resource elements
    values: np.ndarray  # (n_sym, n) unit-modulus pilot values, 0 elsewhere
    active_mask: np.ndarray  # (n,) active subcarriers

    @property
    def overhead(self):
        return self.mask.sum() / (self.mask.shape[0] * self.active_mask.sum())

    @property
    def data_mask(self):
        return (~self.mask) & self.active_mask[None, :]


def build_dmrs_layout(cfg: SystemConfig, rng):
    """Pilot layout plus seeded pseudo-random QPSK pilot values."""
    if cfg.n_sym % SLOT_LEN:
        raise ValueError(f"n_sym must be a multiple of {SLOT_LEN}, got {cfg.n_sym}")
    active = active_subcarrier_mask(cfg)
    pilot_syms = np.array(
        [s * SLOT_LEN + p for s in range(cfg.n_sym // SLOT_LEN) for p in PILOT_SLOT_POSITIONS]
    )
    mask = np.zeros((cfg.n_sym, cfg.n), dtype=bool)
    bins = np.arange(cfg.n)
    for i, m in enumerate(pilot_syms):
        mask[m] = active & (bins % 2 == i % 2)
    values = np.zeros((cfg.n_sym, cfg.n), dtype=complex)
    n_pilots = int(mask.sum())
    values[mask] = map_bits_qpsk(rng.integers(0, 2, 2 * n_pilots))
    return DmrsLayout(pilot_symbols=pilot_syms, mask=mask, values=values, active_mask=active)


def build_dmrs_frame(cfg: SystemConfig, seed, data_bits=None):
    """Frame with pilots and payload; returns (FrameGrid, DmrsLayout, bits).

    Pilot and payload power are equal (all unit-modulus QPSK). When
    ``data_bits`` is omitted a random payload is drawn from the same seed.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    layout = build_dmrs_layout(cfg, rng)
    n_data = int(layout.data_mask.sum())
    if data_bits is None:
        data_bits = rng.integers(0, 2, 2 * n_data)
    data_bits = np.asarray(data_bits)
    if data_bits.size != 2 * n_data:
        raise ValueError(f"need {2 * n_data} payload bits, got {data_bits.size}")
    grid = layout.values.copy()
    grid[layout.data_mask] = map_bits_qpsk(data_bits)
    return FrameGrid(grid, layout.active_mask), layout, data_bits


def rebuild_frame(layout: DmrsLayout, data_bits, cfg: SystemConfig):
    """Frame from known pilots plus (re-encoded) payload bits."""
    grid = layout.values.copy()
    grid[layout.data_mask] = map_bits_qpsk(np.asarray(data_bits))
    return FrameGrid(grid, layout.active_mask)


def extract_data_bits_hard(soft_symbols, layout: DmrsLayout):
    """Hard payload decisions from an equalized grid, in fill order."""
    s = soft_symbols[layout.data_mask]
    bits = np.empty(2 * s.size, dtype=np.int64)
    bits[0::2] = s.real < 0
    bits[1::2] = s.imag < 0
    return bits


def extract_data_llrs(llr0, llr1, layout: DmrsLayout):
    l0 = llr0[layout.data_mask]
    l1 = llr1[layout.data_mask]
    out = np.empty(2 * l0.size)
    out[0::2] = l0
    out[1::2] = l1
    return out


def ls_estimate(grid, layout: DmrsLayout):
    """Least-squares channel samples Y/b at the pilot resource elements."""
    grid = np.asarray(grid)
    if grid.shape != layout.mask.shape:
        raise ValueError(f"grid shape {grid.shape} does not match layout {layout.mask.shape}")
    if np.any(np.abs(layout.values[layout.mask]) < 1e-12):
        raise ValueError("pilot values must be non-zero")
    out = np.zeros_like(grid, dtype=complex)
    out[layout.mask] = grid[layout.mask] / layout.values[layout.mask]
    return out


def interpolate_channel(h_ls, layout: DmrsLayout, cfg: SystemConfig):
    """Fill the full grid from pilot samples by two linear interpolation passes.

    Within each reference symbol the parity gaps are filled linearly
    across frequency (edges copy the nearest pilot); across time every
    subcarrier is interpolated linearly between reference symbols, and the
    boundary segments extend their linear trend beyond the first and last
    reference symbol.
    """
    if layout.pilot_symbols.size < 2:
        raise ValueError("need at least two reference symbols to interpolate")
    h_ls = np.asarray(h_ls)
    n = cfg.n
    half = cfg.n // 2
    # spectral ordering of the active bins: negative frequencies first
    active_bins = np.flatnonzero(layout.active_mask)
    spectral = np.concatenate([active_bins[active_bins >= half], active_bins[active_bins < half]])
    pos = np.arange(spectral.size, dtype=float)

    filled = np.zeros((layout.pilot_symbols.size, spectral.size), dtype=complex)
    for i, m in enumerate(layout.pilot_symbols):
        known = layout.mask[m][spectral]
        xp = pos[known]
        vals = h_ls[m][spectral[known]]
        filled[i] = np.interp(pos, xp, vals.real) + 1j * np.interp(pos, xp, vals.imag)

    ms = layout.pilot_symbols.astype(float)
    out_active = np.empty((cfg.n_sym, spectral.size), dtype=complex)
    for m in range(cfg.n_sym):
        j = int(np.searchsorted(ms, m, side="right")) - 1
        j = min(max(j, 0), ms.size - 2)
        m1, m2 = ms[j], ms[j + 1]
        w = (m - m1) / (m2 - m1)
        out_active[m] = filled[j] + (filled[j + 1] - filled[j]) * w

    out = np.zeros((cfg.n_sym, n), dtype=complex)
    out[:, spectral] = out_active
    return out


def ce_based_sensing(h_grid, cfg: SystemConfig):
    """Range-Doppler map from a frequency-domain channel grid.

    Inverse transform along subcarriers gives the delay profile per
    symbol; the m1-point transform across symbols gives Doppler. Delay
    rows are reported over the CP bound like the correlation detector.
    """
    h_grid = np.asarray(h_grid)
    prof = np.fft.ifft(h_grid, axis=1)  # (n_sym, n) delay profiles
    big = np.fft.fft(prof, n=cfg.m1, axis=0)  # (m1, n)
    mags = np.abs(big.T[: cfg.n_cp, :])
    return RangeDopplerMap(
        magnitudes=mags,
        delay_axis=np.arange(cfg.n_cp, dtype=float),
        doppler_axis_hz=_doppler_axis(cfg),
        method="ce",
        sample_period=cfg.t_s,
        speed_per_hz=cfg.speed_per_hz,
    )


def df_based_sensing(rx, rebuilt: FrameGrid, cfg: SystemConfig):
    """Correlation detector driven by a decision-feedback rebuilt frame."""
    ref = ofdm_modulate(rebuilt, cfg)
    rdm = fccr_rdm(rx, ref, cfg)
    return RangeDopplerMap(
        magnitudes=rdm.magnitudes,
        delay_axis=rdm.delay_axis,
        doppler_axis_hz=rdm.doppler_axis_hz,
        method="df",
        sample_period=rdm.sample_period,
        speed_per_hz=rdm.speed_per_hz,
    )
