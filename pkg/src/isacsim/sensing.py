"""Range-Doppler map construction and target extraction.

Two independent detectors build the map from a received frame:

* correlation detector (``fccr_rdm``): per symbol, drop the CP and take the
  cyclic correlation with the known reference train, then transform across
  symbols for Doppler. Delay rows are integer sample lags.
* mixing detector (``dmd_rdm``): conjugate-mix the whole frame with the
  unit chirp train, low-pass, decimate, then a 2-D transform. Delay rows
  map to beat frequency, so one row generally covers more than one sample
  of delay.

Both produce magnitude grids with a wrapped two-sided Doppler axis whose
bin spacing is 1/(m1 * t_sym).
"""

from dataclasses import dataclass

import numpy as np

from .config import SPEED_OF_LIGHT, SystemConfig
from .dsp import design_lowpass, fir_filter
from .waveform import fmcw_generate


class DetectionExhausted(RuntimeError):
    """Raised when more peaks are requested than the map can still provide."""


@dataclass(frozen=True)
class RangeDopplerMap:
    magnitudes: np.ndarray  # (n_delay, m1), nonnegative
    delay_axis: np.ndarray  # normalized delay per row, in samples
    doppler_axis_hz: np.ndarray  # wrapped two-sided, Hz per column
    method: str
    sample_period: float
    speed_per_hz: float

    def __post_init__(self):
        if self.magnitudes.shape != (self.delay_axis.size, self.doppler_axis_hz.size):
            raise ValueError("axis lengths do not match grid dimensions")
        if np.any(self.magnitudes < 0):
            raise ValueError("magnitudes must be nonnegative")


@dataclass(frozen=True)
class Detection:
    delay_bin: int
    doppler_bin: int
    amplitude: float
    delay_samples: float
    doppler_hz: float
    range_m: float
    speed_mps: float


@dataclass(frozen=True)
class PseudoTargetCluster:
    """The 2*delta + 1 map cells around one detection, sharing its Doppler bin."""

    delay_bins: np.ndarray
    doppler_bin: int
    amplitudes: np.ndarray
    delay_samples: np.ndarray
    doppler_hz: float


def _doppler_axis(cfg: SystemConfig):
    k = np.arange(cfg.m1)
    signed = np.where(k < (cfg.m1 + 1) // 2, k, k - cfg.m1)
    return signed / (cfg.m1 * cfg.t_sym)


def signed_doppler_bin(doppler_bin, m1):
    """Unwrap a Doppler column index to a signed bin in [-m1/2, m1/2)."""
    half = m1 // 2
    return (doppler_bin + half) % m1 - half


def fccr_rdm(rx, ref, cfg: SystemConfig):
    """Cyclic-correlation range-Doppler map.

    Per symbol m the CP is dropped from both the received frame and the
    reference train, and r(n, m) = sum_l y_m(l) * conj(s_m(<l - n>_N)).
    The map is |R(n, k)| with R the m1-point transform of r(n, m) across
    symbols (exp(-j*2*pi*m*k/m1) kernel). Delay rows are reported over
    [0, n_cp) only: the CP bound makes larger delays out of contract.
    """
    rx = np.asarray(rx)
    ref = np.asarray(ref)
    if rx.size != cfg.frame_len or ref.size != cfg.frame_len:
        raise ValueError(f"expected {cfg.frame_len} samples, got rx {rx.size}, ref {ref.size}")
    y = rx.reshape(cfg.n_sym, cfg.n_a)[:, cfg.n_cp :]
    s = ref.reshape(cfg.n_sym, cfg.n_a)[:, cfg.n_cp :]
    r = np.fft.ifft(np.fft.fft(y, axis=1) * np.conj(np.fft.fft(s, axis=1)), axis=1)
    big = np.fft.fft(r, n=cfg.m1, axis=0)  # (m1, n)
    mags = np.abs(big.T[: cfg.n_cp, :])
    return RangeDopplerMap(
        magnitudes=mags,
        delay_axis=np.arange(cfg.n_cp, dtype=float),
        doppler_axis_hz=_doppler_axis(cfg),
        method="fccr",
        sample_period=cfg.t_s,
        speed_per_hz=cfg.speed_per_hz,
    )


def dmd_delay_per_row(cfg: SystemConfig):
    """Delay covered by one beat-frequency row, in samples.

    Row spacing is 1/(n_d * decim * t_s) Hz of beat frequency and the beat
    of a delay tau is (b_w / t_c) * tau, so one row spans
    (n - n_cp) * n * delta_f / (b_w * (n - 2*n_cp)) samples of delay.
    """
    return (cfg.n_chirp * cfg.n * cfg.delta_f) / (cfg.b_w * (cfg.n - 2 * cfg.n_cp))


def dmd_rdm(rx, cfg: SystemConfig):
    """Mixing/down-sampling range-Doppler map.

    The frame is conjugate-mixed with the unit chirp train, low-pass
    filtered, decimated by ``decim``, trimmed to the n_d mid-chirp samples
    of each symbol, then transformed: an n_d-point column transform over
    fast time and an m1-point row transform with the exp(+j*2*pi*m*k/m1)
    kernel over symbols.
    """
    rx = np.asarray(rx)
    if rx.size != cfg.frame_len:
        raise ValueError(f"expected {cfg.frame_len} samples, got {rx.size}")
    if cfg.n_a % cfg.decim or cfg.n_cp % cfg.decim or (cfg.n - 2 * cfg.n_cp) % cfg.decim:
        raise ValueError(f"decim {cfg.decim} must divide n_a, n_cp and n - 2*n_cp")
    s_ref = fmcw_generate(cfg)
    mixed = s_ref * np.conj(rx)
    taps = design_lowpass(cfg.lowpass_cutoff, cfg.n_f)
    filtered = fir_filter(mixed, taps)
    dec = filtered[:: cfg.decim].reshape(cfg.n_sym, cfg.n_t)
    z = dec[:, cfg.n_b : cfg.n_b + cfg.n_d]  # (n_sym, n_d)
    u = np.fft.fft(z, axis=1)  # beat-frequency rows
    big = np.fft.ifft(u, n=cfg.m1, axis=0) * cfg.m1  # (m1, n_d)
    mags = np.abs(big.T)
    delay_axis = np.arange(cfg.n_d) * dmd_delay_per_row(cfg)
    return RangeDopplerMap(
        magnitudes=mags,
        delay_axis=delay_axis,
        doppler_axis_hz=_doppler_axis(cfg),
        method="dmd",
        sample_period=cfg.t_s,
        speed_per_hz=cfg.speed_per_hz,
    )


def detect_peaks(rdm: RangeDopplerMap, num_targets, guard=(5, 3)):
    """Successive-maximum peak extraction with a guard exclusion zone.

    Takes the global argmax, records it, zeroes +-guard cells around it
    (Doppler wraps circularly, delay does not) and repeats. Detections
    come out ordered by amplitude descending; ties break toward the lowest
    (delay, Doppler) index. Raises DetectionExhausted once only zeroed
    cells remain.
    """
    if num_targets < 1:
        raise ValueError("num_targets must be >= 1")
    g_delay, g_dop = guard
    work = rdm.magnitudes.copy()
    n_rows, n_cols = work.shape
    out = []
    for _ in range(num_targets):
        idx = int(np.argmax(work))
        l, k = divmod(idx, n_cols)
        amp = work[l, k]
        if amp <= 0.0:
            raise DetectionExhausted(f"no usable peak left after {len(out)} detections")
        d_samples = float(rdm.delay_axis[l])
        f_d = float(rdm.doppler_axis_hz[k])
        out.append(
            Detection(
                delay_bin=l,
                doppler_bin=k,
                amplitude=float(amp),
                delay_samples=d_samples,
                doppler_hz=f_d,
                range_m=SPEED_OF_LIGHT * d_samples * rdm.sample_period / 2.0,
                speed_mps=f_d * rdm.speed_per_hz,
            )
        )
        rows = slice(max(0, l - g_delay), min(n_rows, l + g_delay + 1))
        cols = np.arange(k - g_dop, k + g_dop + 1) % n_cols
        work[rows, cols] = 0.0
    return out


def cluster_pseudo_targets(dets, rdm: RangeDopplerMap, delta):
    """Read the 2*delta + 1 pseudo-target cells around each detection.

    Entries share the detection's Doppler bin and use consecutive delay
    bins l - delta .. l + delta; amplitudes come straight from the map.
    """
    clusters = []
    n_rows = rdm.magnitudes.shape[0]
    for det in dets:
        lo, hi = det.delay_bin - delta, det.delay_bin + delta
        if lo < 0 or hi >= n_rows:
            raise ValueError(f"cluster around delay bin {det.delay_bin} exceeds the delay axis")
        bins = np.arange(lo, hi + 1)
        clusters.append(
            PseudoTargetCluster(
                delay_bins=bins,
                doppler_bin=det.doppler_bin,
                amplitudes=rdm.magnitudes[bins, det.doppler_bin].copy(),
                delay_samples=rdm.delay_axis[bins].copy(),
                doppler_hz=det.doppler_hz,
            )
        )
    return clusters


def bins_to_physical(delay_bin, doppler_bin, cfg: SystemConfig):
    """Convert (delay, Doppler) bins to physical (range m, speed m/s).

    ``delay_bin`` is in samples (integer rows for the correlation map);
    the Doppler column index is unwrapped to a signed bin before scaling.
    """
    range_m = SPEED_OF_LIGHT * delay_bin * cfg.t_s / 2.0
    k_signed = signed_doppler_bin(doppler_bin, cfg.m1)
    f_d = k_signed / (cfg.m1 * cfg.t_sym)
    return range_m, f_d * cfg.speed_per_hz


def save_rdm_csv(rdm: RangeDopplerMap, path):
    """Write the map as CSV: header = Doppler axis in Hz, first column = delay bins."""
    with open(path, "w", encoding="ascii") as fh:
        header = ",".join(["delay_samples"] + [f"{f:.9g}" for f in rdm.doppler_axis_hz])
        fh.write(header + "\n")
        for i in range(rdm.delay_axis.size):
            row = ",".join([f"{rdm.delay_axis[i]:.9g}"] + [f"{v:.9g}" for v in rdm.magnitudes[i]])
            fh.write(row + "\n")


def load_rdm_csv(path):
    """Read a map written by save_rdm_csv; returns (delay_axis, doppler_axis_hz, magnitudes)."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        doppler = np.array([float(v) for v in header[1:]])
        rows = [line.strip().split(",") for line in fh if line.strip()]
    delay = np.array([float(r[0]) for r in rows])
    mags = np.array([[float(v) for v in r[1:]] for r in rows])
    return delay, doppler, mags
