"""Physical targets, effective-channel expansion, and channel application.

Path delays are arbitrary (not sample-aligned). Sampling the raised-cosine
pulse at a fractional delay tau = l*t_s + alpha spreads each physical path
over 2*delta + 1 integer-delay taps with weights g(k*t_s - alpha), which is
the effective channel every downstream algorithm works with. The analog
pulse-shaping chain is folded into these taps; nothing is oversampled.
"""

from dataclasses import dataclass

import numpy as np

from .config import SPEED_OF_LIGHT, SystemConfig
from .dsp import raised_cosine


@dataclass(frozen=True)
class Target:
    """One physical reflector.

    coeff is the complex reflection coefficient, range_m the one-way range
    (the echo delay is the round trip 2*range_m/c) and doppler_hz the
    Doppler shift, speed_mps/c * f_c for a radial speed.
    """

    coeff: complex
    range_m: float
    speed_mps: float
    doppler_hz: float

    @classmethod
    def kinematic(cls, coeff, range_m, speed_mps, f_c):
        return cls(coeff, range_m, speed_mps, speed_mps / SPEED_OF_LIGHT * f_c)

    @property
    def delay_s(self):
        return 2.0 * self.range_m / SPEED_OF_LIGHT


class EffectiveChannel:
    """Integer-delay tap expansion of a set of physical targets.

    Per path: complex coefficient, delay in samples, Doppler in Hz. Each
    physical target contributes 2*delta + 1 consecutive-delay paths with
    identical Doppler. The per-symbol phase factor exp(j*2*pi*n_cp*v) of
    the CP-dropped symbol model is implicit in the full-frame sample
    indexing and never stored separately.
    """

    def __init__(self, coeffs, delay_samples, dopplers_hz, sample_period):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.delay_samples = np.asarray(delay_samples, dtype=float)
        self.dopplers_hz = np.asarray(dopplers_hz, dtype=float)
        if not self.coeffs.shape == self.delay_samples.shape == self.dopplers_hz.shape:
            raise ValueError("path arrays must have identical shapes")
        if sample_period <= 0:
            raise ValueError("sample_period must be positive")
        self.sample_period = sample_period

    def __len__(self):
        return self.coeffs.size

    @property
    def delays_s(self):
        return self.delay_samples * self.sample_period

    @property
    def normalized_dopplers(self):
        return self.dopplers_hz * self.sample_period

    def integer_delays(self):
        rounded = np.round(self.delay_samples)
        if np.any(np.abs(self.delay_samples - rounded) > 1e-6):
            raise RuntimeError("effective channel has non-integer delays; expansion contract violated")
        return rounded.astype(int)


def expand_effective(targets, delta, beta, ts, n_cp=None):
    """Expand physical targets into the (2*delta+1)-per-target effective channel.

    Paths are ordered target-major with tap offset k = -delta..delta inside
    each target, coefficients h_p * g(k*ts - alpha_p). Integer-delay targets
    produce a single non-zero tap (zero-ISI property of the pulse);
    fractional delays spread energy over the cluster. When n_cp is given,
    l + delta < n_cp is enforced so the cluster stays inside the CP bound.
    """
    if not targets:
        raise ValueError("need at least one target")
    coeffs, delays, dopplers = [], [], []
    for t in targets:
        eps = t.delay_s / ts
        # cluster centered on the nearest sample, so alpha in [-ts/2, ts/2)
        l = int(np.round(eps))
        alpha = 0.0 if abs(eps - l) < 1e-9 else (eps - l) * ts
        if l < delta:
            raise ValueError(f"delay {eps:.2f} samples too small for a +-{delta} tap cluster")
        if n_cp is not None and l + delta >= n_cp:
            raise ValueError(f"delay {eps:.2f} samples exceeds the CP bound (l + delta < {n_cp})")
        for k in range(-delta, delta + 1):
            coeffs.append(t.coeff * raised_cosine(k * ts - alpha, beta, ts))
            delays.append(l + k)
            dopplers.append(t.doppler_hz)
    return EffectiveChannel(coeffs, delays, dopplers, ts)


def apply_channel(tx, eff: EffectiveChannel, sigma_n2, seed):
    """Apply the effective channel plus AWGN.

    y(n) = sum_l h_l * tx(n - eps_l) * exp(j*2*pi*f_l*n*t_s) + eta(n) with
    tx(m) = 0 for m < 0 and eta circularly-symmetric complex Gaussian of
    variance sigma_n2 drawn deterministically from ``seed`` (an int or a
    numpy Generator).
    """
    tx = np.asarray(tx)
    eps_int = eff.integer_delays()
    n = np.arange(len(tx))
    y = np.zeros(len(tx), dtype=complex)
    ts = eff.sample_period
    for h, eps, f_d in zip(eff.coeffs, eps_int, eff.dopplers_hz):
        if h == 0:
            continue
        shifted = np.zeros(len(tx), dtype=complex)
        if eps < len(tx):
            shifted[eps:] = tx[: len(tx) - eps]
        if f_d != 0.0:
            shifted = shifted * np.exp(2j * np.pi * f_d * ts * n)
        y += h * shifted
    if sigma_n2 > 0:
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        noise = rng.standard_normal(len(tx)) + 1j * rng.standard_normal(len(tx))
        y += np.sqrt(sigma_n2 / 2.0) * noise
    return y


def snr_to_sigma(snr_db):
    """Noise variance for a given SNR in dB under unit total transmit power."""
    return 10.0 ** (-snr_db / 10.0)


def draw_scenario(target_specs, cfg: SystemConfig, seed):
    """Draw random targets from the configured intervals.

    Each spec provides a fixed reflection power in dB, a range interval in
    meters and a speed interval in m/s; ranges and speeds are uniform over
    their intervals and the reflection phase is uniform over [0, 2*pi).
    Reproducible from ``seed`` (an int or a numpy Generator).
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    targets = []
    for spec in target_specs:
        r_lo, r_hi = spec.range_m
        v_lo, v_hi = spec.speed_mps
        if r_hi < r_lo or v_hi < v_lo:
            raise ValueError(f"empty interval in target spec {spec}")
        range_m = rng.uniform(r_lo, r_hi)
        speed = rng.uniform(v_lo, v_hi)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        amp = 10.0 ** (spec.power_db / 20.0)
        targets.append(Target.kinematic(amp * np.exp(1j * phase), range_m, speed, cfg.f_c))
    return targets
