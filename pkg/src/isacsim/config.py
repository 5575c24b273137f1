"""System configuration: waveform, channel and sensing scalar parameters.

All timing quantities derive from (n, n_cp, delta_f): the sample period is
t_s = 1/(n * delta_f), one symbol spans n_a = n + n_cp samples, and the
chirp occupies the t_c = t_u - t_cp middle section of each symbol between
two all-zero gaps of n_cp samples each.
"""

import math
from dataclasses import dataclass, replace

SPEED_OF_LIGHT = 3.0e8  # m/s, consistent with the 2.44 m range cell at 61.44 MHz


@dataclass(frozen=True)
class SystemConfig:
    """Scalar parameters of the combined chirp + OFDM link.

    Attributes
    ----------
    n : int
        OFDM transform size (total subcarriers).
    n_cp : int
        Cyclic-prefix length in samples; also the chirp gap length.
    n_sc : int
        Active data subcarriers, centered on DC with the DC bin nulled.
    delta_f : float
        Subcarrier spacing in Hz.
    n_sym : int
        Number of OFDM/chirp symbols per frame.
    m1 : int
        Doppler transform size (>= n_sym). None selects 4*n_sym rounded
        up to an even number.
    b_w : float
        Chirp sweep bandwidth in Hz.
    f_c : float
        Carrier frequency in Hz.
    p_s : float
        Fraction of unit transmit power given to the OFDM component.
    beta : float
        Raised-cosine roll-off of the composite pulse.
    delta : int
        Tap truncation half-width of the pulse (effective paths per
        target = 2*delta + 1).
    decim : int
        Down-sampling factor for the mixing-based detector. None selects
        the largest divisor of gcd(n_a, n_cp) that keeps the maximum
        beat frequency below half the decimated rate.
    n_f : int
        Low-pass filter tap count for the mixing-based detector.
    sigma_n2 : float
        AWGN variance relative to unit total transmit power.
    bistatic_speed : bool
        Doppler-to-speed conversion: True uses c/(2*f_c) per Doppler Hz
        (round-trip convention, matches the speed resolution cell), False
        uses c/f_c.
    equalizer : str
        Single-tap equalizer for data demodulation: "zf" or "mmse".
    """

    n: int = 512
    n_cp: int = 36
    n_sc: int = 389
    delta_f: float = 15e3
    n_sym: int = 28
    m1: int | None = None
    b_w: float = 6.25e6
    f_c: float = 23.6e9
    p_s: float = 0.8930
    beta: float = 0.25
    delta: int = 2
    decim: int | None = None
    n_f: int = 63
    sigma_n2: float = 0.0
    bistatic_speed: bool = True
    equalizer: str = "zf"

    def __post_init__(self):
        if self.n <= 0 or self.n_cp < 0 or self.n_sym <= 0:
            raise ValueError("n, n_cp, n_sym must be positive")
        if not 0 < self.n_sc <= self.n:
            raise ValueError(f"n_sc must be in (0, n], got {self.n_sc}")
        if self.n_cp >= self.n // 2:
            raise ValueError(f"n_cp must be below n/2 for a positive chirp duration, got {self.n_cp}")
        if self.delta_f <= 0 or self.b_w <= 0 or self.f_c <= 0:
            raise ValueError("delta_f, b_w, f_c must be positive")
        if not 0.0 <= self.p_s <= 1.0:
            raise ValueError(f"p_s must be in [0, 1], got {self.p_s}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must be in [0, 1], got {self.beta}")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.m1 is None:
            m1 = 4 * self.n_sym
            object.__setattr__(self, "m1", m1 + m1 % 2)
        if self.m1 < self.n_sym:
            raise ValueError(f"m1 must be >= n_sym, got {self.m1} < {self.n_sym}")
        if self.decim is None:
            object.__setattr__(self, "decim", self._auto_decim())
        if self.n_a % self.decim or self.n_cp % self.decim:
            raise ValueError(f"decim {self.decim} must divide n_a {self.n_a} and n_cp {self.n_cp}")
        if self.sigma_n2 < 0:
            raise ValueError("sigma_n2 must be >= 0")
        if self.n_f < 1:
            raise ValueError("n_f must be >= 1")
        if self.equalizer not in ("zf", "mmse"):
            raise ValueError(f"equalizer must be 'zf' or 'mmse', got {self.equalizer!r}")

    # -------------------- derived timing --------------------
    @property
    def n_a(self):
        return self.n + self.n_cp

    @property
    def t_s(self):
        return 1.0 / (self.n * self.delta_f)

    @property
    def sample_rate(self):
        return self.n * self.delta_f

    @property
    def t_u(self):
        """Useful OFDM symbol duration T = 1/delta_f."""
        return self.n * self.t_s

    @property
    def t_cp(self):
        return self.n_cp * self.t_s

    @property
    def t_sym(self):
        return self.t_u + self.t_cp

    @property
    def t_c(self):
        """Active chirp duration T_c = T - T_cp."""
        return self.t_u - self.t_cp

    @property
    def n_chirp(self):
        """Non-zero chirp samples per symbol."""
        return self.n - self.n_cp

    @property
    def frame_len(self):
        return self.n_sym * self.n_a

    @property
    def chirp_slope(self):
        return self.b_w / self.t_c

    # -------------------- down-sampled detector geometry --------------------
    @property
    def n_t(self):
        return self.n_a // self.decim

    @property
    def n_b(self):
        return self.n_cp // self.decim

    @property
    def n_d(self):
        if (self.n - 2 * self.n_cp) % self.decim:
            raise ValueError("decim does not divide n - 2*n_cp")
        return (self.n - 2 * self.n_cp) // self.decim

    @property
    def beat_freq_max(self):
        """Largest beat frequency for delays within the CP bound."""
        return self.chirp_slope * self.n_cp * self.t_s

    @property
    def lowpass_cutoff(self):
        """Mixer low-pass cutoff in cycles/sample at the full rate."""
        return min(0.45 / self.decim, 1.2 * self.beat_freq_max * self.t_s)

    def _auto_decim(self):
        g = math.gcd(self.n_a, self.n_cp) if self.n_cp else self.n_a
        slope = self.b_w / ((self.n - self.n_cp) / (self.n * self.delta_f))
        f_bt_max = slope * self.n_cp / (self.n * self.delta_f)
        best = 1
        for d in range(1, g + 1):
            if g % d == 0 and self.n * self.delta_f / d >= 2.0 * f_bt_max:
                best = max(best, d)
        return best

    # -------------------- physical conversions --------------------
    @property
    def speed_per_hz(self):
        """Speed per Doppler Hz under the configured conversion convention."""
        factor = 2.0 if self.bistatic_speed else 1.0
        return SPEED_OF_LIGHT / (factor * self.f_c)

    @property
    def range_resolution(self):
        """Range per integer delay cell, c*t_s/2."""
        return SPEED_OF_LIGHT * self.t_s / 2.0

    @property
    def speed_resolution(self):
        """Speed per Doppler cell, speed_per_hz / (m1 * t_sym)."""
        return self.speed_per_hz / (self.m1 * self.t_sym)

    @property
    def doppler_bin_hz(self):
        return 1.0 / (self.m1 * self.t_sym)

    def with_overrides(self, **kwargs):
        return replace(self, **kwargs)


def desk_config(**overrides):
    """Small configuration used throughout the test suite.

    Same subcarrier spacing and symbol timing as the full-scale setup but
    with an 8x smaller transform, so frames are cheap to simulate.
    """
    cfg = SystemConfig()
    return cfg.with_overrides(**overrides) if overrides else cfg


def fullscale_config(**overrides):
    """Full-scale link parameters (4096 subcarriers, 50 MHz chirp)."""
    cfg = SystemConfig(
        n=4096,
        n_cp=288,
        n_sc=3112,
        delta_f=15e3,
        n_sym=140,
        m1=1400,
        b_w=50e6,
        f_c=23.6e9,
        p_s=0.8930,
    )
    return cfg.with_overrides(**overrides) if overrides else cfg
