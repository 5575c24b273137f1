"""Shared numerical primitives: transforms, cyclic correlation, filtering.

Everything here is a pure function of its inputs. Transform sizes are not
restricted to powers of two (numpy's pocketfft handles arbitrary lengths),
which matters because the down-sampled chirp length generally is not one.
"""

import numpy as np
from scipy.signal import firwin


def dft(x, size=None):
    """Forward DFT with the exp(-j*2*pi*n*k/size) kernel.

    The input is zero-padded to ``size``; ``size`` must be at least
    ``len(x)``.
    """
    x = np.asarray(x)
    if size is None:
        size = len(x)
    if size <= 0:
        raise ValueError(f"transform size must be positive, got {size}")
    if size < len(x):
        raise ValueError(f"size {size} shorter than input length {len(x)}")
    if len(x) == 0:
        raise ValueError("empty input sequence")
    return np.fft.fft(x, n=size)


def idft(x, size=None):
    """Inverse DFT: exp(+j*2*pi*n*k/size) kernel with 1/size scaling."""
    x = np.asarray(x)
    if size is None:
        size = len(x)
    if size <= 0:
        raise ValueError(f"transform size must be positive, got {size}")
    if size < len(x):
        raise ValueError(f"size {size} shorter than input length {len(x)}")
    if len(x) == 0:
        raise ValueError("empty input sequence")
    return np.fft.ifft(x, n=size)


def cyclic_correlate(y, s):
    """Cyclic correlation r(n) = sum_l y(l) * conj(s(<l - n> mod N)).

    Computed via transforms as idft(dft(y) * conj(dft(s))), which equals
    the direct sum up to numerical tolerance. Both inputs must have the
    same length.
    """
    y = np.asarray(y)
    s = np.asarray(s)
    if y.shape != s.shape or y.ndim != 1:
        raise ValueError(f"length mismatch: {y.shape} vs {s.shape}")
    if len(y) == 0:
        raise ValueError("empty input sequence")
    return np.fft.ifft(np.fft.fft(y) * np.conj(np.fft.fft(s)))


def raised_cosine(t, beta, Ts, truncate=None):
    """Raised-cosine pulse g(t) = sinc(t/Ts) * cos(pi*beta*t/Ts) / (1 - (2*beta*t/Ts)^2).

    Removable singularities are handled explicitly: g(0) = 1 and
    g(+-Ts/(2*beta)) = (pi/4) * sinc(1/(2*beta)). Integer multiples of Ts
    return exactly 0 so the zero-ISI property holds bit-for-bit. When
    ``truncate`` is given, g is forced to 0 for |t| > truncate * Ts.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"roll-off must be in [0, 1], got {beta}")
    if Ts <= 0:
        raise ValueError(f"sample period must be positive, got {Ts}")
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    u = np.atleast_1d(t) / Ts

    out = np.empty_like(u)
    k = np.round(u)
    on_grid = np.abs(u - k) < 1e-9
    denom = 1.0 - (2.0 * beta * u) ** 2
    singular = np.abs(denom) < 1e-9

    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sinc(u) * np.cos(np.pi * beta * u) / denom
    out[on_grid] = 0.0
    out[on_grid & (k == 0)] = 1.0
    if beta > 0:
        out[singular & ~on_grid] = (np.pi / 4.0) * np.sinc(1.0 / (2.0 * beta))
    if truncate is not None:
        out[np.abs(u) > truncate] = 0.0
    return float(out[0]) if scalar else out


def fir_filter(x, taps):
    """Causal FIR with one sample of inherent delay.

    y(n) = sum_{l=1}^{NF} taps[l-1] * x(n - l), with x(m) = 0 for m < 0.
    The tap index starts at lag 1, so a single tap [1] yields a pure
    one-sample delay. Output length equals input length.
    """
    x = np.asarray(x)
    taps = np.asarray(taps)
    if taps.size == 0:
        raise ValueError("empty tap vector")
    if x.size == 0:
        raise ValueError("empty input sequence")
    kernel = np.concatenate([[0.0], taps])
    return np.convolve(x, kernel)[: len(x)]


def design_lowpass(cutoff_normalized, n_taps):
    """Windowed-sinc (Hamming) low-pass taps, unit DC gain.

    ``cutoff_normalized`` is in cycles/sample and must lie in (0, 0.5);
    ``n_taps`` must be odd (linear phase, type I).
    """
    if not 0.0 < cutoff_normalized < 0.5:
        raise ValueError(f"cutoff must be in (0, 0.5) cycles/sample, got {cutoff_normalized}")
    if n_taps < 1 or n_taps % 2 == 0:
        raise ValueError(f"tap count must be odd and >= 1, got {n_taps}")
    if n_taps == 1:
        return np.array([1.0])
    taps = firwin(n_taps, cutoff_normalized, window="hamming", fs=1.0)
    return taps / taps.sum()


def freq_response(taps, freqs_normalized):
    """DTFT of a tap vector at the given normalized frequencies (cycles/sample)."""
    taps = np.asarray(taps)
    f = np.atleast_1d(np.asarray(freqs_normalized, dtype=float))
    n = np.arange(len(taps))
    return np.exp(-2j * np.pi * np.outer(f, n)) @ taps
