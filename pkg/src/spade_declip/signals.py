"""Seeded synthetic test corpus.

Signals are sums of sinusoids: harmonic notes with a short attack and an
exponential decay, several overlapping voices, peak-normalised.
"""

import numpy as np


def peak_normalize(x):
    x = np.asarray(x, dtype=np.float64)
    peak = np.max(np.abs(x))
    if peak == 0:
        raise ValueError("cannot peak-normalise a silent signal")
    return x / peak


def multisine(duration, sample_rate=16000, n_tones=5, rng=None):
    """Stationary sum of ``n_tones`` sinusoids with random frequency, amplitude and phase."""
    rng = np.random.default_rng(rng)
    t = np.arange(int(round(duration * sample_rate))) / sample_rate
    x = np.zeros_like(t)
    for _ in range(n_tones):
        f = rng.uniform(80.0, 2000.0)
        x += rng.uniform(0.2, 1.0) * np.sin(2 * np.pi * f * t + rng.uniform(0, 2 * np.pi))
    return peak_normalize(x)


def note_sequence(duration, sample_rate=16000, voices=2, rng=None, max_partials=6):
    """Several voices of consecutive harmonic notes.

    Each note has a fundamental in 100-700 Hz, 3 to ``max_partials`` partials
    below 7 kHz with random amplitude roll-off and phase, a 5 ms attack and a
    random decay.
    """
    rng = np.random.default_rng(rng)
    n = int(round(duration * sample_rate))
    x = np.zeros(n)
    for _ in range(voices):
        onset = 0.0
        while onset < duration:
            length = rng.uniform(0.15, 0.8)
            f0 = rng.uniform(100.0, 700.0)
            n_partials = int(rng.integers(3, max_partials + 1))
            amp = rng.uniform(0.3, 1.0)
            i0 = int(onset * sample_rate)
            i1 = min(n, int((onset + length + 0.3) * sample_rate))
            t = np.arange(i1 - i0) / sample_rate
            env = (1 - np.exp(-t / 0.005)) * np.exp(-t / rng.uniform(0.1, 0.6))
            for h in range(1, n_partials + 1):
                if f0 * h > 7000.0:
                    break
                rolloff = h ** -rng.uniform(0.5, 1.5)
                x[i0:i1] += amp * env * rolloff * np.sin(2 * np.pi * f0 * h * t + rng.uniform(0, 2 * np.pi))
            onset += length
    return peak_normalize(x)


def synthetic_corpus(n_signals=5, sample_rate=16000, seed=0, min_dur=3.0, max_dur=5.0):
    """``n_signals`` peak-normalised note sequences of ``min_dur``-``max_dur`` seconds."""
    rng = np.random.default_rng(seed)
    return [
        note_sequence(rng.uniform(min_dur, max_dur), sample_rate, rng=rng)
        for _ in range(n_signals)
    ]
