"""Minimal RIFF/WAVE reader and writer (PCM16 and IEEE float32)."""

import struct

import numpy as np

from .frames import TimeSignal

WAVE_FORMAT_PCM = 1
WAVE_FORMAT_IEEE_FLOAT = 3
WAVE_FORMAT_EXTENSIBLE = 0xFFFE


class WavFormatError(ValueError):
    """Malformed or unsupported WAV data; ``offset`` is the byte position."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


def wav_read(path):
    """Read a mono or multichannel WAV file into a :class:`TimeSignal`.

    PCM16 samples are scaled by 1/32768, so full scale maps to ``[-1, 1)``.
    Multichannel data is returned as ``(frames, channels)``.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12:
        raise WavFormatError("file too short for a RIFF header", 0)
    if data[0:4] != b"RIFF":
        raise WavFormatError("missing RIFF tag", 0)
    if data[8:12] != b"WAVE":
        raise WavFormatError("missing WAVE tag", 8)

    fmt = None
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = pos + 8
        if body + size > len(data):
            raise WavFormatError(f"chunk {cid!r} overruns end of file", pos)
        if cid == b"fmt ":
            if size < 16:
                raise WavFormatError("fmt chunk too short", pos)
            tag, channels, rate, _, block_align, bits = struct.unpack_from("<HHIIHH", data, body)
            if tag == WAVE_FORMAT_EXTENSIBLE:
                if size < 40:
                    raise WavFormatError("extensible fmt chunk too short", pos)
                (tag,) = struct.unpack_from("<H", data, body + 24)
            fmt = (tag, channels, rate, block_align, bits, body)
        elif cid == b"data":
            if fmt is None:
                raise WavFormatError("data chunk before fmt chunk", pos)
            return _decode(data[body : body + size], fmt)
        pos = body + size + (size & 1)
    raise WavFormatError("no data chunk found", pos)


def _decode(raw, fmt):
    tag, channels, rate, block_align, bits, fmt_pos = fmt
    if channels < 1:
        raise WavFormatError("channel count must be positive", fmt_pos + 2)
    if tag == WAVE_FORMAT_PCM and bits == 16:
        dtype, scale, encoding = np.dtype("<i2"), 1.0 / 32768.0, "pcm16"
    elif tag == WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        dtype, scale, encoding = np.dtype("<f4"), 1.0, "float32"
    else:
        raise WavFormatError(f"unsupported codec (format tag {tag}, {bits} bits)", fmt_pos)
    if block_align != channels * dtype.itemsize:
        raise WavFormatError("block_align inconsistent with channels and bit depth", fmt_pos + 12)
    n = len(raw) // block_align
    samples = np.frombuffer(raw[: n * block_align], dtype=dtype).astype(np.float64) * scale
    if channels > 1:
        samples = samples.reshape(n, channels)
    return TimeSignal(samples, rate, encoding)


def wav_write(path, signal, subtype="float32"):
    """Write a :class:`TimeSignal` as float32 (default) or PCM16 WAV."""
    samples = np.asarray(signal.samples, dtype=np.float64)
    channels = 1 if samples.ndim == 1 else samples.shape[1]
    if subtype == "float32":
        tag, payload = WAVE_FORMAT_IEEE_FLOAT, samples.astype("<f4")
    elif subtype == "pcm16":
        q = np.clip(np.round(samples * 32768.0), -32768, 32767)
        tag, payload = WAVE_FORMAT_PCM, q.astype("<i2")
    else:
        raise ValueError(f"unknown subtype {subtype!r}")
    raw = payload.tobytes()
    width = payload.dtype.itemsize
    fmt = struct.pack(
        "<HHIIHH", tag, channels, int(signal.sample_rate),
        int(signal.sample_rate) * channels * width, channels * width, 8 * width,
    )
    with open(path, "wb") as fh:
        fh.write(b"RIFF")
        fh.write(struct.pack("<I", 4 + 8 + len(fmt) + 8 + len(raw) + (len(raw) & 1)))
        fh.write(b"WAVE")
        fh.write(b"fmt " + struct.pack("<I", len(fmt)) + fmt)
        fh.write(b"data" + struct.pack("<I", len(raw)) + raw)
        if len(raw) & 1:
            fh.write(b"\0")
