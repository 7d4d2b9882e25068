#!/usr/bin/env python3
"""Straight-line reference for the mean-MFCC vector.

Reads a mono float-32 WAV and prints the 40 per-coefficient frame means.
Deliberately shares no code with the C++ pipeline: spectra come from an
explicit DFT matrix, the filterbank from a direct loop over bins.

    python3 mfcc_oracle.py clip.wav > golden.txt
"""
import struct
import sys

import numpy as np

FRAME = 2048
HOP = 512
N_MELS = 64
N_MFCC = 40
LOG_FLOOR = 1e-10


def read_float_wav(path):
    with open(path, "rb") as fh:
        data = fh.read()
    assert data[0:4] == b"RIFF" and data[8:12] == b"WAVE"
    pos = 12
    rate = None
    while pos + 8 <= len(data):
        tag = data[pos:pos + 4]
        size = struct.unpack("<I", data[pos + 4:pos + 8])[0]
        body = data[pos + 8:pos + 8 + size]
        if tag == b"fmt ":
            fmt, channels, rate = struct.unpack("<HHI", body[:8])
            bits = struct.unpack("<H", body[14:16])[0]
            assert fmt == 3 and channels == 1 and bits == 32
        elif tag == b"data":
            return np.frombuffer(body, dtype="<f4").astype(np.float64), rate
        pos += 8 + size + (size & 1)
    raise ValueError("no data chunk")


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + f / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (m / 2595.0) - 1.0)


def main():
    samples, rate = read_float_wav(sys.argv[1])
    n = len(samples)

    padded = np.pad(samples, FRAME // 2, mode="reflect")
    n_frames = n // HOP + 1

    k = np.arange(FRAME)
    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * k / FRAME)

    n_bins = FRAME // 2 + 1
    bins = np.arange(n_bins)
    dft = np.exp(-2j * np.pi * np.outer(bins, k) / FRAME)

    edges = mel_to_hz(np.linspace(hz_to_mel(0.0), hz_to_mel(rate / 2.0), N_MELS + 2))
    bank = np.zeros((N_MELS, n_bins))
    for i in range(N_MELS):
        lo, mid, hi = edges[i], edges[i + 1], edges[i + 2]
        for b in range(n_bins):
            f = b * rate / FRAME
            if lo < f <= mid:
                bank[i, b] = (f - lo) / (mid - lo)
            elif mid < f < hi:
                bank[i, b] = (hi - f) / (hi - mid)
        bank[i] /= bank[i].max()

    dct = np.zeros((N_MFCC, N_MELS))
    for c in range(N_MFCC):
        scale = np.sqrt((1.0 if c == 0 else 2.0) / N_MELS)
        for m in range(N_MELS):
            dct[c, m] = scale * np.cos(np.pi * c * (2 * m + 1) / (2 * N_MELS))

    total = np.zeros(N_MFCC)
    for f in range(n_frames):
        frame = padded[f * HOP:f * HOP + FRAME] * window
        power = np.abs(dft @ frame) ** 2
        logmel = np.log(np.maximum(bank @ power, LOG_FLOOR))
        total += dct @ logmel
    for v in total / n_frames:
        print(repr(float(v)))


if __name__ == "__main__":
    main()
