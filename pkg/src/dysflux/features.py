"""Log-mel spectrogram front end: 400-sample FFT, 160-sample hop, 16 kHz.

Frames are produced with center (reflect) padding, so a waveform of N samples
yields floor(N/160) + 1 frames. Power below 1e-10 is clamped before log10.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .errors import MalformedManifest, TooShort, WrongSampleRate

SAMPLE_RATE = 16_000
N_FFT = 400
HOP_LENGTH = 160
N_MELS = 80
FMIN = 0.0
FMAX = 8_000.0
POWER_FLOOR = 1e-10

_LMEL_MAGIC = b"LMEL"


def _hz_to_mel(hz: np.ndarray) -> np.ndarray:
    # Slaney scale: linear below 1 kHz, logarithmic above
    hz = np.asarray(hz, dtype=np.float64)
    mel = 3.0 * hz / 200.0
    log_region = hz >= 1000.0
    step = np.log(6.4) / 27.0
    mel = np.where(log_region, 15.0 + np.log(np.maximum(hz, 1e-12) / 1000.0) / step, mel)
    return mel


def _mel_to_hz(mel: np.ndarray) -> np.ndarray:
    mel = np.asarray(mel, dtype=np.float64)
    hz = 200.0 * mel / 3.0
    step = np.log(6.4) / 27.0
    return np.where(mel >= 15.0, 1000.0 * np.exp(step * (mel - 15.0)), hz)


def mel_filterbank(
    n_mels: int = N_MELS,
    n_fft: int = N_FFT,
    sample_rate: int = SAMPLE_RATE,
    fmin: float = FMIN,
    fmax: float = FMAX,
) -> np.ndarray:
    """Triangular, area-normalized filters; shape (n_mels, n_fft//2 + 1)."""
    fft_freqs = np.fft.rfftfreq(n_fft, d=1.0 / sample_rate)
    mel_points = np.linspace(_hz_to_mel(fmin), _hz_to_mel(fmax), n_mels + 2)
    hz_points = _mel_to_hz(mel_points)
    fb = np.zeros((n_mels, fft_freqs.shape[0]))
    for k in range(n_mels):
        lo, center, hi = hz_points[k : k + 3]
        up = (fft_freqs - lo) / max(center - lo, 1e-12)
        down = (hi - fft_freqs) / max(hi - center, 1e-12)
        fb[k] = np.maximum(0.0, np.minimum(up, down))
        fb[k] *= 2.0 / (hi - lo)
    return fb


def band_center_hz(band: int) -> float:
    """Center frequency of one mel band under the default layout."""
    mel_points = np.linspace(_hz_to_mel(FMIN), _hz_to_mel(FMAX), N_MELS + 2)
    return float(_mel_to_hz(mel_points[band + 1]))


def log_mel(samples: np.ndarray) -> np.ndarray:
    """Log-mel frames, shape (floor(N/160) + 1, 80)."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 1:
        raise WrongSampleRate("expected a mono waveform")
    if not np.all(np.isfinite(samples)):
        raise ValueError("waveform contains non-finite samples")
    if samples.shape[0] < N_FFT:
        raise TooShort(f"need at least {N_FFT} samples, got {samples.shape[0]}")
    pad = N_FFT // 2
    padded = np.pad(samples, pad, mode="reflect")
    n_frames = samples.shape[0] // HOP_LENGTH + 1
    frames = np.lib.stride_tricks.sliding_window_view(padded, N_FFT)[::HOP_LENGTH]
    frames = frames[:n_frames]
    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(N_FFT) / N_FFT)
    spectrum = np.fft.rfft(frames * window, axis=1)
    power = np.abs(spectrum) ** 2
    mel = power @ mel_filterbank().T
    return np.log10(np.maximum(mel, POWER_FLOOR))


def read_wav(path) -> np.ndarray:
    """Mono 16 kHz waveform in [-1, 1] from a 16-bit PCM or float32 WAV."""
    rate, data = wavfile.read(path)
    if rate != SAMPLE_RATE:
        raise WrongSampleRate(f"{path}: {rate} Hz, expected {SAMPLE_RATE}")
    if data.ndim != 1:
        raise WrongSampleRate(f"{path}: expected mono, got {data.ndim} channels")
    if data.dtype == np.int16:
        return data.astype(np.float64) / 32768.0
    if data.dtype in (np.float32, np.float64):
        return data.astype(np.float64)
    raise WrongSampleRate(f"{path}: unsupported sample format {data.dtype}")


def write_wav(path, samples: np.ndarray) -> None:
    clipped = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    wavfile.write(path, SAMPLE_RATE, (clipped * 32767.0).astype(np.int16))


def write_lmel(path, frames: np.ndarray) -> None:
    """Raw little-endian float32 matrix with a (magic, frames, bands) header."""
    frames = np.asarray(frames, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(_LMEL_MAGIC)
        fh.write(struct.pack("<II", frames.shape[0], frames.shape[1]))
        fh.write(frames.tobytes())


def read_lmel(path) -> np.ndarray:
    path = Path(path)
    blob = path.read_bytes()
    if blob[:4] != _LMEL_MAGIC or len(blob) < 12:
        raise MalformedManifest(f"{path}: not a log-mel feature file")
    n_frames, n_bands = struct.unpack("<II", blob[4:12])
    data = np.frombuffer(blob[12:], dtype="<f4")
    if data.shape[0] != n_frames * n_bands:
        raise MalformedManifest(f"{path}: truncated feature data")
    return data.reshape(n_frames, n_bands).astype(np.float64)
