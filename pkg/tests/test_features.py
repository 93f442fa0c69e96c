import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dysflux.errors import MalformedManifest, TooShort, WrongSampleRate
from dysflux.features import (
    HOP_LENGTH,
    N_FFT,
    N_MELS,
    SAMPLE_RATE,
    band_center_hz,
    log_mel,
    mel_filterbank,
    read_lmel,
    read_wav,
    write_lmel,
    write_wav,
)


def test_one_second_yields_101_frames():
    frames = log_mel(np.zeros(16_000))
    assert frames.shape == (101, 80)


def test_zero_waveform_hits_clamp_floor():
    frames = log_mel(np.zeros(16_000))
    assert np.all(frames == -10.0)


def test_too_short_and_bad_shape():
    with pytest.raises(TooShort):
        log_mel(np.zeros(399))
    with pytest.raises(WrongSampleRate):
        log_mel(np.zeros((2, 1000)))
    with pytest.raises(ValueError):
        log_mel(np.full(1000, np.nan))


def _naive_dft_power(frame):
    # independent spectrum: explicit cosine/sine correlation, no FFT
    n = frame.shape[0]
    k = np.arange(n // 2 + 1)[:, None]
    t = np.arange(n)[None, :]
    angles = 2.0 * np.pi * k * t / n
    re = (frame[None, :] * np.cos(angles)).sum(axis=1)
    im = (frame[None, :] * np.sin(angles)).sum(axis=1)
    return re**2 + im**2


def test_440hz_tone_peaks_in_correct_band():
    t = np.arange(16_000) / SAMPLE_RATE
    tone = np.sin(2 * np.pi * 440.0 * t)
    frames = log_mel(tone)

    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(N_FFT) / N_FFT)
    mid = 50 * HOP_LENGTH  # interior frame, away from padding
    naive_power = _naive_dft_power(tone[mid - N_FFT // 2 : mid + N_FFT // 2] * window)
    expected_band = int(np.argmax(mel_filterbank() @ naive_power))

    interior = frames[10:-10]
    assert np.all(np.argmax(interior, axis=1) == expected_band)
    assert abs(band_center_hz(expected_band) - 440.0) < 80.0


def test_scaling_by_ten_adds_two_in_log10():
    rng = np.random.default_rng(0)
    wave = rng.standard_normal(8_000) * 0.05
    lo = log_mel(wave)
    hi = log_mel(wave * 10.0)
    unclamped = lo > -9.0
    assert np.allclose(hi[unclamped] - lo[unclamped], 2.0, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=N_FFT, max_value=1_000_000))
def test_frame_count_formula(n):
    frames = log_mel(np.zeros(n))
    assert frames.shape[0] == n // HOP_LENGTH + 1


def test_deterministic_output():
    rng = np.random.default_rng(5)
    wave = rng.standard_normal(12_345) * 0.1
    assert np.array_equal(log_mel(wave), log_mel(wave.copy()))


def test_filterbank_shape_and_coverage():
    fb = mel_filterbank()
    assert fb.shape == (N_MELS, N_FFT // 2 + 1)
    assert np.all(fb >= 0)
    assert np.all(fb.sum(axis=1) > 0)  # every band catches some bins


def test_wav_round_trip(tmp_path):
    path = tmp_path / "tone.wav"
    t = np.arange(8_000) / SAMPLE_RATE
    wave = 0.5 * np.sin(2 * np.pi * 220.0 * t)
    write_wav(path, wave)
    back = read_wav(path)
    assert back.shape == wave.shape
    assert np.max(np.abs(back - wave)) < 1e-3  # 16-bit quantization


def test_read_wav_rejects_wrong_rate(tmp_path):
    from scipy.io import wavfile

    path = tmp_path / "slow.wav"
    wavfile.write(path, 8_000, np.zeros(1000, dtype=np.int16))
    with pytest.raises(WrongSampleRate):
        read_wav(path)


def test_read_wav_rejects_stereo(tmp_path):
    from scipy.io import wavfile

    path = tmp_path / "stereo.wav"
    wavfile.write(path, SAMPLE_RATE, np.zeros((1000, 2), dtype=np.int16))
    with pytest.raises(WrongSampleRate):
        read_wav(path)


def test_read_wav_float32(tmp_path):
    from scipy.io import wavfile

    path = tmp_path / "f32.wav"
    wavfile.write(path, SAMPLE_RATE, np.linspace(-0.5, 0.5, 1000).astype(np.float32))
    wave = read_wav(path)
    assert wave.dtype == np.float64
    assert wave.shape == (1000,)


def test_lmel_file_round_trip(tmp_path):
    path = tmp_path / "feat.lmel"
    mat = np.linspace(-10, 3, 240).reshape(3, 80)
    write_lmel(path, mat)
    back = read_lmel(path)
    assert back.shape == (3, 80)
    assert np.allclose(back, mat, atol=1e-6)
    assert path.read_bytes()[:4] == b"LMEL"


def test_lmel_rejects_garbage(tmp_path):
    path = tmp_path / "bad.lmel"
    path.write_bytes(b"nope")
    with pytest.raises(MalformedManifest):
        read_lmel(path)
