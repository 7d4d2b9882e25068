import math

import numpy as np
import pytest

import voxscreen as vx


def test_synth_and_mfcc_shapes():
    clip = vx.synth_clip(0, 7, 1.0)
    assert len(clip) == vx.SAMPLE_RATE
    m = vx.mfcc(clip)
    assert m.shape == (32, 40)
    mean = vx.mfcc_mean(clip)
    assert mean.shape == (40,)
    np.testing.assert_allclose(mean, m.mean(axis=0), rtol=0, atol=1e-9)


def test_golden_first_coefficient():
    # First value of the checked-in oracle vector for the same clip.
    assert vx.mfcc_mean(vx.synth_clip(0, 7, 1.0))[0] == pytest.approx(30.516857332507055, abs=1e-4)


def test_mel_scale_and_encoder_length():
    assert vx.hz_to_mel(700.0) == pytest.approx(2595.0 * math.log10(2.0), rel=1e-12)
    assert vx.mel_to_hz(vx.hz_to_mel(1234.5)) == pytest.approx(1234.5, rel=1e-12)
    assert vx.encoder_output_length(16000) == 49


def test_render_image():
    img = vx.render_image(vx.mel_spectrogram(vx.synth_clip(1, 3, 1.0)))
    assert img.shape == (150, 150, 3)
    assert img.dtype == np.float32
    assert 0.0 <= img.min() and img.max() <= 1.0
    assert (img[..., 0] == img[..., 2]).all()


def test_roc_and_metrics():
    auc, points = vx.roc_auc([0.9, 0.4, 0.6, 0.1], [1, 1, 0, 0])
    assert auc == pytest.approx(0.75)
    assert points[0][1:] == (0.0, 0.0)
    assert points[-1][1:] == (1.0, 1.0)
    m = vx.metrics(tp=8, fp=5, tn=85, fn=2)
    assert m["accuracy"] == pytest.approx(0.93)
    assert vx.metrics(tp=0, fp=0, tn=3, fn=1)["ppv"] is None
    assert vx.confusion([0.6, 0.4], [0, 1]) == {"tp": 0, "fp": 1, "tn": 0, "fn": 1}


def test_folds_and_manifest():
    labels = [1] * 10 + [0] * 20
    folds = vx.stratified_folds(labels, 5, 3)
    for f in range(5):
        assert sum(1 for i, y in enumerate(labels) if y and folds[i] == f) == 2
    rows = vx.parse_manifest("path,label,symptoms,test_delay_days,hospitalized\na.wav,1,dry_cough;fever,10,false\n")
    assert rows[0]["symptoms"] == ["dry_cough", "fever"]
    assert rows[0]["test_delay_days"] == 10
    with pytest.raises(vx.VoxscreenError, match="BadLabel"):
        vx.parse_manifest("path,label,symptoms,test_delay_days,hospitalized\nc.wav,2,,,\n")


def test_cli_round_trip(tmp_path):
    out = tmp_path / "corpus"
    code, stdout, _ = vx.run_cli(["synth", "4", "4", "--seed", "2", "--out", str(out)])
    assert code == 0
    assert "wrote 8 clips" in stdout
    samples, rate = vx.load_wav(str(out / "clip_00000.wav"))
    assert rate == vx.SAMPLE_RATE
    code, stdout, _ = vx.run_cli(
        ["cv", "--manifest", str(out / "manifest.csv"), "--model", "logreg", "--k", "2", "--out", str(tmp_path / "cv")]
    )
    assert code == 0
    assert "pooled auc" in stdout
    assert vx.run_cli(["synth", "0", "10", "--out", str(out)])[0] != 0
