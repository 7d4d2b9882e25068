"""Vocal-biomarker screening toolkit: feature extraction, classifiers and evaluation."""

from voxscreen._core import (
    SAMPLE_RATE,
    VoxscreenError,
    confusion,
    encoder_output_length,
    hz_to_mel,
    load_wav,
    mel_spectrogram,
    mel_to_hz,
    metrics,
    mfcc,
    mfcc_mean,
    parse_manifest,
    prepare,
    render_image,
    roc_auc,
    run_cli,
    stratified_folds,
    synth_clip,
)

__version__ = "0.1.0"

__all__ = [
    "SAMPLE_RATE",
    "VoxscreenError",
    "confusion",
    "encoder_output_length",
    "hz_to_mel",
    "load_wav",
    "mel_spectrogram",
    "mel_to_hz",
    "metrics",
    "mfcc",
    "mfcc_mean",
    "parse_manifest",
    "prepare",
    "render_image",
    "roc_auc",
    "run_cli",
    "stratified_folds",
    "synth_clip",
]
