"""Per-speaker z-normalization and zero-phase Butterworth low-pass smoothing.

The filter is designed by bilinear transform with frequency pre-warping and
realized as a cascade of second-order sections (numerically stable at order
5 with a low cutoff-to-Nyquist ratio). Smoothing runs the cascade forward
then backward, so the effective magnitude response is the square of the
designed one and group delay is zero.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from artikit._kernels import sosfilt
from artikit.errors import DataError
from artikit.featio import FeatureTrajectory, Manifest

__all__ = [
    "FilterSpec",
    "BiquadCascade",
    "SpeakerStats",
    "design_butterworth_lowpass",
    "frequency_response",
    "filtfilt",
    "znorm_by_speaker",
]


@dataclass(frozen=True)
class FilterSpec:
    """Low-pass design parameters. Cutoff must sit strictly below Nyquist."""

    order: int
    cutoff_hz: float
    sample_rate_hz: float

    def __post_init__(self) -> None:
        if self.order < 1:
            raise DataError(f"filter order must be >= 1, got {self.order}")
        if self.sample_rate_hz <= 0:
            raise DataError(f"sample rate must be positive, got {self.sample_rate_hz}")
        if not 0.0 < self.cutoff_hz < self.sample_rate_hz / 2.0:
            raise DataError(
                f"cutoff {self.cutoff_hz} Hz must lie in (0, {self.sample_rate_hz / 2.0}) "
                f"for fs {self.sample_rate_hz} Hz"
            )


@dataclass(frozen=True)
class BiquadCascade:
    """Second-order sections, rows [b0 b1 b2 1 a1 a2]; a first-order section
    (odd total order) carries zeros in the b2/a2 slots."""

    sos: np.ndarray
    order: int


def design_butterworth_lowpass(spec: FilterSpec) -> BiquadCascade:
    """Design an order-N digital Butterworth low-pass as biquad sections.

    Analog prototype poles are scaled by the pre-warped cutoff
    tan(pi*fc/fs) and mapped with the bilinear transform; all N zeros land
    at z = -1. Each section is normalized to unit DC gain, so the cascade
    has |H(0)| = 1 up to rounding and |H(fc)| = 1/sqrt(2) by construction.
    """
    n = spec.order
    warped = math.tan(math.pi * spec.cutoff_hz / spec.sample_rate_hz)

    # Left-half-plane prototype poles, scaled, then z = (1+s)/(1-s).
    digital_poles = []
    for k in range(n):
        theta = math.pi * (2 * k + n + 1) / (2 * n)
        s = warped * cmath.exp(1j * theta)
        digital_poles.append((1 + s) / (1 - s))

    real = [p for p in digital_poles if abs(p.imag) < 1e-12]
    upper = sorted(
        (p for p in digital_poles if p.imag > 1e-12),
        key=lambda p: abs(p),
    )

    sections = []
    if real:
        # Odd order: exactly one real pole.
        zp = real[0].real
        a1 = -zp
        g = (1.0 + a1) / 2.0
        sections.append([g, g, 0.0, 1.0, a1, 0.0])
    for p in upper:
        a1 = -2.0 * p.real
        a2 = abs(p) ** 2
        g = (1.0 + a1 + a2) / 4.0
        sections.append([g, 2.0 * g, g, 1.0, a1, a2])

    return BiquadCascade(sos=np.asarray(sections, dtype=np.float64), order=n)


def frequency_response(cascade: BiquadCascade, freqs_hz, sample_rate_hz: float) -> np.ndarray:
    """Complex response of the cascade at the given frequencies (one pass)."""
    w = 2.0 * np.pi * np.asarray(freqs_hz, dtype=np.float64) / sample_rate_hz
    z1 = np.exp(-1j * w)
    z2 = z1 * z1
    h = np.ones_like(z1, dtype=np.complex128)
    for b0, b1, b2, _, a1, a2 in cascade.sos:
        h *= (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2)
    return h


def _sosfilt_zi(sos: np.ndarray) -> np.ndarray:
    """Steady-state section states for unit DC input (scale by x[0] to use)."""
    k = sos.shape[0]
    zi = np.zeros((k, 2))
    scale = 1.0
    for s in range(k):
        b0, b1, b2, _, a1, a2 = sos[s]
        A = np.array([[-a1, 1.0], [-a2, 0.0]])
        B = np.array([b1 - b0 * a1, b2 - b0 * a2])
        zi[s] = scale * np.linalg.solve(np.eye(2) - A, B)
        scale *= (b0 + b1 + b2) / (1.0 + a1 + a2)
    return zi


def _filtfilt_1d(sos: np.ndarray, zi: np.ndarray, x: np.ndarray, padlen: int) -> np.ndarray:
    ext = np.concatenate(
        (
            2.0 * x[0] - x[padlen:0:-1],
            x,
            2.0 * x[-1] - x[-2 : -padlen - 2 : -1],
        )
    )
    y = sosfilt(sos, ext, zi * ext[0])
    y = y[::-1].copy()
    y = sosfilt(sos, y, zi * y[0])
    return y[::-1][padlen:-padlen]


def filtfilt(cascade: BiquadCascade, traj: FeatureTrajectory) -> FeatureTrajectory:
    """Zero-phase filtering: forward pass then backward pass, per channel.

    Edges are extended by odd reflection of length 3 * (order + 1) before
    filtering and trimmed afterwards; each pass starts from the steady-state
    response to the first padded sample. Output shape and rate match the
    input.
    """
    padlen = 3 * (cascade.order + 1)
    if traj.frames <= padlen:
        raise DataError(
            f"trajectory too short for padding: {traj.frames} frames, "
            f"need more than {padlen} for order {cascade.order}"
        )
    zi = _sosfilt_zi(cascade.sos)
    data = np.asarray(traj.data, dtype=np.float64)
    out = np.empty_like(data)
    for c in range(data.shape[1]):
        out[:, c] = _filtfilt_1d(cascade.sos, zi, data[:, c], padlen)
    return FeatureTrajectory(
        data=out, frame_rate_hz=traj.frame_rate_hz, channel_names=traj.channel_names
    )


@dataclass(frozen=True)
class SpeakerStats:
    speaker: str
    mean: np.ndarray
    std: np.ndarray


def znorm_by_speaker(
    manifest: Manifest, trajectories: dict[str, FeatureTrajectory]
) -> tuple[dict[str, FeatureTrajectory], list[SpeakerStats]]:
    """Standardize each speaker's channels over all frames of all their samples.

    The std is the population form (divide by N): the target is the
    speaker's full corpus, not a sample estimate. A constant channel is an
    error. Returns the normalized trajectories and the stats that were used,
    sorted by speaker.
    """
    by_speaker: dict[str, list[str]] = {}
    for rec in manifest:
        if rec.id not in trajectories:
            raise DataError(f"sample {rec.id!r}: trajectory not provided")
        by_speaker.setdefault(rec.speaker, []).append(rec.id)

    out: dict[str, FeatureTrajectory] = {}
    stats: list[SpeakerStats] = []
    for speaker in sorted(by_speaker):
        ids = by_speaker[speaker]
        channels = trajectories[ids[0]].channels
        for sid in ids:
            if trajectories[sid].channels != channels:
                raise DataError(
                    f"speaker {speaker!r}: sample {sid!r} has {trajectories[sid].channels} "
                    f"channels, expected {channels}"
                )
        pooled = np.concatenate([np.asarray(trajectories[sid].data, dtype=np.float64) for sid in ids])
        mean = pooled.mean(axis=0)
        std = pooled.std(axis=0)  # ddof=0
        if np.any(std == 0.0):
            ch = int(np.argwhere(std == 0.0)[0])
            raise DataError(f"speaker {speaker!r}: channel {ch} has zero variance")
        stats.append(SpeakerStats(speaker=speaker, mean=mean, std=std))
        for sid in ids:
            t = trajectories[sid]
            normed = (np.asarray(t.data, dtype=np.float64) - mean) / std
            out[sid] = FeatureTrajectory(
                data=normed, frame_rate_hz=t.frame_rate_hz, channel_names=t.channel_names
            )
    return out, stats
