"""Synthetic skeleton recordings for the reference motion set.

Each motion is recorded three times. Joints swing back and forth along
fixed directions with constant per-frame step length, so the momentum of
every recording is known in closed form and the three-sample mean hits the
target row exactly. The whole body also drifts, which localization removes.
"""
from __future__ import annotations

import math
import random
from pathlib import Path

from .motion import (
    DEFAULT_SEGMENT_MAP, JOINTS, SEGMENTS, MomentumVector, SkeletonFrame, write_skeleton_csv,
)

FPS = 25.0
FRAMES = 50
SWING = 6
SAMPLE_SCALES = (0.96, 1.0, 1.04)
SEED = 20170327

# Share of a segment's momentum carried by each of its joints, proximal to distal.
ARM_WEIGHTS = (0.05, 0.20, 0.35, 0.40)
LEG_WEIGHTS = (0.25, 0.35, 0.40)

# Right Punch, Left Kick and Crouch are the published rows; the rest are
# plausible values for the other reference motions.
MOTION_TARGETS: dict[str, tuple[float, float, float, float]] = {
    "right_punch": (5.83, 0.49, 0.51, 0.38),
    "left_kick": (1.47, 1.68, 1.08, 6.42),
    "crouch": (2.25, 2.11, 2.95, 3.04),
    "left_punch": (0.52, 5.71, 0.44, 0.40),
    "right_heavy_punch": (7.12, 0.83, 0.72, 0.55),
    "left_heavy_punch": (0.88, 6.95, 0.61, 0.70),
    "right_kick": (1.61, 1.52, 6.27, 1.12),
    "right_heavy_kick": (2.03, 1.87, 7.85, 1.46),
    "left_heavy_kick": (1.92, 2.08, 1.39, 7.66),
    "step_forward": (1.12, 1.09, 2.84, 2.79),
    "step_back": (1.05, 1.10, 2.71, 2.88),
    "jump": (2.64, 2.58, 4.12, 4.20),
    "guard": (1.38, 1.41, 0.32, 0.30),
    "throw": (3.95, 3.88, 0.92, 0.87),
    "right_uppercut": (6.40, 0.71, 1.05, 0.62),
    "left_uppercut": (0.69, 6.28, 0.60, 1.01),
    "right_low_kick": (0.95, 0.88, 5.12, 0.74),
    "left_low_kick": (0.91, 0.97, 0.70, 5.03),
    "right_knee": (0.83, 0.80, 4.55, 0.66),
    "left_knee": (0.79, 0.85, 0.63, 4.47),
    "stand": (0.18, 0.17, 0.12, 0.13),
    "lean_back": (0.94, 0.91, 0.58, 0.61),
    "arms_up": (3.12, 3.05, 0.35, 0.33),
    "spin": (2.47, 2.52, 2.31, 2.26),
}

_BASE_POSE = {
    "head": (0.0, 1.65, 0.0), "shoulder_center": (0.0, 1.45, 0.0),
    "shoulder_l": (-0.18, 1.43, 0.0), "shoulder_r": (0.18, 1.43, 0.0),
    "elbow_l": (-0.25, 1.18, 0.02), "elbow_r": (0.25, 1.18, 0.02),
    "wrist_l": (-0.28, 0.95, 0.05), "wrist_r": (0.28, 0.95, 0.05),
    "hand_l": (-0.29, 0.87, 0.06), "hand_r": (0.29, 0.87, 0.06),
    "spine": (0.0, 1.15, 0.0), "hip_center": (0.0, 0.95, 0.0),
    "hip_l": (-0.1, 0.92, 0.0), "hip_r": (0.1, 0.92, 0.0),
    "knee_l": (-0.11, 0.52, 0.02), "knee_r": (0.11, 0.52, 0.02),
    "ankle_l": (-0.12, 0.1, 0.0), "ankle_r": (0.12, 0.1, 0.0),
    "foot_l": (-0.12, 0.03, 0.1), "foot_r": (0.12, 0.03, 0.1),
}


def _unit(rng: random.Random) -> tuple[float, float, float]:
    while True:
        v = (rng.gauss(0, 1), rng.gauss(0, 1), rng.gauss(0, 1))
        n = math.sqrt(sum(c * c for c in v))
        if n > 1e-6:
            return (v[0] / n, v[1] / n, v[2] / n)


def synth_recording(target: MomentumVector, rng: random.Random,
                    frames: int = FRAMES, t0: float = 0.0) -> list[SkeletonFrame]:
    """A stream whose accumulated momentum equals ``target`` up to rounding."""
    steps = frames - 1
    paths = {}
    for seg, amount in zip(SEGMENTS, target.as_tuple()):
        joints = DEFAULT_SEGMENT_MAP.segments[seg]
        weights = ARM_WEIGHTS if seg.startswith("arm") else LEG_WEIGHTS
        for j, w in zip(joints, weights):
            paths[j] = (_unit(rng), w * amount / steps)
    drift = (rng.uniform(-0.02, 0.02), rng.uniform(-0.005, 0.005), rng.uniform(-0.02, 0.02))

    pos = {j: list(p) for j, p in _BASE_POSE.items()}
    out = []
    for k in range(frames):
        if k > 0:
            sign = 1.0 if ((k - 1) // SWING) % 2 == 0 else -1.0
            for j, (u, step) in paths.items():
                p = pos[j]
                for i in range(3):
                    p[i] += sign * step * u[i]
        g = (drift[0] * k, drift[1] * math.sin(k / 4.0), drift[2] * k)
        joints = {j: (pos[j][0] + g[0], pos[j][1] + g[1], pos[j][2] + g[2]) for j in JOINTS}
        out.append(SkeletonFrame(t0 + k / FPS, joints))
    return out


def generate_samples(motions=None, seed: int = SEED) -> dict[str, list[list[SkeletonFrame]]]:
    motions = list(MOTION_TARGETS) if motions is None else list(motions)
    samples = {}
    for m in motions:
        base = MomentumVector.of(MOTION_TARGETS[m])
        rng = random.Random(seed * 1000 + sorted(MOTION_TARGETS).index(m))
        samples[m] = [synth_recording(base * s, rng) for s in SAMPLE_SCALES]
    return samples


def write_samples(directory: str | Path, motions=None, seed: int = SEED) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for m, recs in generate_samples(motions, seed).items():
        for k, frames in enumerate(recs, start=1):
            p = directory / f"{m}__{k}.skel.csv"
            write_skeleton_csv(p, frames)
            written.append(p)
    return written
