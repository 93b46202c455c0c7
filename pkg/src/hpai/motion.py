"""Skeleton-stream ingestion and per-segment momentum accumulation.

Momentum of a segment is the summed Euclidean displacement of its joints
between consecutive frames, after positions have been localized to the
shoulder centre (upper body) or hip centre (lower body).
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import IngestionError

JOINTS = (
    "head", "shoulder_center", "shoulder_l", "shoulder_r",
    "elbow_l", "elbow_r", "wrist_l", "wrist_r", "hand_l", "hand_r",
    "spine", "hip_center", "hip_l", "hip_r",
    "knee_l", "knee_r", "ankle_l", "ankle_r", "foot_l", "foot_r",
)
UPPER_BODY = frozenset({
    "head", "shoulder_center", "shoulder_l", "shoulder_r", "elbow_l", "elbow_r",
    "wrist_l", "wrist_r", "hand_l", "hand_r", "spine",
})
LOWER_BODY = frozenset(JOINTS) - UPPER_BODY

SEGMENTS = ("arm_r", "arm_l", "leg_r", "leg_l")

Vec3 = tuple[float, float, float]


@dataclass(frozen=True)
class MomentumVector:
    """Accumulated movement in meters for the four body segments."""

    arm_r: float = 0.0
    arm_l: float = 0.0
    leg_r: float = 0.0
    leg_l: float = 0.0

    @classmethod
    def zero(cls) -> "MomentumVector":
        return cls()

    @classmethod
    def of(cls, values: Sequence[float]) -> "MomentumVector":
        if len(values) != 4:
            raise ValueError(f"expected 4 segment values, got {len(values)}")
        return cls(*(float(v) for v in values))

    @classmethod
    def from_dict(cls, d: Mapping[str, float]) -> "MomentumVector":
        return cls(*(float(d[s]) for s in SEGMENTS))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.arm_r, self.arm_l, self.leg_r, self.leg_l)

    def to_dict(self) -> dict[str, float]:
        return dict(zip(SEGMENTS, self.as_tuple()))

    def total(self) -> float:
        return self.arm_r + self.arm_l + self.leg_r + self.leg_l

    def __add__(self, other: "MomentumVector") -> "MomentumVector":
        return MomentumVector(
            self.arm_r + other.arm_r, self.arm_l + other.arm_l,
            self.leg_r + other.leg_r, self.leg_l + other.leg_l,
        )

    def __sub__(self, other: "MomentumVector") -> "MomentumVector":
        return MomentumVector(
            self.arm_r - other.arm_r, self.arm_l - other.arm_l,
            self.leg_r - other.leg_r, self.leg_l - other.leg_l,
        )

    def __mul__(self, k: float) -> "MomentumVector":
        return MomentumVector(self.arm_r * k, self.arm_l * k, self.leg_r * k, self.leg_l * k)

    __rmul__ = __mul__

    def __iter__(self):
        return iter(self.as_tuple())


@dataclass(frozen=True)
class SkeletonFrame:
    timestamp: float
    joints: Mapping[str, Vec3]


@dataclass(frozen=True)
class SegmentMap:
    """Segment name -> ordered joints. Center-of-body joints are left out."""

    segments: Mapping[str, tuple[str, ...]] = field(default_factory=lambda: dict(_DEFAULT_SEGMENTS))

    def __post_init__(self):
        if tuple(self.segments) != SEGMENTS:
            raise ValueError(f"segments must be exactly {SEGMENTS}")
        seen: set[str] = set()
        for name, joints in self.segments.items():
            for j in joints:
                if j not in JOINTS:
                    raise ValueError(f"unknown joint {j!r} in segment {name}")
                if j in seen:
                    raise ValueError(f"joint {j!r} assigned to more than one segment")
                seen.add(j)

    def joint_count(self) -> int:
        return sum(len(js) for js in self.segments.values())


_DEFAULT_SEGMENTS = {
    "arm_r": ("shoulder_r", "elbow_r", "wrist_r", "hand_r"),
    "arm_l": ("shoulder_l", "elbow_l", "wrist_l", "hand_l"),
    "leg_r": ("knee_r", "ankle_r", "foot_r"),
    "leg_l": ("knee_l", "ankle_l", "foot_l"),
}
DEFAULT_SEGMENT_MAP = SegmentMap()

MotionDb = dict[str, MomentumVector]


def validate_frame(frame: SkeletonFrame) -> None:
    for name in JOINTS:
        pos = frame.joints.get(name)
        if pos is None:
            raise IngestionError(f"frame at t={frame.timestamp}: missing joint {name!r}")
        if len(pos) != 3 or not all(math.isfinite(c) for c in pos):
            raise IngestionError(f"frame at t={frame.timestamp}: non-finite or malformed joint {name!r}")
    if not math.isfinite(frame.timestamp) or frame.timestamp < 0:
        raise IngestionError(f"invalid timestamp {frame.timestamp!r}")


def localize_frame(frame: SkeletonFrame) -> SkeletonFrame:
    """Express upper-body joints relative to shoulder_center, lower-body to hip_center."""
    validate_frame(frame)
    sc = frame.joints["shoulder_center"]
    hc = frame.joints["hip_center"]
    out = {}
    for name in JOINTS:
        x, y, z = frame.joints[name]
        ox, oy, oz = sc if name in UPPER_BODY else hc
        out[name] = (x - ox, y - oy, z - oz)
    return SkeletonFrame(frame.timestamp, out)


def segment_displacement(prev: SkeletonFrame, cur: SkeletonFrame,
                         segmap: SegmentMap = DEFAULT_SEGMENT_MAP) -> MomentumVector:
    """Per-segment sum of joint displacements between two localized frames."""
    totals = []
    for seg in SEGMENTS:
        totals.append(sum(math.dist(prev.joints[j], cur.joints[j]) for j in segmap.segments[seg]))
    return MomentumVector.of(totals)


def accumulate_momentum(frames: Iterable[SkeletonFrame],
                        segmap: SegmentMap = DEFAULT_SEGMENT_MAP) -> MomentumVector:
    frames = list(frames)
    if not frames:
        raise IngestionError("empty skeleton stream")
    for a, b in zip(frames, frames[1:]):
        if not b.timestamp > a.timestamp:
            raise IngestionError(
                f"timestamps must be strictly increasing ({a.timestamp} then {b.timestamp})")
    local = [localize_frame(f) for f in frames]
    acc = [0.0, 0.0, 0.0, 0.0]
    for a, b in zip(local, local[1:]):
        d = segment_displacement(a, b, segmap)
        for i, v in enumerate(d.as_tuple()):
            acc[i] += v
    return MomentumVector.of(acc)


def build_motion_db(samples: Mapping[str, Sequence[Sequence[SkeletonFrame]]],
                    segmap: SegmentMap = DEFAULT_SEGMENT_MAP) -> MotionDb:
    """Average the total momentum of each motion's sample recordings."""
    db: MotionDb = {}
    for motion, recordings in samples.items():
        if not recordings:
            raise IngestionError(f"motion {motion!r} has no sample recordings")
        vecs = [accumulate_momentum(r, segmap) for r in recordings]
        n = len(vecs)
        db[motion] = MomentumVector.of([math.fsum(col) / n for col in zip(*(v.as_tuple() for v in vecs))])
    return db


# -- file formats ---------------------------------------------------------

def skeleton_header() -> list[str]:
    cols = ["t"]
    for j in JOINTS:
        cols += [f"{j}_x", f"{j}_y", f"{j}_z"]
    return cols


def write_skeleton_csv(path: str | Path, frames: Sequence[SkeletonFrame]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(skeleton_header())
        for f in frames:
            row = [repr(float(f.timestamp))]
            for j in JOINTS:
                row += [repr(float(c)) for c in f.joints[j]]
            w.writerow(row)


def read_skeleton_csv(path: str | Path) -> list[SkeletonFrame]:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise IngestionError(f"{path}: empty file")
        index = {name: i for i, name in enumerate(header)}
        for col in skeleton_header():
            if col not in index:
                joint = col.rsplit("_", 1)[0]
                raise IngestionError(f"{path}: missing column {col!r} (joint {joint!r})")
        frames = []
        for lineno, row in enumerate(reader, start=2):
            try:
                joints = {j: (float(row[index[f"{j}_x"]]), float(row[index[f"{j}_y"]]),
                              float(row[index[f"{j}_z"]])) for j in JOINTS}
                frame = SkeletonFrame(float(row[index["t"]]), joints)
            except (ValueError, IndexError) as exc:
                raise IngestionError(f"{path}:{lineno}: {exc}") from exc
            validate_frame(frame)
            frames.append(frame)
    return frames


def load_samples_dir(directory: str | Path) -> dict[str, list[list[SkeletonFrame]]]:
    """Read ``<motion>__<k>.skel.csv`` files, grouped by motion id."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"sample directory not found: {directory}")
    samples: dict[str, list[list[SkeletonFrame]]] = {}
    for p in sorted(directory.glob("*.skel.csv")):
        motion = p.name[: -len(".skel.csv")].split("__", 1)[0]
        samples.setdefault(motion, []).append(read_skeleton_csv(p))
    return samples


def save_motion_db(path: str | Path, db: Mapping[str, MomentumVector]) -> None:
    data = {m: db[m].to_dict() for m in sorted(db)}
    Path(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def load_motion_db(path: str | Path) -> MotionDb:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return {m: MomentumVector.from_dict(v) for m, v in data.items()}
