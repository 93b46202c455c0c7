"""Player health state: actual/expected momentum, gap, balancedness, and
the per-action fitness used to pick a health-promoting move."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .errors import ConfigError
from .motion import SEGMENTS, MomentumVector

PROB_TOL = 1e-9


def expected_momentum(am: MomentumVector) -> MomentumVector:
    arms = max(am.arm_r, am.arm_l)
    legs = max(am.leg_r, am.leg_l)
    return MomentumVector(arms, arms, legs, legs)


def compute_gap(am: MomentumVector) -> MomentumVector:
    # max(a, b) - a is exact in floating point for the leading side.
    return expected_momentum(am) - am


def balancedness(am: MomentumVector) -> float:
    """1 - 2*sum(gap)/sum(em); an all-zero state counts as perfectly balanced."""
    em_sum = expected_momentum(am).total()
    if em_sum == 0.0:
        return 1.0
    return 1.0 - 2.0 * compute_gap(am).total() / em_sum


def apply_action_effect(am: MomentumVector, mm: MomentumVector) -> MomentumVector:
    return am + mm


def fitness_dec(gap: MomentumVector, mm: MomentumVector) -> float:
    """Predicted decrease of the total gap if the player moves by ``mm``."""
    return gap.total() - sum(abs(g - m) for g, m in zip(gap.as_tuple(), mm.as_tuple()))


@dataclass(frozen=True)
class HealthState:
    am: MomentumVector
    em: MomentumVector
    gap: MomentumVector
    bal: float

    @classmethod
    def from_am(cls, am: MomentumVector) -> "HealthState":
        return cls(am, expected_momentum(am), compute_gap(am), balancedness(am))

    def after(self, mm: MomentumVector) -> "HealthState":
        return HealthState.from_am(apply_action_effect(self.am, mm))


def action_to_momentum(a2c_row: Mapping[str, float], c2m: Mapping[str, str],
                       db: Mapping[str, MomentumVector]) -> MomentumVector:
    """Expected player momentum for one AI action: A2C -> C2M -> M2Mm."""
    total = math.fsum(a2c_row.values())
    if abs(total - 1.0) > PROB_TOL:
        raise ConfigError(f"counteraction probabilities sum to {total!r}, not 1")
    acc = [0.0] * 4
    for counter, p in a2c_row.items():
        if counter not in c2m:
            raise ConfigError(f"counteraction {counter!r} has no motion in the C2M map")
        motion = c2m[counter]
        if motion not in db:
            raise ConfigError(f"motion {motion!r} (for {counter!r}) missing from the motion db")
        for i, v in enumerate(db[motion].as_tuple()):
            acc[i] += p * v
    return MomentumVector.of(acc)


A2MmTable = dict[str, MomentumVector]


def build_a2mm(a2c, c2m: Mapping[str, str], db: Mapping[str, MomentumVector]) -> A2MmTable:
    """Precompute the predicted momentum row for every action in an A2C table."""
    return {a: action_to_momentum(a2c.distribution(a), c2m, db) for a in a2c.actions}


def write_a2mm_csv(path: str | Path, table: Mapping[str, MomentumVector]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["action", *SEGMENTS])
        for a in sorted(table):
            w.writerow([a, *(repr(v) for v in table[a].as_tuple())])
