"""Action History Database (A2C), the C2M map, battle logs, and the
simulated player that stands in for a human subject."""
from __future__ import annotations

import json
import math
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError

PROB_TOL = 1e-9
PAIRING_MODES = ("most_recent", "all_unanswered")


class A2CTable:
    """AI action -> distribution over the player's counteractions."""

    def __init__(self, probs: Mapping[str, Mapping[str, float]],
                 counts: Mapping[str, Mapping[str, int]] | None = None):
        if not probs:
            raise ConfigError("A2C table has no actions")
        vocab = sorted({c for row in probs.values() for c in row})
        self.actions = list(probs)
        self.counteractions = vocab
        self._rows: dict[str, dict[str, float]] = {}
        self._cdf: dict[str, list[float]] = {}
        for a, row in probs.items():
            full = {c: float(row.get(c, 0.0)) for c in vocab}
            if any(p < 0 or not math.isfinite(p) for p in full.values()):
                raise ConfigError(f"A2C row {a!r} has a negative or non-finite probability")
            total = math.fsum(full.values())
            if abs(total - 1.0) > PROB_TOL:
                raise ConfigError(f"A2C row {a!r} sums to {total!r}, not 1")
            self._rows[a] = full
            cdf, acc = [], 0.0
            for c in vocab:
                acc += full[c]
                cdf.append(acc)
            self._cdf[a] = cdf
        self.counts = {a: dict(counts[a]) for a in counts} if counts else {}

    def distribution(self, action: str) -> dict[str, float]:
        try:
            return dict(self._rows[action])
        except KeyError:
            raise ConfigError(f"action {action!r} not in A2C table") from None

    def prob(self, action: str, counter: str) -> float:
        return self._rows[action][counter]

    def sample(self, action: str, rng: random.Random) -> str:
        """Inverse-CDF draw over the counteraction vocabulary in sorted order."""
        cdf = self._cdf.get(action)
        if cdf is None:
            raise ConfigError(f"action {action!r} not in A2C table")
        i = bisect_right(cdf, rng.random() * cdf[-1])
        return self.counteractions[min(i, len(cdf) - 1)]

    def to_json(self) -> dict:
        return {a: self._rows[a] for a in self.actions}

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        if self.counts:
            counts_path(path).write_text(
                json.dumps(self.counts, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "A2CTable":
        path = Path(path)
        probs = json.loads(path.read_text(encoding="utf-8"))
        cp = counts_path(path)
        counts = json.loads(cp.read_text(encoding="utf-8")) if cp.exists() else None
        return cls(probs, counts)


def counts_path(path: Path) -> Path:
    return path.with_name(path.stem + ".counts.json")


def sample_counteraction(table: A2CTable, action: str, rng: random.Random) -> str:
    return table.sample(action, rng)


def validate_c2m(c2m: Mapping[str, str], counteractions: Iterable[str], motion_db: Mapping) -> None:
    for c in counteractions:
        if c not in c2m:
            raise ConfigError(f"counteraction {c!r} has no entry in the C2M map")
        if c2m[c] not in motion_db:
            raise ConfigError(f"C2M maps {c!r} to unknown motion {c2m[c]!r}")


def load_c2m(path: str | Path) -> dict[str, str]:
    return dict(json.loads(Path(path).read_text(encoding="utf-8")))


# -- battle logs ----------------------------------------------------------

@dataclass(frozen=True)
class LogEvent:
    frame: int
    actor: str  # "ai" | "player"
    action: str


@dataclass
class BattleLog:
    meta: dict = field(default_factory=dict)
    events: list[LogEvent] = field(default_factory=list)

    def add(self, frame: int, actor: str, action: str) -> None:
        if self.events and frame < self.events[-1].frame:
            raise ValueError("battle log frames must be non-decreasing")
        self.events.append(LogEvent(frame, actor, action))

    def dumps(self) -> str:
        lines = [json.dumps({"header": self.meta}, sort_keys=True)]
        lines += [json.dumps({"frame": e.frame, "actor": e.actor, "action": e.action})
                  for e in self.events]
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "BattleLog":
        log = cls()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                if "header" in rec:
                    log.meta = rec["header"]
                else:
                    log.add(int(rec["frame"]), rec["actor"], rec["action"])
        return log


def extract_counteraction_pairs(log: BattleLog | Sequence[LogEvent],
                                mode: str = "most_recent") -> list[tuple[str, str]]:
    """Pair AI actions with the player's first later action.

    In ``most_recent`` mode a player action answers only the latest AI action
    strictly before it, and each AI action is answered at most once. In
    ``all_unanswered`` mode it answers every earlier AI action still waiting.
    """
    if mode not in PAIRING_MODES:
        raise ConfigError(f"unknown pairing mode {mode!r}")
    events = log.events if isinstance(log, BattleLog) else list(log)
    pairs = []
    waiting: list[LogEvent] = []
    i = 0
    n = len(events)
    while i < n:
        frame = events[i].frame
        j = i
        while j < n and events[j].frame == frame:
            j += 1
        group = events[i:j]
        # Player events in this frame only see AI actions from earlier frames.
        for e in group:
            if e.actor == "player" and waiting:
                if mode == "most_recent":
                    pairs.append((waiting[-1].action, e.action))
                else:
                    pairs.extend((w.action, e.action) for w in waiting)
                waiting = []
        for e in group:
            if e.actor == "ai":
                if mode == "most_recent":
                    waiting = [e]
                else:
                    waiting.append(e)
        i = j
    return pairs


def build_a2c(pairs: Iterable[tuple[str, str]], action_vocab: Sequence[str],
              counteraction_vocab: Sequence[str]) -> A2CTable:
    """Relative counteraction frequencies per action, add-one smoothed."""
    if not action_vocab or not counteraction_vocab:
        raise ConfigError("action and counteraction vocabularies must be non-empty")
    counts = {a: {c: 0 for c in counteraction_vocab} for a in action_vocab}
    for a, c in pairs:
        if a not in counts:
            raise ConfigError(f"logged AI action {a!r} not in the action vocabulary")
        if c not in counts[a]:
            raise ConfigError(f"logged counteraction {c!r} not in the counteraction vocabulary")
        counts[a][c] += 1
    k = len(counteraction_vocab)
    probs = {}
    for a, row in counts.items():
        n = sum(row.values())
        probs[a] = {c: (row[c] + 1) / (n + k) for c in counteraction_vocab}
    return A2CTable(probs, counts)


# -- simulated player -----------------------------------------------------

@dataclass
class PlayerProfile:
    id: str
    delay: int
    table: A2CTable
    seed: int = 0

    def __post_init__(self):
        if self.delay < 0:
            raise ConfigError(f"profile {self.id!r}: reaction delay must be >= 0")


class SimulatedPlayer:
    """Reactive player policy.

    ``delay`` frames after the AI initiates an action (never in the same
    frame, so delay 0 and 1 both answer on the next frame) the player answers
    with a counteraction drawn from the profile table. If the player is still
    busy then, the answer waits until it is free and responds to the AI's
    most recent action at that moment. Without AI actions it never moves.
    """

    def __init__(self, profile: PlayerProfile, rng: random.Random | None = None):
        self.profile = profile
        self.rng = rng if rng is not None else random.Random(profile.seed)
        self._answered_frame = -1

    def __call__(self, state) -> str | None:
        return player_policy_step(self, state)


def player_policy_step(player: SimulatedPlayer, state) -> str | None:
    ai = state.fighters[0]
    last_frame = ai.last_start
    if last_frame < 0 or last_frame <= player._answered_frame:
        return None
    if last_frame >= state.frame:
        return None
    if state.frame < last_frame + max(1, player.profile.delay):
        return None
    if not state.fighters[1].free:
        return None
    player._answered_frame = last_frame
    return player.profile.table.sample(ai.last_action, player.rng)


# -- generative behaviour tables ------------------------------------------

def limb_side(action: str) -> tuple[str | None, str | None]:
    """(limb, side) of a roster action id, e.g. heavy_kick_l -> ("leg", "l")."""
    side = action[-1] if action.endswith(("_r", "_l")) else None
    if side is None:
        return None, None
    limb = "arm" if ("punch" in action or "uppercut" in action) else "leg" if "kick" in action else None
    return limb, side


def mirror_action(action: str) -> str:
    if action.endswith("_r"):
        return action[:-2] + "_l"
    if action.endswith("_l"):
        return action[:-2] + "_r"
    return action


def one_sided_table(actions: Sequence[str], counteractions: Sequence[str], *, dominant: str = "r",
                    limbs: Sequence[str] = ("arm",), strength: float = 3.0, mirror: float = 2.0,
                    sigma: float = 0.8, idle_weight: float = 0.3, seed: int = 0) -> A2CTable:
    """A player favouring one side, whose answers still depend on the AI's action.

    Counteractions on the dominant side for the listed limbs are weighted by
    ``strength``; the mirror image of the AI's own move gets ``mirror``; a
    seeded log-normal factor per (action, counteraction) adds idiosyncrasy.
    """
    rng = random.Random(seed)
    probs = {}
    for a in actions:
        weights = {}
        for c in sorted(counteractions):
            w = idle_weight if c == "idle" else 1.0
            limb, side = limb_side(c)
            if side == dominant and limb in limbs:
                w *= strength
            if c == mirror_action(a) and c != a:
                w *= mirror
            w *= math.exp(sigma * rng.gauss(0.0, 1.0))
            weights[c] = w
        total = math.fsum(weights.values())
        probs[a] = _normalize(weights, total)
    return A2CTable(probs)


def symmetric_table(actions: Sequence[str], counteractions: Sequence[str], *,
                    idle_weight: float = 0.3, seed: int = 0) -> A2CTable:
    """Same distribution for every AI action; each left move exactly as likely as its mirror."""
    rng = random.Random(seed)
    weights = {}
    for c in sorted(counteractions):
        if c in weights:
            continue
        w = (idle_weight if c == "idle" else 1.0) * math.exp(0.5 * rng.gauss(0.0, 1.0))
        weights[c] = w
        m = mirror_action(c)
        if m != c and m in counteractions:
            weights[m] = w
    total = math.fsum(weights.values())
    row = _normalize(weights, total)
    return A2CTable({a: dict(row) for a in actions})


def _normalize(weights: Mapping[str, float], total: float) -> dict[str, float]:
    row = {c: w / total for c, w in weights.items()}
    # push rounding residue onto the largest entry so the row sums to 1
    resid = 1.0 - math.fsum(row.values())
    top = max(row, key=row.get)
    row[top] += resid
    return row
