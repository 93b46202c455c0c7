"""Desk-scale two-fighter engine.

Fighters stand on a 1-D line and perform frame-stepped actions with
startup/active/recovery phases. Attacks connect once, on their first active
frame, if the opponent is within reach. Fighter 0 is the AI, fighter 1 the
player. The engine has no randomness of its own.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

from .errors import ConfigError, IllegalActionError
from .opponent import BattleLog

AI, PLAYER = 0, 1
ACTOR_NAMES = ("ai", "player")


@dataclass(frozen=True)
class ActionSpec:
    id: str
    damage: int = 0
    startup: int = 0
    active: int = 0
    recovery: int = 0
    reach: float = 0.0
    guardable: bool = True
    move: float = 0.0          # total displacement toward the opponent over the active frames
    knockback: float = 0.0     # push applied to the defender on an unguarded hit
    height: str = "mid"        # high | mid | low, for attacks
    avoids: str | None = None  # height of attacks this action evades while active
    guard: bool = False
    guard_ratio: float = 0.1   # share of a guardable hit's damage that gets through

    def __post_init__(self):
        if self.damage < 0:
            raise ConfigError(f"action {self.id!r}: damage must be >= 0")
        if min(self.startup, self.active, self.recovery) < 0:
            raise ConfigError(f"action {self.id!r}: frame counts must be >= 0")
        if self.startup + self.active + self.recovery < 1:
            raise ConfigError(f"action {self.id!r}: must last at least one frame")
        if self.damage > 0 and self.active < 1:
            raise ConfigError(f"action {self.id!r}: an attack needs an active frame")
        if self.move and self.active < 1:
            raise ConfigError(f"action {self.id!r}: movement needs active frames")

    @property
    def total(self) -> int:
        return self.startup + self.active + self.recovery


class Roster:
    def __init__(self, specs: Sequence[ActionSpec]):
        if not specs:
            raise ConfigError("empty roster")
        self.specs = {s.id: s for s in specs}
        if len(self.specs) != len(specs):
            raise ConfigError("duplicate action ids in roster")
        self.ids = [s.id for s in specs]

    def __getitem__(self, action_id: str) -> ActionSpec:
        try:
            return self.specs[action_id]
        except KeyError:
            raise IllegalActionError(f"unknown action {action_id!r}") from None

    def __contains__(self, action_id) -> bool:
        return action_id in self.specs

    def __len__(self) -> int:
        return len(self.ids)

    @classmethod
    def from_json(cls, records: list[dict]) -> "Roster":
        try:
            return cls([ActionSpec(**r) for r in records])
        except TypeError as exc:
            raise ConfigError(f"bad roster record: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path | None = None) -> "Roster":
        if path is None:
            text = resources.files("hpai").joinpath("data/roster.json").read_text(encoding="utf-8")
        else:
            text = Path(path).read_text(encoding="utf-8")
        return cls.from_json(json.loads(text))

    def with_overrides(self, overrides: dict[str, dict]) -> "Roster":
        specs = []
        for s in self.specs.values():
            extra = overrides.get(s.id, {})
            specs.append(ActionSpec(**{**s.__dict__, **extra}) if extra else s)
        unknown = set(overrides) - set(self.specs)
        if unknown:
            raise ConfigError(f"roster overrides for unknown actions: {sorted(unknown)}")
        return Roster(specs)


_DEFAULT_ROSTER: Roster | None = None


def default_roster() -> Roster:
    global _DEFAULT_ROSTER
    if _DEFAULT_ROSTER is None:
        _DEFAULT_ROSTER = Roster.load()
    return _DEFAULT_ROSTER


@dataclass(frozen=True)
class GameConfig:
    initial_hp: int = 400
    round_frames: int = 3600
    stage_width: float = 100.0
    start_distance: float = 30.0
    min_distance: float = 4.0

    def __post_init__(self):
        if self.initial_hp <= 0 or self.round_frames <= 0:
            raise ConfigError("initial_hp and round_frames must be positive")
        if not 0 < self.min_distance <= self.start_distance <= self.stage_width:
            raise ConfigError("need 0 < min_distance <= start_distance <= stage_width")


class Fighter:
    __slots__ = ("hp", "pos", "action", "t", "last_action", "last_start")

    def __init__(self, hp: int, pos: float):
        self.hp = hp
        self.pos = pos
        self.action: ActionSpec | None = None
        self.t = 0
        self.last_action: str | None = None
        self.last_start = -1

    @property
    def free(self) -> bool:
        return self.action is None

    def copy(self) -> "Fighter":
        f = Fighter.__new__(Fighter)
        f.hp = self.hp
        f.pos = self.pos
        f.action = self.action
        f.t = self.t
        f.last_action = self.last_action
        f.last_start = self.last_start
        return f

    def key(self):
        return (self.hp, self.pos, self.action.id if self.action else None, self.t,
                self.last_action, self.last_start)


class GameState:
    __slots__ = ("fighters", "frame", "limit", "roster", "config", "round_index", "match_index")

    def __init__(self, fighters, frame, limit, roster, config, round_index=0, match_index=0):
        self.fighters = fighters
        self.frame = frame
        self.limit = limit
        self.roster = roster
        self.config = config
        self.round_index = round_index
        self.match_index = match_index

    @classmethod
    def initial(cls, roster: Roster | None = None, config: GameConfig | None = None,
                round_index: int = 0, match_index: int = 0) -> "GameState":
        roster = roster or default_roster()
        config = config or GameConfig()
        mid = config.stage_width / 2
        half = config.start_distance / 2
        fighters = [Fighter(config.initial_hp, mid - half), Fighter(config.initial_hp, mid + half)]
        return cls(fighters, 0, config.round_frames, roster, config, round_index, match_index)

    def clone(self) -> "GameState":
        return GameState([f.copy() for f in self.fighters], self.frame, self.limit,
                         self.roster, self.config, self.round_index, self.match_index)

    @property
    def terminal(self) -> bool:
        return self.fighters[0].hp <= 0 or self.fighters[1].hp <= 0 or self.frame >= self.limit

    @property
    def distance(self) -> float:
        return abs(self.fighters[1].pos - self.fighters[0].pos)

    def hp(self) -> tuple[int, int]:
        return (self.fighters[0].hp, self.fighters[1].hp)

    def key(self):
        return (self.frame, self.limit, self.fighters[0].key(), self.fighters[1].key())

    def __eq__(self, other):
        return isinstance(other, GameState) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


def legal_actions(state: GameState, actor: int) -> list[str]:
    if state.terminal:
        raise IllegalActionError("no legal actions in a terminal state")
    return list(state.roster.ids) if state.fighters[actor].action is None else []


def step(state: GameState, ai_input: str | None = None,
         player_input: str | None = None) -> tuple[GameState, list[tuple]]:
    """Pure single-frame transition; returns the successor and its events."""
    nxt = state.clone()
    events: list[tuple] = []
    step_inplace(nxt, ai_input, player_input, events)
    return nxt, events


def step_inplace(state: GameState, ai_input: str | None, player_input: str | None,
                 events: list | None = None) -> None:
    if state.terminal:
        raise IllegalActionError("cannot step a terminal state")
    fighters = state.fighters
    roster = state.roster
    for idx, inp in ((0, ai_input), (1, player_input)):
        if inp is None:
            continue
        f = fighters[idx]
        if f.action is not None:
            raise IllegalActionError(f"{ACTOR_NAMES[idx]} is busy with {f.action.id!r}")
        spec = roster[inp]
        f.action = spec
        f.t = 0
        f.last_action = inp
        f.last_start = state.frame
        if events is not None:
            events.append(("start", idx, inp))

    for f in fighters:
        if f.action is not None:
            f.t += 1

    cfg = state.config
    for idx in (0, 1):
        f = fighters[idx]
        a = f.action
        if a is not None and a.move and a.startup < f.t <= a.startup + a.active:
            _translate(f, fighters[1 - idx], a.move / a.active, cfg)

    damage = [0, 0]
    push = [0.0, 0.0]
    dist = abs(fighters[1].pos - fighters[0].pos)
    for idx in (0, 1):
        f = fighters[idx]
        a = f.action
        if a is None or a.damage == 0 or f.t != a.startup + 1:
            continue
        if dist > a.reach:
            continue
        d = fighters[1 - idx]
        da = d.action
        if da is not None and da.avoids == a.height and da.startup < d.t <= da.startup + da.active:
            continue
        if da is not None and da.guard and a.guardable:
            dealt = int(a.damage * da.guard_ratio)
        else:
            dealt = a.damage
            push[1 - idx] += a.knockback
        damage[1 - idx] += dealt
        if events is not None:
            events.append(("hit", idx, a.id, dealt))
    for idx in (0, 1):
        f = fighters[idx]
        if damage[idx]:
            f.hp = max(0, f.hp - damage[idx])
        if push[idx]:
            _translate(f, fighters[1 - idx], -push[idx], cfg)

    for f in fighters:
        a = f.action
        if a is not None and f.t >= a.total:
            f.action = None
            f.t = 0
    state.frame += 1


def _translate(f: Fighter, opp: Fighter, toward: float, cfg: GameConfig) -> None:
    """Move ``f`` by ``toward`` in the direction of ``opp``, staying on stage and apart."""
    direction = 1.0 if opp.pos >= f.pos else -1.0
    new = f.pos + direction * toward
    new = min(max(new, 0.0), cfg.stage_width)
    closest = opp.pos - direction * cfg.min_distance
    if direction > 0:
        new = min(new, max(f.pos, closest))
    else:
        new = max(new, min(f.pos, closest))
    f.pos = new


@dataclass(frozen=True)
class RoundResult:
    winner: str  # "ai" | "player" | "draw"
    hp: tuple[int, int]
    frames: int


def round_result(state: GameState) -> RoundResult:
    ai_hp, pl_hp = state.hp()
    if ai_hp > pl_hp:
        winner = "ai"
    elif pl_hp > ai_hp:
        winner = "player"
    else:
        winner = "draw"
    return RoundResult(winner, (ai_hp, pl_hp), state.frame)


Policy = Callable[[GameState], "str | None"]


def run_round(ai_policy: Policy, player_policy: Policy, limit_frames: int | None = None,
              seed: int = 0, *, roster: Roster | None = None, config: GameConfig | None = None,
              observer: Callable[[GameState, list], None] | None = None,
              meta: dict | None = None) -> tuple[RoundResult, BattleLog]:
    """Play one round to KO or time-out.

    Policies are asked for an input only when their fighter is free. The
    engine itself is deterministic, so with seeded policies the round is
    reproducible; ``seed`` is recorded in the log header.
    """
    config = config or GameConfig()
    if limit_frames is not None:
        if limit_frames <= 0:
            raise ConfigError("limit_frames must be positive")
        config = GameConfig(**{**config.__dict__, "round_frames": limit_frames})
    state = GameState.initial(roster, config)
    log = BattleLog(meta={"seed": seed, "round_frames": config.round_frames, **(meta or {})})
    while not state.terminal:
        ai_in = ai_policy(state) if state.fighters[0].action is None else None
        pl_in = player_policy(state) if state.fighters[1].action is None else None
        frame = state.frame
        events: list = []
        step_inplace(state, ai_in, pl_in, events)
        for ev in events:
            if ev[0] == "start":
                log.add(frame, ACTOR_NAMES[ev[1]], ev[2])
        if observer is not None:
            observer(state, events)
    return round_result(state), log
