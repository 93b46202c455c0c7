"""Health-first action selection on top of MCTS candidates, and the two
AI policies compared in experiments."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .errors import ConfigError
from .health import HealthState, fitness_dec
from .mcts import MCTS, Candidate, SearchConfig
from .motion import MomentumVector

SELECTION_RULES = ("argmax_dec", "improve_else_strongest")


@dataclass(frozen=True)
class Decision:
    action: str
    candidates: tuple[Candidate, ...]
    scores: dict[str, float]
    health: HealthState

    def audit(self, frame: int, condition: str) -> dict:
        return {
            "frame": frame,
            "condition": condition,
            "chosen": self.action,
            "bal_before": self.health.bal,
            "candidates": [
                {"action": c.action, "rank": c.rank, "visits": c.visits, "mean": c.mean,
                 "dec": self.scores[c.action]}
                for c in self.candidates
            ],
        }


def choose_action(candidates: Sequence[Candidate], health: HealthState,
                  a2mm: Mapping[str, MomentumVector], rule: str = "argmax_dec") -> Decision:
    """Pick the candidate predicted to shrink the player's gap the most.

    Ties go to the stronger (lower-ranked) candidate. Under
    ``improve_else_strongest`` only candidates with positive dec compete and
    the strongest candidate is used when none improves.
    """
    if not candidates:
        raise ConfigError("no candidates to choose from")
    if rule not in SELECTION_RULES:
        raise ConfigError(f"unknown selection rule {rule!r}")
    scores = {}
    for c in candidates:
        if c.action not in a2mm:
            raise ConfigError(f"candidate {c.action!r} missing from the A2Mm table")
        scores[c.action] = fitness_dec(health.gap, a2mm[c.action])
    by_rank = sorted(candidates, key=lambda c: c.rank)
    pool = by_rank
    if rule == "improve_else_strongest":
        pool = [c for c in by_rank if scores[c.action] > 0] or by_rank[:1]
    best = max(pool, key=lambda c: (scores[c.action], -c.rank))
    return Decision(best.action, tuple(by_rank), scores, health)


class SearchPolicy:
    """AI policy: run MCTS whenever the AI is free.

    With ``health_first`` the controller filters the candidates by predicted
    gap decrease (HP-AI); without it the rank-1 candidate is played (the
    plain MCTS baseline). Decisions are kept for auditing either way.
    """

    def __init__(self, config: SearchConfig, *, health_first: bool,
                 health: Callable[[], HealthState] | None = None,
                 a2mm: Mapping[str, MomentumVector] | None = None,
                 rule: str = "argmax_dec", seed: int = 0,
                 on_search: Callable[[int, MCTS], None] | None = None):
        if health_first and (health is None or a2mm is None):
            raise ConfigError("HP-AI needs a health source and an A2Mm table")
        self.config = config
        self.health_first = health_first
        self.health = health
        self.a2mm = a2mm
        self.rule = rule
        self.on_search = on_search
        self.rng = random.Random(seed)
        self.decisions: list[tuple[int, Decision]] = []

    @property
    def condition(self) -> str:
        return "hpai" if self.health_first else "baseline"

    def __call__(self, state) -> str:
        engine = MCTS(self.config, self.rng)
        cands = engine.search(state)
        if self.on_search is not None:
            self.on_search(state.frame, engine)
        health = self.health() if self.health is not None else None
        if self.a2mm is not None and health is not None:
            decision = choose_action(cands, health, self.a2mm, self.rule)
            if not self.health_first:
                decision = Decision(cands[0].action, decision.candidates, decision.scores, health)
        else:
            decision = Decision(cands[0].action, tuple(cands), {c.action: 0.0 for c in cands},
                                health or HealthState.from_am(MomentumVector()))
        self.decisions.append((state.frame, decision))
        return decision.action


@dataclass
class RandomPolicy:
    """Uniform over the roster; used for bootstrapping tests and sanity runs."""

    seed: int = 0
    rng: random.Random = field(init=False)

    def __post_init__(self):
        self.rng = random.Random(self.seed)

    def __call__(self, state) -> str:
        return self.rng.choice(state.roster.ids)
