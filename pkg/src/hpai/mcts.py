"""Open-loop Monte-Carlo tree search over AI action sequences.

Each tree edge is one complete AI action. A simulation replays the path's
actions from the root state while the opponent plays the same number of
uniformly random actions, then scores the HP exchange.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass

from .errors import ConfigError, IllegalActionError
from .game import GameState, step_inplace

RANK_CRITERIA = ("visits", "mean")


def ucb1(mean: float, child_visits: int, parent_visits: int, c: float) -> float:
    if child_visits == 0:
        return math.inf
    return mean + c * math.sqrt(2.0 * math.log(parent_visits) / child_visits)


def rollout_eval(hp_before: tuple[int, int], hp_after: tuple[int, int]) -> float:
    """HP change of the AI minus HP change of the player."""
    return (hp_after[0] - hp_before[0]) - (hp_after[1] - hp_before[1])


@dataclass(frozen=True)
class SearchConfig:
    c: float = 3.0
    depth_threshold: int = 3
    visit_threshold: int = 10
    budget: int = 3000
    time_budget: float | None = None  # seconds; replaces the iteration budget when set
    n_candidates: int = 3
    rank_by: str = "visits"

    def __post_init__(self):
        if self.c < 0:
            raise ConfigError("exploration constant must be >= 0")
        if self.depth_threshold < 1 or self.visit_threshold < 0:
            raise ConfigError("depth_threshold must be >= 1 and visit_threshold >= 0")
        if self.n_candidates < 1:
            raise ConfigError("n_candidates must be >= 1")
        if self.rank_by not in RANK_CRITERIA:
            raise ConfigError(f"rank_by must be one of {RANK_CRITERIA}")
        if self.time_budget is None and self.budget < 1:
            raise ConfigError("search budget must be >= 1 iteration")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ConfigError("time_budget must be positive")


class Node:
    __slots__ = ("action", "parent", "children", "visits", "total", "depth")

    def __init__(self, action: str | None, parent: "Node | None", depth: int):
        self.action = action
        self.parent = parent
        self.children: list[Node] = []
        self.visits = 0
        self.total = 0.0
        self.depth = depth

    @property
    def mean(self) -> float:
        return self.total / self.visits if self.visits else 0.0

    def expand(self, actions) -> None:
        self.children = [Node(a, self, self.depth + 1) for a in actions]


@dataclass(frozen=True)
class Candidate:
    action: str
    score: float
    rank: int
    visits: int
    mean: float


def search(root_state: GameState, config: SearchConfig, rng: random.Random) -> list[Candidate]:
    return MCTS(config, rng).search(root_state)


class MCTS:
    def __init__(self, config: SearchConfig, rng: random.Random):
        self.config = config
        self.rng = rng
        self.root: Node | None = None

    def search(self, root_state: GameState) -> list[Candidate]:
        if root_state.terminal:
            raise IllegalActionError("cannot search from a terminal state")
        if root_state.fighters[0].action is not None:
            raise IllegalActionError("AI is mid-action; nothing to decide")
        cfg = self.config
        actions = list(root_state.roster.ids)
        self.root = root = Node(None, None, 0)
        root.expand(actions)

        if cfg.time_budget is None:
            for _ in range(cfg.budget):
                self._iterate(root_state, actions)
        else:
            deadline = time.perf_counter() + cfg.time_budget
            self._iterate(root_state, actions)
            while time.perf_counter() < deadline:
                self._iterate(root_state, actions)
        return self.candidates()

    def _iterate(self, root_state: GameState, actions: list[str]) -> None:
        cfg = self.config
        node = self.root
        path: list[str] = []
        while node.children:
            node = self._select(node)
            path.append(node.action)
        if node.depth < cfg.depth_threshold and node.visits > cfg.visit_threshold:
            node.expand(actions)
            node = self._select(node)
            path.append(node.action)
        value = self._simulate(root_state, path, actions)
        while node is not None:
            node.visits += 1
            node.total += value
            node = node.parent

    def _select(self, node: Node) -> Node:
        c = self.config.c
        parent_n = node.visits
        best, best_val = None, -math.inf
        for child in node.children:
            if child.visits == 0:
                return child
            val = child.total / child.visits + c * math.sqrt(2.0 * math.log(parent_n) / child.visits)
            if val > best_val:
                best, best_val = child, val
        return best

    def _simulate(self, root_state: GameState, path: list[str], actions: list[str]) -> float:
        s = root_state.clone()
        before = s.hp()
        ai_q = list(reversed(path))
        choice = self.rng.choice
        opp_q = [choice(actions) for _ in path]
        ai, opp = s.fighters
        while not s.terminal:
            ai_in = None
            if ai.action is None:
                if not ai_q:
                    break
                ai_in = ai_q.pop()
            opp_in = opp_q.pop() if opp.action is None and opp_q else None
            step_inplace(s, ai_in, opp_in)
        return rollout_eval(before, s.hp())

    def candidates(self) -> list[Candidate]:
        children = self.root.children
        if self.config.rank_by == "visits":
            ordered = sorted(children, key=lambda n: (-n.visits, -n.mean, n.action))
            score = lambda n: float(n.visits)  # noqa: E731
        else:
            ordered = sorted(children, key=lambda n: (
                -(n.mean if n.visits else -math.inf), -n.visits, n.action))
            score = lambda n: n.mean  # noqa: E731
        return [Candidate(n.action, score(n), i + 1, n.visits, n.mean)
                for i, n in enumerate(ordered[: self.config.n_candidates])]

    def root_table(self) -> list[tuple[str, int, float]]:
        return [(n.action, n.visits, n.mean) for n in self.root.children]
