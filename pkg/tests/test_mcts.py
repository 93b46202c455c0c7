import math
import random
from statistics import fmean

import pytest

from hpai.errors import ConfigError, IllegalActionError
from hpai.game import GameConfig, GameState, default_roster, step
from hpai.mcts import MCTS, SearchConfig, rollout_eval, search, ucb1

DOMINANT = "heavy_punch_r"


def dominant_state():
    """Every attack but one has its damage removed; fighters 15 apart."""
    base = default_roster()
    roster = base.with_overrides({a: {"damage": 0} for a in base.ids
                                  if base[a].damage and a != DOMINANT})
    return GameState.initial(roster, GameConfig(start_distance=15))


def one_ply_expectations(state):
    """Exhaustive oracle: each AI action against every opponent reply, one action each."""
    ids = state.roster.ids
    out = {}
    for a in ids:
        vals = []
        for b in ids:
            s, _ = step(state, a, b if state.fighters[1].free else None)
            while not s.terminal and not s.fighters[0].free:
                s, _ = step(s)
            vals.append(rollout_eval(state.hp(), s.hp()))
        out[a] = fmean(vals)
    return out


class TestUcb1:
    def test_no_exploration(self):
        assert ucb1(0.37, 4, 100, 0.0) == 0.37

    def test_direct_value(self):
        # 0.5 + sqrt(2 ln 10 / 5) = 0.5 + sqrt(0.921034) = 1.459705
        assert ucb1(0.5, 5, 10, 1.0) == pytest.approx(1.459705, abs=1e-6)

    def test_unvisited_child(self):
        assert ucb1(0.0, 0, 10, 1.0) == math.inf


class TestRolloutEval:
    def test_sign(self):
        assert rollout_eval((400, 400), (370, 350)) == 20

    def test_no_damage(self):
        assert rollout_eval((100, 90), (100, 90)) == 0

    def test_swap_negates(self):
        assert rollout_eval((400, 380), (390, 300)) == -rollout_eval((380, 400), (300, 390))


def test_config_validation():
    with pytest.raises(ConfigError):
        SearchConfig(n_candidates=0)
    with pytest.raises(ConfigError):
        SearchConfig(budget=0)
    with pytest.raises(ConfigError):
        SearchConfig(rank_by="luck")


def test_terminal_root_rejected():
    s = GameState.initial()
    s.frame = s.limit
    with pytest.raises(IllegalActionError):
        search(s, SearchConfig(budget=10), random.Random(0))


def test_oracle_confirms_dominance():
    exp = one_ply_expectations(dominant_state())
    best = max(exp, key=exp.get)
    assert best == DOMINANT
    assert exp[DOMINANT] > max(v for a, v in exp.items() if a != DOMINANT) + 5


def test_dominant_action_ranked_first():
    cands = search(dominant_state(), SearchConfig(budget=400), random.Random(3))
    assert cands[0].action == DOMINANT


def test_n_one_gives_single_candidate():
    cands = search(GameState.initial(), SearchConfig(budget=200, n_candidates=1), random.Random(0))
    assert len(cands) == 1 and cands[0].rank == 1


def test_determinism():
    cfg = SearchConfig(budget=300)
    a = search(GameState.initial(), cfg, random.Random(11))
    b = search(GameState.initial(), cfg, random.Random(11))
    assert a == b


def test_candidate_prefix_monotone():
    short = search(GameState.initial(), SearchConfig(budget=300, n_candidates=3), random.Random(5))
    long = search(GameState.initial(), SearchConfig(budget=300, n_candidates=6), random.Random(5))
    assert long[:3] == short
    assert [c.rank for c in long] == [1, 2, 3, 4, 5, 6]
    assert all(x.visits >= y.visits for x, y in zip(long, long[1:]))


def test_rank_by_mean():
    cands = search(GameState.initial(), SearchConfig(budget=300, rank_by="mean", n_candidates=16),
                   random.Random(2))
    means = [c.mean for c in cands if c.visits]
    assert means == sorted(means, reverse=True)


def _walk(node):
    yield node
    for c in node.children:
        yield from _walk(c)


@pytest.mark.parametrize("budget", [1, 16, 17, 150, 600])
def test_visit_conservation(budget):
    cfg = SearchConfig(budget=budget, visit_threshold=4)
    engine = MCTS(cfg, random.Random(budget))
    engine.search(GameState.initial())
    root = engine.root
    assert root.visits == budget
    assert root.visits == sum(c.visits for c in root.children)
    bound = 2 * 400
    for node in _walk(root):
        assert abs(node.mean) <= bound
        if node is not root and node.children:
            # leaf visits before expansion + everything routed through children
            assert node.visits == sum(c.visits for c in node.children) + cfg.visit_threshold + 1
            assert node.depth < cfg.depth_threshold
        assert node.depth <= cfg.depth_threshold


def test_unvisited_first():
    engine = MCTS(SearchConfig(budget=16), random.Random(0))
    engine.search(GameState.initial())
    assert [c.visits for c in engine.root.children] == [1] * 16


def test_time_budget_mode():
    cands = search(GameState.initial(), SearchConfig(time_budget=0.05), random.Random(0))
    assert len(cands) == 3


def test_busy_ai_rejected():
    s, _ = step(GameState.initial(), "heavy_kick_r", None)
    with pytest.raises(IllegalActionError):
        search(s, SearchConfig(budget=5), random.Random(0))
