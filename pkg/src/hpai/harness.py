"""Bootstrap A2C tables and run paired baseline vs HP-AI sessions against
simulated player profiles."""
from __future__ import annotations

import csv
import io
import json
import logging
import random
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .controller import SELECTION_RULES, SearchPolicy
from .errors import ConfigError
from .game import GameConfig, Roster, RoundResult, default_roster, run_round
from .health import HealthState, balancedness, build_a2mm, expected_momentum, write_a2mm_csv
from .mcts import SearchConfig
from .motion import MomentumVector, MotionDb, load_motion_db
from .opponent import (
    PAIRING_MODES, A2CTable, BattleLog, PlayerProfile, SimulatedPlayer, build_a2c,
    extract_counteraction_pairs, load_c2m, one_sided_table, symmetric_table, validate_c2m,
)

log = logging.getLogger(__name__)

CONDITIONS = ("baseline", "hpai")
LOGIC_FPS = 60
CAPTURE_FPS = 25


@dataclass(frozen=True)
class ProfileSpec:
    id: str
    kind: str = "one_sided"
    delay: int = 6
    seed: int = 0
    dominant: str = "r"
    limbs: tuple[str, ...] = ("arm",)
    strength: float = 3.0
    mirror: float = 2.0
    sigma: float = 0.8
    idle_weight: float = 0.3
    table: str | None = None  # explicit generative A2C file, overrides ``kind``
    idle_drift: float | None = None

    def generative_table(self, roster: Roster) -> A2CTable:
        ids = roster.ids
        if self.table is not None:
            return A2CTable.load(self.table)
        if self.kind == "one_sided":
            return one_sided_table(ids, ids, dominant=self.dominant, limbs=self.limbs,
                                   strength=self.strength, mirror=self.mirror, sigma=self.sigma,
                                   idle_weight=self.idle_weight, seed=self.seed)
        if self.kind == "symmetric":
            return symmetric_table(ids, ids, idle_weight=self.idle_weight, seed=self.seed)
        raise ConfigError(f"profile {self.id!r}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    profiles: tuple[ProfileSpec, ...]
    rounds: dict[str, int] = field(default_factory=lambda: {c: 9 for c in CONDITIONS})
    bootstrap_rounds: int = 9
    search: SearchConfig = SearchConfig()
    game: GameConfig = GameConfig()
    roster_overrides: dict = field(default_factory=dict)
    roster_file: str | None = None
    selection_rule: str = "argmax_dec"
    reset_per_round: bool = False
    seed: int = 0
    out: str = "results"
    a2c_mode: str = "per_profile"
    a2c_dir: str | None = None
    pairing: str = "most_recent"
    motion_db: str | None = None
    c2m: str | None = None
    idle_drift: float = 0.02
    debug_search: bool = False

    def validate(self) -> None:
        if not self.profiles:
            raise ConfigError("at least one profile is required")
        ids = [p.id for p in self.profiles]
        if len(set(ids)) != len(ids):
            raise ConfigError("profile ids must be unique")
        for p in self.profiles:
            if p.delay < 0:
                raise ConfigError(f"profile {p.id!r}: delay must be >= 0")
        for cond in CONDITIONS:
            if self.rounds.get(cond, 0) < 1:
                raise ConfigError(f"rounds for condition {cond!r} must be >= 1")
        if self.bootstrap_rounds < 0:
            raise ConfigError("bootstrap_rounds must be >= 0")
        if self.selection_rule not in SELECTION_RULES:
            raise ConfigError(f"selection_rule must be one of {SELECTION_RULES}")
        if self.a2c_mode not in ("per_profile", "pooled"):
            raise ConfigError("a2c_mode must be per_profile or pooled")
        if self.pairing not in PAIRING_MODES:
            raise ConfigError(f"pairing must be one of {PAIRING_MODES}")
        if self.idle_drift < 0:
            raise ConfigError("idle_drift must be >= 0")


def _pick(section: Mapping[str, Any], cls, where: str) -> dict:
    known = set(cls.__dataclass_fields__)
    unknown = set(section) - known
    if unknown:
        raise ConfigError(f"[{where}]: unknown keys {sorted(unknown)}")
    return dict(section)


def config_from_dict(data: Mapping[str, Any], base_dir: Path | None = None) -> ExperimentConfig:
    try:
        return _config_from_dict(data, base_dir)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def _config_from_dict(data, base_dir):
    extra = set(data) - {"profiles", "search", "game", "experiment"}
    if extra:
        raise ConfigError(f"unknown config sections {sorted(extra)}")
    profiles = []
    for pid, spec in (data.get("profiles") or {}).items():
        if not isinstance(spec, Mapping):
            raise ConfigError(f"[profiles.{pid}] must be a table")
        spec = _pick(spec, ProfileSpec, f"profiles.{pid}")
        if "limbs" in spec:
            spec["limbs"] = tuple(spec["limbs"])
        if spec.get("table") and base_dir is not None:
            spec["table"] = str(base_dir / spec["table"])
        profiles.append(ProfileSpec(id=pid, **spec))
    search = SearchConfig(**_pick(data.get("search", {}), SearchConfig, "search"))
    game_sec = dict(data.get("game", {}))
    roster_overrides = game_sec.pop("roster", {})
    roster_file = game_sec.pop("roster_file", None)
    game = GameConfig(**_pick(game_sec, GameConfig, "game"))
    exp = dict(data.get("experiment", {}))
    rounds = exp.pop("rounds", 9)
    if isinstance(rounds, Mapping):
        rounds = {c: int(rounds.get(c, 9)) for c in CONDITIONS}
    else:
        rounds = {c: int(rounds) for c in CONDITIONS}
    for key in ("motion_db", "c2m", "a2c_dir"):
        if exp.get(key) and base_dir is not None:
            exp[key] = str(base_dir / exp[key])
    if roster_file and base_dir is not None:
        roster_file = str(base_dir / roster_file)
    cfg = ExperimentConfig(profiles=tuple(profiles), rounds=rounds, search=search, game=game,
                           roster_overrides=roster_overrides, roster_file=roster_file,
                           **_pick(exp, ExperimentConfig, "experiment"))
    cfg.validate()
    return cfg


def load_config(path: str | Path | None = None) -> ExperimentConfig:
    """Read a TOML experiment config; ``None`` loads the bundled default."""
    if path is None:
        text = resources.files("hpai").joinpath("data/experiment.toml").read_text(encoding="utf-8")
        base = None
    else:
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        base = path.parent
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data, base)


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from arbitrary labels (string seeding hashes with SHA-512)."""
    return random.Random(":".join(str(p) for p in parts)).getrandbits(63)


def load_resources(cfg: ExperimentConfig) -> tuple[Roster, MotionDb, dict[str, str]]:
    roster = Roster.load(cfg.roster_file) if cfg.roster_file else default_roster()
    if cfg.roster_overrides:
        roster = roster.with_overrides(cfg.roster_overrides)
    if cfg.motion_db:
        db = load_motion_db(cfg.motion_db)
    else:
        db = {m: MomentumVector.from_dict(v) for m, v in json.loads(
            resources.files("hpai").joinpath("data/motion_db.json").read_text(encoding="utf-8")).items()}
    if cfg.c2m:
        c2m = load_c2m(cfg.c2m)
    else:
        c2m = json.loads(resources.files("hpai").joinpath("data/c2m.json").read_text(encoding="utf-8"))
    validate_c2m(c2m, roster.ids, db)
    return roster, db, c2m


class HealthTracker:
    """Owns the player's accumulated momentum for one session.

    Each player action adds its motion's momentum at initiation; symmetric
    idle drift accrues every logic frame. A series row is sampled at the
    capture rate.
    """

    def __init__(self, db: MotionDb, c2m: Mapping[str, str], idle_drift: float):
        self.db = db
        self.c2m = c2m
        per_frame = idle_drift / LOGIC_FPS
        self.drift = MomentumVector(per_frame, per_frame, per_frame, per_frame)
        self.am = MomentumVector()
        self.rows: list[tuple[int, float, float, float]] = []
        self._last_sample = -1

    def start_round(self, reset: bool) -> None:
        if reset:
            self.am = MomentumVector()
        self.rows = []
        self._last_sample = -1

    def state(self) -> HealthState:
        return HealthState.from_am(self.am)

    def observe(self, state, events) -> None:
        for ev in events:
            if ev[0] == "start" and ev[1] == 1:
                self.am = self.am + self.db[self.c2m[ev[2]]]
        self.am = self.am + self.drift
        k = state.frame * CAPTURE_FPS // LOGIC_FPS
        if k > self._last_sample:
            self._last_sample = k
            self.rows.append((k, self.am.total(), expected_momentum(self.am).total(),
                              balancedness(self.am)))


@dataclass
class SessionResult:
    profile: str
    condition: str
    final_bal: float
    final_am: MomentumVector
    rounds: list[RoundResult]
    series: list[list[tuple]]
    decisions: list[list[dict]]
    logs: list[BattleLog]
    search_tables: list[list[tuple]]

    @property
    def wins(self) -> int:
        return sum(r.winner == "ai" for r in self.rounds)


@dataclass
class ExperimentReport:
    sessions: list[SessionResult]
    a2c: dict[str, A2CTable]
    seed: int

    def row(self, profile: str, condition: str) -> SessionResult:
        for s in self.sessions:
            if s.profile == profile and s.condition == condition:
                return s
        raise KeyError((profile, condition))


def bootstrap_a2c(cfg: ExperimentConfig, out: str | Path | None = None,
                  resources_=None) -> dict[str, A2CTable]:
    """Build each profile's A2C table from baseline-AI rounds against it.

    Returns tables keyed by profile id (plus ``"pooled"`` in pooled mode)
    and persists tables and battle logs under ``out`` when given.
    """
    cfg.validate()
    roster, db, c2m = resources_ or load_resources(cfg)
    out_dir = Path(out) if out is not None else None
    if out_dir is not None:
        (out_dir / "bootstrap").mkdir(parents=True, exist_ok=True)
    tables: dict[str, A2CTable] = {}
    pooled: list[tuple[str, str]] = []
    for prof in cfg.profiles:
        profile = PlayerProfile(prof.id, prof.delay, prof.generative_table(roster), prof.seed)
        pairs: list[tuple[str, str]] = []
        for r in range(cfg.bootstrap_rounds):
            player = SimulatedPlayer(profile, random.Random(derive_seed(cfg.seed, "boot", prof.id, r, "player")))
            ai = SearchPolicy(cfg.search, health_first=False,
                              seed=derive_seed(cfg.seed, "boot", prof.id, r, "ai"))
            _, blog = run_round(ai, player, seed=derive_seed(cfg.seed, "boot", prof.id, r),
                                roster=roster, config=cfg.game,
                                meta={"profile": prof.id, "phase": "bootstrap", "round": r})
            pairs += extract_counteraction_pairs(blog, cfg.pairing)
            if out_dir is not None:
                blog.save(out_dir / "bootstrap" / f"battle_{prof.id}_{r}.jsonl")
        tables[prof.id] = build_a2c(pairs, roster.ids, roster.ids)
        pooled += pairs
        log.info("bootstrapped %s from %d pairs", prof.id, len(pairs))
    if cfg.a2c_mode == "pooled":
        tables["pooled"] = build_a2c(pooled, roster.ids, roster.ids)
    if out_dir is not None:
        for key, table in tables.items():
            table.save(out_dir / f"a2c_{key}.json")
    return tables


def run_session(cfg: ExperimentConfig, prof: ProfileSpec, condition: str, a2c: A2CTable,
                roster: Roster, db: MotionDb, c2m: Mapping[str, str]) -> SessionResult:
    profile = PlayerProfile(prof.id, prof.delay, prof.generative_table(roster), prof.seed)
    a2mm = build_a2mm(a2c, c2m, db)
    drift = cfg.idle_drift if prof.idle_drift is None else prof.idle_drift
    tracker = HealthTracker(db, c2m, drift)
    results, series, decisions, logs, tables = [], [], [], [], []
    for r in range(cfg.rounds[condition]):
        tracker.start_round(cfg.reset_per_round and r > 0)
        # paired design: both conditions share these seeds, only the AI's selection differs
        player = SimulatedPlayer(profile, random.Random(derive_seed(cfg.seed, "eval", prof.id, r, "player")))
        root_rows: list[tuple] = []
        on_search = None
        if cfg.debug_search:
            def on_search(frame, engine, _rows=root_rows):
                _rows.extend((frame, a, n, m) for a, n, m in engine.root_table())
        ai = SearchPolicy(cfg.search, health_first=(condition == "hpai"), health=tracker.state,
                          a2mm=a2mm, rule=cfg.selection_rule,
                          seed=derive_seed(cfg.seed, "eval", prof.id, r, "ai"), on_search=on_search)
        res, blog = run_round(ai, player, seed=derive_seed(cfg.seed, "eval", prof.id, r),
                              roster=roster, config=cfg.game, observer=tracker.observe,
                              meta={"profile": prof.id, "condition": condition, "round": r})
        results.append(res)
        series.append(tracker.rows)
        decisions.append([d.audit(frame, condition) for frame, d in ai.decisions])
        logs.append(blog)
        tables.append(root_rows)
    return SessionResult(prof.id, condition, balancedness(tracker.am), tracker.am,
                         results, series, decisions, logs, tables)


def run_experiment(cfg: ExperimentConfig, a2c: Mapping[str, A2CTable] | None = None,
                   out: str | Path | None = None) -> ExperimentReport:
    cfg.validate()
    res = load_resources(cfg)
    roster, db, c2m = res
    if a2c is None:
        if cfg.a2c_dir:
            a2c = load_a2c_dir(cfg)
        else:
            a2c = bootstrap_a2c(cfg, out, res)
    sessions = []
    for prof in cfg.profiles:
        table = a2c["pooled"] if cfg.a2c_mode == "pooled" else a2c[prof.id]
        for cond in CONDITIONS:
            log.info("running %s / %s", prof.id, cond)
            sessions.append(run_session(cfg, prof, cond, table, roster, db, c2m))
    report = ExperimentReport(sessions, dict(a2c), cfg.seed)
    if out is not None:
        emit_reports(report, out, res)
    return report


def load_a2c_dir(cfg: ExperimentConfig) -> dict[str, A2CTable]:
    base = Path(cfg.a2c_dir)
    keys = ["pooled"] if cfg.a2c_mode == "pooled" else [p.id for p in cfg.profiles]
    tables = {}
    for k in keys:
        path = base / f"a2c_{k}.json"
        if not path.exists():
            raise FileNotFoundError(f"missing A2C table {path}")
        tables[k] = A2CTable.load(path)
    return tables


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


def emit_reports(report: ExperimentReport, out: str | Path, resources_=None) -> list[Path]:
    """Write the balancedness summary, per-round series, audits and logs."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name: str, text: str) -> None:
        p = out / name
        p.write_text(text, encoding="utf-8")
        written.append(p)

    summary = []
    for s in report.sessions:
        summary.append([s.profile, s.condition, repr(s.final_bal), f"{100 * s.final_bal:.2f}",
                        s.wins, len(s.rounds)])
    put("bal_summary.csv", _csv_text(
        ["profile", "condition", "bal", "bal_percent", "wins", "rounds"], summary))

    for s in report.sessions:
        for r, rows in enumerate(s.series):
            put(f"series_{s.profile}_{s.condition}_{r}.csv",
                _csv_text(["frame", "am_sum", "em_sum", "bal"], [[_fmt(v) for v in row] for row in rows]))
        for r, decs in enumerate(s.decisions):
            put(f"decisions_{s.profile}_{s.condition}_{r}.jsonl",
                "".join(json.dumps(d, sort_keys=True) + "\n" for d in decs))
        for r, blog in enumerate(s.logs):
            put(f"battle_{s.profile}_{s.condition}_{r}.jsonl", blog.dumps())
        for r, rows in enumerate(s.search_tables):
            if rows:
                put(f"search_{s.profile}_{s.condition}_{r}.csv",
                    _csv_text(["frame", "action", "visits", "mean"], [[_fmt(v) for v in row] for row in rows]))

    if resources_ is not None:
        _, db, c2m = resources_
        for key, table in report.a2c.items():
            p = out / f"a2mm_{key}.csv"
            write_a2mm_csv(p, build_a2mm(table, c2m, db))
            written.append(p)

    results = {
        "seed": report.seed,
        "sessions": [
            {"profile": s.profile, "condition": s.condition, "final_bal": s.final_bal,
             "final_am": s.final_am.to_dict(), "wins": s.wins,
             "rounds": [{"winner": r.winner, "hp": list(r.hp), "frames": r.frames} for r in s.rounds]}
            for s in report.sessions
        ],
    }
    put("report.json", json.dumps(results, indent=2, sort_keys=True) + "\n")
    return written


def bal_table(report: ExperimentReport) -> str:
    """Plain-text balancedness table, one column per profile."""
    profiles = list(dict.fromkeys(s.profile for s in report.sessions))
    lines = ["condition\t" + "\t".join(profiles)]
    for cond in CONDITIONS:
        cells = []
        for p in profiles:
            try:
                cells.append(f"{100 * report.row(p, cond).final_bal:.2f}%")
            except KeyError:
                cells.append("-")
        lines.append(cond + "\t" + "\t".join(cells))
    return "\n".join(lines)


def with_overrides(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    new = replace(cfg, **changes)
    new.validate()
    return new
