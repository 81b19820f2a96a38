"""Persistent campaign service: the suggest -> measure -> record loop over HTTP.

Campaigns are event-sourced: every mutation appends one JSON line (fsynced) to
a per-campaign log under the data directory, and the in-memory view is always
reconstructable by replay, so a killed process resumes exactly where it
stopped. Mutations within one campaign are serialized by a per-campaign lock;
reads and other campaigns are unaffected.

The human-vs-optimizer game keeps its oracle configuration server-side only;
no response payload ever contains the oracle constants. Game sessions are
in-memory (the durability guarantee covers campaigns).
"""

import json
import math
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .benchmark import auc_trapezoid
from .errors import DomainError, StateError
from .fixtures import FixtureRow, load_fixture, rows_to_csv
from .simulator import SimConfig, max_attainable_size, run_experiment
from .space import DesignPoint, DesignSpace, default_space
from .strategy import (
    STRATEGIES,
    CampaignState,
    Observation,
    check_stopping,
    derive_seed,
    regret,
    suggest,
)


class NotFoundError(LookupError):
    pass


def _points_equal(a: dict, b: dict) -> bool:
    if set(a) != set(b):
        return False
    for key, va in a.items():
        vb = b[key]
        if isinstance(va, str) or isinstance(vb, str):
            if str(va) != str(vb):
                return False
        elif not math.isclose(float(va), float(vb), rel_tol=1e-9, abs_tol=1e-12):
            return False
    return True


@dataclass
class CampaignRecord:
    """Replayed view of one campaign's event log."""

    id: str
    created_at: float
    space: DesignSpace
    target: float
    strategy: str
    tolerance: float
    seed: int
    events: list[dict] = field(default_factory=list)
    observations: list[Observation] = field(default_factory=list)
    pending: list[dict] = field(default_factory=list)
    iterations_completed: int = 0
    pending_suggestion: list[dict] = field(default_factory=list)
    stopped_reason: str | None = None

    def state(self) -> CampaignState:
        return CampaignState(
            space=self.space,
            target=self.target,
            strategy=self.strategy,
            observations=tuple(self.observations),
            iteration=self.iterations_completed,
            seed=self.seed,
        )

    def apply(self, event: dict) -> None:
        self.events.append(event)
        kind = event["event"]
        if kind == "initialized":
            self.pending.extend(event["points"])
        elif kind == "suggested":
            self.pending_suggestion = list(event["points"])
            self.pending.extend(event["points"])
        elif kind == "observed":
            point = event["point"]
            for pend in self.pending:
                if _points_equal(pend, point):
                    self.pending.remove(pend)
                    break
            for pend in self.pending_suggestion:
                if _points_equal(pend, point):
                    self.pending_suggestion.remove(pend)
                    break
            if not self.pending_suggestion:
                self.iterations_completed = sum(1 for e in self.events if e["event"] == "suggested")
            self.observations.append(
                Observation(
                    point=DesignPoint(dict(point)),
                    size=float(event["size"]),
                    feasible=bool(event["feasible"]),
                )
            )
        elif kind == "stopped":
            self.stopped_reason = event["reason"]

    def view(self) -> dict:
        state = self.state()
        r = regret(state)
        return {
            "id": self.id,
            "created_at": self.created_at,
            "target": self.target,
            "strategy": self.strategy,
            "tolerance": self.tolerance,
            "seed": self.seed,
            "space": self.space.to_dict(),
            "iteration": self.iterations_completed,
            "observations": [
                {"point": o.point.as_dict(), "size": o.size, "feasible": o.feasible}
                for o in self.observations
            ],
            "pending_points": [dict(p) for p in self.pending],
            "pending_suggestion": [dict(p) for p in self.pending_suggestion],
            "regret": None if math.isinf(r) else r,
            "regret_series": self.regret_series(),
            "stopped": self.stopped_reason is not None,
            "stopped_reason": self.stopped_reason,
            "n_events": len(self.events),
        }

    def regret_series(self) -> list[float | None]:
        """Best-so-far regret after each observation (None before any feasible one)."""
        series: list[float | None] = []
        best: float | None = None
        for obs in self.observations:
            if obs.feasible:
                d = abs(obs.size - self.target)
                best = d if best is None else min(best, d)
            series.append(best)
        return series


class CampaignStore:
    def __init__(self, data_dir, mc_samples: int = 512):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.mc_samples = mc_samples
        # test builds re-replay the log after every mutation and compare views
        self.verify_replay = os.environ.get("CCBO_DEBUG_CHECKS", "") == "1"
        self._records: dict[str, CampaignRecord] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._global = threading.Lock()
        for path in sorted(self.data_dir.glob("*.jsonl")):
            record = self._replay(path)
            if record is not None:
                self._records[record.id] = record
                self._locks[record.id] = threading.Lock()

    # -- persistence ----------------------------------------------------------

    def _path(self, campaign_id: str) -> Path:
        return self.data_dir / f"{campaign_id}.jsonl"

    def _append(self, record: CampaignRecord, event: dict) -> None:
        line = json.dumps(event, sort_keys=True)
        with open(self._path(record.id), "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        record.apply(event)
        if self.verify_replay:
            replayed = self._replay(self._path(record.id))
            if replayed is None or replayed.view() != record.view():
                raise AssertionError(f"event-log replay diverged for campaign {record.id}")

    def _replay(self, path: Path) -> CampaignRecord | None:
        record = None
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                if event["event"] == "created":
                    record = CampaignRecord(
                        id=event["id"],
                        created_at=event["created_at"],
                        space=DesignSpace.from_dict(event["space"]),
                        target=event["target"],
                        strategy=event["strategy"],
                        tolerance=event["tolerance"],
                        seed=event["seed"],
                    )
                    record.events.append(event)
                elif record is not None:
                    record.apply(event)
        return record

    # -- operations -------------------------------------------------------------

    def _lock(self, campaign_id: str) -> threading.Lock:
        with self._global:
            if campaign_id not in self._locks:
                raise NotFoundError(f"unknown campaign {campaign_id!r}")
            return self._locks[campaign_id]

    def ids(self) -> list[str]:
        with self._global:
            return sorted(self._records, key=lambda i: self._records[i].created_at)

    def get(self, campaign_id: str) -> CampaignRecord:
        with self._global:
            try:
                return self._records[campaign_id]
            except KeyError:
                raise NotFoundError(f"unknown campaign {campaign_id!r}")

    def create(
        self,
        target: float,
        strategy: str = "ccbo",
        tolerance: float = 0.10,
        seed: int = 0,
        space: DesignSpace | None = None,
    ) -> CampaignRecord:
        if strategy not in STRATEGIES:
            raise DomainError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
        if not (0.0 < float(target) <= 100.0):
            raise DomainError(f"target must lie in (0, 100] um, got {target}")
        if not (0.0 < float(tolerance) < 1.0):
            raise DomainError(f"tolerance fraction must lie in (0, 1), got {tolerance}")
        space = space or default_space()
        campaign_id = uuid.uuid4().hex[:12]
        record = CampaignRecord(
            id=campaign_id,
            created_at=time.time(),
            space=space,
            target=float(target),
            strategy=strategy,
            tolerance=float(tolerance),
            seed=int(seed),
        )
        event = {
            "event": "created",
            "id": campaign_id,
            "created_at": record.created_at,
            "space": space.to_dict(),
            "target": record.target,
            "strategy": strategy,
            "tolerance": record.tolerance,
            "seed": record.seed,
        }
        with self._global:
            self._records[campaign_id] = record
            self._locks[campaign_id] = threading.Lock()
        self._append_created(record, event)
        return record

    def _append_created(self, record: CampaignRecord, event: dict) -> None:
        line = json.dumps(event, sort_keys=True)
        with open(self._path(record.id), "w", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        record.events.append(event)

    def initialize(self, campaign_id: str, n: int = 8, seed: int | None = None) -> list[dict]:
        with self._lock(campaign_id):
            record = self.get(campaign_id)
            self._ensure_active(record)
            if n < 1:
                raise DomainError("initialization size n must be >= 1")
            sobol_seed = seed if seed is not None else derive_seed(record.seed, len(record.events), "init")
            points = [p.as_dict() for p in record.space.sobol_sample(n, seed=sobol_seed)]
            self._append(record, {"event": "initialized", "points": points, "seed": sobol_seed})
            return points

    def propose(self, campaign_id: str, q: int = 2) -> tuple[list[dict], bool]:
        """Returns (points, fresh). Idempotent until the pending suggestion is observed."""
        with self._lock(campaign_id):
            record = self.get(campaign_id)
            self._ensure_active(record)
            if record.pending_suggestion:
                return [dict(p) for p in record.pending_suggestion], False
            state = record.state()
            if record.strategy != "random" and len(record.observations) < 2:
                raise StateError(
                    f"strategy {record.strategy!r} needs at least 2 recorded observations; "
                    f"POST /campaigns/{campaign_id}/initialize to generate a quasi-random "
                    "starting design, then record its measured outcomes"
                )
            points = [p.as_dict() for p in suggest(state, q=q, mc_samples=self.mc_samples)]
            self._append(
                record,
                {"event": "suggested", "iteration": record.iterations_completed + 1, "points": points, "q": q},
            )
            return points, True

    def observe(
        self,
        campaign_id: str,
        point: dict,
        size: float,
        feasible: bool,
        manual: bool = False,
    ) -> dict:
        with self._lock(campaign_id):
            record = self.get(campaign_id)
            self._ensure_active(record)
            record.space.validate_point(DesignPoint(dict(point)))
            if size < 0 or not math.isfinite(size):
                raise DomainError(f"size must be finite and >= 0, got {size}")
            already = any(
                _points_equal(o.point.as_dict(), point) for o in record.observations
            )
            if already and not manual:
                raise StateError("point already observed; flag manual=true to record a repeat")
            known = any(_points_equal(p, point) for p in record.pending)
            if not known and not manual:
                raise DomainError(
                    "point was never suggested or initialized; flag manual=true to record "
                    "an off-protocol experiment"
                )
            self._append(
                record,
                {
                    "event": "observed",
                    "point": dict(point),
                    "size": float(size),
                    "feasible": bool(feasible),
                    "manual": bool(manual),
                },
            )
            state = record.state()
            if check_stopping(state, record.tolerance):
                self._append(record, {"event": "stopped", "reason": "target-reached"})
            return record.view()

    def _ensure_active(self, record: CampaignRecord) -> None:
        if record.stopped_reason is not None:
            raise StateError(f"campaign is stopped ({record.stopped_reason}); no further mutations")

    def export_csv(self, campaign_id: str) -> str:
        record = self.get(campaign_id)
        rows = [
            FixtureRow(label=str(i + 1), point=o.point, size=o.size, feasible=o.feasible)
            for i, o in enumerate(record.observations)
        ]
        return rows_to_csv(rows)


# -- the human-vs-optimizer game ------------------------------------------------


@dataclass
class GameSession:
    id: str
    target: float
    seed: int
    sim: SimConfig
    space: DesignSpace
    q: int = 2
    iteration_limit: int = 5
    player_obs: list[Observation] = field(default_factory=list)
    shadow_state: CampaignState | None = None
    player_regrets: list[float] = field(default_factory=list)
    shadow_regrets: list[float] = field(default_factory=list)
    iteration: int = 0

    def player_regret(self) -> float:
        best = math.inf
        for o in self.player_obs:
            if o.feasible:
                best = min(best, abs(o.size - self.target))
        return best

    def done(self) -> bool:
        return self.iteration >= self.iteration_limit

    def view(self) -> dict:
        cap = 2.0 * max_attainable_size(self.space, self.sim)

        def clean(xs):
            return [None if math.isinf(x) else x for x in xs]

        out = {
            "id": self.id,
            "target": self.target,
            "q": self.q,
            "iteration": self.iteration,
            "iteration_limit": self.iteration_limit,
            "done": self.done(),
            "start_observations": [
                {"point": o.point.as_dict(), "size": o.size, "feasible": o.feasible}
                for o in self.player_obs[: self._n_start]
            ],
            "player_history": [
                {"point": o.point.as_dict(), "size": o.size, "feasible": o.feasible}
                for o in self.player_obs[self._n_start :]
            ],
            "player_regrets": clean(self.player_regrets),
            "shadow_regrets": clean(self.shadow_regrets),
            "space": self.space.to_dict(),
        }
        if self.done():
            out["final"] = {
                "player_auc": auc_trapezoid(self.player_regrets, sentinel_cap=cap),
                "shadow_auc": auc_trapezoid(self.shadow_regrets, sentinel_cap=cap),
                "player_regret": clean(self.player_regrets[-1:])[0] if self.player_regrets else None,
                "shadow_regret": clean(self.shadow_regrets[-1:])[0] if self.shadow_regrets else None,
            }
        return out

    _n_start: int = 0


class GameStore:
    def __init__(self, mc_samples: int = 512, start_fixture: str = "table2-start"):
        self.mc_samples = mc_samples
        self.start_fixture = start_fixture
        self._games: dict[str, GameSession] = {}
        self._lock = threading.Lock()

    def create(self, target: float, seed: int = 0) -> GameSession:
        if not (0.0 < float(target) <= 100.0):
            raise DomainError(f"target must lie in (0, 100] um, got {target}")
        space = default_space()
        sim = SimConfig()
        start = []
        for row in load_fixture(self.start_fixture):
            res = run_experiment(row.point, sim)
            start.append(Observation(point=row.point, size=res.size, feasible=res.feasible))
        game = GameSession(
            id=uuid.uuid4().hex[:12],
            target=float(target),
            seed=int(seed),
            sim=sim,
            space=space,
            player_obs=list(start),
            shadow_state=CampaignState(
                space=space,
                target=float(target),
                strategy="ccbo",
                observations=tuple(start),
                seed=int(seed),
            ),
        )
        game._n_start = len(start)
        game.player_regrets.append(game.player_regret())
        game.shadow_regrets.append(regret(game.shadow_state))
        with self._lock:
            self._games[game.id] = game
        return game

    def get(self, game_id: str) -> GameSession:
        with self._lock:
            try:
                return self._games[game_id]
            except KeyError:
                raise NotFoundError(f"unknown game {game_id!r}")

    def submit(self, game_id: str, points: list[dict]) -> dict:
        game = self.get(game_id)
        if game.done():
            raise StateError(f"game is over after {game.iteration_limit} iterations")
        if len(points) != game.q:
            raise DomainError(f"submit exactly q={game.q} points, got {len(points)}")
        validated = []
        for p in points:
            dp = DesignPoint(dict(p))
            game.space.validate_point(dp)
            validated.append(dp)

        revealed = []
        for dp in validated:
            res = run_experiment(dp, game.sim)
            game.player_obs.append(Observation(point=dp, size=res.size, feasible=res.feasible))
            revealed.append({"point": dp.as_dict(), "size": res.size, "feasible": res.feasible})

        shadow_points = suggest(game.shadow_state, q=game.q, mc_samples=self.mc_samples)
        shadow_obs = []
        for dp in shadow_points:
            res = run_experiment(dp, game.sim)
            shadow_obs.append(Observation(point=dp, size=res.size, feasible=res.feasible))
        game.shadow_state = game.shadow_state.advanced(shadow_obs)

        game.iteration += 1
        game.player_regrets.append(game.player_regret())
        game.shadow_regrets.append(regret(game.shadow_state))

        pr = game.player_regrets[-1]
        sr = game.shadow_regrets[-1]
        out = {
            "revealed": revealed,
            "iteration": game.iteration,
            "player_regret": None if math.isinf(pr) else pr,
            "shadow_regret": None if math.isinf(sr) else sr,
            "done": game.done(),
        }
        if game.done():
            out["final"] = game.view()["final"]
        return out


# -- HTTP layer -------------------------------------------------------------------


class CreateCampaignRequest(BaseModel):
    target: float
    strategy: str = "ccbo"
    tolerance: float = 0.10
    seed: int = 0
    space: dict | None = None


class InitializeRequest(BaseModel):
    n: int = 8
    seed: int | None = None


class ObservationRequest(BaseModel):
    point: dict
    size: float
    feasible: bool
    manual: bool = False


class CreateGameRequest(BaseModel):
    target: float = 3.0
    seed: int = 0


class GameSubmitRequest(BaseModel):
    points: list[dict]


def create_app(
    data_dir=None,
    mc_samples: int = 512,
    default_q: int = 2,
    static_dir=None,
) -> FastAPI:
    data_dir = Path(data_dir or os.environ.get("CCBO_DATA_DIR", "./ccbo-data"))
    app = FastAPI(title="ccbo campaign service", version="0.1.0")
    store = CampaignStore(data_dir, mc_samples=mc_samples)
    games = GameStore(mc_samples=mc_samples)
    app.state.store = store
    app.state.games = games

    def _error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"code": code, "message": message})

    @app.exception_handler(DomainError)
    async def _domain(_req: Request, exc: DomainError):
        return _error(400, "validation", str(exc))

    @app.exception_handler(StateError)
    async def _state(_req: Request, exc: StateError):
        return _error(409, "state-conflict", str(exc))

    @app.exception_handler(NotFoundError)
    async def _missing(_req: Request, exc: NotFoundError):
        return _error(404, "not-found", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _reqval(_req: Request, exc: RequestValidationError):
        return _error(400, "validation", str(exc))

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/campaigns", status_code=201)
    def create_campaign(req: CreateCampaignRequest):
        space = DesignSpace.from_dict(req.space) if req.space else None
        record = store.create(
            target=req.target,
            strategy=req.strategy,
            tolerance=req.tolerance,
            seed=req.seed,
            space=space,
        )
        return record.view()

    @app.get("/campaigns")
    def list_campaigns():
        out = []
        for cid in store.ids():
            r = store.get(cid)
            out.append(
                {
                    "id": r.id,
                    "target": r.target,
                    "strategy": r.strategy,
                    "iteration": r.iterations_completed,
                    "n_observations": len(r.observations),
                    "stopped": r.stopped_reason is not None,
                }
            )
        return {"campaigns": out}

    @app.get("/campaigns/{campaign_id}")
    def get_campaign(campaign_id: str):
        return store.get(campaign_id).view()

    @app.post("/campaigns/{campaign_id}/initialize")
    def initialize(campaign_id: str, req: InitializeRequest):
        points = store.initialize(campaign_id, n=req.n, seed=req.seed)
        return {"points": points}

    @app.post("/campaigns/{campaign_id}/suggest")
    def suggest_points(campaign_id: str, q: int | None = Query(default=None, ge=1, le=16)):
        points, fresh = store.propose(campaign_id, q=q if q is not None else default_q)
        return {"points": points, "fresh": fresh}

    @app.post("/campaigns/{campaign_id}/observations")
    def record_observation(campaign_id: str, req: ObservationRequest):
        return store.observe(
            campaign_id, point=req.point, size=req.size, feasible=req.feasible, manual=req.manual
        )

    @app.get("/campaigns/{campaign_id}/export")
    def export(campaign_id: str):
        return PlainTextResponse(store.export_csv(campaign_id), media_type="text/csv")

    @app.post("/games", status_code=201)
    def create_game(req: CreateGameRequest):
        return games.create(target=req.target, seed=req.seed).view()

    @app.get("/games/{game_id}")
    def get_game(game_id: str):
        return games.get(game_id).view()

    @app.post("/games/{game_id}/submit")
    def submit_game(game_id: str, req: GameSubmitRequest):
        return games.submit(game_id, req.points)

    static = static_dir or os.environ.get("CCBO_STATIC_DIR")
    if static and Path(static).is_dir():
        app.mount("/", StaticFiles(directory=static, html=True), name="ui")

    return app
