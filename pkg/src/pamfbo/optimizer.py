"""The sequential multifidelity optimization loop.

One run: evaluate a per-level Latin hypercube design, then until the budget is
spent refit the surrogate on everything observed so far, maximize the
acquisition jointly over location and fidelity, evaluate the chosen level and
charge its cost ratio. The final query may overshoot the budget by at most one
top-level cost.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from pamfbo.acquisition import (
    Acquisition,
    ExpectedImprovementAcquisition,
    IdentityBias,
    PhysicsAwareAcquisition,
    PhysicsBias,
    build_context,
)
from pamfbo.constants import BUDGET_TOLERANCE, Algorithm
from pamfbo.errors import ConfigurationError, DomainError, FactorizationError, PamfboError
from pamfbo.mfgp import MfGpModel, ObservationSet, fit
from pamfbo.models import FitConfig, HistoryRecord, InitPlan, LevelHyperparameters, RunHistory, SearchConfig
from pamfbo.problems import MultifidelityProblem
from pamfbo.sampling import SeedLike, halton_pool, latin_hypercube

logger = logging.getLogger(__name__)

# Factor applied to jitter_max when a refit fails to factorize.
JITTER_RETRY_FACTOR = 100.0


@dataclass
class BudgetState:
    """Cumulative normalized cost against the run's maximum."""

    consumed: float = 0.0
    maximum: float = math.inf

    def charge(self, cost: float) -> float:
        if cost <= 0.0:
            raise DomainError(f"a query must cost a positive amount, got {cost}")
        self.consumed += cost
        return self.consumed

    @property
    def exhausted(self) -> bool:
        return self.consumed >= self.maximum * (1.0 - BUDGET_TOLERANCE)

    @property
    def remaining(self) -> float:
        return max(0.0, self.maximum - self.consumed)


@dataclass(frozen=True)
class AcquisitionChoice:
    """The next query. ``forced`` marks a pick that skipped a duplicate of an
    existing observation; ``fallback`` marks a maximal-variance top-level
    pick made because no candidate had positive utility or exploration was
    requested."""

    x: np.ndarray
    level: int
    value: float
    forced: bool = False
    fallback: bool = False


def initial_cost(counts: Sequence[int], cost_ratios: Sequence[float]) -> float:
    if len(counts) != len(cost_ratios):
        raise ConfigurationError(f"{len(counts)} initial counts given for {len(cost_ratios)} fidelity levels")
    return math.fsum(n * c for n, c in zip(counts, cost_ratios, strict=True))


def initialize(problem: MultifidelityProblem, plan: InitPlan, *, seed: int = 0, max_budget: float = math.inf) -> tuple[ObservationSet, BudgetState]:
    """Evaluate one Latin hypercube per level (lowest first).

    Level designs draw from independent child streams of the plan seed (the
    run seed when the plan has none), so changing one level's count leaves
    the other levels' designs unchanged.

    Raises:
        ConfigurationError: The plan does not have one count per level.
        EvaluatorError: An evaluator failed; the error carries the point.
    """
    if len(plan.counts) != problem.levels:
        raise ConfigurationError(f"initial plan has {len(plan.counts)} counts but problem '{problem.name}' has {problem.levels} levels")
    streams = np.random.SeedSequence(plan.seed if plan.seed is not None else seed).spawn(problem.levels)
    data = ObservationSet(problem.lower, problem.upper, problem.levels)
    state = BudgetState(maximum=max_budget)
    for level, (count, stream) in enumerate(zip(plan.counts, streams, strict=True), start=1):
        if count == 0:
            continue
        for x in latin_hypercube(count, problem.dimension, problem.bounds, stream):
            data = data.with_observation(x, level, problem.evaluate(x, level))
            state.charge(problem.cost_ratios[level - 1])
    logger.info(f"initial design: {[data.count(level) for level in range(1, problem.levels + 1)]} points per level, budget {state.consumed:g}")
    return data, state


def _to_problem_units(data: ObservationSet, z: np.ndarray) -> np.ndarray:
    return np.clip(data.unscale(np.clip(z, 0.0, 1.0)), data.lower, data.upper)


def _refine(acquisition: Acquisition, data: ObservationSet, start: np.ndarray, level: int, evaluations: int) -> tuple[np.ndarray, float]:
    def negative(z: np.ndarray) -> float:
        return -float(acquisition.batch(_to_problem_units(data, z).reshape(1, -1), level)[0])

    result = minimize(
        negative,
        start,
        method="Nelder-Mead",
        bounds=[(0.0, 1.0)] * start.size,
        options={"maxfev": evaluations, "xatol": 1e-9, "fatol": 1e-12},
    )
    return np.clip(result.x, 0.0, 1.0), -float(result.fun)


def _max_variance_pick(acquisition: Acquisition, data: ObservationSet, pool: np.ndarray, tolerance: float) -> AcquisitionChoice:
    top = acquisition.model.n_levels
    points = _to_problem_units(data, pool)
    _, variance = acquisition.model.predict_batch(points, top)
    order = np.lexsort((np.arange(len(points)), -variance))
    for index in order:
        if not data.is_duplicate(points[index], top, tolerance):
            value = float(acquisition.batch(points[index].reshape(1, -1), top)[0])
            return AcquisitionChoice(points[index], top, value, forced=True, fallback=True)
    raise DomainError("every candidate duplicates an existing top-level observation")


def maximize_acquisition(
    acquisition: Acquisition,
    search: SearchConfig,
    *,
    seed: SeedLike,
    existing: ObservationSet,
    explore: bool = False,
) -> AcquisitionChoice:
    """Joint maximizer of the acquisition over location and fidelity.

    A scrambled Halton pool of ``candidates_per_dimension * d`` points is
    scored at every level; the ``refine_top`` best ``(x, level)`` pairs are
    polished by a bounded simplex search at fixed level. Candidates are
    ranked by utility, then higher level, then lower pool index (refined
    points rank after the pool). A candidate within ``duplicate_tolerance``
    of an observation on the same level is skipped and the pick is marked
    forced. When no candidate has positive utility, or ``explore`` is set,
    the top-level candidate of maximal posterior variance is returned.
    """
    d = existing.dimension
    pool = halton_pool(search.candidates_per_dimension * d, d, seed)
    points = _to_problem_units(existing, pool)
    if explore:
        choice = _max_variance_pick(acquisition, existing, pool, search.duplicate_tolerance)
        logger.warning(f"forcing a top-level exploration query at {choice.x.tolist()} after repeated duplicate picks")
        return choice

    ranked: list[tuple[float, int, int, np.ndarray]] = []
    for level in acquisition.levels:
        values = acquisition.batch(points, level)
        ranked.extend((-float(u), -level, index, pool[index]) for index, u in enumerate(values))
    ranked.sort(key=lambda c: c[:3])

    n = len(pool)
    for j, (negative_value, negative_level, _, start) in enumerate(ranked[: search.refine_top]):
        if negative_value >= 0.0:
            break
        z, value = _refine(acquisition, existing, start, -negative_level, search.refine_evaluations)
        if value > -negative_value:
            ranked.append((-value, negative_level, n + j, z))
    ranked.sort(key=lambda c: c[:3])

    forced = False
    for negative_value, negative_level, _, z in ranked:
        if negative_value >= 0.0:
            break
        x, level = _to_problem_units(existing, z), -negative_level
        if existing.is_duplicate(x, level, search.duplicate_tolerance):
            forced = True
            continue
        if forced:
            logger.warning(f"best candidate duplicates an observation; taking the next distinct one at level {level}")
        return AcquisitionChoice(x, level, -negative_value, forced=forced)

    choice = _max_variance_pick(acquisition, existing, pool, search.duplicate_tolerance)
    logger.warning(f"acquisition is zero everywhere; falling back to the top-level candidate of maximal variance at {choice.x.tolist()}")
    return choice


def _refit(data: ObservationSet, noise: float, config: FitConfig, seed: Sequence[int], previous: Sequence[LevelHyperparameters] | None) -> MfGpModel:
    try:
        return fit(data, noise, config, seed=seed, previous=previous)
    except FactorizationError as e:
        retry = config.model_copy(update={"jitter_max": config.jitter_max * JITTER_RETRY_FACTOR})
        logger.warning(f"surrogate fit failed at level {e.level}: {e}; retrying with jitter_max={retry.jitter_max:g}")
        return fit(data, noise, retry, seed=seed, previous=previous)


class _Recorder:
    """Builds history records with the cumulative budget and best top-level
    value so far."""

    def __init__(self, problem: MultifidelityProblem):
        self.problem = problem
        self.records: list[HistoryRecord] = []
        self.budget = 0.0
        self.best: float | None = None

    def add(self, iteration: int, x: np.ndarray, level: int, y: float, *, acquisition: float | None = None, forced: bool = False) -> HistoryRecord:
        cost = self.problem.cost_ratios[level - 1]
        self.budget += cost
        if level == self.problem.levels and (self.best is None or y < self.best):
            self.best = y
        record = HistoryRecord(
            iteration=iteration,
            x=[float(v) for v in x],
            level=level,
            y=y,
            cost=cost,
            budget=self.budget,
            best_hf=self.best,
            acquisition=acquisition,
            forced=forced,
        )
        self.records.append(record)
        return record


def _finish(history: RunHistory, records: list[HistoryRecord], levels: int) -> RunHistory:
    history.records = records
    top = [r for r in records if r.level == levels]
    if top:
        best = min(range(len(top)), key=lambda i: (top[i].y, i))
        history.incumbent = top[best].x
        history.incumbent_value = top[best].y
    return history


def run(
    problem: MultifidelityProblem,
    algorithm: Algorithm | str,
    plan: InitPlan,
    budget: float,
    seed: int = 0,
    *,
    bias: PhysicsBias | None = None,
    noise_variance: float = 0.0,
    fit_config: FitConfig | None = None,
    search_config: SearchConfig | None = None,
) -> RunHistory:
    """Run one optimization until ``budget`` is spent.

    EGO works on the top level alone with plain expected improvement and the
    last initial count; MFBO uses the identity bias; PA-MFBO uses ``bias``.
    Any library error inside the loop ends the run early: a surrogate fit
    that fails even with enlarged jitter, an acquisition or bias that cannot
    be evaluated, or an evaluator failure. The partial history is returned
    with ``status="aborted"`` and the error message.

    Raises:
        ConfigurationError: The plan does not match the problem, a level has
            fewer than two initial points, or ``budget`` is below the
            initial design cost.
        EvaluatorError: An evaluator failed during the initial design.
    """
    algorithm = Algorithm(algorithm)
    fit_config = fit_config or FitConfig()
    search_config = search_config or SearchConfig()
    if len(plan.counts) != problem.levels:
        raise ConfigurationError(f"initial plan has {len(plan.counts)} counts but problem '{problem.name}' has {problem.levels} levels")
    if algorithm is Algorithm.EGO:
        problem = problem.top_level_only()
        plan = InitPlan(counts=plan.counts[-1:], seed=plan.seed)
        bias = None
    elif algorithm is Algorithm.MFBO:
        bias = IdentityBias()
    else:
        bias = bias or IdentityBias()

    too_few = [level for level, count in enumerate(plan.counts, start=1) if count < 2]
    if too_few:
        raise ConfigurationError(f"levels {too_few} have fewer than 2 initial points; every level needs at least 2 to fit the surrogate")
    cost = initial_cost(plan.counts, problem.cost_ratios)
    if budget < cost * (1.0 - BUDGET_TOLERANCE):
        raise ConfigurationError(f"budget {budget} is below the initial design cost {cost}")

    history = RunHistory(
        algorithm=algorithm,
        problem=problem.name,
        seed=seed,
        dimension=problem.dimension,
        levels=problem.levels,
        cost_ratios=list(problem.cost_ratios),
        ground_truth=None if problem.ground_truth is None else list(problem.ground_truth),
    )
    data, state = initialize(problem, plan, seed=seed, max_budget=budget)
    recorder = _Recorder(problem)
    for x, level, y in zip(data.x, data.levels, data.y, strict=True):
        recorder.add(0, x, int(level), float(y))

    iteration = 0
    forced_streak = 0
    previous: Sequence[LevelHyperparameters] | None = None
    while not state.exhausted:
        iteration += 1
        try:
            model = _refit(data, noise_variance, fit_config, [seed, iteration], previous)
        except FactorizationError as e:
            logger.error(f"run aborted at iteration {iteration}: surrogate fit failed at level {e.level}: {e}")
            history.status, history.error = "aborted", str(e)
            return _finish(history, recorder.records, problem.levels)
        previous = model.hyper

        explore = forced_streak >= search_config.max_forced_picks
        try:
            if algorithm is Algorithm.EGO:
                acquisition: Acquisition = ExpectedImprovementAcquisition(model, build_context(model, problem.cost_ratios, noise_variance).best_hf_value)
            else:
                acquisition = PhysicsAwareAcquisition(model, build_context(model, problem.cost_ratios, noise_variance), bias)
            choice = maximize_acquisition(acquisition, search_config, seed=[seed, iteration], existing=data, explore=explore)
            y = problem.evaluate(choice.x, choice.level)
            data = data.with_observation(choice.x, choice.level, y)
        except PamfboError as e:
            logger.error(f"run aborted at iteration {iteration}: {e}")
            history.status, history.error = "aborted", str(e)
            return _finish(history, recorder.records, problem.levels)
        forced_streak = 0 if explore or not choice.forced else forced_streak + 1
        state.charge(problem.cost_ratios[choice.level - 1])
        record = recorder.add(iteration, choice.x, choice.level, y, acquisition=choice.value, forced=choice.forced)
        logger.info(f"iteration {iteration}: level {record.level} at {record.x} -> {y:.6g}, budget {record.budget:g}/{budget:g}, best {record.best_hf}")

    return _finish(history, recorder.records, problem.levels)
