"""Cluster planning: pick node counts that honor a deadline or a budget.

Two objectives are supported. Minimum cost under a deadline exploits the
shape of the completion-time curve k0 + alpha*n + beta/n: the set of node
counts meeting the deadline is an interval obtained from the roots of a
quadratic, and under linear billing the cheapest feasible count is the
smallest one. Minimum time under a budget uses the curve's unconstrained
minimizer sqrt(beta/alpha) clipped into the affordable range.

A deliberately dumb exhaustive search over the same candidate grids acts
as the verification oracle for both objectives, and a log-barrier solver
handles the continuous relaxation for mixed-type clusters, rounding its
solution back onto the integer grid.

Deadline comparisons are non-strict (t_est <= slo counts as feasible) and
every result carries its margin, so exact ties are visible to the caller.

Mixed-type clusters extend the single-type model: the variable-sharing
term grows with the total node count, while the divisible work is spread
over speed-weighted capacity (sum of count x speed_factor), with model
constants taken from the catalog's reference type. With a single type of
speed factor 1 this reduces exactly to the single-type model.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

from .catalog import Billing, Catalog, ClusterComposition, usage_cost
from .errors import (
    DidNotConverge,
    EnumerationCapExceeded,
    NoAffordableCluster,
    NoProfileForType,
    ProfileNotFound,
)
from .model import (
    ModelParams,
    PhaseBreakdown,
    WorkloadSpec,
    completion_time,
    estimate_completion,
)
from .profiles import ProfileRegistry, build_model_params

DEFAULT_N_MAX = 200
DEFAULT_ENUMERATION_CAP = 10_000_000
SECONDS_PER_HOUR = 3600.0


class Objective(str, Enum):
    MIN_COST_UNDER_SLO = "min_cost_under_slo"
    MIN_TIME_UNDER_BUDGET = "min_time_under_budget"


class Method(str, Enum):
    ANALYTIC = "analytic"
    RELAXATION_ROUNDED = "relaxation_rounded"
    BRUTE_FORCE = "brute_force"


@dataclass(frozen=True)
class FeasibleInterval:
    """Integer node counts meeting a deadline; hi=None means unbounded."""

    lo: int
    hi: int | None

    def __contains__(self, n: int) -> bool:
        return n >= self.lo and (self.hi is None or n <= self.hi)

    def clipped(self, n_max: int) -> range:
        hi = n_max if self.hi is None else min(self.hi, n_max)
        return range(self.lo, hi + 1)


@dataclass
class PlanRequest:
    """One planning problem: workload, data sources, objective, bounds."""

    workload: WorkloadSpec
    profiles: ProfileRegistry
    catalog: Catalog
    objective: Objective
    slo_seconds: float | None = None
    budget: float | None = None
    n_max: int = DEFAULT_N_MAX
    heterogeneous: bool = False
    billing: Billing = Billing.LINEAR
    grid: tuple[int, ...] | None = None
    iter_in_nunit: bool = True
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP

    def __post_init__(self) -> None:
        self.objective = Objective(self.objective)
        self.billing = Billing(self.billing)
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.objective is Objective.MIN_COST_UNDER_SLO:
            if self.slo_seconds is None or not self.slo_seconds > 0:
                raise ValueError("min_cost_under_slo requires slo_seconds > 0")
            if self.budget is not None:
                raise ValueError("budget is not used by min_cost_under_slo")
        else:
            if self.budget is None or self.budget < 0:
                raise ValueError("min_time_under_budget requires budget >= 0")
            if self.slo_seconds is not None:
                raise ValueError("slo_seconds is not used by min_time_under_budget")
        if self.grid is not None:
            self.grid = tuple(sorted(set(int(g) for g in self.grid)))
            if not self.grid:
                raise ValueError("grid must not be empty when given")
            if self.grid[0] < 1:
                raise ValueError("grid entries must be >= 1")


@dataclass(frozen=True)
class PlanResult:
    """A chosen composition with its estimate, cost, and slack."""

    composition: ClusterComposition
    breakdown: PhaseBreakdown
    cost: float
    feasible: bool
    method: Method
    margin: float | None = None

    def to_dict(self) -> dict:
        return {
            "composition": self.composition.to_dict(),
            "breakdown": self.breakdown.to_dict(),
            "cost": self.cost,
            "feasible": self.feasible,
            "method": self.method.value,
            "margin": self.margin,
        }


def feasible_interval(
    params: ModelParams, iterations: int, slo: float
) -> FeasibleInterval | None:
    """Node counts n >= 1 with completion time at most ``slo``; None if empty.

    Multiplying t(n) <= slo through by n gives the quadratic
    (iterations*c) n^2 + (k0 - slo) n + (iterations*b + a*s_ratio) <= 0,
    whose real roots bound the interval; the bounds are rounded inward and
    then nudged by direct evaluation so float fuzz at the boundary cannot
    disagree with a pointwise check.
    """
    if not slo > 0:
        raise ValueError("slo must be > 0")
    alpha = iterations * params.c
    gamma = iterations * params.b + params.a * params.s_ratio
    k = params.k0 - slo

    def fits(n: int) -> bool:
        return completion_time(params, iterations, n) <= slo

    if alpha == 0.0:
        if k > 0:
            return None
        if k == 0:
            return FeasibleInterval(1, None) if gamma == 0.0 else None
        lo = max(1, math.ceil(gamma / (slo - params.k0) - 1e-9))
        for _ in range(64):
            if not fits(lo):
                lo += 1
            elif lo > 1 and fits(lo - 1):
                lo -= 1
            else:
                break
        return FeasibleInterval(lo, None)

    disc = k * k - 4.0 * alpha * gamma
    if disc < 0:
        return None
    sq = math.sqrt(disc)
    lo = max(1, math.ceil((-k - sq) / (2.0 * alpha) - 1e-9))
    hi = math.floor((-k + sq) / (2.0 * alpha) + 1e-9)
    # polish both ends against the scalar model (bounded walks)
    for _ in range(8):
        if lo <= hi and not fits(lo):
            lo += 1
        elif lo > 1 and fits(lo - 1):
            lo -= 1
        else:
            break
    for _ in range(8):
        if hi >= lo and not fits(hi):
            hi -= 1
        elif fits(hi + 1):
            hi += 1
        else:
            break
    if lo > hi or not fits(lo):
        return None
    return FeasibleInterval(lo, hi)


def _params_for_type(request: PlanRequest, type_name: str) -> ModelParams:
    try:
        profile = request.profiles.lookup(request.workload.category, type_name)
    except ProfileNotFound as exc:
        raise NoProfileForType(str(exc)) from exc
    return build_model_params(profile, request.workload, request.iter_in_nunit)


def _reference_params(request: PlanRequest) -> ModelParams:
    reference = request.catalog.reference_type
    if reference is None:
        raise NoProfileForType(
            "heterogeneous planning needs the catalog to name a reference_type"
        )
    return _params_for_type(request, reference)


def _candidates(request: PlanRequest) -> list[int]:
    if request.grid is not None:
        return [g for g in request.grid if g <= request.n_max]
    return list(range(1, request.n_max + 1))


def _single_type_cost(
    request: PlanRequest, type_name: str, n: int, t_est: float
) -> float:
    return usage_cost(
        ClusterComposition({type_name: n}), request.catalog, t_est, request.billing
    )


def _result_for_single_type(
    request: PlanRequest,
    type_name: str,
    params: ModelParams,
    n: int,
    feasible: bool,
    method: Method,
) -> PlanResult:
    from .model import estimate_completion

    breakdown = estimate_completion(params, request.workload.iterations, n)
    cost = _single_type_cost(request, type_name, n, breakdown.t_est)
    if request.objective is Objective.MIN_COST_UNDER_SLO:
        margin = request.slo_seconds - breakdown.t_est
    else:
        margin = request.budget - cost
    return PlanResult(
        composition=ClusterComposition({type_name: n}),
        breakdown=breakdown,
        cost=cost,
        feasible=feasible,
        method=method,
        margin=margin,
    )


def plan_min_cost(request: PlanRequest) -> PlanResult:
    """Cheapest composition whose estimated completion time meets the deadline.

    Single-type mode walks the catalog: the feasible node counts per type
    form an interval, cost n x t_est(n) x rate is nondecreasing across it
    under linear billing, and the cheapest feasible (type, n) wins. Ties
    break toward fewer nodes, then lexicographic type name. When nothing
    meets the deadline the result carries the fastest composition found
    and feasible=False.
    """
    if request.objective is not Objective.MIN_COST_UNDER_SLO:
        raise ValueError("plan_min_cost requires objective=min_cost_under_slo")
    if request.heterogeneous:
        return _brute_force_heterogeneous(request)

    slo = request.slo_seconds
    iterations = request.workload.iterations
    method = Method.BRUTE_FORCE if request.grid is not None else Method.ANALYTIC
    best: tuple[float, int, str] | None = None
    best_params: ModelParams | None = None
    fallback: tuple[float, int, str] | None = None
    fallback_params: ModelParams | None = None

    for type_name in request.catalog.names():
        params = _params_for_type(request, type_name)

        def t_of(n: int) -> float:
            return completion_time(params, iterations, n)

        if request.grid is not None:
            feasible_ns = [n for n in _candidates(request) if t_of(n) <= slo]
        else:
            interval = feasible_interval(params, iterations, slo)
            feasible_ns = list(interval.clipped(request.n_max)) if interval else []

        if feasible_ns:
            if request.billing is Billing.LINEAR and request.grid is None:
                # cost is nondecreasing over the interval; its left end wins
                pick = feasible_ns[0]
                key = (_single_type_cost(request, type_name, pick, t_of(pick)), pick, type_name)
            else:
                key = min(
                    (_single_type_cost(request, type_name, n, t_of(n)), n, type_name)
                    for n in feasible_ns
                )
            if best is None or key < best:
                best, best_params = key, params
        else:
            key = min((t_of(n), n, type_name) for n in _candidates(request))
            if fallback is None or key < fallback:
                fallback, fallback_params = key, params

    if best is not None:
        _, n, type_name = best
        return _result_for_single_type(request, type_name, best_params, n, True, method)
    _, n, type_name = fallback
    return _result_for_single_type(request, type_name, fallback_params, n, False, method)


def plan_min_time(request: PlanRequest) -> PlanResult:
    """Fastest composition whose usage cost stays within the budget.

    Single-type mode with linear billing: cost grows with n, so the
    affordable counts form a prefix [1, N]; the completion-time curve is
    convex with unconstrained minimizer sqrt((iter*b + a*s)/(iter*c)), so
    only its floor/ceil clipped into [1, N] plus the ends can win. Grid
    restrictions and hourly billing fall back to scanning the candidates.
    """
    if request.objective is not Objective.MIN_TIME_UNDER_BUDGET:
        raise ValueError("plan_min_time requires objective=min_time_under_budget")
    if request.heterogeneous:
        return _brute_force_heterogeneous(request)

    budget = request.budget
    iterations = request.workload.iterations
    scan = request.grid is not None or request.billing is not Billing.LINEAR
    method = Method.BRUTE_FORCE if scan else Method.ANALYTIC
    best: tuple[float, int, str] | None = None
    best_params: ModelParams | None = None

    for type_name in request.catalog.names():
        params = _params_for_type(request, type_name)

        def t_of(n: int) -> float:
            return completion_time(params, iterations, n)

        def cost_of(n: int) -> float:
            return _single_type_cost(request, type_name, n, t_of(n))

        if scan:
            affordable = [n for n in _candidates(request) if cost_of(n) <= budget]
            if not affordable:
                continue
            key = min((t_of(n), n, type_name) for n in affordable)
        else:
            if cost_of(1) > budget:
                continue
            # largest affordable count by bisection (cost nondecreasing in n)
            lo_n, hi_n = 1, request.n_max
            while lo_n < hi_n:
                mid = (lo_n + hi_n + 1) // 2
                if cost_of(mid) <= budget:
                    lo_n = mid
                else:
                    hi_n = mid - 1
            limit = lo_n
            alpha = iterations * params.c
            gamma = iterations * params.b + params.a * params.s_ratio
            candidates = {1, limit}
            if alpha > 0 and gamma > 0:
                n_star = math.sqrt(gamma / alpha)
                candidates.add(min(limit, max(1, math.floor(n_star))))
                candidates.add(min(limit, max(1, math.ceil(n_star))))
            key = min((t_of(n), n, type_name) for n in sorted(candidates))
        if best is None or key < best:
            best, best_params = key, params

    if best is None:
        raise NoAffordableCluster(
            f"no instance type fits within budget {budget!r} at any candidate size"
        )
    _, n, type_name = best
    return _result_for_single_type(request, type_name, best_params, n, True, method)


def _heterogeneous_scalar(
    params: ModelParams, iterations: int, n_total: float, n_eff: float
) -> float:
    t_init, t_prep = params.fixed_parts()
    t_vs = params.c * (iterations * n_total)
    t_comp = (params.a * params.s_ratio + iterations * params.b) / n_eff
    return t_init + t_prep + t_vs + t_comp


def _heterogeneous_breakdown(
    params: ModelParams, iterations: int, n_total: float, n_eff: float
) -> PhaseBreakdown:
    t_init, t_prep = params.fixed_parts()
    return PhaseBreakdown.compose(
        t_init,
        t_prep,
        params.c * (iterations * n_total),
        params.a * params.s_ratio,
        iterations * params.b,
        parallelism=n_eff,
    )


def _heterogeneous_result(
    request: PlanRequest,
    params: ModelParams,
    counts: dict[str, int],
    feasible: bool,
    method: Method,
) -> PlanResult:
    composition = ClusterComposition(counts)
    speed = {t.name: t.speed_factor for t in request.catalog}
    n_total = composition.total_nodes
    n_eff = sum(c * speed[name] for name, c in composition.counts.items())
    breakdown = _heterogeneous_breakdown(
        params, request.workload.iterations, n_total, n_eff
    )
    cost = usage_cost(composition, request.catalog, breakdown.t_est, request.billing)
    if request.objective is Objective.MIN_COST_UNDER_SLO:
        margin = request.slo_seconds - breakdown.t_est
    else:
        margin = request.budget - cost
    return PlanResult(composition, breakdown, cost, feasible, method, margin)


def _iter_heterogeneous_grid(request: PlanRequest):
    names = request.catalog.names()
    per_type = request.n_max + 1
    total = per_type ** len(names)
    if total > request.enumeration_cap:
        raise EnumerationCapExceeded(
            f"{total} candidate compositions exceed the cap of {request.enumeration_cap}"
        )
    for counts in itertools.product(range(per_type), repeat=len(names)):
        if any(counts):
            yield dict(zip(names, counts))


def _brute_force_heterogeneous(request: PlanRequest) -> PlanResult:
    params = _reference_params(request)
    iterations = request.workload.iterations
    speed = {t.name: t.speed_factor for t in request.catalog}
    rate = {t.name: t.hourly_cost for t in request.catalog}
    slo, budget = request.slo_seconds, request.budget

    best_key = None
    best_counts = None
    fallback_key = None
    fallback_counts = None
    for counts in _iter_heterogeneous_grid(request):
        n_total = sum(counts.values())
        n_eff = sum(c * speed[name] for name, c in counts.items())
        t = _heterogeneous_scalar(params, iterations, n_total, n_eff)
        if request.billing is Billing.HOURLY_ROUNDED:
            hours: float = math.ceil(t / SECONDS_PER_HOUR)
        else:
            hours = t / SECONDS_PER_HOUR
        cost = sum(rate[name] * c * hours for name, c in counts.items())
        tie = tuple(counts[name] for name in sorted(counts))
        if request.objective is Objective.MIN_COST_UNDER_SLO:
            if t <= slo:
                key = (cost, n_total, tie)
                if best_key is None or key < best_key:
                    best_key, best_counts = key, counts
            else:
                key = (t, n_total, tie)
                if fallback_key is None or key < fallback_key:
                    fallback_key, fallback_counts = key, counts
        else:
            if cost <= budget:
                key = (t, n_total, tie)
                if best_key is None or key < best_key:
                    best_key, best_counts = key, counts

    if best_counts is not None:
        return _heterogeneous_result(request, params, best_counts, True, Method.BRUTE_FORCE)
    if request.objective is Objective.MIN_COST_UNDER_SLO:
        return _heterogeneous_result(
            request, params, fallback_counts, False, Method.BRUTE_FORCE
        )
    raise NoAffordableCluster(
        f"no composition fits within budget {budget!r} on the enumerated grid"
    )


def brute_force_plan(request: PlanRequest) -> PlanResult:
    """Exhaustive enumeration over the candidate grid; the verification oracle.

    Kept deliberately free of the analytic shortcuts: every candidate is
    evaluated directly and compared with the same tie-breaking order the
    fast paths promise (cost or time, then fewer nodes, then type name).
    """
    if request.heterogeneous:
        return _brute_force_heterogeneous(request)

    names = request.catalog.names()
    candidates = _candidates(request)
    if len(names) * len(candidates) > request.enumeration_cap:
        raise EnumerationCapExceeded(
            f"{len(names) * len(candidates)} candidates exceed the cap of "
            f"{request.enumeration_cap}"
        )

    iterations = request.workload.iterations
    params_by_type = {name: _params_for_type(request, name) for name in names}
    best_key = None
    best = None
    fallback_key = None
    fallback = None
    for type_name in names:
        params = params_by_type[type_name]
        for n in candidates:
            t = completion_time(params, iterations, n)
            cost = _single_type_cost(request, type_name, n, t)
            if request.objective is Objective.MIN_COST_UNDER_SLO:
                if t <= request.slo_seconds:
                    key = (cost, n, type_name)
                    if best_key is None or key < best_key:
                        best_key, best = key, (type_name, n)
                else:
                    key = (t, n, type_name)
                    if fallback_key is None or key < fallback_key:
                        fallback_key, fallback = key, (type_name, n)
            else:
                if cost <= request.budget:
                    key = (t, n, type_name)
                    if best_key is None or key < best_key:
                        best_key, best = key, (type_name, n)

    if best is not None:
        type_name, n = best
        return _result_for_single_type(
            request, type_name, params_by_type[type_name], n, True, Method.BRUTE_FORCE
        )
    if request.objective is Objective.MIN_COST_UNDER_SLO:
        type_name, n = fallback
        return _result_for_single_type(
            request, type_name, params_by_type[type_name], n, False, Method.BRUTE_FORCE
        )
    raise NoAffordableCluster(
        f"no instance type fits within budget {request.budget!r} on the candidate grid"
    )


# --- continuous relaxation ---------------------------------------------------


def _solve_linear(matrix: list[list[float]], rhs: list[float]) -> list[float] | None:
    # Gaussian elimination with partial pivoting; None on (near-)singularity
    m = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(m):
        pivot = max(range(col, m), key=lambda r: abs(a[r][col]))
        if abs(a[pivot][col]) < 1e-300:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        for row in range(col + 1, m):
            factor = a[row][col] / a[col][col]
            for j in range(col, m + 1):
                a[row][j] -= factor * a[col][j]
    x = [0.0] * m
    for row in range(m - 1, -1, -1):
        acc = a[row][m] - sum(a[row][j] * x[j] for j in range(row + 1, m))
        x[row] = acc / a[row][row]
    return x


class _RelaxedProblem:
    """Smooth data for the continuous program over per-type node counts."""

    def __init__(self, request: PlanRequest, params: ModelParams):
        self.request = request
        self.names = request.catalog.names()
        self.m = len(self.names)
        self.rates = [request.catalog.get(n).hourly_cost for n in self.names]
        self.speeds = [request.catalog.get(n).speed_factor for n in self.names]
        self.params = params
        self.iterations = request.workload.iterations
        self.ci = self.iterations * params.c
        self.gamma = self.iterations * params.b + params.a * params.s_ratio
        self.n_max = float(request.n_max)

    def time(self, x: list[float]) -> float:
        n_total = sum(x)
        n_eff = sum(f * xi for f, xi in zip(self.speeds, x))
        return _heterogeneous_scalar(self.params, self.iterations, n_total, n_eff)

    def time_grad(self, x: list[float]) -> list[float]:
        n_eff = sum(f * xi for f, xi in zip(self.speeds, x))
        return [self.ci - self.gamma * f / n_eff**2 for f in self.speeds]

    def time_hess(self, x: list[float]) -> list[list[float]]:
        n_eff = sum(f * xi for f, xi in zip(self.speeds, x))
        scale = 2.0 * self.gamma / n_eff**3
        return [[scale * fi * fj for fj in self.speeds] for fi in self.speeds]

    def cost(self, x: list[float]) -> float:
        return sum(c * xi for c, xi in zip(self.rates, x)) * self.time(x) / SECONDS_PER_HOUR

    def cost_grad(self, x: list[float]) -> list[float]:
        t = self.time(x)
        spend = sum(c * xi for c, xi in zip(self.rates, x))
        dt = self.time_grad(x)
        return [(c * t + spend * dti) / SECONDS_PER_HOUR for c, dti in zip(self.rates, dt)]

    def cost_hess(self, x: list[float]) -> list[list[float]]:
        spend = sum(c * xi for c, xi in zip(self.rates, x))
        dt = self.time_grad(x)
        d2t = self.time_hess(x)
        return [
            [
                (self.rates[i] * dt[j] + self.rates[j] * dt[i] + spend * d2t[i][j])
                / SECONDS_PER_HOUR
                for j in range(self.m)
            ]
            for i in range(self.m)
        ]


def _barrier_solve(
    problem: _RelaxedProblem,
    x0: list[float],
    objective,
    objective_grad,
    objective_hess,
    slack,
    slack_grad,
    slack_hess,
    max_iterations: int,
    gap_tol: float,
) -> list[float]:
    """Log-barrier loop: minimize objective subject to slack(x) > 0, 0 < x < n_max.

    Iterates stay strictly feasible; the barrier parameter grows tenfold per
    outer round until the duality-gap proxy (#constraints / tau) drops below
    ``gap_tol``; inner rounds are damped Newton steps with backtracking.
    """
    m = problem.m
    n_constraints = 2 * m + 1
    x = x0[:]
    tau = 1.0
    spent = 0

    def strictly_inside(y: list[float]) -> bool:
        return (
            all(1e-12 < yi < problem.n_max - 1e-12 for yi in y)
            and slack(y) > 1e-12
        )

    def barrier_value(y: list[float], t: float) -> float:
        s = slack(y)
        return (
            t * objective(y)
            - math.log(s)
            - sum(math.log(yi) for yi in y)
            - sum(math.log(problem.n_max - yi) for yi in y)
        )

    if not strictly_inside(x):
        raise DidNotConverge("starting point is not strictly feasible")

    while n_constraints / tau >= gap_tol:
        for _ in range(80):
            if spent >= max_iterations:
                raise DidNotConverge(
                    f"barrier solver exceeded {max_iterations} iterations"
                )
            spent += 1
            s = slack(x)
            gs = slack_grad(x)
            grad = [
                tau * gi + sgi / s - 1.0 / xi + 1.0 / (problem.n_max - xi)
                for gi, sgi, xi in zip(objective_grad(x), gs, x)
            ]
            hess = objective_hess(x)
            hs = slack_hess(x)
            full = [
                [
                    tau * hess[i][j]
                    + hs[i][j] / s
                    + gs[i] * gs[j] / s**2
                    + (1.0 / x[i] ** 2 + 1.0 / (problem.n_max - x[i]) ** 2) * (i == j)
                    for j in range(m)
                ]
                for i in range(m)
            ]
            step = _solve_linear(full, [-g for g in grad])
            if step is None or sum(g * d for g, d in zip(grad, step)) >= 0:
                scale = max(abs(g) for g in grad) or 1.0
                step = [-g / scale for g in grad]
            grad_norm = max(abs(g) for g in grad)
            if grad_norm <= 1e-9 * max(1.0, tau):
                break
            base = barrier_value(x, tau)
            slope = sum(g * d for g, d in zip(grad, step))
            alpha = 1.0
            moved = False
            while alpha > 1e-14:
                trial = [xi + alpha * di for xi, di in zip(x, step)]
                if strictly_inside(trial) and barrier_value(trial, tau) <= base + 1e-4 * alpha * slope:
                    x = trial
                    moved = True
                    break
                alpha *= 0.5
            if not moved:
                break
        tau *= 10.0
    return x


def _rounding_neighborhood(x: list[float], n_max: int) -> list[tuple[int, ...]]:
    axes = [sorted({math.floor(xi), math.ceil(xi)}) for xi in x]
    seeds = set(itertools.product(*axes))
    out = set()
    for seed in seeds:
        out.add(seed)
        for i in range(len(seed)):
            for delta in (-1, 1):
                bumped = list(seed)
                bumped[i] += delta
                out.add(tuple(bumped))
    return sorted(
        tuple(min(max(v, 0), n_max) for v in candidate)
        for candidate in out
        if any(min(max(v, 0), n_max) for v in candidate)
    )


def _feasible_start(problem: _RelaxedProblem) -> list[float]:
    request = problem.request
    candidates: list[list[float]] = []
    eps = min(1e-3, problem.n_max / 1000.0)
    for idx in range(problem.m):
        f = problem.speeds[idx]
        if problem.ci > 0 and problem.gamma > 0:
            ray = math.sqrt(problem.gamma / (problem.ci * f))
        elif problem.ci == 0 and problem.gamma > 0:
            ray = problem.n_max
        else:
            ray = 1.0
        ray = min(max(ray, 1.0), problem.n_max - 2 * eps)
        point = [eps] * problem.m
        point[idx] = ray
        candidates.append(point)
    candidates.append([problem.n_max - 2 * eps] * problem.m)
    for base in (0.01, 0.1, 1.0, 10.0):
        scale = min(base, problem.n_max - 2 * eps)
        candidates.append([max(scale, eps)] * problem.m)

    if request.objective is Objective.MIN_COST_UNDER_SLO:
        margin = lambda x: request.slo_seconds - problem.time(x)
    else:
        margin = lambda x: request.budget - problem.cost(x)
    best = None
    best_margin = 0.0
    for point in candidates:
        m = margin(point)
        if m > best_margin:
            best, best_margin = point, m
    if best is None:
        raise DidNotConverge(
            "no strictly feasible interior point: the constraint cannot be met "
            "anywhere on the probed box, matching an empty feasible interval"
        )
    return best


def relaxed_minimize(
    request: PlanRequest,
    max_iterations: int = 500,
    gap_tol: float = 1e-8,
) -> tuple[dict[str, float], PlanResult]:
    """Solve the continuous relaxation, then round back onto the integers.

    Returns the real-valued per-type counts alongside the best integer
    result among all floor/ceil combinations of them plus a +-1
    neighborhood, re-checked against the exact integer objective.
    """
    params = _reference_params(request)
    problem = _RelaxedProblem(request, params)

    if request.objective is Objective.MIN_COST_UNDER_SLO:
        objective, objective_grad, objective_hess = (
            problem.cost, problem.cost_grad, problem.cost_hess,
        )
        slack = lambda x: request.slo_seconds - problem.time(x)
        slack_grad = lambda x: [-g for g in problem.time_grad(x)]
        slack_hess = lambda x: [[-h for h in row] for row in problem.time_hess(x)]
    else:
        objective, objective_grad, objective_hess = (
            problem.time, problem.time_grad, problem.time_hess,
        )
        slack = lambda x: request.budget - problem.cost(x)
        slack_grad = lambda x: [-g for g in problem.cost_grad(x)]
        slack_hess = lambda x: [[-h for h in row] for row in problem.cost_hess(x)]

    x0 = _feasible_start(problem)
    x = _barrier_solve(
        problem, x0, objective, objective_grad, objective_hess,
        slack, slack_grad, slack_hess, max_iterations, gap_tol,
    )
    relaxed = dict(zip(problem.names, x))

    speed = {t.name: t.speed_factor for t in request.catalog}
    best_key = None
    best_counts = None
    for candidate in _rounding_neighborhood(x, request.n_max):
        counts = dict(zip(problem.names, candidate))
        composition = ClusterComposition(counts)
        n_total = composition.total_nodes
        n_eff = sum(c * speed[name] for name, c in composition.counts.items())
        t = _heterogeneous_scalar(params, request.workload.iterations, n_total, n_eff)
        cost = usage_cost(composition, request.catalog, t, request.billing)
        if request.objective is Objective.MIN_COST_UNDER_SLO:
            if t > request.slo_seconds:
                continue
            key = (cost, n_total, candidate)
        else:
            if cost > request.budget:
                continue
            key = (t, n_total, candidate)
        if best_key is None or key < best_key:
            best_key, best_counts = key, counts

    if best_counts is None:
        if request.objective is Objective.MIN_TIME_UNDER_BUDGET:
            raise NoAffordableCluster(
                f"no rounding of the relaxed solution fits within budget {request.budget!r}"
            )
        raise DidNotConverge(
            "no rounding of the relaxed solution meets the deadline"
        )
    result = _heterogeneous_result(
        request, params, best_counts, True, Method.RELAXATION_ROUNDED
    )
    return relaxed, result
