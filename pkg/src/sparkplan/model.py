"""Closed-form completion-time model for phase-decomposed parallel jobs.

A job run on a Spark-style engine is decomposed into four phases:
initialization, preparation, variable sharing (broadcast traffic between
master and workers), and computation. The computation phase itself splits
into worker-to-worker communication and the execution of unit RDD tasks,
and is the only part divided by the cluster size. Each phase length is
projected from single-node baselines scaled by the workload inputs:
dataset size, iteration count, and node count.

Everything here is a pure function over immutable values; no operation
touches shared state, so concurrent callers need no coordination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ComputationOverflow

# ceil() results beyond this are reported as overflow rather than returned
_MAX_UNIT_TASKS = 2**63 - 1


class Category(str, Enum):
    """Application categories, one per library family a job leans on."""

    SPARK_SQL = "spark_sql"
    STREAMING = "streaming"
    MLLIB = "mllib"
    GRAPHX = "graphx"


class DeployMode(str, Enum):
    STANDALONE = "standalone"
    YARN = "yarn"


def _ulp_equal(value: float, reference: float, ulps: int = 4) -> bool:
    if value == reference:
        return True
    scale = max(abs(value), abs(reference), 1.0)
    return abs(value - reference) <= ulps * math.ulp(scale)


@dataclass(frozen=True)
class PhaseBreakdown:
    """Per-phase completion-time estimate plus its total.

    ``t_comp`` is always ``(t_commn + t_exec) / parallelism``; the divisor
    is kept so the parallelization applied to the raw phase lengths stays
    auditable. ``t_est`` is the literal sum of the four phase components.
    """

    t_init: float
    t_prep: float
    t_vs: float
    t_commn: float
    t_exec: float
    t_comp: float
    t_est: float
    parallelism: float = 1.0

    def __post_init__(self) -> None:
        for name in ("t_init", "t_prep", "t_vs", "t_commn", "t_exec", "t_comp", "t_est"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
        if not self.parallelism >= 1:
            raise ValueError(f"parallelism must be >= 1, got {self.parallelism!r}")
        total = self.t_init + self.t_prep + self.t_vs + self.t_comp
        if abs(self.t_est - total) > math.ulp(max(total, 1.0)):
            raise ValueError(
                f"t_est={self.t_est!r} is not the sum of its phases ({total!r})"
            )
        derived = (self.t_commn + self.t_exec) / self.parallelism
        if not _ulp_equal(self.t_comp, derived):
            raise ValueError(
                f"t_comp={self.t_comp!r} inconsistent with "
                f"(t_commn + t_exec) / parallelism = {derived!r}"
            )

    @classmethod
    def compose(
        cls,
        t_init: float,
        t_prep: float,
        t_vs: float,
        t_commn: float,
        t_exec: float,
        parallelism: float = 1.0,
    ) -> "PhaseBreakdown":
        """Build a consistent breakdown from raw phase lengths."""
        t_comp = (t_commn + t_exec) / parallelism
        t_est = t_init + t_prep + t_vs + t_comp
        return cls(t_init, t_prep, t_vs, t_commn, t_exec, t_comp, t_est, parallelism)

    def to_dict(self) -> dict:
        return {
            "t_init": self.t_init,
            "t_prep": self.t_prep,
            "t_vs": self.t_vs,
            "t_commn": self.t_commn,
            "t_exec": self.t_exec,
            "t_comp": self.t_comp,
            "t_est": self.t_est,
            "parallelism": self.parallelism,
        }


@dataclass(frozen=True)
class WorkloadSpec:
    """Target-job inputs: dataset size, iterations, mode, category, task mix.

    ``task_mix`` lists (rdd_op_name, count per unit task) pairs; it is how
    the per-op mean times of a profile get weighted into one mean unit-task
    cost.
    """

    dataset_size_bytes: int
    iterations: int
    mode: DeployMode
    category: Category
    task_mix: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", DeployMode(self.mode))
        object.__setattr__(self, "category", Category(self.category))
        object.__setattr__(
            self, "task_mix", tuple((str(op), int(count)) for op, count in self.task_mix)
        )
        if self.dataset_size_bytes < 1:
            raise ValueError("dataset_size_bytes must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not self.task_mix:
            raise ValueError("task_mix must not be empty")
        for op, count in self.task_mix:
            if not op:
                raise ValueError("task_mix op names must be nonempty")
            if count < 1:
                raise ValueError(f"task_mix count for {op!r} must be >= 1")


@dataclass(frozen=True)
class ModelParams:
    """Derived constants of the closed form, plus provenance.

    k0       fixed overhead (initialization + preparation), seconds
    a        communication seconds per unit of normalized dataset size
    b        summed mean execution seconds over the expanded unit tasks
    c        variable-sharing seconds per node per iteration
    n_unit   expanded unit-task count behind ``b`` (audit only)
    s_ratio  dataset size over the profile's baseline size

    ``t_init``/``t_prep`` optionally carry the split of ``k0`` for
    reporting; ``source`` names where the constants came from.
    """

    k0: float
    a: float
    b: float
    c: float
    n_unit: int
    s_ratio: float
    t_init: float | None = None
    t_prep: float | None = None
    source: str = ""

    def __post_init__(self) -> None:
        for name in ("k0", "a", "b", "c"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
        if self.n_unit < 1:
            raise ValueError("n_unit must be >= 1")
        if not (math.isfinite(self.s_ratio) and self.s_ratio > 0):
            raise ValueError("s_ratio must be finite and > 0")
        if (self.t_init is None) != (self.t_prep is None):
            raise ValueError("t_init and t_prep must be given together")
        if self.t_init is not None:
            if self.t_init < 0 or self.t_prep < 0:
                raise ValueError("t_init and t_prep must be >= 0")
            if not _ulp_equal(self.t_init + self.t_prep, self.k0):
                raise ValueError("t_init + t_prep must equal k0")

    def fixed_parts(self) -> tuple[float, float]:
        """The (t_init, t_prep) split of k0; all of k0 counts as t_init if unknown."""
        if self.t_init is None:
            return self.k0, 0.0
        return self.t_init, self.t_prep


def variable_sharing_time(
    coeff: float, iterations: int, n: float, t_vs_baseline: float
) -> float:
    """Length of the variable-sharing phase: coeff x iterations x n x baseline."""
    if coeff < 0 or t_vs_baseline < 0:
        raise ValueError("coeff and t_vs_baseline must be >= 0")
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    if not n >= 1:
        raise ValueError("n must be >= 1")
    # (iterations * n) groups the exact integer product first; this keeps
    # the result bit-identical to the published reference values
    return coeff * (iterations * n) * t_vs_baseline


def communication_time(
    cf_commn: float, t_commn_baseline: float, s_ratio: float
) -> float:
    """Length of the communication phase for a dataset ``s_ratio`` times the baseline."""
    if cf_commn < 0 or t_commn_baseline < 0 or s_ratio < 0:
        raise ValueError("all inputs must be >= 0")
    return cf_commn * t_commn_baseline * s_ratio


def unit_task_count(
    n_unit_baseline: int,
    s_ratio: float,
    iterations: int,
    iter_in_nunit: bool = True,
) -> int:
    """Number of unit RDD tasks for the scaled workload, rounded up.

    With ``iter_in_nunit`` the task count grows with the iteration count as
    well as the dataset size; without it only the dataset size scales the
    baseline (iterations then enter the execution time once, not twice).
    Partial partitions still cost a whole task, hence the ceil.
    """
    if n_unit_baseline < 1:
        raise ValueError("n_unit_baseline must be >= 1")
    if not (math.isfinite(s_ratio) and s_ratio > 0):
        raise ValueError("s_ratio must be finite and > 0")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    raw = n_unit_baseline * s_ratio * (iterations if iter_in_nunit else 1)
    if not math.isfinite(raw) or raw > _MAX_UNIT_TASKS:
        raise ComputationOverflow(f"unit task count {raw!r} exceeds the integer range")
    return math.ceil(raw)


def execution_time(iterations: int, unit_task_times: list[float]) -> float:
    """Serial execution time: iterations x sum of per-task mean times."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if not unit_task_times:
        raise ValueError("unit_task_times must not be empty")
    if any(t < 0 for t in unit_task_times):
        raise ValueError("unit task times must be >= 0")
    return iterations * math.fsum(unit_task_times)


def computation_time(t_commn: float, t_exec: float, n: float) -> float:
    """Computation phase: communication plus execution, split across n nodes."""
    if t_commn < 0 or t_exec < 0:
        raise ValueError("t_commn and t_exec must be >= 0")
    if not n >= 1:
        raise ValueError("n must be >= 1")
    return (t_commn + t_exec) / n


def completion_time(params: ModelParams, iterations: int, n: float) -> float:
    """Total completion time as a scalar; bit-identical to the breakdown sum."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if not n >= 1:
        raise ValueError("n must be >= 1")
    t_init, t_prep = params.fixed_parts()
    t_vs = params.c * (iterations * n)
    t_comp = (params.a * params.s_ratio + iterations * params.b) / n
    return t_init + t_prep + t_vs + t_comp


def estimate_completion(params: ModelParams, iterations: int, n: float) -> PhaseBreakdown:
    """Full per-phase estimate for running ``iterations`` on ``n`` nodes."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if not n >= 1:
        raise ValueError("n must be >= 1")
    t_init, t_prep = params.fixed_parts()
    t_vs = params.c * (iterations * n)
    t_commn = params.a * params.s_ratio
    t_exec = iterations * params.b
    t_comp = (t_commn + t_exec) / n
    t_est = t_init + t_prep + t_vs + t_comp
    return PhaseBreakdown(t_init, t_prep, t_vs, t_commn, t_exec, t_comp, t_est, n)


def update_iteration_bound(
    params: ModelParams, observed_iters: list[int], n: float
) -> PhaseBreakdown:
    """Re-estimate with the largest iteration count seen across runs.

    The closed form is degree one in the iteration count, so this is a
    constant-time re-evaluation, not a refit.
    """
    if not observed_iters:
        raise ValueError("observed_iters must not be empty")
    if any(i < 1 for i in observed_iters):
        raise ValueError("observed iteration counts must be >= 1")
    return estimate_completion(params, max(observed_iters), n)
