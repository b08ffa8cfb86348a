"""Job profiles: the measured baselines a completion-time estimate rests on.

A profile captures one representative job of an application category on
one instance type: the fixed phase lengths, the variable-sharing and
communication baselines with their fitted coefficients, the baseline
dataset size and unit-task count, and the mean duration of every RDD
operation the representative job exercises.

Profiles persist as a versioned JSON document; a registry is an immutable
in-memory view of one such document keyed by (category, instance type).
Fitting the two coefficients from measurement runs is origin-constrained
simple least squares, because neither phase has a constant term.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from .errors import (
    CategoryMismatch,
    DegenerateDesign,
    DuplicateProfile,
    InsufficientData,
    ParseError,
    ProfileNotFound,
    UnknownRddOp,
)
from .model import Category, ModelParams, WorkloadSpec, unit_task_count

SCHEMA_VERSION = 1

MEASUREMENT_COLUMNS = ("iter", "n", "s_bytes", "t_vs", "t_commn", "t_total")


@dataclass(frozen=True)
class JobProfile:
    """Per (category, instance type) baselines and coefficients."""

    category: Category
    instance_type: str
    t_init: float
    t_prep: float
    t_vs_baseline: float
    coeff: float
    t_commn_baseline: float
    cf_commn: float
    s_baseline_bytes: int
    n_unit_baseline: int
    rdd_op_means: Mapping[str, float]
    representative_job: str
    iterative: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "category", Category(self.category))
        object.__setattr__(self, "rdd_op_means", dict(self.rdd_op_means))
        if not self.instance_type:
            raise ValueError("instance_type must be nonempty")
        for name in ("t_init", "t_prep", "t_vs_baseline", "coeff",
                     "t_commn_baseline", "cf_commn"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
        if self.s_baseline_bytes < 1:
            raise ValueError("s_baseline_bytes must be >= 1")
        if self.n_unit_baseline < 1:
            raise ValueError("n_unit_baseline must be >= 1")
        if not self.rdd_op_means:
            raise ValueError("rdd_op_means must not be empty")
        for op, mean in self.rdd_op_means.items():
            if not op:
                raise ValueError("rdd op names must be nonempty")
            if not math.isfinite(mean) or mean < 0:
                raise ValueError(f"mean for {op!r} must be finite and >= 0")

    def key(self) -> tuple[Category, str]:
        return (self.category, self.instance_type)

    def to_dict(self) -> dict:
        return {
            "category": self.category.value,
            "instance_type": self.instance_type,
            "t_init": self.t_init,
            "t_prep": self.t_prep,
            "t_vs_baseline": self.t_vs_baseline,
            "coeff": self.coeff,
            "t_commn_baseline": self.t_commn_baseline,
            "cf_commn": self.cf_commn,
            "s_baseline_bytes": self.s_baseline_bytes,
            "n_unit_baseline": self.n_unit_baseline,
            "rdd_op_means": dict(self.rdd_op_means),
            "representative_job": self.representative_job,
            "iterative": self.iterative,
        }

    @classmethod
    def from_dict(cls, doc: Mapping, location: str = "profile") -> "JobProfile":
        try:
            means = doc["rdd_op_means"]
            if str(doc.get("rdd_op_means_unit", "seconds")) == "milliseconds":
                means = {op: float(v) / 1000.0 for op, v in means.items()}
            return cls(
                category=Category(doc["category"]),
                instance_type=str(doc["instance_type"]),
                t_init=float(doc["t_init"]),
                t_prep=float(doc["t_prep"]),
                t_vs_baseline=float(doc["t_vs_baseline"]),
                coeff=float(doc.get("coeff", 0.0)),
                t_commn_baseline=float(doc["t_commn_baseline"]),
                cf_commn=float(doc.get("cf_commn", 0.0)),
                s_baseline_bytes=int(doc["s_baseline_bytes"]),
                n_unit_baseline=int(doc["n_unit_baseline"]),
                rdd_op_means={str(op): float(v) for op, v in means.items()},
                representative_job=str(doc.get("representative_job", "")),
                iterative=bool(doc["iterative"]),
            )
        except KeyError as exc:
            raise ParseError(f"{location}: missing field {exc.args[0]!r}") from exc
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{location}: {exc}") from exc


@dataclass(frozen=True)
class MeasurementRun:
    """One profiling run; the optional phase observations feed the fits."""

    iterations: int
    n: int
    s_bytes: int
    observed_t_vs: float | None
    observed_t_commn: float | None
    observed_t_total: float

    def __post_init__(self) -> None:
        if self.iterations < 1 or self.n < 1 or self.s_bytes < 1:
            raise ValueError("iterations, n and s_bytes must all be >= 1")
        for name in ("observed_t_vs", "observed_t_commn"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be >= 0 when present")
        if self.observed_t_total < 0:
            raise ValueError("observed_t_total must be >= 0")


class ProfileRegistry:
    """Immutable lookup of profiles by (category, instance type)."""

    def __init__(self, profiles: Iterable[JobProfile]):
        self._profiles: dict[tuple[Category, str], JobProfile] = {}
        for profile in profiles:
            key = profile.key()
            if key in self._profiles:
                raise DuplicateProfile(
                    f"duplicate profile for category={key[0].value!r} "
                    f"instance_type={key[1]!r}"
                )
            self._profiles[key] = profile

    def __len__(self) -> int:
        return len(self._profiles)

    def __iter__(self):
        return iter(self._profiles.values())

    def lookup(self, category: Category | str, instance_type: str) -> JobProfile:
        try:
            key = (Category(category), instance_type)
        except ValueError:
            raise ProfileNotFound(
                f"no profile for category={category!r} "
                f"instance_type={instance_type!r}"
            ) from None
        try:
            return self._profiles[key]
        except KeyError:
            raise ProfileNotFound(
                f"no profile for category={key[0].value!r} "
                f"instance_type={instance_type!r}"
            ) from None

    @classmethod
    def from_document(cls, doc: Mapping) -> "ProfileRegistry":
        if not isinstance(doc, Mapping):
            raise ParseError("profile document: expected a JSON object at the top level")
        version = doc.get("version")
        if version != SCHEMA_VERSION:
            raise ParseError(f"profile document: unsupported version {version!r}")
        entries = doc.get("profiles")
        if not isinstance(entries, list):
            raise ParseError("profile document: 'profiles' must be a list")
        return cls(
            JobProfile.from_dict(entry, location=f"profiles[{i}]")
            for i, entry in enumerate(entries)
        )

    def to_document(self) -> dict:
        return {
            "version": SCHEMA_VERSION,
            "profiles": [p.to_dict() for p in self._profiles.values()],
        }

    @classmethod
    def from_json(cls, text: str) -> "ProfileRegistry":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"profile document: line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
        return cls.from_document(doc)


def registry_lookup(
    category: Category | str, instance_type: str, registry: ProfileRegistry
) -> JobProfile:
    """Fetch the profile for a (category, instance type) pair."""
    return registry.lookup(category, instance_type)


def _origin_slope(points: list[tuple[float, float]]) -> float:
    # least squares through the origin: slope = sum(x*y) / sum(x*x)
    if len(points) < 2:
        raise InsufficientData(
            f"need at least 2 usable runs, got {len(points)}"
        )
    sxx = math.fsum(x * x for x, _ in points)
    if sxx == 0.0:
        raise DegenerateDesign("all regressor values are zero")
    sxy = math.fsum(x * y for x, y in points)
    return sxy / sxx


def fit_coeff(runs: list[MeasurementRun], t_vs_baseline: float) -> float:
    """Fit the variable-sharing coefficient from observed phase lengths.

    The regressor for each run is iterations x n x baseline, so the fitted
    slope is directly the dimensionless coefficient of the sharing phase.
    """
    if not t_vs_baseline > 0:
        raise ValueError("t_vs_baseline must be > 0")
    points = [
        ((run.iterations * run.n) * t_vs_baseline, run.observed_t_vs)
        for run in runs
        if run.observed_t_vs is not None
    ]
    return _origin_slope(points)


def fit_cf_commn(
    runs: list[MeasurementRun], t_commn_baseline: float, s_baseline_bytes: int
) -> float:
    """Fit the communication coefficient against normalized dataset size."""
    if not t_commn_baseline > 0:
        raise ValueError("t_commn_baseline must be > 0")
    if s_baseline_bytes < 1:
        raise ValueError("s_baseline_bytes must be >= 1")
    points = [
        ((run.s_bytes / s_baseline_bytes) * t_commn_baseline, run.observed_t_commn)
        for run in runs
        if run.observed_t_commn is not None
    ]
    return _origin_slope(points)


def fit_profile_coefficients(
    profile: JobProfile, runs: list[MeasurementRun]
) -> JobProfile:
    """Return the profile with both coefficients refitted from the runs."""
    return replace(
        profile,
        coeff=fit_coeff(runs, profile.t_vs_baseline),
        cf_commn=fit_cf_commn(runs, profile.t_commn_baseline, profile.s_baseline_bytes),
    )


def mean_unit_task_time(profile: JobProfile, workload: WorkloadSpec) -> float:
    """Mean seconds of one unit task under the workload's op mix."""
    total_ops = 0
    weighted = 0.0
    for op, count in workload.task_mix:
        if op not in profile.rdd_op_means:
            raise UnknownRddOp(
                f"op {op!r} not present in profile "
                f"({profile.category.value}/{profile.instance_type})"
            )
        total_ops += count
        weighted += count * profile.rdd_op_means[op]
    return weighted / total_ops


def build_model_params(
    profile: JobProfile, workload: WorkloadSpec, iter_in_nunit: bool = True
) -> ModelParams:
    """Derive the closed-form constants for a workload from its profile."""
    if profile.category != workload.category:
        raise CategoryMismatch(
            f"profile is {profile.category.value!r}, "
            f"workload is {workload.category.value!r}"
        )
    s_ratio = workload.dataset_size_bytes / profile.s_baseline_bytes
    n_unit = unit_task_count(
        profile.n_unit_baseline, s_ratio, workload.iterations, iter_in_nunit
    )
    return ModelParams(
        k0=profile.t_init + profile.t_prep,
        a=profile.cf_commn * profile.t_commn_baseline,
        b=n_unit * mean_unit_task_time(profile, workload),
        c=profile.coeff * profile.t_vs_baseline,
        n_unit=n_unit,
        s_ratio=s_ratio,
        t_init=profile.t_init,
        t_prep=profile.t_prep,
        source=f"{profile.category.value}/{profile.instance_type}",
    )


def validate_representative(
    rep_ops: set[str],
    rep_iterative: bool,
    target_ops: set[str],
    target_iterative: bool,
) -> bool:
    """True when the representative covers every target op and matches iterativity."""
    if not rep_ops or not target_ops:
        raise ValueError("op sets must not be empty")
    return target_ops <= set(rep_ops) and rep_iterative == target_iterative


def read_measurements(text: str) -> list[MeasurementRun]:
    """Parse measurement runs from CSV with header iter,n,s_bytes,t_vs,t_commn,t_total."""
    reader = csv.DictReader(io.StringIO(text))
    header = tuple(reader.fieldnames or ())
    missing = [c for c in MEASUREMENT_COLUMNS if c not in header]
    if missing:
        raise ParseError(f"measurement CSV: missing columns {missing}")
    runs = []
    for lineno, row in enumerate(reader, start=2):
        try:
            runs.append(
                MeasurementRun(
                    iterations=int(row["iter"]),
                    n=int(row["n"]),
                    s_bytes=int(row["s_bytes"]),
                    observed_t_vs=float(row["t_vs"]) if row["t_vs"] else None,
                    observed_t_commn=float(row["t_commn"]) if row["t_commn"] else None,
                    observed_t_total=float(row["t_total"]),
                )
            )
        except (TypeError, ValueError) as exc:
            raise ParseError(f"measurement CSV: line {lineno}: {exc}") from exc
    return runs


def write_measurements(runs: list[MeasurementRun]) -> str:
    """Serialize runs back to the measurement CSV format (LF line endings)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(MEASUREMENT_COLUMNS)
    for run in runs:
        writer.writerow(
            [
                run.iterations,
                run.n,
                run.s_bytes,
                "" if run.observed_t_vs is None else run.observed_t_vs,
                "" if run.observed_t_commn is None else run.observed_t_commn,
                run.observed_t_total,
            ]
        )
    return out.getvalue()
