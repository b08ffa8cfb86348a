"""Instance types, hourly pricing, and the cost of running a composition.

The catalog is a small immutable table of instance types with their hourly
rates and relative throughput. Usage cost converts an estimated completion
time into money under either of two billing rules: linear (pay exactly for
the seconds used, pro rated) or hourly rounded (every started hour billed
in full, the usual cloud billing).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .errors import DuplicateInstanceType, ParseError, UnknownInstanceType

SCHEMA_VERSION = 1


class Billing(str, Enum):
    LINEAR = "linear"
    HOURLY_ROUNDED = "hourly_rounded"


@dataclass(frozen=True)
class InstanceType:
    """One purchasable machine type: name, hourly rate, relative speed."""

    name: str
    hourly_cost: float
    speed_factor: float = 1.0

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("instance type name must be nonempty")
        if not math.isfinite(self.hourly_cost) or self.hourly_cost < 0:
            raise ValueError("hourly_cost must be finite and >= 0")
        if not (math.isfinite(self.speed_factor) and self.speed_factor > 0):
            raise ValueError("speed_factor must be finite and > 0")


@dataclass(frozen=True)
class ClusterComposition:
    """Node counts per instance type."""

    counts: Mapping[str, int]

    def __post_init__(self) -> None:
        normalized = {}
        for name, count in dict(self.counts).items():
            count = int(count)
            if count < 0:
                raise ValueError(f"count for {name!r} must be >= 0")
            if count > 0:
                normalized[str(name)] = count
        object.__setattr__(self, "counts", normalized)

    @property
    def total_nodes(self) -> int:
        return sum(self.counts.values())

    def to_dict(self) -> dict:
        return {name: self.counts[name] for name in sorted(self.counts)}


class Catalog:
    """Immutable set of instance types, optionally with a reference type."""

    def __init__(self, types: Iterable[InstanceType], reference_type: str | None = None):
        self._types: dict[str, InstanceType] = {}
        for entry in types:
            if entry.name in self._types:
                raise DuplicateInstanceType(f"duplicate instance type {entry.name!r}")
            self._types[entry.name] = entry
        if reference_type is not None and reference_type not in self._types:
            raise ParseError(
                f"catalog: reference_type {reference_type!r} is not among the types"
            )
        self.reference_type = reference_type

    def __len__(self) -> int:
        return len(self._types)

    def __iter__(self):
        return iter(self._types.values())

    def names(self) -> list[str]:
        return sorted(self._types)

    def get(self, name: str) -> InstanceType:
        try:
            return self._types[name]
        except KeyError:
            raise UnknownInstanceType(f"unknown instance type {name!r}") from None

    @classmethod
    def from_document(cls, doc: Mapping) -> "Catalog":
        if not isinstance(doc, Mapping):
            raise ParseError("catalog: expected a JSON object at the top level")
        version = doc.get("version")
        if version != SCHEMA_VERSION:
            raise ParseError(f"catalog: unsupported version {version!r}")
        entries = doc.get("types")
        if not isinstance(entries, list):
            raise ParseError("catalog: 'types' must be a list")
        types = []
        for i, entry in enumerate(entries):
            try:
                types.append(
                    InstanceType(
                        name=str(entry["name"]),
                        hourly_cost=float(entry["hourly_cost"]),
                        speed_factor=float(entry.get("speed_factor", 1.0)),
                    )
                )
            except KeyError as exc:
                raise ParseError(f"catalog: types[{i}]: missing field {exc.args[0]!r}") from exc
            except (TypeError, ValueError) as exc:
                raise ParseError(f"catalog: types[{i}]: {exc}") from exc
        reference = doc.get("reference_type")
        return cls(types, reference_type=None if reference is None else str(reference))

    def to_document(self) -> dict:
        doc: dict = {"version": SCHEMA_VERSION}
        if self.reference_type is not None:
            doc["reference_type"] = self.reference_type
        doc["types"] = [
            {
                "name": t.name,
                "hourly_cost": t.hourly_cost,
                "speed_factor": t.speed_factor,
            }
            for t in self._types.values()
        ]
        return doc

    @classmethod
    def from_json(cls, text: str) -> "Catalog":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"catalog: line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
        return cls.from_document(doc)


def load_catalog(doc: Mapping) -> Catalog:
    """Parse and validate a catalog document."""
    return Catalog.from_document(doc)


def usage_cost(
    composition: ClusterComposition,
    catalog: Catalog,
    t_est_seconds: float,
    billing: Billing = Billing.LINEAR,
) -> float:
    """Money spent running the composition for the estimated duration.

    Linear billing charges hourly_cost x nodes x (seconds / 3600); hourly
    rounding bills every started hour in full.
    """
    if t_est_seconds < 0:
        raise ValueError("t_est_seconds must be >= 0")
    billing = Billing(billing)
    if billing is Billing.HOURLY_ROUNDED:
        hours: float = math.ceil(t_est_seconds / 3600.0)
    else:
        hours = t_est_seconds / 3600.0
    return math.fsum(
        catalog.get(name).hourly_cost * count * hours
        for name, count in sorted(composition.counts.items())
    )
