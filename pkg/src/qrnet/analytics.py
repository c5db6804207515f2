"""User roles, QR ratio, per-measure summary statistics and correlation matrices.

Quantities that cannot be computed (a ratio with no responders, a correlation
against a constant column) are ``None`` rather than ``inf``/``nan`` so they
survive JSON serialisation unambiguously.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .builder import Interaction
from .centrality import CentralityTable

# fixed presentation order of the correlation matrix
CORRELATION_ORDER = ("degree", "betweenness", "pagerank", "closeness", "harmonic", "eigenvector")
STATS_ORDER = ("degree", "betweenness", "closeness", "pagerank", "eigenvector", "harmonic")


class Role(str, enum.Enum):
    QUESTIONER = "questioner_only"
    RESPONDER = "responder_only"
    BOTH = "both"


@dataclass(frozen=True)
class RoleSummary:
    questioners_only: int
    responders_only: int
    both: int

    @property
    def users(self) -> int:
        return self.questioners_only + self.responders_only + self.both

    @property
    def qr_ratio(self) -> float | None:
        return qr_ratio(self.questioners_only, self.responders_only)


def qr_ratio(questioners_only: int, responders_only: int) -> float | None:
    if responders_only == 0:
        return None
    return questioners_only / responders_only


def present_ratio(ratio: float | None, digits: int = 2) -> str:
    """Half-up decimal rendering used in tables; ``"undefined"`` for None."""
    if ratio is None:
        return "undefined"
    q = 10 ** digits
    return f"{math.floor(ratio * q + 0.5) / q:.{digits}f}"


def classify_roles(interactions: Iterable[Interaction]) -> tuple[RoleSummary, dict[int, Role]]:
    askers: set[int] = set()
    answerers: set[int] = set()
    for it in interactions:
        askers.add(it.questioner)
        answerers.add(it.responder)
    roles: dict[int, Role] = {}
    for u in sorted(askers | answerers):
        if u in askers and u in answerers:
            roles[u] = Role.BOTH
        elif u in askers:
            roles[u] = Role.QUESTIONER
        else:
            roles[u] = Role.RESPONDER
    summary = RoleSummary(
        questioners_only=sum(r is Role.QUESTIONER for r in roles.values()),
        responders_only=sum(r is Role.RESPONDER for r in roles.values()),
        both=sum(r is Role.BOTH for r in roles.values()),
    )
    return summary, roles


@dataclass(frozen=True)
class Moments:
    mean: float | None
    std: float | None
    minimum: float | None
    maximum: float | None


def describe(values: Sequence[float], ddof: int = 1) -> Moments:
    """Mean and standard deviation (sample by default; ``ddof=0`` for population)."""
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        return Moments(None, None, None, None)
    mean = math.fsum(x) / x.size
    std = None
    if x.size > ddof:
        std = math.sqrt(math.fsum((x - mean) ** 2) / (x.size - ddof))
    return Moments(mean, std, float(x.min()), float(x.max()))


def metric_stats(table: CentralityTable, ddof: int = 1) -> dict[str, Moments]:
    return {name: describe(table.column(name), ddof) for name in STATS_ORDER}


def pearson(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Pearson r, or None when either vector has zero variance."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError("vectors differ in length")
    if x.size < 2:
        return None
    dx = x - math.fsum(x) / x.size
    dy = y - math.fsum(y) / y.size
    sxx = math.fsum(dx * dx)
    syy = math.fsum(dy * dy)
    if sxx == 0.0 or syy == 0.0:
        return None
    r = math.fsum(dx * dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


@dataclass(frozen=True)
class CorrelationMatrix:
    labels: tuple[str, ...]
    values: tuple[tuple[float | None, ...], ...]

    def get(self, a: str, b: str) -> float | None:
        return self.values[self.labels.index(a)][self.labels.index(b)]

    def as_array(self) -> np.ndarray:
        return np.array([[np.nan if v is None else v for v in row] for row in self.values])


class NoCorrelations(ValueError):
    pass


def correlation_matrix(table: CentralityTable,
                       labels: Sequence[str] = CORRELATION_ORDER) -> CorrelationMatrix:
    if len(table.nodes) < 3:
        raise ValueError("correlations need at least 3 nodes")
    cols = {name: table.column(name) for name in labels}
    rows = []
    for i, a in enumerate(labels):
        row = []
        for j, b in enumerate(labels):
            if j < i:
                row.append(rows[j][i])
            elif i == j:
                row.append(1.0 if pearson(cols[a], cols[a]) is not None else None)
            else:
                row.append(pearson(cols[a], cols[b]))
        rows.append(row)
    if all(v is None for k, row in enumerate(rows) for m, v in enumerate(row) if k != m):
        raise NoCorrelations("every centrality column is constant; no correlations computable")
    return CorrelationMatrix(tuple(labels), tuple(tuple(r) for r in rows))
