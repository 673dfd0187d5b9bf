"""Decision matrices built by posterior-density ordering, and the confidence
regions obtained by inverting them.

Each row fixes a null value eta and greedily admits outcomes in order of
decreasing posterior density relative to the prior, stopping once the
binomial mass of the admitted set reaches the required coverage. Outcomes
whose posterior densities coincide within a relative tolerance form a tie
group and are admitted or withheld as a unit, which keeps symmetric
configurations symmetric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import (
    BetaPrior,
    BinomialModel,
    beta_binom_log_pmf_support,
    binom_log_pmf_support,
    binom_pmf_support,
)

__all__ = [
    "TIE_RTOL",
    "ParameterGrid",
    "TestConfig",
    "DecisionRow",
    "DecisionMatrix",
    "ConfidenceRegion",
    "build_decision_row",
    "build_decision_matrix",
    "coverage",
    "type1_error",
    "confidence_region",
    "decision_matrix_to_csv",
    "decision_matrix_from_csv",
    "rows_summary_csv",
]

# Posterior densities within this relative distance of each other count as tied.
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class ParameterGrid:
    """Ordered evaluation points in (0, 1) with normalized integration weights.

    ``weights`` sum to one and default to the relative cell widths of the
    points, i.e. a piecewise-constant rule scaled to a probability measure.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        wts = np.asarray(self.weights, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise ValueError("grid needs at least one point")
        if wts.shape != pts.shape:
            raise ValueError("weights must align with points")
        if not (np.all(pts > 0.0) and np.all(pts < 1.0)):
            raise ValueError("grid points must lie strictly inside (0, 1)")
        if pts.size > 1 and not np.all(np.diff(pts) > 0.0):
            raise ValueError("grid points must be strictly increasing")
        if np.any(wts < 0.0) or abs(wts.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    @classmethod
    def regular(cls, count: int = 499, low: float = 0.002, high: float = 0.998) -> "ParameterGrid":
        """Equally spaced grid over [low, high] with uniform weights.

        Points are assembled as an exact mirror image about the midpoint so
        that symmetric priors see a symmetric grid down to the last bit.
        """
        if count < 1:
            raise ValueError("count must be >= 1")
        if not (0.0 < low <= high < 1.0):
            raise ValueError("grid range must satisfy 0 < low <= high < 1")
        if count > 1 and low == high:
            raise ValueError("low < high required for more than one point")
        if count == 1:
            pts = np.array([(low + high) / 2.0])
        else:
            base = np.linspace(low, high, count)
            half = base[: count // 2]
            upper = (low + high) - half[::-1]
            middle = [np.array([(low + high) / 2.0])] if count % 2 else []
            pts = np.concatenate([half, *middle, upper])
        widths = _cell_widths(pts)
        return cls(points=pts, weights=widths / widths.sum())

    @property
    def cell_widths(self) -> np.ndarray:
        """Piecewise-constant cell width per point, from neighbour spacing."""
        return _cell_widths(self.points)

    def nearest_index(self, value: float, tol: float = 1e-9) -> int:
        """Index of the grid point closest to value; errors beyond tol."""
        idx = int(np.argmin(np.abs(self.points - value)))
        if abs(self.points[idx] - value) > tol:
            raise ValueError(f"{value!r} is not a grid point (nearest is {self.points[idx]!r})")
        return idx

    def __len__(self) -> int:
        return int(self.points.size)


def _cell_widths(pts: np.ndarray) -> np.ndarray:
    if pts.size == 1:
        return np.array([1.0])
    w = np.empty(pts.size)
    w[0] = pts[1] - pts[0]
    w[-1] = pts[-1] - pts[-2]
    w[1:-1] = (pts[2:] - pts[:-2]) / 2.0
    return w


@dataclass(frozen=True)
class TestConfig:
    """Test level plus the model, prior, and grid that define the procedure."""

    level: float
    model: BinomialModel
    prior: BetaPrior
    grid: ParameterGrid

    def __post_init__(self) -> None:
        level = float(self.level)
        if not (math.isfinite(level) and 0.0 < level < 1.0):
            raise ValueError(f"level must lie in (0, 1), got {self.level!r}")
        object.__setattr__(self, "level", level)


@dataclass(eq=False)
class DecisionRow:
    """Acceptance indicator over outcomes for one null value eta.

    ``threshold`` is the smallest posterior density among admitted outcomes,
    so the row equals {x : posterior_density(eta, x) >= threshold} up to tie
    tolerance. ``achieved_coverage`` is the exact binomial mass of the
    admitted set under eta and always reaches at least 1 - level.
    """

    eta: float
    included: np.ndarray
    threshold: float
    achieved_coverage: float


@dataclass(eq=False)
class DecisionMatrix:
    """One DecisionRow per grid point, in grid order."""

    config: TestConfig
    rows: list

    def inclusion_matrix(self) -> np.ndarray:
        """Boolean (grid x outcomes) array of the acceptance indicators."""
        return np.array([row.included for row in self.rows])


@dataclass(frozen=True)
class ConfidenceRegion:
    """Grid values accepted for one observed outcome.

    An empty region is representable: ``accepted`` has length zero, the
    bounds are NaN, and ``contiguous`` is vacuously true.
    """

    x_observed: int
    accepted: np.ndarray
    lower: float
    upper: float
    contiguous: bool

    @property
    def is_empty(self) -> bool:
        return self.accepted.size == 0


def _tie_group_slices(sorted_desc: np.ndarray) -> list:
    """Maximal runs of tied values in a descending-sorted array.

    Adjacent values chain into one group while their gap stays within
    TIE_RTOL relative to the larger of the pair; exact zeros tie with zeros.
    """
    groups = []
    start = 0
    m = sorted_desc.size
    while start < m:
        stop = start + 1
        while stop < m and (sorted_desc[stop - 1] - sorted_desc[stop]) <= TIE_RTOL * sorted_desc[stop - 1]:
            stop += 1
        groups.append((start, stop))
        start = stop
    return groups


def build_decision_row(eta: float, config: TestConfig, *, log_mix: np.ndarray | None = None) -> DecisionRow:
    """Construct the acceptance set for one null value.

    Parameters
    ----------
    eta : float
        Null parameter, strictly inside (0, 1).
    config : TestConfig
        Level, model, and prior. The grid is not consulted here.
    log_mix : ndarray, optional
        Precomputed log beta-binomial support, to avoid recomputing it when
        building many rows against the same prior.

    Returns
    -------
    DecisionRow
        Outcomes admitted in order of decreasing posterior density until the
        exact binomial mass under eta reaches 1 - level. Tie groups enter
        atomically; the threshold records the smallest admitted density.
    """
    eta = float(eta)
    if not (math.isfinite(eta) and 0.0 < eta < 1.0):
        raise ValueError(f"eta must lie strictly inside (0, 1), got {eta!r}")
    model = config.model
    if log_mix is None:
        log_mix = beta_binom_log_pmf_support(model, config.prior)
    log_f = binom_log_pmf_support(model, eta)
    g = np.exp(log_f - log_mix)
    pmf = np.exp(log_f)

    order = np.argsort(-g, kind="stable")
    g_sorted = g[order]
    target = 1.0 - config.level
    included = np.zeros(model.n + 1, dtype=bool)
    cum = 0.0
    for start, stop in _tie_group_slices(g_sorted):
        if cum >= target:
            break
        block = order[start:stop]
        included[block] = True
        cum += float(pmf[block].sum())

    # Recompute both summaries in natural outcome order so that a row rebuilt
    # from its serialized inclusion flags is bit-identical.
    achieved = float(pmf[included].sum())
    threshold = float(g[included].min())
    return DecisionRow(eta=eta, included=included, threshold=threshold, achieved_coverage=achieved)


def build_decision_matrix(config: TestConfig) -> DecisionMatrix:
    """Build one decision row per grid point. Deterministic in config."""
    log_mix = beta_binom_log_pmf_support(config.model, config.prior)
    rows = [build_decision_row(eta, config, log_mix=log_mix) for eta in config.grid.points]
    return DecisionMatrix(config=config, rows=rows)


def _check_index(matrix: DecisionMatrix, eta_index: int) -> int:
    if isinstance(eta_index, bool) or not isinstance(eta_index, (int, np.integer)):
        raise IndexError(f"eta_index must be an integer, got {eta_index!r}")
    if not 0 <= eta_index < len(matrix.rows):
        raise IndexError(f"eta_index {eta_index} outside 0..{len(matrix.rows) - 1}")
    return int(eta_index)


def coverage(matrix: DecisionMatrix, theta: float, eta_index: int) -> float:
    """Probability under theta that the row at eta_index accepts the draw."""
    eta_index = _check_index(matrix, eta_index)
    pmf = binom_pmf_support(matrix.config.model, theta)
    return float(pmf[matrix.rows[eta_index].included].sum())


def type1_error(matrix: DecisionMatrix, eta_index: int) -> float:
    """1 - coverage(eta, eta): the exact rejection rate under the null itself."""
    eta_index = _check_index(matrix, eta_index)
    return 1.0 - coverage(matrix, matrix.config.grid.points[eta_index], eta_index)


def confidence_region(matrix: DecisionMatrix, x_observed: int) -> ConfidenceRegion:
    """Invert the matrix at one observed outcome (grid values accepting it)."""
    model = matrix.config.model
    if isinstance(x_observed, bool) or not isinstance(x_observed, (int, np.integer)):
        raise ValueError(f"outcome must be an integer, got {x_observed!r}")
    if not 0 <= x_observed <= model.n:
        raise ValueError(f"outcome {x_observed} outside support 0..{model.n}")
    x_observed = int(x_observed)
    mask = np.array([row.included[x_observed] for row in matrix.rows])
    idx = np.flatnonzero(mask)
    accepted = matrix.config.grid.points[idx]
    if idx.size == 0:
        return ConfidenceRegion(x_observed, accepted, math.nan, math.nan, True)
    contiguous = bool(idx[-1] - idx[0] + 1 == idx.size)
    return ConfidenceRegion(
        x_observed=x_observed,
        accepted=accepted,
        lower=float(accepted[0]),
        upper=float(accepted[-1]),
        contiguous=contiguous,
    )


def decision_matrix_to_csv(matrix: DecisionMatrix) -> str:
    """Long-form serialization: one line per (eta, x) pair.

    eta carries 6 decimal places and the row threshold 12 significant digits,
    repeated on every line of the row.
    """
    lines = ["eta,x,included,threshold"]
    for row in matrix.rows:
        eta_s = format(row.eta, ".6f")
        thr_s = format(row.threshold, ".12g")
        for x, flag in enumerate(row.included):
            lines.append(f"{eta_s},{x},{int(flag)},{thr_s}")
    return "\n".join(lines) + "\n"


def rows_summary_csv(matrix: DecisionMatrix) -> str:
    """Per-row summary: eta, threshold, achieved coverage."""
    lines = ["eta,threshold,achieved_coverage"]
    for row in matrix.rows:
        lines.append(
            f"{format(row.eta, '.6f')},{format(row.threshold, '.12g')},{format(row.achieved_coverage, '.12g')}"
        )
    return "\n".join(lines) + "\n"


def decision_matrix_from_csv(text: str, config: TestConfig) -> DecisionMatrix:
    """Rebuild a DecisionMatrix from its long-form CSV.

    The inclusion flags are taken verbatim from the file and matched to the
    grid of ``config`` by the printed eta strings. Coverage and threshold are
    recomputed from the flags, which restores values bit-identical to the
    originally built matrix; the threshold column is used as a consistency
    check at its printed precision.
    """
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or lines[0] != "eta,x,included,threshold":
        raise ValueError("not a decision-matrix CSV: bad header")
    n = config.model.n
    by_eta: dict = {}
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 4:
            raise ValueError(f"malformed line: {ln!r}")
        eta_s, x_s, inc_s, thr_s = parts
        rec = by_eta.setdefault(eta_s, {"included": np.zeros(n + 1, dtype=bool), "seen": set(), "thr": thr_s})
        x = int(x_s)
        if not 0 <= x <= n:
            raise ValueError(f"outcome {x} outside support 0..{n}")
        if x in rec["seen"]:
            raise ValueError(f"duplicate outcome {x} for eta {eta_s}")
        if rec["thr"] != thr_s:
            raise ValueError(f"inconsistent threshold within eta {eta_s}")
        rec["seen"].add(x)
        rec["included"][x] = inc_s == "1"

    grid = config.grid
    if len(by_eta) != len(grid):
        raise ValueError(f"CSV has {len(by_eta)} rows, config grid has {len(grid)}")
    log_mix = beta_binom_log_pmf_support(config.model, config.prior)
    rows = []
    for eta in grid.points:
        eta_s = format(float(eta), ".6f")
        if eta_s not in by_eta:
            raise ValueError(f"grid point {eta_s} missing from CSV")
        rec = by_eta[eta_s]
        if len(rec["seen"]) != n + 1:
            raise ValueError(f"eta {eta_s} is missing outcomes")
        included = rec["included"]
        log_f = binom_log_pmf_support(config.model, float(eta))
        pmf = np.exp(log_f)
        g = np.exp(log_f - log_mix)
        if not included.any():
            raise ValueError(f"eta {eta_s} has an empty acceptance row")
        achieved = float(pmf[included].sum())
        threshold = float(g[included].min())
        file_thr = float(rec["thr"])
        if not math.isclose(file_thr, threshold, rel_tol=1e-9, abs_tol=0.0):
            raise ValueError(f"threshold mismatch for eta {eta_s}: file {file_thr!r} vs recomputed {threshold!r}")
        rows.append(DecisionRow(eta=float(eta), included=included, threshold=threshold, achieved_coverage=achieved))
    return DecisionMatrix(config=config, rows=rows)
