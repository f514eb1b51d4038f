"""Bootstrap resampling across sites."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError, ValidationError
from .rng import ROLE_BOOTSTRAP, stream
from .tables import CommunityTable, PredictorBlock, require_aligned

#: Fraction of replicates allowed to fail (and be redrawn) before aborting.
FAILURE_BUDGET = 0.05


@dataclass(frozen=True)
class BootstrapSummary:
    """Location and spread of one statistic over bootstrap replicates.

    ``relative_uncertainty`` is ``sd / mean`` with the mean's sign kept; it
    is infinite when the mean is zero but the spread is not, and NaN when
    both are zero. ``redraw_count`` says how many degenerate resamples were
    discarded and redrawn while producing the summary.
    """

    statistic_name: str
    replicate_count: int
    mean: float
    sd: float
    relative_uncertainty: float
    ci95_low: float
    ci95_high: float
    redraw_count: int = 0


def resample_rows(table: CommunityTable, blocks, rng: np.random.Generator):
    """Resample sites with replacement, keeping each site's rows glued.

    One index sequence of length ``n_sites`` is drawn and applied to the
    table and to every predictor block, so a site's abundances never
    separate from its predictors. Labels of repeated draws get an
    occurrence suffix (``#2``, ``#3``, ...) to stay unique.
    """
    blocks = list(blocks)
    require_aligned(table, *blocks)
    n = table.n_sites
    idx = rng.integers(0, n, size=n)
    seen: dict[int, int] = {}
    labels = []
    for i in idx:
        i = int(i)
        hits = seen.get(i, 0) + 1
        seen[i] = hits
        base = table.site_ids[i]
        labels.append(base if hits == 1 else f"{base}#{hits}")
    labels = tuple(labels)
    new_table = CommunityTable(labels, table.species_ids, table.values[idx])
    new_blocks = [PredictorBlock(b.name, labels, b.values[idx]) for b in blocks]
    return new_table, new_blocks


def _as_row(value, width: int | None) -> tuple[float, ...]:
    if np.isscalar(value):
        row = (float(value),)
    else:
        row = tuple(float(v) for v in value)
    if not row:
        raise ValidationError("statistic returned no values")
    if width is not None and len(row) != width:
        raise ValidationError(
            f"statistic width changed between replicates ({width} vs {len(row)})")
    return row


def relative_spread(sd: float, mean: float) -> float:
    """``sd / mean`` with explicit conventions at a zero mean."""
    if mean == 0.0:
        return math.nan if sd == 0.0 else math.inf
    return sd / mean


def bootstrap_statistic(table: CommunityTable, blocks, statistic,
                        m_replicates: int, seed: int,
                        names=None) -> list[BootstrapSummary]:
    """Summaries of ``statistic`` over ``m_replicates`` site resamples.

    ``statistic`` maps ``(table, blocks)`` to a float or a fixed-width
    sequence of floats; one summary per component comes back. A replicate
    whose statistic raises ``DegenerateDataError`` is redrawn from a fresh
    sub-stream; once more than ``FAILURE_BUDGET`` of ``m_replicates``
    replicates have failed, the whole run aborts. Confidence bounds are the
    2.5 and 97.5 percentiles with linear interpolation.
    """
    if m_replicates < 2:
        raise ValidationError("need at least 2 bootstrap replicates")
    blocks = list(blocks)
    rows: list[tuple[float, ...]] = []
    width: int | None = None
    failures = 0
    budget = FAILURE_BUDGET * m_replicates
    for j in range(m_replicates):
        attempt = 0
        while True:
            rng = stream(seed, ROLE_BOOTSTRAP, j, attempt)
            resampled_table, resampled_blocks = resample_rows(table, blocks, rng)
            try:
                value = statistic(resampled_table, resampled_blocks)
            except DegenerateDataError as exc:
                failures += 1
                if failures > budget:
                    raise DegenerateDataError(
                        f"{failures} of {m_replicates} bootstrap replicates "
                        f"degenerate (budget {FAILURE_BUDGET:.0%}); "
                        f"last failure: {exc}") from exc
                attempt += 1
                continue
            rows.append(_as_row(value, width))
            width = len(rows[-1])
            break

    arr = np.asarray(rows, dtype=float)
    if names is None:
        names = ("stat",) if width == 1 else tuple(
            f"stat{k + 1}" for k in range(width))
    names = tuple(str(s) for s in names)
    if len(names) != width:
        raise ValidationError(
            f"{len(names)} names for a {width}-component statistic")

    summaries = []
    for k, statistic_name in enumerate(names):
        v = arr[:, k]
        mean = float(v.mean())
        sd = float(v.std(ddof=1))
        lo, hi = np.percentile(v, [2.5, 97.5])
        summaries.append(BootstrapSummary(
            statistic_name=statistic_name,
            replicate_count=m_replicates,
            mean=mean,
            sd=sd,
            relative_uncertainty=relative_spread(sd, mean),
            ci95_low=float(lo),
            ci95_high=float(hi),
            redraw_count=failures,
        ))
    return summaries
