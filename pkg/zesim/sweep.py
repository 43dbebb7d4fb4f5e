"""
Parameter sweep over the K_alpha family.
Computes one-shot and two-shot average costs on a grid uniform in cos^2(alpha).
"""
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, asdict
from typing import Callable, Dict, List, Optional, TextIO, Tuple
import csv
import logging
import math

import numpy as np

from .models import ZesimConfig, ZesimError
from .graphspace import kalpha, tensor_graph
from .sdpcore import SolverError
from .simcost import sigma_graph

logger = logging.getLogger(__name__)

CSV_HEADER = ["alpha", "cos2alpha", "sigma1", "sigma2avg", "gap"]


def format_number(x: Optional[float]) -> str:
    """Ten significant digits; empty for missing values."""
    if x is None or not math.isfinite(x):
        return ""
    return f"{x:.10g}"


@dataclass
class SweepRow:
    alpha: float
    cos2alpha: float
    sigma1: Optional[float] = None
    sigma2avg: Optional[float] = None
    gap: Optional[float] = None
    status_one: str = "pending"
    status_two: str = "pending"
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.gap is not None

    @property
    def solve_status(self) -> Tuple[str, str]:
        return (self.status_one, self.status_two)

    def csv_fields(self) -> List[str]:
        return [format_number(v) for v in (self.alpha, self.cos2alpha, self.sigma1, self.sigma2avg, self.gap)]

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


def failure_status(error: Exception) -> str:
    """Solver status carried by ``error``, or 'failed' when there is none."""
    if isinstance(error, SolverError) and error.solution is not None:
        return error.solution.status.value
    return "failed"


def sweep_grid(min_cos2: float, max_cos2: float, steps: int) -> List[Tuple[float, float]]:
    """(alpha, cos^2 alpha) pairs, uniform in cos^2 alpha, alpha in (0, pi/2)."""
    if not 0.0 < min_cos2 < max_cos2 < 1.0:
        raise ZesimError(f"need 0 < min-cos2 < max-cos2 < 1, got {min_cos2}, {max_cos2}")
    if steps < 2:
        raise ZesimError(f"need at least 2 steps, got {steps}")
    return [(float(np.arccos(np.sqrt(c))), float(c)) for c in np.linspace(min_cos2, max_cos2, steps)]


class SweepEngine:
    """Evaluates sweep rows, concurrently when more than one thread is allowed."""

    def __init__(self, config: Optional[ZesimConfig] = None,
                 progress_callback: Optional[Callable[[int, str], None]] = None):
        self.config = config or ZesimConfig()
        self.progress_callback = progress_callback

    def evaluate(self, alpha: float, cos2alpha: float) -> SweepRow:
        """One grid point. Solver failures are recorded on the row, not raised."""
        row = SweepRow(alpha=alpha, cos2alpha=cos2alpha)
        k = kalpha(alpha)
        try:
            one = sigma_graph(k, self.config)
        except Exception as e:
            row.status_one, row.status_two, row.error = failure_status(e), "skipped", str(e)
            return row
        row.sigma1, row.status_one = one.value, one.status.value
        try:
            two = sigma_graph(tensor_graph(k, k), self.config)
        except Exception as e:
            row.status_two, row.error = failure_status(e), str(e)
            return row
        row.sigma2avg, row.status_two = math.sqrt(two.value), two.status.value
        row.gap = row.sigma1 - row.sigma2avg
        return row

    def run(self, grid: List[Tuple[float, float]]) -> List[SweepRow]:
        """Rows in grid order regardless of completion order."""
        rows: List[Optional[SweepRow]] = [None] * len(grid)
        workers = max(1, min(len(grid), self.config.threads))
        with ThreadPoolExecutor(max_workers=workers) as executor:
            future_to_index = {
                executor.submit(self._evaluate_with_progress, i, alpha, c): i
                for i, (alpha, c) in enumerate(grid)
            }
            for future in as_completed(future_to_index):
                i = future_to_index[future]
                try:
                    rows[i] = future.result()
                except Exception as e:
                    alpha, c = grid[i]
                    rows[i] = SweepRow(alpha=alpha, cos2alpha=c, status_one=failure_status(e),
                                       status_two="skipped", error=str(e))
                if not rows[i].ok:
                    logger.error("sweep point cos2=%.6g failed: %s", grid[i][1], rows[i].error)
        return [r for r in rows if r is not None]

    def _evaluate_with_progress(self, index: int, alpha: float, cos2alpha: float) -> SweepRow:
        if self.progress_callback:
            self.progress_callback(index, "starting")
        try:
            row = self.evaluate(alpha, cos2alpha)
            if self.progress_callback:
                self.progress_callback(index, "completed" if row.ok else "failed")
            return row
        except Exception:
            if self.progress_callback:
                self.progress_callback(index, "failed")
            raise


def write_csv(rows: List[SweepRow], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.csv_fields())
