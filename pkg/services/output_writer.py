"""
Output Writer
Writes trajectories, tables and reports as CSV/JSON files

Floats in CSV files use %.17g so identical runs give byte-identical files.
No timestamps are written.
"""
import csv
import logging
import os
from typing import Iterable, List, Optional

from pydantic import BaseModel

from models.control import OptimizationResult
from models.fields import Basis
from models.report import SweepTable
from models.trajectory import Trajectory

logger = logging.getLogger(__name__)


def fmt(value: Optional[float]) -> str:
    """Exact float text; None becomes an empty cell"""
    return "" if value is None else "%.17g" % value


def trajectory_header(grid_points: int) -> List[str]:
    header = ["t"]
    for j in range(grid_points + 1):
        header += [f"mx_{j}", f"my_{j}", f"mz_{j}"]
    return header


class OutputWriter:
    """
    Writes run artifacts into one output directory
    """

    def __init__(self, out_dir: str):
        """
        Initialize writer

        Args:
            out_dir: Output directory (created if missing)
        """
        self.out_dir = out_dir
        os.makedirs(out_dir, exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def _write_rows(self, name: str, header: List[str], rows: Iterable[List[str]]) -> str:
        target = self.path(name)
        with open(target, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        logger.info(f"Wrote {target}")
        return target

    def write_json(self, name: str, model: BaseModel) -> str:
        """Serialize a pydantic model with model_dump_json"""
        target = self.path(name)
        with open(target, "w", encoding="utf-8") as f:
            f.write(model.model_dump_json(indent=2))
            f.write("\n")
        logger.info(f"Wrote {target}")
        return target

    def write_trajectory(self, trajectory: Trajectory, basis: Basis, stride: int = 1,
                         name: str = "trajectory.csv") -> str:
        """
        One row per saved time: t followed by the 3(M+1) grid values of m

        Args:
            trajectory: Trajectory to write
            basis: Basis the states are synthesized on
            stride: Every stride-th stored time is written
            name: File name inside the output directory
        """
        n = trajectory.states[0].n_modes
        synthesis = basis.eigenfunctions[:n].T

        def rows():
            for t, state in list(zip(trajectory.times, trajectory.states))[::stride]:
                values = (synthesis @ state.coefficients).reshape(-1)
                yield [fmt(t)] + [fmt(v) for v in values]

        return self._write_rows(name, trajectory_header(basis.grid_points), rows())

    def write_sweep(self, table: SweepTable, name: str) -> str:
        """Sweep table with columns (value, error, est_order)"""
        rows = ([fmt(r.value), fmt(r.error), fmt(r.est_order)] for r in table.rows)
        return self._write_rows(name, ["value", "error", "est_order"], rows)

    def write_trace(self, result: OptimizationResult, name: str = "optimization_trace.csv") -> str:
        """Optimizer trace with one row per iteration"""
        rows = (
            [str(s.iteration), fmt(s.J), fmt(s.J_candidate), fmt(s.step_size), fmt(s.perturbation),
             "1" if s.accepted else "0"]
            for s in result.trace
        )
        header = ["iteration", "J", "J_candidate", "step_size", "perturbation", "accepted"]
        return self._write_rows(name, header, rows)
