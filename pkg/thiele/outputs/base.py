"""Base output class and the built-in CSV tables."""

import os
import tempfile
from abc import ABC, abstractmethod
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd

from thiele.config import CSV_FLOAT_FORMAT

if TYPE_CHECKING:
    from thiele.runner import ScenarioRun


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    """Write ``frame`` so that readers never see a half-written file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as f:
            frame.to_csv(f, index=False, float_format=CSV_FLOAT_FORMAT)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


class Output(ABC):
    """Base class for all outputs."""

    name: str
    filename: str
    description: str

    @abstractmethod
    def build(self, run: "ScenarioRun") -> pd.DataFrame:
        """Compute the table for ``run``."""
        pass

    def write(self, run: "ScenarioRun", directory: Path) -> Path:
        return write_csv(self.build(run), Path(directory) / self.filename)


class GridsOutput(Output):
    """Every reserve on the solver grid, one column per curve."""

    name = "grids"
    filename = "reserves.csv"
    description = "G, V_d, the model reserves, W and u* at every grid time"

    def build(self, run: "ScenarioRun") -> pd.DataFrame:
        worst = run.worst
        columns = {
            "t": run.surrender.times,
            "G": run.surrender.values,
            "V_d": run.baseline.values,
        }
        columns.update({name: grid.values for name, grid in run.model_columns().items()})
        columns["W"] = worst.worst_reserve.values
        columns["u_star"] = worst.latest_optimal.values
        return pd.DataFrame(columns)


class WorstCaseOutput(Output):
    name = "worst_case"
    filename = "worst_case.csv"
    description = "worst-case reserve with its gain envelope and latest optimal surrender time"

    def build(self, run: "ScenarioRun") -> pd.DataFrame:
        worst = run.worst
        return pd.DataFrame({
            "t": run.surrender.times,
            "G": run.surrender.values,
            "V_d": run.baseline.values,
            "W": worst.worst_reserve.values,
            "M": worst.gain_envelope.values,
            "u_star": worst.latest_optimal.values,
        })


class ThetaSweepOutput(Output):
    name = "theta_sweep"
    filename = "theta_sweep.csv"
    description = "gap between W and the behavioural reserve along a rationality sweep"

    def build(self, run: "ScenarioRun") -> pd.DataFrame:
        return run.sweep_table


class MonteCarloOutput(Output):
    name = "monte_carlo"
    filename = "monte_carlo.csv"
    description = "simulated reserve at time 0 against the ODE value, per model and for W"

    def build(self, run: "ScenarioRun") -> pd.DataFrame:
        rows = []
        for label, (estimate, ode_value) in run.simulations.items():
            rows.append({
                "model": label,
                "estimate": estimate.estimate,
                "std_error": estimate.standard_error,
                "ode_value": ode_value,
                "z_score": estimate.z_score(ode_value),
            })
        return pd.DataFrame(rows, columns=["model", "estimate", "std_error", "ode_value", "z_score"])


class FreePolicyOutput(Output):
    name = "free_policy"
    filename = "free_policy.csv"
    description = "active reserve with surrender and free-policy conversion"

    def build(self, run: "ScenarioRun") -> pd.DataFrame:
        fp = run.free_policy
        times = run.surrender.times
        return pd.DataFrame({
            "t": times,
            "G": run.surrender.values,
            "G_f": fp.free_surrender.values,
            "V_f_star": fp.reference.values,
            "f": np.array([fp.plan.scaling(float(t)) for t in times]),
            "V_a": fp.active.values,
        })


def get_default_outputs() -> list[Output]:
    """Return the default set of outputs."""
    return [
        GridsOutput(),
        WorstCaseOutput(),
        ThetaSweepOutput(),
        MonteCarloOutput(),
        FreePolicyOutput(),
    ]
