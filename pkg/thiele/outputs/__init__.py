"""CSV outputs of a scenario run."""

from .base import (
    FreePolicyOutput,
    GridsOutput,
    MonteCarloOutput,
    Output,
    ThetaSweepOutput,
    WorstCaseOutput,
    get_default_outputs,
    write_csv,
)

# Registry of outputs by toggle name
OUTPUTS: dict[str, type[Output]] = {
    output.name: type(output) for output in get_default_outputs()
}

__all__ = [
    "Output",
    "GridsOutput",
    "WorstCaseOutput",
    "ThetaSweepOutput",
    "MonteCarloOutput",
    "FreePolicyOutput",
    "OUTPUTS",
    "get_default_outputs",
    "write_csv",
]
