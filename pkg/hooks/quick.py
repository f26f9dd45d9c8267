"""Quick-look hook for Thiele.

Usage:
    thiele run --builtin example4 --hook hooks/quick.py --step 0.01

Drops the Monte Carlo table, the slowest output.
"""

REMOVE_OUTPUTS = {"monte_carlo"}
