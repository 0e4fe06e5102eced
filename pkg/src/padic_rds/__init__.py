"""
padic-rds - p-adic monomial random dynamical systems: fixed-precision Z_p
arithmetic, exact attractor analysis, Monte Carlo simulation and
interference-pattern generation.
"""

# No convenience imports - modules should be imported directly
