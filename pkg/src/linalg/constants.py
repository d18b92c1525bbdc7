"""Numerical tolerances shared across the linear-algebra and selection layers.

Centralized so the factorization, the greedy traces and the oracles agree on
what counts as zero, as a failed pivot, or as a clamped gain.
"""

# A leading-minor pivot below this fraction of the largest diagonal entry is
# reported as a positive-definiteness failure. Every matrix in scope is
# I + PSD, so genuine pivots are >= 1.
PD_PIVOT_RTOL = 1e-12

# Hermitian symmetry check: |M - M^H| must stay below this times max|M|.
HERMITIAN_RTOL = 1e-10

# Marginal gains below this are recorded as exactly zero in selection traces.
GAIN_CLAMP = 1e-12

# Property-check slack (nats) for Definition-1 style inequalities.
MONOTONE_SLACK = 1e-10
SUBMODULAR_SLACK = 1e-9
MODULAR_SLACK = 1e-12

# Power iteration defaults for the lambda_max oracle.
POWER_ITERATION_MAX_ITER = 5000
POWER_ITERATION_TOL = 1e-12
