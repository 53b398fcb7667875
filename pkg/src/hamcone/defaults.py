"""Numerical defaults shared across the package.

Every tolerance used by a check or a solver has a default here so it can be
overridden in one place (and from the ``[solver]``/``[hypotheses]`` config
sections).
"""

GRID_NODES = 257

# Simpson subintervals per panel for standalone integrals (profiles, gamma).
SIMPSON_PER_PANEL = 64

# Cone membership / order comparisons.
CONE_TOL = 1e-9

# Strict inequalities "x > y" are tested as "x - y >= STRICT_MARGIN".
STRICT_MARGIN = 1e-9

# Envelope scans (H5).
ENVELOPE_TOL = 1e-12

# estimate_c backs off by this much so verify_H5 always accepts its output.
C_SAFETY_MARGIN = 1e-9

# Profile refinement for gamma constants.
GAMMA_REFINE_TOL = 1e-8
GAMMA_MAX_REFINEMENTS = 4

# Lattice samplers.
LATTICE_DENSITY = 64
LATTICE_MIN_DENSITY = 16
LAMBDA_SUP_LEVELS = 4
H7_STAR_THRESHOLD = 1e3
MONOTONE_TOL = 1e-12

# Solvers.
ITER_TOL = 1e-10
NEWTON_TOL = 1e-8
ITER_MAXITER = 10_000
NEWTON_MAXITER = 100
NEWTON_MAX_HALVINGS = 30
PIVOT_TOL = 1e-12
DIVERGENCE_CEILING = 1e8
FD_REL_STEP = 1e-6
