"""Numerical tolerances shared across the package."""

# Exact-by-construction identities: traces, completeness, closed-form matrices.
STRUCTURAL_TOL = 1e-12

# Spectral quantities: eigen-reconstruction, ergotropy decompositions.
SPECTRAL_TOL = 1e-10

# Values produced by a numerical optimizer.
OPTIMIZATION_TOL = 1e-9

# Eigenvalues above -PSD_TOL are clipped to zero instead of rejected.
PSD_TOL = 1e-10

TOLERANCES = {
    "structural": STRUCTURAL_TOL,
    "spectral": SPECTRAL_TOL,
    "optimization": OPTIMIZATION_TOL,
    "psd": PSD_TOL,
}
