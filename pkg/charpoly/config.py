DEFAULT_SEED = 20240517

QUADRATURE_TOL = 1e-12
QUADRATURE_LOG_FLOOR = -700.0
QUADRATURE_MAX_PANELS = 4096
QUADRATURE_NODES_PER_PANEL = 24
QUADRATURE_INITIAL_PANELS = 8

# |a - b| < COINCIDENCE_RTOL * (1 + |a|) is treated as an exact coincidence
COINCIDENCE_RTOL = 1e-8
COINCIDENCE_WARN_RTOL = 1e-4

# Cauchy transforms closer than this fraction of the support scale are refused
MIN_AXIS_OFFSET = 1e-4

# bulk points satisfy |x| < BULK_FRACTION * a
BULK_FRACTION = 0.9

INVERSE_K_CAP = 4
MIXED_M_CAP = 6

MC_VARIANCE_GUARD = 0.05
MC_BATCHES = 20
MC_TARGET_ACCEPTANCE = 0.4
MC_DIRECT_BATCH = 4096
MC_MIN_SEPARATION = 1e-14
MC_MAX_REPROPOSALS = 16
# estimates whose log-scale exceeds this keep it separate from the mantissa
MC_MAX_LOG_SCALE = 700.0

IDENTITY_PARTITION_MAX_N = 8
IDENTITY_APPENDIX_MAX = 6
SCHUR_MAX_PRODUCT = 0.5
