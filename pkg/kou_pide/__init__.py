"""
Finite difference pricing of European two-asset options under the Kou jump-diffusion model, with IMEX and ADI operator
splitting time steppers and a cumulative-sum evaluation of the jump integral.
"""

# CSV column names
SCHEME_STR = 'scheme'
SET_STR = 'set'
M_STR = 'm'
N_STR = 'N'
N_PRIME_STR = 'Nprime'
ERROR_STR = 'error'
SECONDS_STR = 'seconds'
QUANTITY_STR = 'quantity'
S1_STR = 's1'
S2_STR = 's2'
VALUE_STR = 'value'
PRICE_STR = 'price'
STDERR_STR = 'stderr'
PATHS_STR = 'paths'

CONVERGENCE_COLUMNS = [SCHEME_STR, M_STR, N_STR, N_PRIME_STR, ERROR_STR, SECONDS_STR]
GREEK_ERROR_COLUMNS = [SCHEME_STR, QUANTITY_STR, M_STR, N_STR, N_PRIME_STR, ERROR_STR, SECONDS_STR]
SURFACE_COLUMNS = [S1_STR, S2_STR, VALUE_STR]
PRICE_COLUMNS = [SET_STR, SCHEME_STR, M_STR, N_STR, N_PRIME_STR, S1_STR, S2_STR, PRICE_STR]
MC_COLUMNS = [SET_STR, S1_STR, S2_STR, PATHS_STR, PRICE_STR, STDERR_STR]
BENCH_COLUMNS = [M_STR, SECONDS_STR]
PART_STR = 'part'
SAMPLES_STR = 'samples'
MAX_RATIO_STR = 'max_ratio'
PASSED_STR = 'passed'
STABILITY_COLUMNS = [SCHEME_STR, PART_STR, SAMPLES_STR, MAX_RATIO_STR, PASSED_STR]
GREEK_SURFACE_COLUMNS = [QUANTITY_STR, S1_STR, S2_STR, VALUE_STR]
