# ============================================
# EXACT CONSTANTS
# ============================================

"""
Exact integer constants shared by the services.
Kept as Python integers so nothing is rounded before it reaches mpmath.
"""

from typing import Dict, FrozenSet

# Denominator of the j-factor in the Fricke-Siegel difference identity
FRICKE_SIEGEL_DENOMINATOR = 2**30 * 3**24

# Per-level exponents of 2 and 3 in the j-factor of ln|xi_t| (multiplied by N)
J_FACTOR_TWO_EXPONENT = 60
J_FACTOR_THREE_EXPONENT = 48
J_FACTOR_J_EXPONENT = 4
J_FACTOR_J1728_EXPONENT = 6

# Levels the generation theorem does not cover
EXCLUDED_LEVELS: FrozenSet[int] = frozenset({2, 3, 4, 6})

# Fields whose Weber function uses a higher power of wp
EXCEPTIONAL_DISCRIMINANTS: FrozenSet[int] = frozenset({-3, -4})

# gcd(72, N) routing
CASE_ONE_GCDS: FrozenSet[int] = frozenset({8, 72})
CASE_TWO_GCD = 9
CASE_THREE_GCD = 1
CHARACTER_A_GCDS: FrozenSet[int] = frozenset({1, 8, 9, 72})
T_CHOICE_GCDS: FrozenSet[int] = frozenset({2, 3, 4, 6, 12, 18, 24, 36})

# Fixed rows of the choice-of-t table
T_CHOICE_FIXED_ROWS: Dict[int, int] = {
    12: 5,
    18: 5,
    24: 7,
    36: 17,
}

# Expected constant S(chi_bar, xi_t) / S(chi_bar) per case
CASE_CONSTANTS: Dict[str, int] = {
    "case1": -4,
    "case2": -3,
    "case3": -2,
    "prime_power": -4,
}

# Process exit codes
EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INDETERMINATE = 3

REPORT_SCHEMA_VERSION = 1

# Norm bound for the prime splitting table printed by `field`
SPLITTING_TABLE_BOUND = 50
