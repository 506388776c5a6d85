"""Quadratic-residue patterns modulo primes: character tables, pattern
censuses, progression counts and least nonresidues."""

__version__ = "0.1.0"

from .ntcore import (
    PrimeModulus,
    is_prime,
    legendre_euler,
    legendre_reciprocity,
    mod_pow,
    primes_in_range,
)
from .chartab import BudgetExceeded, CharacterTable, build_character_table, chi
from .patterns import (
    APCount,
    Pattern,
    PatternCensus,
    census,
    count_ap,
    count_pattern,
    least_nonresidue,
    pattern_from_string,
    pattern_to_string,
    reverse_complement,
)
from .analysis import (
    bound_table,
    classify_type,
    deviations,
    dichotomy_check,
    duality_check,
    peralta_check,
    scan_record,
    threshold_experiment,
    verify_shds,
)
