"""
Elliptic pseudoprimes, elliptic Korselt numbers and elliptic Carmichael numbers
"""

__version__: str = "0.1.0"

from ellcarm.arith import (
    Factorization as Factorization,
    crt_combine as crt_combine,
    factorize as factorize,
    is_prime as is_prime,
    jacobi as jacobi,
    legendre as legendre,
    primes_in_range as primes_in_range,
    valuation as valuation,
)
from ellcarm.curve import (
    CompositePoint as CompositePoint,
    CurveModel as CurveModel,
    LocalGroup as LocalGroup,
    ModNGroup as ModNGroup,
    ProjPoint as ProjPoint,
    add_mod_n as add_mod_n,
    add_points as add_points,
    enumerate_points as enumerate_points,
    group_exponent_bruteforce as group_exponent_bruteforce,
    has_good_reduction as has_good_reduction,
    named_curves as named_curves,
    parse_curve as parse_curve,
    parse_curve_string as parse_curve_string,
    point_mod_n as point_mod_n,
    scalar_mul as scalar_mul,
    scalar_mul_mod_n as scalar_mul_mod_n,
)
from ellcarm.korselt import (
    CensusResult as CensusResult,
    ExponentMethod as ExponentMethod,
    KorseltCertificate as KorseltCertificate,
    PqClass as PqClass,
    PqTag as PqTag,
    PrimeRecord as PrimeRecord,
    Verdict as Verdict,
    build_certificate as build_certificate,
    census_carmichael_curves as census_carmichael_curves,
    classify_pq as classify_pq,
    exponent_mod_p as exponent_mod_p,
    gordan_pseudoprime as gordan_pseudoprime,
    group_exponent as group_exponent,
    is_canonical_at as is_canonical_at,
    is_carmichael_oracle as is_carmichael_oracle,
    is_elliptic_pseudoprime as is_elliptic_pseudoprime,
    is_korselt_type1 as is_korselt_type1,
    is_korselt_type2 as is_korselt_type2,
    torsion_congruence as torsion_congruence,
)
from ellcarm.lseries import (
    AnCache as AnCache,
    a_n as a_n,
    a_p as a_p,
    a_prime_power as a_prime_power,
    DEFAULT_AP_CAP as DEFAULT_AP_CAP,
    hasse_check as hasse_check,
)
from ellcarm.search import (
    OutputFormat as OutputFormat,
    Parity as Parity,
    SearchConfig as SearchConfig,
    SearchMode as SearchMode,
    SearchRecord as SearchRecord,
    read_records as read_records,
    run_search as run_search,
    write_records as write_records,
)
from ellcarm.utils import (
    ArithOverflowError as ArithOverflowError,
    CacheFileError as CacheFileError,
    CacheWarning as CacheWarning,
    CorruptPointError as CorruptPointError,
    CurveFormatError as CurveFormatError,
    DomainError as DomainError,
    ModelWarning as ModelWarning,
    NotApplicableError as NotApplicableError,
    ResourceLimitError as ResourceLimitError,
    SearchWarning as SearchWarning,
    SingularCurveError as SingularCurveError,
)
