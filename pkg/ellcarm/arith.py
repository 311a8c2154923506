"""
Exact integer utilities: factorization, valuations, CRT and Jacobi symbols
"""

import dataclasses
import math
import typing

import sympy
from sympy.ntheory.modular import crt

from ellcarm.utils import ArithOverflowError, DomainError, FactorList

# public bound on integer arguments
MAX_MAGNITUDE: typing.Final[int] = 1 << 62
# factorize accepts one more bit
MAX_FACTOR_INPUT: typing.Final[int] = 1 << 63

def check_magnitude(*values: int) -> None:
    """
    Raises ArithOverflowError if any value is at least 2^62 in absolute value
    """
    for value in values:
        if abs(value) >= MAX_MAGNITUDE:
            raise ArithOverflowError(value, MAX_MAGNITUDE)

@dataclasses.dataclass(slots=True, frozen=True)
class Factorization:
    """
    Canonical factorization of a positive integer, primes in increasing order
    """

    value: int
    factors: FactorList = ()

    @property
    def primes(self) -> typing.List[int]:
        return [p for p, _ in self.factors]
    
    @property
    def num_primes(self) -> int:
        return len(self.factors)

    def __reduce__(self) -> typing.Tuple[type, typing.Tuple[int, FactorList]]:
        return (Factorization, (self.value, self.factors))

    def exponent(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)
    
    def prime_powers(self) -> typing.List[int]:
        return [p ** e for p, e in self.factors]
    
    def format(self) -> str:
        """
        Renders the factorization as "5^3 * 7"
        """
        if not self.factors:
            return "1"
        return " * ".join(str(p) if e == 1 else f"{p}^{e}" for p, e in self.factors)
    
    def as_list(self) -> typing.List[typing.List[int]]:
        return [[p, e] for p, e in self.factors]

    @classmethod
    def parse(cls, text: str) -> "Factorization":
        """
        Inverse of format()
        """
        text = text.strip()
        if text == "1":
            return cls(1, ())
        factors: typing.List[typing.Tuple[int, int]] = []
        for part in text.split("*"):
            base, _, exp = part.strip().partition("^")
            factors.append((int(base), int(exp) if exp else 1))
        return cls(math.prod(p ** e for p, e in factors), tuple(factors))

    def __str__(self) -> str:
        return self.format()

def factorize(n: int) -> Factorization:
    """
    Factors 1 <= n < 2^63
    """
    if n <= 0:
        raise DomainError(f"cannot factor {n}")
    if n >= MAX_FACTOR_INPUT:
        raise ArithOverflowError(n, MAX_FACTOR_INPUT)
    return Factorization(n, tuple(sorted((int(p), int(e)) for p, e in sympy.factorint(n).items())))

def is_prime(n: int) -> bool:
    return bool(sympy.isprime(n))

def primes_in_range(lo: int, hi: int) -> typing.List[int]:
    """
    Primes p with lo <= p <= hi
    """
    return [int(p) for p in sympy.primerange(lo, hi + 1)]

def valuation(p: int, n: int) -> int:
    """
    Largest e with p^e dividing n
    """
    check_magnitude(p, n)
    if n == 0:
        raise DomainError("valuation of 0 is infinite")
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    return int(sympy.multiplicity(p, abs(n)))

def crt_combine(residues: typing.Sequence[typing.Tuple[int, int]]) -> typing.Tuple[int, int]:
    """
    Returns (x, M) with M the product of the moduli and x = r_i mod m_i for every pair
    """
    moduli: typing.List[int] = []
    values: typing.List[int] = []
    for r, m in residues:
        check_magnitude(r, m)
        if m <= 0:
            raise DomainError(f"modulus {m} is not positive")
        for other in moduli:
            if math.gcd(m, other) != 1:
                raise DomainError(f"moduli {other} and {m} are not coprime")
        moduli.append(m)
        values.append(r % m)
    modulus: int = math.prod(moduli)
    if modulus == 1:
        return 0, 1
    result = crt(moduli, values, check=False)
    return int(result[0]) % modulus, modulus

def jacobi(a: int, n: int) -> int:
    """
    Jacobi symbol (a/n) for odd positive n
    """
    check_magnitude(a, n)
    if n < 1 or n % 2 == 0:
        raise DomainError(f"Jacobi symbol needs an odd positive modulus, got {n}")
    if n == 1:
        return 1
    return int(sympy.jacobi_symbol(a % n, n))

def legendre(a: int, p: int) -> int:
    """
    Legendre symbol (a/p) for an odd prime p
    """
    if p == 2 or not is_prime(p):
        raise DomainError(f"Legendre symbol needs an odd prime, got {p}")
    return int(sympy.legendre_symbol(a % p, p))
