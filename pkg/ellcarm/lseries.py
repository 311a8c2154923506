"""
L-series coefficients: a_p by point counting, a_(p^k) by the Euler factor recurrence, a_n by multiplicativity
"""

import math
import os
import threading
import typing

import numpy as np

from ellcarm.arith import Factorization, factorize
from ellcarm.curve import CurveModel, has_good_reduction
from ellcarm.utils import CacheFileError, CacheWarning, NotApplicableError, ResourceLimitError

# largest prime a_p is counted for; the character table holds p entries
DEFAULT_AP_CAP: typing.Final[int] = 10 ** 6

def _division_values(curve: CurveModel, p: int, cap: int = DEFAULT_AP_CAP) -> np.ndarray:
    """
    4x^3 + b2x^2 + 2b4x + b6 mod p for every x in F_p (odd p)
    """
    if p > cap:
        raise ResourceLimitError(f"point count of {curve} mod {p}", p, cap)
    x: np.ndarray = np.arange(p, dtype=np.int64)
    # Horner with a reduction after every product keeps values below p^2
    values: np.ndarray = np.full(p, 4 % p, dtype=np.int64)
    for coeff in (curve.b2, 2 * curve.b4, curve.b6):
        values = (values * x + coeff % p) % p
    return values

def _quadratic_characters(p: int) -> np.ndarray:
    chi: np.ndarray = np.full(p, -1, dtype=np.int64)
    x: np.ndarray = np.arange(p, dtype=np.int64)
    chi[(x * x) % p] = 1
    chi[0] = 0
    return chi

def two_torsion_roots(curve: CurveModel, p: int) -> int:
    """
    Number of nonzero 2-torsion points of E(F_p) for odd p
    """
    return int(np.count_nonzero(_division_values(curve, p) == 0))

def a_p(curve: CurveModel, p: int, cap: int = DEFAULT_AP_CAP) -> int:
    """
    p + 1 - #E(F_p) for a prime of good reduction
    """
    if not has_good_reduction(curve, p):
        raise NotApplicableError(p, f"a_p of {curve}")
    if p == 2:
        count: int = 1
        for x in (0, 1):
            for y in (0, 1):
                if (y * y + curve.a1 * x * y + curve.a3 * y - x ** 3 - curve.a2 * x * x - curve.a4 * x - curve.a6) % 2 == 0:
                    count += 1
        return 3 - count
    # (2y + a1x + a3)^2 = 4x^3 + b2x^2 + 2b4x + b6
    values: np.ndarray = _division_values(curve, p, cap)
    return -int(_quadratic_characters(p)[values].sum())

def a_prime_power(ap: int, p: int, k: int) -> int:
    """
    a_(p^k) from a_(p^(k+1)) = a_p * a_(p^k) - p * a_(p^(k-1))
    """
    prev: int = 1
    cur: int = ap
    if k == 0:
        return 1
    for _ in range(k - 1):
        prev, cur = cur, ap * cur - p * prev
    return cur

def hasse_check(curve: CurveModel, p: int, cache: "AnCache | None" = None) -> bool:
    ap: int = cache.get(p) if cache is not None else a_p(curve, p)
    return ap * ap <= 4 * p

class AnCache:
    """
    Append-only memo table p -> a_p for one curve

    Readers never lock; writers serialize. Two threads racing on the same prime compute the same value.
    """

    __slots__ = ["curve", "_table", "_exponents", "_lock"]

    def __init__(self, curve: CurveModel, table: typing.Mapping[int, int] | None = None) -> None:
        self.curve: CurveModel = curve
        self._table: typing.Dict[int, int] = dict(table) if table is not None else {}
        self._exponents: typing.Dict[int, int] = {}
        self._lock: threading.Lock = threading.Lock()

    def get(self, p: int) -> int:
        value: int | None = self._table.get(p)
        if value is None:
            value = a_p(self.curve, p)
            with self._lock:
                value = self._table.setdefault(p, value)
        return value

    def get_exponent(self, p: int, compute: typing.Callable[[], int]) -> int:
        """
        Memoized exponent of E(F_p)
        """
        value: int | None = self._exponents.get(p)
        if value is None:
            value = compute()
            with self._lock:
                value = self._exponents.setdefault(p, value)
        return value

    def __contains__(self, p: int) -> bool:
        return p in self._table

    def __len__(self) -> int:
        return len(self._table)

    def snapshot(self) -> typing.Dict[int, int]:
        with self._lock:
            return dict(self._table)

    def merge(self, table: typing.Mapping[int, int]) -> None:
        """
        Adds entries computed elsewhere; existing entries are kept
        """
        with self._lock:
            for p, ap in table.items():
                self._table.setdefault(p, ap)

    @staticmethod
    def _header(curve: CurveModel) -> str:
        return f"[{curve.label()}] {curve.key()}"

    @classmethod
    def load(cls, path: str, curve: CurveModel) -> "AnCache":
        """
        Reads this curve's section of a cache file; a missing file gives an empty cache
        """
        cache: AnCache = cls(curve)
        if not os.path.exists(path):
            return cache
        for label, entries in _read_sections(path).items():
            if label == curve.label():
                for p, (ap, lineno) in entries.items():
                    if ap * ap > 4 * p:
                        CacheWarning(path, lineno, f"a_{p} = {ap} violates the Hasse bound, ignored")
                        continue
                    cache._table[p] = ap
        return cache

    def save(self, path: str) -> None:
        """
        Rewrites the file with this curve's section updated and every other section kept
        """
        sections: typing.Dict[str, typing.Dict[int, int]] = {}
        if os.path.exists(path):
            for label, entries in _read_sections(path).items():
                sections[label] = {p: ap for p, (ap, _) in entries.items()}
        merged: typing.Dict[int, int] = sections.get(self.curve.label(), {})
        merged.update(self.snapshot())
        sections[self.curve.label()] = merged
        with open(path, "w", encoding="utf-8") as f:
            for label, entries in sections.items():
                f.write(f"[{label}] {_label_key(label)}\n")
                for p in sorted(entries):
                    f.write(f"{p} {entries[p]}\n")

def _label_key(label: str) -> int:
    return CurveModel(*(int(a) for a in label.split(","))).key()

def _read_sections(path: str) -> typing.Dict[str, typing.Dict[int, typing.Tuple[int, int]]]:
    """
    Curve label -> {p: (a_p, line number)}
    """
    sections: typing.Dict[str, typing.Dict[int, typing.Tuple[int, int]]] = {}
    current: typing.Dict[int, typing.Tuple[int, int]] | None = None
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line: str = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("["):
                label, _, key = line[1:].partition("]")
                try:
                    expected: int = _label_key(label)
                except (TypeError, ValueError) as e:
                    raise CacheFileError(path, f"line {lineno}: bad curve label {label!r}") from e
                if key.strip() != str(expected):
                    raise CacheFileError(path, f"line {lineno}: key {key.strip()!r} does not match [{label}]")
                current = sections.setdefault(label, {})
                continue
            if current is None:
                raise CacheFileError(path, f"line {lineno}: entry before any curve header")
            parts: typing.List[str] = line.split()
            try:
                p, ap = int(parts[0]), int(parts[1])
                if len(parts) != 2:
                    raise ValueError(line)
            except (ValueError, IndexError):
                CacheWarning(path, lineno, f"malformed entry {line!r}, ignored")
                continue
            current[p] = (ap, lineno)
    return sections

def a_n(curve: CurveModel, n: int, cache: AnCache | None = None) -> int:
    """
    Product of a_(p^e) over the factorization of n
    """
    if cache is None:
        cache = AnCache(curve)
    fact: Factorization = factorize(n)
    for p in fact.primes:
        if not has_good_reduction(curve, p):
            raise NotApplicableError(p, f"a_{n} of {curve}")
    return math.prod(a_prime_power(cache.get(p), p, e) for p, e in fact.factors)
