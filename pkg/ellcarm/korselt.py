"""
Elliptic pseudoprimes, Korselt numbers of Type I and Type II, and elliptic Carmichael numbers
"""

import collections
import dataclasses
import itertools
import json
import math
import typing

from ellcarm.arith import Factorization, crt_combine, factorize, is_prime, jacobi, valuation
from ellcarm.curve import (
    CompositePoint,
    CurveModel,
    DEFAULT_ENUM_CAP,
    LocalGroup,
    ModNGroup,
    ProjPoint,
    group_exponent_bruteforce,
    has_good_reduction,
    sylow_exponent,
)
from ellcarm.lseries import AnCache, a_p, a_prime_power, two_torsion_roots
from ellcarm.utils import (
    CorruptPointError,
    DomainError,
    EnumEx,
    JSONType,
    NotApplicableError,
    ResourceLimitError,
)

DEFAULT_ORACLE_CAP: typing.Final[int] = 10 ** 6
DEFAULT_CENSUS_CAP: typing.Final[int] = 50
SMALL_PRIME_BOUND: typing.Final[int] = 17

EVEN_N_NOTE: typing.Final[str] = "even n lies outside the odd-n Type I theorem"

class Verdict(EnumEx):
    """
    Tri-state verdict; NOT_APPLICABLE means n is outside the hypotheses of the definition
    """

    TRUE            = 0
    FALSE           = 1
    NOT_APPLICABLE  = 2

    @classmethod
    def of(cls, value: bool) -> "Verdict":
        return cls.TRUE if value else cls.FALSE

    def to_json(self) -> bool | None:
        if self == Verdict.NOT_APPLICABLE:
            return None
        return self == Verdict.TRUE

    @classmethod
    def from_json(cls, value: bool | None) -> "Verdict":
        if value is None:
            return cls.NOT_APPLICABLE
        return cls.of(value)

class ExponentMethod(EnumEx):
    FORMULA     = 0
    BRUTEFORCE  = 1

class PqTag(EnumEx):
    SMALL_P         = 0
    BOTH_ANOMALOUS  = 1
    LARGE_P         = 2

@dataclasses.dataclass(slots=True)
class PrimeRecord:
    """
    Evidence at one prime divisor p of n; fields after e stay None under bad reduction
    """

    p: int
    e: int
    ap: int | None = None
    order: int | None = None
    divides: bool | None = None
    val_ok: bool | None = None
    anomalous: bool | None = None
    enp: int | None = None
    canonical: bool | None = None

    @property
    def good(self) -> bool:
        return self.ap is not None

    def _as_dict(self) -> JSONType:
        return {
            "p" : self.p,
            "e" : self.e,
            "ap" : self.ap,
            "order" : self.order,
            "divides" : self.divides,
            "val_ok" : self.val_ok,
            "anomalous" : self.anomalous,
            "enp" : self.enp,
            "canonical" : self.canonical,
        }

    @classmethod
    def _from_dict(cls, data: JSONType) -> "PrimeRecord":
        return cls(
            data["p"],
            data["e"],
            data.get("ap"),
            data.get("order"),
            data.get("divides"),
            data.get("val_ok"),
            data.get("anomalous"),
            data.get("enp"),
            data.get("canonical"),
        )

@dataclasses.dataclass(slots=True)
class PqClass:
    """
    Classification of a Type I Korselt number n = pq with p < q
    """

    p: int
    q: int
    ap: int
    aq: int
    tags: typing.List[PqTag] = dataclasses.field(default_factory=list)

    def _as_dict(self) -> JSONType:
        return {
            "p" : self.p,
            "q" : self.q,
            "ap" : self.ap,
            "aq" : self.aq,
            "tags" : [str(tag) for tag in self.tags],
        }

    @classmethod
    def _from_dict(cls, data: JSONType) -> "PqClass":
        return cls(data["p"], data["q"], data["ap"], data["aq"], [PqTag[tag] for tag in data["tags"]])

_VERDICT_KEYS: typing.Final[typing.Tuple[str, ...]] = ("type1", "type2", "carmichael", "pseudoprime")

@dataclasses.dataclass(slots=True)
class KorseltCertificate:
    """
    Per-prime evidence for n plus the verdicts evaluated so far (None = not evaluated)
    """

    n: int
    factorization: Factorization
    an: int | None = None
    N: int | None = None
    primes: typing.List[PrimeRecord] = dataclasses.field(default_factory=list)
    type1: Verdict | None = None
    type2: Verdict | None = None
    carmichael: Verdict | None = None
    pseudoprime: Verdict | None = None
    pq_class: PqClass | None = None
    notes: typing.List[str] = dataclasses.field(default_factory=list)

    @property
    def good_reduction(self) -> bool:
        return all(rec.good for rec in self.primes)

    def record(self, p: int) -> PrimeRecord:
        for rec in self.primes:
            if rec.p == p:
                return rec
        raise KeyError(p)

    def note(self, text: str) -> None:
        if text not in self.notes:
            self.notes.append(text)

    def as_dict(self) -> JSONType:
        """
        JSON form; unevaluated verdicts are omitted and NOT_APPLICABLE is null
        """
        data: JSONType = {
            "n" : self.n,
            "factors" : self.factorization.as_list(),
            "an" : self.an,
            "N" : self.N,
        }
        for key in _VERDICT_KEYS:
            verdict: Verdict | None = getattr(self, key)
            if verdict is not None:
                data[key] = verdict.to_json()
        data["primes"] = [rec._as_dict() for rec in self.primes]
        if self.pq_class is not None:
            data["pq_class"] = self.pq_class._as_dict()
        if self.notes:
            data["notes"] = list(self.notes)
        return data

    @classmethod
    def from_dict(cls, data: JSONType) -> "KorseltCertificate":
        factors: typing.Tuple[typing.Tuple[int, int], ...] = tuple((int(p), int(e)) for p, e in data["factors"])
        cert: KorseltCertificate = cls(
            data["n"],
            Factorization(data["n"], factors),
            data.get("an"),
            data.get("N"),
            [PrimeRecord._from_dict(rec) for rec in data.get("primes", [])],
        )
        for key in _VERDICT_KEYS:
            if key in data:
                setattr(cert, key, Verdict.from_json(data[key]))
        if "pq_class" in data:
            cert.pq_class = PqClass._from_dict(data["pq_class"])
        cert.notes = list(data.get("notes", []))
        return cert

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), separators=(",", ":"), ensure_ascii=False)

def _valuation_ok(p: int, e: int, an: int, anomalous: bool) -> bool:
    # ord_p(0) counts as infinite
    if an == 1:
        return True
    return valuation(p, an - 1) >= e - (0 if anomalous else 1)

def build_certificate(curve: CurveModel, n: int, cache: AnCache | None = None) -> KorseltCertificate:
    """
    Shared per-prime evidence; a_n and the flags are filled in only under good reduction at every p | n
    """
    if cache is None:
        cache = AnCache(curve)
    fact: Factorization = factorize(n)
    cert: KorseltCertificate = KorseltCertificate(n, fact)
    bad: typing.List[int] = []
    for p, e in fact.factors:
        rec: PrimeRecord = PrimeRecord(p, e)
        if has_good_reduction(curve, p):
            rec.ap = cache.get(p)
            rec.order = p + 1 - rec.ap
            rec.anomalous = (rec.ap - 1) % p == 0
        else:
            bad.append(p)
        cert.primes.append(rec)
    if bad:
        cert.note(f"bad reduction at {', '.join(str(p) for p in bad)}")
        return cert
    an: int = math.prod(a_prime_power(rec.ap, rec.p, rec.e) for rec in cert.primes) # type: ignore
    cert.an = an
    cert.N = n + 1 - an
    for rec in cert.primes:
        rec.divides = cert.N % rec.order == 0 # type: ignore
        rec.val_ok = _valuation_ok(rec.p, rec.e, an, rec.anomalous) # type: ignore
    return cert

def _outside_hypotheses(cert: KorseltCertificate) -> str | None:
    if cert.factorization.num_primes < 2:
        return "fewer than two distinct prime factors"
    if not cert.good_reduction:
        return "bad reduction at a prime divisor"
    return None

def is_korselt_type1(
    curve: CurveModel, n: int, cache: AnCache | None = None, certificate: KorseltCertificate | None = None
) -> KorseltCertificate:
    """
    (p + 1 - a_p) | (n + 1 - a_n) and ord_p(a_n - 1) >= ord_p(n) - (0 if a_p = 1 mod p else 1) for all p | n
    """
    cert: KorseltCertificate = certificate if certificate is not None else build_certificate(curve, n, cache)
    reason: str | None = _outside_hypotheses(cert)
    if reason is None and n % 2 == 0:
        reason = EVEN_N_NOTE
    if reason is not None:
        cert.type1 = Verdict.NOT_APPLICABLE
        cert.note(reason)
        return cert
    cert.type1 = Verdict.of(all(rec.divides and rec.val_ok for rec in cert.primes))
    return cert

def exponent_mod_p(curve: CurveModel, p: int, ap: int | None = None, cache: AnCache | None = None) -> int:
    """
    Exponent of E(F_p)

    A Sylow q-subgroup can only be non-cyclic when E[q] is rational, which needs q^2 | #E(F_p) and q | p - 1;
    for q = 2 it is decided by the roots of the 2-division polynomial. Other Sylow subgroups are scanned.
    """
    if cache is not None:
        return cache.get_exponent(p, lambda: exponent_mod_p(curve, p, cache.get(p)))
    if ap is None:
        ap = a_p(curve, p)
    group: LocalGroup = LocalGroup(curve, p, 1, ap)
    def cyclic(q: int, v: int) -> bool:
        if q == p or (p - 1) % q != 0:
            return True
        if q == 2:
            return two_torsion_roots(curve, p) < 3
        return False
    def points() -> typing.Iterator[ProjPoint]:
        for x, y in group.iter_affine_mod_p():
            yield ProjPoint(p, x, y, 1)
    return sylow_exponent(group, group.order, points, cyclic)

def count_p_torsion(curve: CurveModel, p: int, i: int, cap: int = DEFAULT_ENUM_CAP) -> int:
    """
    Number of points of E(Z/p^iZ) killed by p
    """
    group: LocalGroup = LocalGroup(curve, p, i)
    return sum(1 for P in group.enumerate(cap) if group.multiply(p, P).is_identity())

def is_canonical_at(
    curve: CurveModel,
    p: int,
    i: int,
    cache: AnCache | None = None,
    method: typing.Literal["lift", "count"] = "lift",
    cap: int = DEFAULT_ENUM_CAP,
) -> bool:
    """
    Whether E(Z/p^iZ)[p] has p^2 elements, for good anomalous reduction at p >= 3 and i >= 2

    The lift method takes T of order p in E(F_p), lifts it and checks whether p * T lies in p * (kernel),
    which is the set of kernel points with z = 0 mod p^2.
    """
    if i < 2:
        raise DomainError(f"canonicity needs i >= 2, got {i}")
    if p < 3 or not is_prime(p):
        raise DomainError(f"canonicity needs an odd prime, got {p}")
    if not has_good_reduction(curve, p):
        raise DomainError(f"{curve} has bad reduction at {p}")
    ap: int = cache.get(p) if cache is not None else a_p(curve, p)
    if (ap - 1) % p:
        raise DomainError(f"{curve} is not anomalous at {p} (a_p = {ap})")
    if method == "count":
        torsion: int = count_p_torsion(curve, p, i, cap)
        if torsion not in (p, p * p):
            raise CorruptPointError(p ** i, (), f"{torsion} points of order dividing {p}")
        return torsion == p * p
    group: LocalGroup = LocalGroup(curve, p, i, ap)
    cofactor: int = (p + 1 - ap) // p
    for x, y in group.iter_affine_mod_p():
        T: ProjPoint = group.multiply(cofactor, group.lift_point(x, y))
        if group.is_kernel(T):
            continue
        return group.multiply(p, T).X % (p * p) == 0
    raise DomainError(f"E(F_{p}) has no point of order {p}")

def _exponent_at(
    curve: CurveModel, p: int, i: int, ap: int, cache: AnCache | None, cap: int
) -> typing.Tuple[int, ExponentMethod, bool | None]:
    if p == 2:
        return group_exponent_bruteforce(curve, p, i, cap), ExponentMethod.BRUTEFORCE, None
    if (ap - 1) % p:
        return p ** (i - 1) * exponent_mod_p(curve, p, ap, cache), ExponentMethod.FORMULA, None
    cofactor: int = (p + 1 - ap) // p
    if i == 1:
        return cofactor * p, ExponentMethod.FORMULA, None
    canonical: bool = is_canonical_at(curve, p, i, cache)
    return cofactor * p ** (i - 1 if canonical else i), ExponentMethod.FORMULA, canonical

def group_exponent(
    curve: CurveModel, n: int, p: int, cache: AnCache | None = None, cap: int = DEFAULT_ENUM_CAP
) -> typing.Tuple[int, ExponentMethod]:
    """
    e_(n,p)(E), the exponent of E(Z/p^iZ) with i = ord_p(n)
    """
    if n % p:
        raise DomainError(f"{p} does not divide {n}")
    if not has_good_reduction(curve, p):
        raise NotApplicableError(p, f"e_({n},{p}) of {curve}")
    ap: int = cache.get(p) if cache is not None else a_p(curve, p)
    enp, method, _ = _exponent_at(curve, p, valuation(p, n), ap, cache, cap)
    return enp, method

def is_korselt_type2(
    curve: CurveModel,
    n: int,
    cache: AnCache | None = None,
    certificate: KorseltCertificate | None = None,
    cap: int = DEFAULT_ENUM_CAP,
) -> KorseltCertificate:
    """
    e_(n,p)(E) | (n + 1 - a_n) for all p | n
    """
    if cache is None:
        cache = AnCache(curve)
    cert: KorseltCertificate = certificate if certificate is not None else build_certificate(curve, n, cache)
    reason: str | None = _outside_hypotheses(cert)
    if reason is not None:
        cert.type2 = Verdict.NOT_APPLICABLE
        cert.note(reason)
        return cert
    N: int = cert.N # type: ignore
    holds: bool = True
    for rec in cert.primes:
        # the group order annihilates, so the 2-adic enumeration is skipped when it already divides N
        if rec.p == 2 and N % (2 ** (rec.e - 1) * rec.order) == 0: # type: ignore
            continue
        rec.enp, _, rec.canonical = _exponent_at(curve, rec.p, rec.e, rec.ap, cache, cap) # type: ignore
        holds = holds and N % rec.enp == 0
    cert.type2 = Verdict.of(holds)
    if holds and n % 2 == 0:
        cert.note(EVEN_N_NOTE)
    return cert

def is_carmichael_oracle(
    curve: CurveModel,
    n: int,
    cache: AnCache | None = None,
    cap: int = DEFAULT_ORACLE_CAP,
    certificate: KorseltCertificate | None = None,
    exhaustive: bool = False,
) -> Verdict:
    """
    Checks (n + 1 - a_n) * P = O for every point of E(Z/nZ)

    Points are checked one prime power component at a time unless exhaustive is set, in which case every point
    of the product is multiplied.
    """
    cert: KorseltCertificate = certificate if certificate is not None else build_certificate(curve, n, cache)
    reason: str | None = _outside_hypotheses(cert)
    if reason is not None:
        cert.carmichael = Verdict.NOT_APPLICABLE
        cert.note(reason)
        return cert.carmichael
    size: int = math.prod(rec.p ** (rec.e - 1) * rec.order for rec in cert.primes) # type: ignore
    if size > cap:
        raise ResourceLimitError(f"E(Z/{n}Z)", size, cap)
    N: int = cert.N # type: ignore
    group: ModNGroup = ModNGroup(curve, n, {rec.p: rec.ap for rec in cert.primes}) # type: ignore
    holds: bool = True
    if exhaustive:
        holds = all(group.multiply(N, P).is_identity() for P in group.enumerate(cap))
    else:
        for local in group.components:
            k: int = N % local.order
            if not all(local.multiply(k, P).is_identity() for P in local.enumerate(max(cap, local.modulus))):
                holds = False
                break
    cert.carmichael = Verdict.of(holds)
    if holds and n % 2 == 0:
        cert.note(EVEN_N_NOTE)
    return cert.carmichael

def _as_point(group: ModNGroup, P: CompositePoint | typing.Sequence[int]) -> CompositePoint:
    if isinstance(P, CompositePoint):
        if P.modulus != group.n:
            raise CorruptPointError(P.modulus, (), f"expected a point mod {group.n}")
        return group.from_components(P.components)
    return group.point(P)

def is_elliptic_pseudoprime(
    curve: CurveModel,
    n: int,
    P: CompositePoint | typing.Sequence[int],
    cache: AnCache | None = None,
    certificate: KorseltCertificate | None = None,
) -> Verdict:
    """
    (n + 1 - a_n) * P = O in E(Z/nZ), for n with at least two distinct prime factors
    """
    cert: KorseltCertificate = certificate if certificate is not None else build_certificate(curve, n, cache)
    reason: str | None = _outside_hypotheses(cert)
    if reason is not None:
        cert.pseudoprime = Verdict.NOT_APPLICABLE
        cert.note(reason)
        return cert.pseudoprime
    group: ModNGroup = ModNGroup(curve, n, {rec.p: rec.ap for rec in cert.primes}) # type: ignore
    cert.pseudoprime = Verdict.of(group.multiply(cert.N, _as_point(group, P)).is_identity()) # type: ignore
    return cert.pseudoprime

def gordan_pseudoprime(
    curve: CurveModel, D: int, n: int, P: CompositePoint | typing.Sequence[int], cache: AnCache | None = None
) -> Verdict:
    """
    Pseudoprime test for a curve with complex multiplication by an order of Q(sqrt(-D)):
    (-D/n) = -1 and (n + 1) * P = O
    """
    if n % 2 == 0:
        raise DomainError(f"n = {n} must be odd")
    if D <= 0:
        raise DomainError(f"D = {D} must be positive")
    fact: Factorization = factorize(n)
    if fact.num_primes < 2 or not all(has_good_reduction(curve, p) for p in fact.primes):
        return Verdict.NOT_APPLICABLE
    if jacobi(-D, n) != -1:
        return Verdict.FALSE
    group: ModNGroup = ModNGroup(curve, n)
    return Verdict.of(group.multiply(n + 1, _as_point(group, P)).is_identity())

def torsion_congruence(n: int, an: int, m: int) -> bool:
    """
    m | (n + 1 - a_n) for the order m of a rational torsion point
    """
    if m <= 0:
        raise DomainError(f"torsion order {m} must be positive")
    return (n + 1 - an) % m == 0

def classify_pq(
    curve: CurveModel, n: int, certificate: KorseltCertificate | None = None, cache: AnCache | None = None
) -> PqClass:
    """
    Tags a Type I Korselt number n = pq: SMALL_P (p <= 17), BOTH_ANOMALOUS (a_p = a_q = 1), LARGE_P (p^2 >= q)
    """
    fact: Factorization = factorize(n)
    if fact.num_primes != 2 or not fact.is_squarefree():
        raise DomainError(f"{n} = {fact} is not a product of two distinct primes")
    cert: KorseltCertificate = certificate if certificate is not None else build_certificate(curve, n, cache)
    if cert.type1 is None:
        is_korselt_type1(curve, n, certificate=cert)
    if cert.type1 != Verdict.TRUE:
        raise DomainError(f"{n} is not a Type I Korselt number for {curve}")
    low, high = cert.primes
    result: PqClass = PqClass(low.p, high.p, low.ap, high.ap) # type: ignore
    if low.p <= SMALL_PRIME_BOUND:
        result.tags.append(PqTag.SMALL_P)
    if low.ap == 1 and high.ap == 1:
        result.tags.append(PqTag.BOTH_ANOMALOUS)
    if low.p * low.p >= high.p:
        result.tags.append(PqTag.LARGE_P)
    if not result.tags:
        raise DomainError(f"{n} = {low.p} * {high.p} falls in no pq class")
    cert.pq_class = result
    return result

@dataclasses.dataclass(slots=True)
class CurveClassCount:
    """
    Weierstrass tuples mod p sharing a_p and the exponent of E(F_p)
    """

    ap: int
    exponent: int
    count: int

    def _as_dict(self) -> JSONType:
        return {"ap" : self.ap, "exponent" : self.exponent, "count" : self.count}

@dataclasses.dataclass(slots=True)
class CensusResult:
    """
    Weierstrass tuples (a1, a2, a3, a4, a6) mod n with unit discriminant for which n is Carmichael

    Counts are raw tuples, not isomorphism classes. Each witness is a representative with a1 = a3 = 0
    standing for n^2 raw tuples.
    """

    n: int
    count: int
    unit_total: int
    classes: typing.Dict[int, typing.List[CurveClassCount]] = dataclasses.field(default_factory=dict)
    witnesses: typing.List[typing.Tuple[int, int, int, int, int]] = dataclasses.field(default_factory=list)

    def as_dict(self) -> JSONType:
        return {
            "n" : self.n,
            "count" : self.count,
            "unit_total" : self.unit_total,
            "classes" : {str(p) : [c._as_dict() for c in counts] for p, counts in self.classes.items()},
            "witnesses" : [list(w) for w in self.witnesses],
        }

def census_carmichael_curves(n: int, cap: int = DEFAULT_CENSUS_CAP, list_limit: int = 0) -> CensusResult:
    """
    Counts curves mod n for which n is an elliptic Carmichael number

    For odd p the tuple (a1, ..., a6) mod p enters only through (b2, b4, b6) mod p, each triple standing for p^2 tuples
    and for the curve y^2 = x^3 + (b2/4)x^2 + (b4/2)x + b6/4. Per prime the triples are grouped by (a_p, exponent),
    and the groups are combined over n by the Chinese remainder theorem.
    """
    if n > cap:
        raise ResourceLimitError(f"census mod {n}", n, cap)
    if n % 2 == 0:
        raise DomainError(f"census needs odd n, got {n}")
    fact: Factorization = factorize(n)
    if not fact.is_squarefree() or fact.num_primes < 2:
        raise DomainError(f"census needs a square-free n with at least two prime factors, got {n} = {fact}")
    tables: typing.Dict[int, typing.Dict[typing.Tuple[int, int], typing.List[typing.Tuple[int, int, int]]]] = {}
    for p in fact.primes:
        inv2: int = pow(2, -1, p)
        inv4: int = inv2 * inv2 % p
        table: typing.DefaultDict[typing.Tuple[int, int], typing.List[typing.Tuple[int, int, int]]] = collections.defaultdict(list)
        for b2, b4, b6 in itertools.product(range(p), repeat=3):
            a2, a4, a6 = b2 * inv4 % p, b4 * inv2 % p, b6 * inv4 % p
            curve: CurveModel = CurveModel(0, a2, 0, a4, a6)
            if curve.disc % p == 0:
                continue
            ap: int = a_p(curve, p)
            table[(ap, exponent_mod_p(curve, p, ap))].append((a2, a4, a6))
        tables[p] = dict(sorted(table.items()))
    result: CensusResult = CensusResult(
        n, 0, math.prod(p * p * sum(len(v) for v in tables[p].values()) for p in fact.primes)
    )
    for p in fact.primes:
        result.classes[p] = [CurveClassCount(ap, e, p * p * len(v)) for (ap, e), v in tables[p].items()]
    primes: typing.List[int] = fact.primes
    for combo in itertools.product(*(tables[p].items() for p in primes)):
        N: int = n + 1 - math.prod(ap for (ap, _), _ in combo)
        if any(N % e for (_, e), _ in combo):
            continue
        result.count += math.prod(p * p * len(triples) for p, (_, triples) in zip(primes, combo))
        for reps in itertools.product(*(triples for _, triples in combo)):
            if len(result.witnesses) >= list_limit:
                break
            glued: typing.List[int] = [crt_combine([(rep[k], p) for rep, p in zip(reps, primes)])[0] for k in range(3)]
            result.witnesses.append((0, glued[0], 0, glued[1], glued[2]))
    return result
