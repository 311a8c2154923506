"""
Weierstrass models over the integers and their groups of sections modulo prime powers and composite moduli

Good reduction is decided on the model as given: no minimal model is computed, so a non-minimal model
may misclassify primes dividing the unstable part of the discriminant (parse_curve warns about these).
"""

import dataclasses
import importlib.resources
import itertools
import json
import math
import typing

import sympy

from ellcarm.arith import Factorization, crt_combine, factorize, is_prime
from ellcarm.utils import (
    calc_hash,
    CorruptPointError,
    CurveFormatError,
    DomainError,
    JSONType,
    ModelWarning,
    NotApplicableError,
    ResourceLimitError,
    SingularCurveError,
)

DEFAULT_ENUM_CAP: typing.Final[int] = 10 ** 6

Triple: typing.TypeAlias = typing.Tuple[int, int, int]

@dataclasses.dataclass(slots=True, frozen=True)
class CurveModel:
    """
    Integral Weierstrass model y^2 + a1xy + a3y = x^3 + a2x^2 + a4x + a6 with its standard invariants
    """

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    b2: int = dataclasses.field(init=False, repr=False, compare=False)
    b4: int = dataclasses.field(init=False, repr=False, compare=False)
    b6: int = dataclasses.field(init=False, repr=False, compare=False)
    b8: int = dataclasses.field(init=False, repr=False, compare=False)
    disc: int = dataclasses.field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        a1, a2, a3, a4, a6 = self.coefficients
        b2: int = a1 * a1 + 4 * a2
        b4: int = 2 * a4 + a1 * a3
        b6: int = a3 * a3 + 4 * a6
        b8: int = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        object.__setattr__(self, "b2", b2)
        object.__setattr__(self, "b4", b4)
        object.__setattr__(self, "b6", b6)
        object.__setattr__(self, "b8", b8)
        object.__setattr__(self, "disc", -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6)

    @property
    def coefficients(self) -> typing.Tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def c4(self) -> int:
        return self.b2 * self.b2 - 24 * self.b4

    def __reduce__(self) -> typing.Tuple[type, typing.Tuple[int, ...]]:
        return (CurveModel, self.coefficients)

    def label(self) -> str:
        """
        Canonical curve string a1,a2,a3,a4,a6
        """
        return ",".join(str(a) for a in self.coefficients)

    def key(self) -> int:
        """
        Murmur3 hash of the canonical curve string
        """
        return calc_hash(self.label())

    def as_dict(self) -> JSONType:
        return {
            "coefficients" : list(self.coefficients),
            "disc" : self.disc,
        }

    def __str__(self) -> str:
        return f"[{self.label()}]"

def possibly_nonminimal_primes(curve: CurveModel) -> typing.List[int]:
    """
    Primes p with v_p(disc) >= 12 and v_p(c4) >= 4, where the model may fail to be minimal
    """
    g: int = math.gcd(curve.disc, curve.c4)
    if g == 1:
        return []
    primes: typing.List[int] = []
    for p in sympy.primefactors(g):
        if sympy.multiplicity(p, abs(curve.disc)) >= 12 and (curve.c4 == 0 or sympy.multiplicity(p, abs(curve.c4)) >= 4):
            primes.append(int(p))
    return primes

def parse_curve(coeffs: typing.Sequence[int]) -> CurveModel:
    """
    Builds a curve from [a1, a2, a3, a4, a6]
    """
    if len(coeffs) != 5:
        raise CurveFormatError(str(list(coeffs)), f"expected 5 coefficients, got {len(coeffs)}")
    curve: CurveModel = CurveModel(*(int(a) for a in coeffs))
    if curve.disc == 0:
        raise SingularCurveError(curve.coefficients)
    nonminimal: typing.List[int] = possibly_nonminimal_primes(curve)
    if nonminimal:
        ModelWarning(curve.label(), nonminimal)
    return curve

def named_curves() -> typing.Dict[str, typing.List[int]]:
    """
    The packaged named curves
    """
    with importlib.resources.files("ellcarm.data").joinpath("curves.json").open() as f:
        return json.load(f)

def parse_curve_string(text: str) -> CurveModel:
    """
    Parses "a1,a2,a3,a4,a6", the short form "[a4,a6]" or a packaged curve name
    """
    stripped: str = text.strip()
    names: typing.Dict[str, typing.List[int]] = named_curves()
    for name, coeffs in names.items():
        if stripped.upper() == name.upper():
            return parse_curve(coeffs)
    body: str = stripped
    short: bool = False
    if body.startswith("[") and body.endswith("]"):
        body = body[1:-1]
        short = True
    try:
        values: typing.List[int] = [int(part) for part in body.split(",")]
    except ValueError as e:
        raise CurveFormatError(text, f"coefficients must be decimal integers ({e.args[0]})") from e
    if short and len(values) == 2:
        values = [0, 0, 0, values[0], values[1]]
    if len(values) != 5:
        raise CurveFormatError(text, f"expected 5 coefficients or [a4,a6], got {len(values)} values")
    return parse_curve(values)

def has_good_reduction(curve: CurveModel, p: int) -> bool:
    return curve.disc % p != 0

@dataclasses.dataclass(slots=True, frozen=True)
class ProjPoint:
    """
    Normalized primitive triple (X : Y : Z) over Z/mZ

    Z is 1 when Z is a unit, otherwise Y is 1
    """

    modulus: int
    X: int
    Y: int
    Z: int

    def is_identity(self) -> bool:
        return self.X == 0 and self.Y == 1 and self.Z == 0

    def as_tuple(self) -> Triple:
        return (self.X, self.Y, self.Z)

    def affine(self) -> typing.Tuple[int, int] | None:
        if self.Z != 1:
            return None
        return (self.X, self.Y)

    def __str__(self) -> str:
        return f"({self.X} : {self.Y} : {self.Z}) mod {self.modulus}"

def _dot(u: Triple, v: Triple) -> int:
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]

def _cross(u: Triple, v: Triple) -> Triple:
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])

_BASIS: typing.Final[typing.Tuple[Triple, Triple, Triple]] = ((1, 0, 0), (0, 1, 0), (0, 0, 1))

class LocalGroup:
    """
    The group E(Z/p^iZ) of sections of a curve with good reduction at p

    The group law is chosen by reduction class: two points with distinct reductions use the chord through them,
    equal points use the tangent, two points of the kernel of reduction use the formal group chord in the
    (z, w) = (-X/Y, -Z/Y) chart, and distinct points in one affine fiber are split into a doubling plus a
    kernel difference. Every branch produces a primitive triple.
    """

    __slots__ = ["curve", "p", "i", "modulus", "trace", "_points", "_series"]

    def __init__(self, curve: CurveModel, p: int, i: int = 1, trace: int | None = None) -> None:
        if i < 1:
            raise DomainError(f"exponent {i} must be at least 1")
        if not is_prime(p):
            raise DomainError(f"{p} is not prime")
        if not has_good_reduction(curve, p):
            raise NotApplicableError(p, f"E(Z/{p}^{i}Z) of {curve}")
        self.curve: CurveModel = curve
        self.p: int = p
        self.i: int = i
        self.modulus: int = p ** i
        self.trace: int | None = trace
        self._points: typing.List[ProjPoint] | None = None
        self._series: typing.List[int] | None = None

    @property
    def order(self) -> int:
        """
        p^(i-1) * (p + 1 - a_p)
        """
        if self.trace is not None:
            return self.p ** (self.i - 1) * (self.p + 1 - self.trace)
        if self._points is not None:
            return len(self._points)
        raise DomainError(f"the order of E(Z/{self.modulus}Z) needs a_p or an enumeration")

    @property
    def points(self) -> typing.List[ProjPoint] | None:
        return self._points

    def _form(self, X: int, Y: int, Z: int) -> int:
        c: CurveModel = self.curve
        return (Y * Y * Z + c.a1 * X * Y * Z + c.a3 * Y * Z * Z
                - X * X * X - c.a2 * X * X * Z - c.a4 * X * Z * Z - c.a6 * Z * Z * Z)

    def _gradient(self, X: int, Y: int, Z: int) -> Triple:
        c: CurveModel = self.curve
        m: int = self.modulus
        return (
            (c.a1 * Y * Z - 3 * X * X - 2 * c.a2 * X * Z - c.a4 * Z * Z) % m,
            (2 * Y * Z + c.a1 * X * Z + c.a3 * Z * Z) % m,
            (Y * Y + c.a1 * X * Y + 2 * c.a3 * Y * Z - c.a2 * X * X - 2 * c.a4 * X * Z - 3 * c.a6 * Z * Z) % m,
        )

    def _affine_form(self, x: int, y: int) -> int:
        return self._form(x, y, 1)

    def _affine_partials(self, x: int, y: int) -> typing.Tuple[int, int]:
        c: CurveModel = self.curve
        return (c.a1 * y - 3 * x * x - 2 * c.a2 * x - c.a4, 2 * y + c.a1 * x + c.a3)

    def identity(self) -> ProjPoint:
        return ProjPoint(self.modulus, 0, 1, 0)

    def normalize(self, X: int, Y: int, Z: int) -> ProjPoint:
        """
        Scales a primitive triple to its normalized representative
        """
        m: int = self.modulus
        p: int = self.p
        X, Y, Z = X % m, Y % m, Z % m
        if Z % p:
            inv: int = pow(Z, -1, m)
            return ProjPoint(m, X * inv % m, Y * inv % m, 1)
        if Y % p:
            inv = pow(Y, -1, m)
            return ProjPoint(m, X * inv % m, 1, Z * inv % m)
        raise CorruptPointError(m, (X, Y, Z), "neither Y nor Z is a unit")

    def point(self, X: int, Y: int, Z: int = 1) -> ProjPoint:
        """
        Normalizes and validates a triple
        """
        P: ProjPoint = self.normalize(X, Y, Z)
        if self._form(P.X, P.Y, P.Z) % self.modulus:
            raise CorruptPointError(self.modulus, (X, Y, Z), f"not on {self.curve}")
        return P

    def contains(self, P: ProjPoint) -> bool:
        if P.modulus != self.modulus:
            return False
        if P.Z % self.p == 0 and P.Y % self.p == 0:
            return False
        return self._form(P.X, P.Y, P.Z) % self.modulus == 0

    def _check(self, P: ProjPoint) -> None:
        if P.modulus != self.modulus:
            raise CorruptPointError(P.modulus, P.as_tuple(), f"expected a point mod {self.modulus}")

    def reduce(self, P: ProjPoint) -> typing.Tuple[int, int] | None:
        """
        Affine coordinates of the reduction mod p, None for the identity
        """
        if P.Z % self.p == 0:
            return None
        return (P.X % self.p, P.Y % self.p)

    def is_kernel(self, P: ProjPoint) -> bool:
        return P.Z % self.p == 0

    def _negated(self, X: int, Y: int, Z: int) -> ProjPoint:
        c: CurveModel = self.curve
        return self.normalize(X, -Y - c.a1 * X - c.a3 * Z, Z)

    def negate(self, P: ProjPoint) -> ProjPoint:
        self._check(P)
        return self._negated(P.X, P.Y, P.Z)

    def _chord(self, P: ProjPoint, Q: ProjPoint) -> ProjPoint:
        # P and Q must have distinct reductions
        m: int = self.modulus
        p_vec: Triple = P.as_tuple()
        q_vec: Triple = Q.as_tuple()
        s: int = _dot(self._gradient(*q_vec), p_vec) % m
        t: int = _dot(self._gradient(*p_vec), q_vec) % m
        return self._negated(s * P.X - t * Q.X, s * P.Y - t * Q.Y, s * P.Z - t * Q.Z)

    def _tangent(self, P: ProjPoint) -> ProjPoint:
        m: int = self.modulus
        p_vec: Triple = P.as_tuple()
        line: Triple = self._gradient(*p_vec)
        for e in _BASIS:
            D: Triple = _cross(line, e)
            if any(c % self.p for c in _cross(D, p_vec)):
                break
        else:
            raise CorruptPointError(m, p_vec, "singular point")
        f_d: int = self._form(*D) % m
        b: int = _dot(self._gradient(*D), p_vec) % m
        return self._negated(f_d * P.X - b * D[0], f_d * P.Y - b * D[1], f_d * P.Z - b * D[2])

    def _series_coefficients(self) -> typing.List[int]:
        """
        Coefficients c_0..c_i of w(z) = z^3 + a1*z^4 + ... mod p^i
        """
        if self._series is None:
            c: CurveModel = self.curve
            m: int = self.modulus
            length: int = self.i + 1
            def mul(u: typing.List[int], v: typing.List[int]) -> typing.List[int]:
                out: typing.List[int] = [0] * length
                for k, x in enumerate(u):
                    if x:
                        for j in range(length - k):
                            out[k + j] += x * v[j]
                return [x % m for x in out]
            def shifted(u: typing.List[int], k: int) -> typing.List[int]:
                return ([0] * k + u)[:length]
            w: typing.List[int] = [0] * length
            for _ in range(self.i):
                w2: typing.List[int] = mul(w, w)
                w3: typing.List[int] = mul(w2, w)
                zw: typing.List[int] = shifted(w, 1)
                z2w: typing.List[int] = shifted(w, 2)
                zw2: typing.List[int] = shifted(w2, 1)
                w = [
                    ((1 if k == 3 else 0) + c.a1 * zw[k] + c.a2 * z2w[k] + c.a3 * w2[k] + c.a4 * zw2[k] + c.a6 * w3[k]) % m
                    for k in range(length)
                ]
            self._series = w
        return self._series

    def _w(self, z: int) -> int:
        c: CurveModel = self.curve
        m: int = self.modulus
        w: int = 0
        for _ in range(self.i + 1):
            w = (z * z * z + c.a1 * z * w + c.a2 * z * z * w + c.a3 * w * w + c.a4 * z * w * w + c.a6 * w * w * w) % m
        return w

    def kernel_point(self, z: int) -> ProjPoint:
        """
        The kernel-of-reduction point (-z : 1 : -w(z)) for z divisible by p
        """
        if z % self.p:
            raise DomainError(f"kernel parameter {z} is not divisible by {self.p}")
        m: int = self.modulus
        return ProjPoint(m, (-z) % m, 1, (-self._w(z % m)) % m)

    def kernel_points(self) -> typing.List[ProjPoint]:
        return [self.kernel_point(z) for z in range(0, self.modulus, self.p)]

    def _formal_add(self, P: ProjPoint, Q: ProjPoint) -> ProjPoint:
        # both points in the kernel, so Y = 1
        c: CurveModel = self.curve
        m: int = self.modulus
        z1, w1 = (-P.X) % m, (-P.Z) % m
        z2 = (-Q.X) % m
        series: typing.List[int] = self._series_coefficients()
        # terms of degree n - 1 >= i vanish mod p^i
        lam: int = 0
        for n in range(3, self.i + 1):
            if series[n]:
                lam += series[n] * sum(pow(z1, j, m) * pow(z2, n - 1 - j, m) for j in range(n))
        lam %= m
        nu: int = (w1 - lam * z1) % m
        lead: int = (1 + c.a2 * lam + c.a4 * lam * lam + c.a6 * lam ** 3) % m
        quad: int = (c.a1 * lam + c.a2 * nu + c.a3 * lam * lam + 2 * c.a4 * lam * nu + 3 * c.a6 * lam * lam * nu) % m
        z3: int = (-z1 - z2 - quad * pow(lead, -1, m)) % m
        w3: int = (lam * z3 + nu) % m
        return self.normalize(-z3, -1 + c.a1 * z3 + c.a3 * w3, -w3)

    def _fiber_difference(self, P: ProjPoint, Q: ProjPoint) -> ProjPoint:
        """
        The kernel point K with P + K = Q, found one p-adic digit of z at a time
        """
        p: int = self.p
        z: int = 0
        for k in range(1, self.i):
            step: int = p ** k
            mod: int = step * p
            for d in range(p):
                candidate: int = z + d * step
                R: ProjPoint = self._chord(P, self.kernel_point(candidate))
                if (R.X - Q.X) % mod == 0 and (R.Y - Q.Y) % mod == 0:
                    z = candidate
                    break
            else:
                raise CorruptPointError(self.modulus, Q.as_tuple(), f"no kernel translate of {P} matches")
        return self.kernel_point(z)

    def _is_two_torsion_mod_p(self, x: int, y: int) -> bool:
        return (2 * y + self.curve.a1 * x + self.curve.a3) % self.p == 0

    def add(self, P: ProjPoint, Q: ProjPoint) -> ProjPoint:
        self._check(P)
        self._check(Q)
        if P.is_identity():
            return Q
        if Q.is_identity():
            return P
        red_p = self.reduce(P)
        red_q = self.reduce(Q)
        if red_p != red_q:
            return self._chord(P, Q)
        if red_p is None:
            return self._formal_add(P, Q)
        if P == Q:
            return self._tangent(P)
        if self._is_two_torsion_mod_p(*red_p):
            return self._formal_add(self._tangent(P), self._fiber_difference(P, Q))
        return self._chord(self._tangent(P), self._chord(Q, self.negate(P)))

    def multiply(self, k: int, P: ProjPoint) -> ProjPoint:
        """
        k * P by double-and-add
        """
        self._check(P)
        if k < 0:
            k, P = -k, self.negate(P)
        result: ProjPoint = self.identity()
        for bit in bin(k)[2:]:
            result = self.add(result, result)
            if bit == "1":
                result = self.add(result, P)
        return result

    def point_order(self, P: ProjPoint, order: int | None = None) -> int:
        """
        Exact order of P given a multiple of it (defaults to the group order)
        """
        o: int = self.order if order is None else order
        for q, _ in factorize(o).factors:
            while o % q == 0 and self.multiply(o // q, P).is_identity():
                o //= q
        return o

    def solve_y(self, x: int) -> typing.List[int]:
        """
        All y mod p with (x, y) on the reduction
        """
        p: int = self.p
        c: CurveModel = self.curve
        if p == 2:
            return [y for y in (0, 1) if self._affine_form(x, y) % 2 == 0]
        b: int = (c.a1 * x + c.a3) % p
        d: int = (b * b + 4 * (x * x * x + c.a2 * x * x + c.a4 * x + c.a6)) % p
        roots: typing.List[int] = [int(r) for r in sympy.sqrt_mod(d, p, all_roots=True)] if d else [0]
        inv2: int = (p + 1) // 2
        return sorted({(-b + r) * inv2 % p for r in roots})

    def iter_affine_mod_p(self) -> typing.Iterator[typing.Tuple[int, int]]:
        """
        Affine points of the reduction in increasing (x, y) order
        """
        p: int = self.p
        c: CurveModel = self.curve
        if p == 2:
            for x in (0, 1):
                for y in self.solve_y(x):
                    yield (x, y)
            return
        roots: typing.Dict[int, int] = {}
        for r in range(p):
            roots.setdefault(r * r % p, r)
        inv2: int = (p + 1) // 2
        for x in range(p):
            b: int = (c.a1 * x + c.a3) % p
            d: int = (b * b + 4 * (x * x * x + c.a2 * x * x + c.a4 * x + c.a6)) % p
            r: int | None = roots.get(d)
            if r is None:
                continue
            for y in sorted({(-b + r) * inv2 % p, (-b - r) * inv2 % p}):
                yield (x, y)

    def _lift_level(self, points: typing.Iterable[typing.Tuple[int, int]], k: int) -> typing.List[typing.Tuple[int, int]]:
        # all p lifts mod p^(k+1) of each point mod p^k
        p: int = self.p
        pk: int = p ** k
        lifted: typing.List[typing.Tuple[int, int]] = []
        for x, y in points:
            rest: int = (self._affine_form(x, y) // pk) % p
            fx, fy = self._affine_partials(x, y)
            if fy % p:
                inv: int = pow(fy, -1, p)
                for s in range(p):
                    lifted.append((x + s * pk, y + (-(rest + fx * s) * inv) % p * pk))
            else:
                inv = pow(fx, -1, p)
                for t in range(p):
                    lifted.append((x + (-(rest + fy * t) * inv) % p * pk, y + t * pk))
        return lifted

    def lift_point(self, x0: int, y0: int) -> ProjPoint:
        """
        Hensel lift of an affine point of the reduction mod p
        """
        p: int = self.p
        if self._affine_form(x0, y0) % p:
            raise CorruptPointError(p, (x0, y0, 1), f"not on the reduction of {self.curve}")
        x, y = x0 % p, y0 % p
        for k in range(1, self.i):
            pk: int = p ** k
            rest: int = (self._affine_form(x, y) // pk) % p
            fx, fy = self._affine_partials(x, y)
            if fy % p:
                y += (-rest * pow(fy, -1, p)) % p * pk
            else:
                x += (-rest * pow(fx, -1, p)) % p * pk
        return ProjPoint(self.modulus, x, y, 1)

    def enumerate(self, cap: int = DEFAULT_ENUM_CAP) -> typing.List[ProjPoint]:
        """
        All points: the kernel of reduction by z, then the affine points lifted level by level
        """
        if self._points is not None:
            return self._points
        if self.modulus > cap:
            raise ResourceLimitError(f"E(Z/{self.modulus}Z)", self.modulus, cap)
        affine: typing.List[typing.Tuple[int, int]] = list(self.iter_affine_mod_p())
        for k in range(1, self.i):
            affine = self._lift_level(affine, k)
        m: int = self.modulus
        self._points = self.kernel_points() + [ProjPoint(m, x, y, 1) for x, y in sorted(affine)]
        return self._points

    def sample_point(self, seed: int | str) -> ProjPoint:
        """
        Deterministic pseudo-random point derived from a Murmur3 hash
        """
        h: int = calc_hash(f"{self.curve.label()}:{self.modulus}:{seed}")
        p: int = self.p
        for offset in range(p):
            x: int = (h + offset) % p
            ys: typing.List[int] = self.solve_y(x)
            if ys:
                P: ProjPoint = self.lift_point(x, ys[(h >> 16) % len(ys)])
                break
        else:
            P = self.identity()
        if self.i > 1:
            P = self.add(P, self.kernel_point((h >> 8) % (self.modulus // p) * p))
        return P

def sylow_exponent(
    group: LocalGroup,
    order: int,
    points: typing.Callable[[], typing.Iterable[ProjPoint]],
    cyclic: typing.Callable[[int, int], bool] | None = None,
) -> int:
    """
    Exponent of a group of known order, one Sylow subgroup at a time

    For q^v exactly dividing the order, the q-part is the largest q-order of (order / q^v) * P. The scan stops when it
    reaches q^v or once more than order / q points were seen, since those all lie in a subgroup of index below q.
    Sylow subgroups for which cyclic(q, v) holds contribute q^v without a scan.
    """
    exponent: int = 1
    for q, v in factorize(order).factors:
        if v == 1 or (cyclic is not None and cyclic(q, v)):
            exponent *= q ** v
            continue
        cofactor: int = order // q ** v
        best: int = 0
        seen: int = 0
        for P in points():
            seen += 1
            R: ProjPoint = group.multiply(cofactor, P)
            u: int = 0
            while not R.is_identity():
                if u == v:
                    raise CorruptPointError(group.modulus, P.as_tuple(), f"order does not divide {order}")
                R = group.multiply(q, R)
                u += 1
            best = max(best, u)
            if best == v or seen * q > order:
                break
        exponent *= q ** best
    return exponent

def _local_group(curve: CurveModel, m: int) -> LocalGroup:
    fact: Factorization = factorize(m)
    if fact.num_primes != 1:
        raise DomainError(f"{m} is not a prime power")
    p, i = fact.factors[0]
    return LocalGroup(curve, p, i)

def add_points(curve: CurveModel, m: int, P: ProjPoint, Q: ProjPoint) -> ProjPoint:
    return _local_group(curve, m).add(P, Q)

def scalar_mul(curve: CurveModel, m: int, k: int, P: ProjPoint) -> ProjPoint:
    return _local_group(curve, m).multiply(k, P)

def enumerate_points(curve: CurveModel, p: int, i: int = 1, cap: int = DEFAULT_ENUM_CAP) -> LocalGroup:
    """
    E(Z/p^iZ) with all of its points enumerated
    """
    group: LocalGroup = LocalGroup(curve, p, i)
    group.enumerate(cap)
    return group

def group_exponent_bruteforce(curve: CurveModel, p: int, i: int = 1, cap: int = DEFAULT_ENUM_CAP) -> int:
    """
    Least common multiple of the orders of all points of E(Z/p^iZ)
    """
    group: LocalGroup = enumerate_points(curve, p, i, cap)
    points: typing.List[ProjPoint] = group.enumerate(cap)
    return sylow_exponent(group, len(points), lambda: points)

@dataclasses.dataclass(slots=True, frozen=True)
class CompositePoint:
    """
    A point of E(Z/nZ) as its prime power components
    """

    modulus: int
    components: typing.Tuple[ProjPoint, ...]

    def is_identity(self) -> bool:
        return all(P.is_identity() for P in self.components)

    def __str__(self) -> str:
        return " x ".join(str(P) for P in self.components)

class ModNGroup:
    """
    E(Z/nZ) as the product of the groups E(Z/p^eZ) over the prime powers exactly dividing n
    """

    __slots__ = ["curve", "n", "factorization", "components"]

    def __init__(self, curve: CurveModel, n: int, traces: typing.Mapping[int, int] | None = None) -> None:
        if n < 2:
            raise DomainError(f"modulus {n} must be at least 2")
        self.curve: CurveModel = curve
        self.n: int = n
        self.factorization: Factorization = factorize(n)
        for p in self.factorization.primes:
            if not has_good_reduction(curve, p):
                raise NotApplicableError(p, f"E(Z/{n}Z) of {curve}")
        self.components: typing.List[LocalGroup] = [
            LocalGroup(curve, p, e, None if traces is None else traces.get(p)) for p, e in self.factorization.factors
        ]

    @property
    def order(self) -> int:
        return math.prod(group.order for group in self.components)

    def identity(self) -> CompositePoint:
        return CompositePoint(self.n, tuple(group.identity() for group in self.components))

    def point(self, coords: typing.Sequence[int]) -> CompositePoint:
        """
        Reduces an affine (x, y) or projective (X, Y, Z) integer point modulo each prime power
        """
        if len(coords) not in (2, 3):
            raise CorruptPointError(self.n, tuple(coords), "expected 2 or 3 coordinates")
        X, Y = coords[0], coords[1]
        Z: int = coords[2] if len(coords) == 3 else 1
        return CompositePoint(self.n, tuple(group.point(X, Y, Z) for group in self.components))

    def from_components(self, components: typing.Sequence[ProjPoint]) -> CompositePoint:
        if len(components) != len(self.components):
            raise CorruptPointError(self.n, (), f"expected {len(self.components)} components")
        for group, P in zip(self.components, components):
            if not group.contains(P):
                raise CorruptPointError(P.modulus, P.as_tuple(), f"not a point of E(Z/{group.modulus}Z)")
        return CompositePoint(self.n, tuple(components))

    def to_triple(self, P: CompositePoint) -> Triple:
        """
        Single primitive triple mod n glued from the components
        """
        self._check(P)
        coords: typing.List[int] = []
        for k in range(3):
            value, _ = crt_combine([(Q.as_tuple()[k], Q.modulus) for Q in P.components])
            coords.append(value)
        return (coords[0], coords[1], coords[2])

    def _check(self, P: CompositePoint) -> None:
        if P.modulus != self.n or len(P.components) != len(self.components):
            raise CorruptPointError(P.modulus, (), f"expected a point mod {self.n}")

    def add(self, P: CompositePoint, Q: CompositePoint) -> CompositePoint:
        self._check(P)
        self._check(Q)
        return CompositePoint(self.n, tuple(g.add(a, b) for g, a, b in zip(self.components, P.components, Q.components)))

    def negate(self, P: CompositePoint) -> CompositePoint:
        self._check(P)
        return CompositePoint(self.n, tuple(g.negate(a) for g, a in zip(self.components, P.components)))

    def multiply(self, k: int, P: CompositePoint) -> CompositePoint:
        self._check(P)
        return CompositePoint(self.n, tuple(g.multiply(k, a) for g, a in zip(self.components, P.components)))

    def enumerate(self, cap: int = DEFAULT_ENUM_CAP) -> typing.Iterator[CompositePoint]:
        """
        Every point of E(Z/nZ), components varying fastest on the right
        """
        lists: typing.List[typing.List[ProjPoint]] = [group.enumerate(cap) for group in self.components]
        size: int = math.prod(len(pts) for pts in lists)
        if size > cap:
            raise ResourceLimitError(f"E(Z/{self.n}Z)", size, cap)
        for combo in itertools.product(*lists):
            yield CompositePoint(self.n, combo)

    def sample_point(self, seed: int | str) -> CompositePoint:
        return CompositePoint(self.n, tuple(group.sample_point(seed) for group in self.components))

def point_mod_n(curve: CurveModel, n: int, coords: typing.Sequence[int]) -> CompositePoint:
    return ModNGroup(curve, n).point(coords)

def add_mod_n(curve: CurveModel, n: int, P: CompositePoint, Q: CompositePoint) -> CompositePoint:
    return ModNGroup(curve, n).add(P, Q)

def scalar_mul_mod_n(curve: CurveModel, n: int, k: int, P: CompositePoint) -> CompositePoint:
    return ModNGroup(curve, n).multiply(k, P)
