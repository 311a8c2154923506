import os
import typing
import unittest

from hypothesis import given, settings
from hypothesis.strategies import integers

import ellcarm
from ellcarm.korselt import count_p_torsion, EVEN_N_NOTE, ExponentMethod

SLOW: bool = os.environ.get("ELLCARM_SLOW", "") == "1"

E1: ellcarm.CurveModel = ellcarm.CurveModel(0, 0, 0, 1, 3)
E2: ellcarm.CurveModel = ellcarm.CurveModel(0, 0, 0, 7, 3)
E3: ellcarm.CurveModel = ellcarm.CurveModel(1, 2, 3, 4, 0)
C2: ellcarm.CurveModel = ellcarm.CurveModel(1, 0, 0, 0, 1)
# y^2 = x^3 + x, complex multiplication by Z[i]
CM: ellcarm.CurveModel = ellcarm.CurveModel(0, 0, 0, 1, 0)

E1_HITS: typing.Tuple[int, ...] = (15, 77, 203, 245, 725, 875)
E3_HITS: typing.Tuple[int, ...] = (65, 143, 533, 1991, 4179, 4921)

# (curve, p) with a_p = 1 mod p
ANOMALOUS: typing.Tuple[typing.Tuple[ellcarm.CurveModel, int], ...] = (
    (ellcarm.CurveModel(0, 0, 0, 3, 2), 5),
    (ellcarm.CurveModel(0, 0, 0, 3, 3), 5),
    (ellcarm.CurveModel(0, 0, 0, 3, 5), 5),
    (ellcarm.CurveModel(0, 0, 0, 0, 5), 7),
    (ellcarm.CurveModel(0, 0, 0, 3, 5), 7),
    (ellcarm.CurveModel(0, 0, 0, 5, 5), 7),
    (ellcarm.CurveModel(0, 0, 0, 6, 5), 7),
    (E1, 17),
)

def applicable(curve: ellcarm.CurveModel, n: int) -> bool:
    fact: ellcarm.Factorization = ellcarm.factorize(n)
    return fact.num_primes >= 2 and all(ellcarm.has_good_reduction(curve, p) for p in fact.primes)

class CertificateTest(unittest.TestCase):
    def test_875(self) -> None:
        cert: ellcarm.KorseltCertificate = ellcarm.build_certificate(E1, 875)
        self.assertEqual((cert.an, cert.N), (-24, 900))
        five: ellcarm.PrimeRecord = cert.record(5)
        self.assertEqual((five.e, five.ap, five.order, five.divides, five.val_ok, five.anomalous), (3, 2, 4, True, True, False))
        seven: ellcarm.PrimeRecord = cert.record(7)
        self.assertEqual((seven.e, seven.ap, seven.order, seven.divides, seven.val_ok), (1, 2, 6, True, True))
        self.assertIsNone(cert.type1)

    def test_bad_reduction(self) -> None:
        cert: ellcarm.KorseltCertificate = ellcarm.build_certificate(E1, 3 * 13)
        self.assertFalse(cert.good_reduction)
        self.assertIsNone(cert.an)
        self.assertIsNone(cert.record(13).ap)
        self.assertEqual(cert.record(3).ap, 0)
        self.assertEqual(cert.notes, ["bad reduction at 13"])

    def test_json_roundtrip(self) -> None:
        cert: ellcarm.KorseltCertificate = ellcarm.is_korselt_type2(E1, 875)
        ellcarm.is_korselt_type1(E1, 875, certificate=cert)
        self.assertEqual(ellcarm.KorseltCertificate.from_dict(cert.as_dict()), cert)
        cert = ellcarm.build_certificate(E1, 15)
        ellcarm.classify_pq(E1, 15, cert)
        self.assertEqual(ellcarm.KorseltCertificate.from_dict(cert.as_dict()), cert)
        data: dict = ellcarm.is_korselt_type1(E1, 13 * 3).as_dict()
        self.assertIsNone(data["type1"])
        self.assertNotIn("type2", data)

class TypeOneTest(unittest.TestCase):
    def test_tables(self) -> None:
        cache: ellcarm.AnCache = ellcarm.AnCache(E1)
        for n in E1_HITS:
            self.assertEqual(ellcarm.is_korselt_type1(E1, n, cache).type1, ellcarm.Verdict.TRUE, f"n = {n} on E1")
        cache = ellcarm.AnCache(E3)
        for n in E3_HITS:
            self.assertEqual(ellcarm.is_korselt_type1(E3, n, cache).type1, ellcarm.Verdict.TRUE, f"n = {n} on E3")

    def test_valuation_condition(self) -> None:
        # 68783 = 11 * 13^2 * 37 with a_13 = 1: every order divides N but ord_13(a_n - 1) = 1 < 2
        cert: ellcarm.KorseltCertificate = ellcarm.is_korselt_type1(E2, 68783)
        self.assertEqual((cert.an, cert.N), (144, 68640))
        self.assertEqual(cert.type1, ellcarm.Verdict.FALSE)
        self.assertTrue(all(rec.divides for rec in cert.primes))
        thirteen: ellcarm.PrimeRecord = cert.record(13)
        self.assertEqual((thirteen.e, thirteen.ap, thirteen.anomalous), (2, 1, True))
        self.assertIs(thirteen.val_ok, False)
        self.assertIs(cert.record(11).val_ok, True)
        self.assertEqual(ellcarm.is_carmichael_oracle(E2, 68783), ellcarm.Verdict.FALSE)
        self.assertEqual(ellcarm.is_korselt_type2(E2, 68783).type2, ellcarm.Verdict.FALSE)

    def test_false_and_not_applicable(self) -> None:
        self.assertEqual(ellcarm.is_korselt_type1(E1, 21).type1, ellcarm.Verdict.FALSE)
        # 5 divides the discriminant of E2
        self.assertEqual(ellcarm.is_korselt_type1(E2, 15).type1, ellcarm.Verdict.NOT_APPLICABLE)
        self.assertEqual(ellcarm.is_korselt_type1(E1, 7).type1, ellcarm.Verdict.NOT_APPLICABLE)
        self.assertEqual(ellcarm.is_korselt_type1(E1, 125).type1, ellcarm.Verdict.NOT_APPLICABLE)
        cert: ellcarm.KorseltCertificate = ellcarm.is_korselt_type1(C2, 2 * 3 * 5)
        self.assertEqual(cert.type1, ellcarm.Verdict.NOT_APPLICABLE)
        self.assertIn(EVEN_N_NOTE, cert.notes)

class ExponentTest(unittest.TestCase):
    def test_values(self) -> None:
        self.assertEqual(ellcarm.group_exponent(E1, 875, 5), (100, ExponentMethod.FORMULA))
        self.assertEqual(ellcarm.group_exponent(E1, 15, 3), (4, ExponentMethod.FORMULA))
        self.assertEqual(ellcarm.group_exponent(C2, 8 * 3, 2), (ellcarm.group_exponent_bruteforce(C2, 2, 3), ExponentMethod.BRUTEFORCE))
        with self.assertRaises(ellcarm.DomainError):
            ellcarm.group_exponent(E1, 15, 7)
        with self.assertRaises(ellcarm.NotApplicableError):
            ellcarm.group_exponent(E1, 39, 13)

    @unittest.skipUnless(SLOW, "set ELLCARM_SLOW=1")
    def test_prime_powers_to_ten_thousand(self) -> None:
        for curve in (E1, E2, E3):
            cache: ellcarm.AnCache = ellcarm.AnCache(curve)
            for p in ellcarm.primes_in_range(2, 10 ** 4):
                if not ellcarm.has_good_reduction(curve, p):
                    continue
                i: int = 1
                while p ** i <= 10 ** 4:
                    group: ellcarm.LocalGroup = ellcarm.enumerate_points(curve, p, i)
                    self.assertEqual(len(group.points), p ** (i - 1) * (p + 1 - cache.get(p)), f"#E(Z/{p}^{i}Z) for {curve}")
                    self.assertEqual(
                        ellcarm.group_exponent(curve, p ** i, p, cache)[0],
                        ellcarm.group_exponent_bruteforce(curve, p, i),
                        f"exponent mod {p}^{i} for {curve}",
                    )
                    i += 1

    def test_mod_p_matches_bruteforce(self) -> None:
        for curve in (E1, E3, CM):
            for p in ellcarm.primes_in_range(3, 80):
                if ellcarm.has_good_reduction(curve, p):
                    self.assertEqual(
                        ellcarm.exponent_mod_p(curve, p),
                        ellcarm.group_exponent_bruteforce(curve, p, 1),
                        f"exponent of E(F_{p}) for {curve}",
                    )

    def test_cache(self) -> None:
        cache: ellcarm.AnCache = ellcarm.AnCache(E1)
        self.assertEqual(ellcarm.exponent_mod_p(E1, 5, cache=cache), 4)
        self.assertEqual(cache.get_exponent(5, lambda: 0), 4)

    def test_non_anomalous_prime_powers(self) -> None:
        for curve, p, i in ((E1, 3, 3), (E1, 5, 3), (E1, 7, 2), (E3, 11, 2), (E3, 3, 3), (CM, 5, 2)):
            self.assertEqual(
                ellcarm.group_exponent(curve, p ** i, p)[0],
                ellcarm.group_exponent_bruteforce(curve, p, i),
                f"exponent mod {p}^{i} for {curve}",
            )

    def test_anomalous_prime_powers(self) -> None:
        for curve, p in ANOMALOUS:
            self.assertEqual((ellcarm.a_p(curve, p) - 1) % p, 0)
            for i in ((2, 3) if p == 5 else (2,)):
                canonical: bool = ellcarm.is_canonical_at(curve, p, i)
                self.assertEqual(canonical, ellcarm.is_canonical_at(curve, p, i, method="count"), f"{curve} mod {p}^{i}")
                self.assertIn(count_p_torsion(curve, p, i), (p, p * p))
                self.assertEqual(
                    ellcarm.group_exponent(curve, p ** i, p)[0],
                    ellcarm.group_exponent_bruteforce(curve, p, i),
                    f"exponent mod {p}^{i} for {curve}",
                )

    def test_canonical_errors(self) -> None:
        with self.assertRaises(ellcarm.DomainError):
            ellcarm.is_canonical_at(E1, 17, 1)
        with self.assertRaises(ellcarm.DomainError):
            ellcarm.is_canonical_at(E1, 5, 2)
        with self.assertRaises(ellcarm.DomainError):
            ellcarm.is_canonical_at(C2, 2, 2)
        with self.assertRaises(ellcarm.DomainError):
            ellcarm.is_canonical_at(E1, 13, 2)

class CarmichaelTest(unittest.TestCase):
    def test_oracle(self) -> None:
        self.assertEqual(ellcarm.is_carmichael_oracle(E1, 15), ellcarm.Verdict.TRUE)
        self.assertEqual(ellcarm.is_carmichael_oracle(E1, 15, exhaustive=True), ellcarm.Verdict.TRUE)
        self.assertEqual(ellcarm.is_carmichael_oracle(E1, 21), ellcarm.Verdict.FALSE)
        self.assertEqual(ellcarm.is_carmichael_oracle(E3, 4921), ellcarm.Verdict.TRUE)
        self.assertEqual(ellcarm.is_carmichael_oracle(E1, 29), ellcarm.Verdict.NOT_APPLICABLE)
        with self.assertRaises(ellcarm.ResourceLimitError):
            ellcarm.is_carmichael_oracle(E1, 875, cap=50)

    def test_type_two(self) -> None:
        self.assertEqual(ellcarm.is_korselt_type2(E1, 15).type2, ellcarm.Verdict.TRUE)
        self.assertEqual(ellcarm.is_korselt_type2(E1, 21).type2, ellcarm.Verdict.FALSE)
        cache: ellcarm.AnCache = ellcarm.AnCache(E1)
        for n in E1_HITS:
            self.assertEqual(ellcarm.is_korselt_type2(E1, n, cache).type2, ellcarm.Verdict.TRUE, f"n = {n} on E1")
        cache = ellcarm.AnCache(E3)
        for n in E3_HITS:
            self.assertEqual(ellcarm.is_korselt_type2(E3, n, cache).type2, ellcarm.Verdict.TRUE, f"n = {n} on E3")

    def check_implications(self, curve: ellcarm.CurveModel, limit: int) -> None:
        cache: ellcarm.AnCache = ellcarm.AnCache(curve)
        for n in range(3, limit + 1, 2):
            if not applicable(curve, n):
                continue
            cert: ellcarm.KorseltCertificate = ellcarm.is_korselt_type1(curve, n, cache)
            ellcarm.is_korselt_type2(curve, n, cache, certificate=cert)
            oracle: ellcarm.Verdict = ellcarm.is_carmichael_oracle(curve, n, cache, certificate=cert)
            if cert.type1 == ellcarm.Verdict.TRUE:
                self.assertEqual(oracle, ellcarm.Verdict.TRUE, f"Type I without Carmichael at n = {n} on {curve}")
            self.assertEqual(oracle, cert.type2, f"oracle and Type II disagree at n = {n} on {curve}")

    def test_implications(self) -> None:
        self.check_implications(E1, 400)
        self.check_implications(E3, 400)

    @unittest.skipUnless(SLOW, "set ELLCARM_SLOW=1")
    def test_implications_slow(self) -> None:
        self.check_implications(E1, 3000)
        self.check_implications(E3, 3000)

    def test_even_n(self) -> None:
        n: int = 2 * 3 * 5
        self.assertTrue(applicable(C2, n))
        cert: ellcarm.KorseltCertificate = ellcarm.is_korselt_type2(C2, n)
        self.assertEqual(cert.type2, ellcarm.is_carmichael_oracle(C2, n, certificate=cert))

class PseudoprimeTest(unittest.TestCase):
    def test_points(self) -> None:
        self.assertEqual(ellcarm.is_elliptic_pseudoprime(E1, 15, (6, 15)), ellcarm.Verdict.TRUE)
        self.assertEqual(ellcarm.is_elliptic_pseudoprime(E1, 15, (-1, 1, 1)), ellcarm.Verdict.TRUE)
        self.assertEqual(ellcarm.is_elliptic_pseudoprime(E1, 21, (-1, 1)), ellcarm.Verdict.FALSE)
        self.assertEqual(ellcarm.is_elliptic_pseudoprime(E1, 29, (-1, 1)), ellcarm.Verdict.NOT_APPLICABLE)
        P: ellcarm.CompositePoint = ellcarm.ModNGroup(E1, 15).sample_point(3)
        self.assertEqual(ellcarm.is_elliptic_pseudoprime(E1, 15, P), ellcarm.Verdict.TRUE)
        with self.assertRaises(ellcarm.CorruptPointError):
            ellcarm.is_elliptic_pseudoprime(E1, 21, P)

    @settings(max_examples=30, deadline=None)
    @given(integers(0, 10 ** 6))
    def test_carmichael_implies_pseudoprime(self, seed: int) -> None:
        P: ellcarm.CompositePoint = ellcarm.ModNGroup(E3, 65).sample_point(seed)
        self.assertEqual(ellcarm.is_elliptic_pseudoprime(E3, 65, P), ellcarm.Verdict.TRUE)

    def test_gordan(self) -> None:
        self.assertEqual(ellcarm.gordan_pseudoprime(CM, 1, 15, (0, 0)), ellcarm.Verdict.TRUE)
        self.assertEqual(ellcarm.gordan_pseudoprime(CM, 1, 21, (0, 0)), ellcarm.Verdict.FALSE)
        self.assertEqual(ellcarm.gordan_pseudoprime(CM, 1, 7, (0, 0)), ellcarm.Verdict.NOT_APPLICABLE)
        with self.assertRaises(ellcarm.DomainError):
            ellcarm.gordan_pseudoprime(CM, 1, 16, (0, 0))
        with self.assertRaises(ellcarm.DomainError):
            ellcarm.gordan_pseudoprime(CM, 0, 15, (0, 0))

    def test_torsion_congruence(self) -> None:
        self.assertTrue(ellcarm.torsion_congruence(15, 0, 4))
        self.assertFalse(ellcarm.torsion_congruence(21, 0, 4))
        with self.assertRaises(ellcarm.DomainError):
            ellcarm.torsion_congruence(15, 0, 0)

class PqTest(unittest.TestCase):
    def test_classes(self) -> None:
        result: ellcarm.PqClass = ellcarm.classify_pq(E1, 15)
        self.assertEqual((result.p, result.q, result.ap, result.aq), (3, 5, 0, 2))
        self.assertEqual(result.tags, [ellcarm.PqTag.SMALL_P, ellcarm.PqTag.LARGE_P])
        self.assertEqual(ellcarm.classify_pq(E3, 1991).tags, [ellcarm.PqTag.SMALL_P])

    def test_every_pq_hit_is_tagged(self) -> None:
        for curve, hits in ((E1, E1_HITS), (E3, E3_HITS)):
            for n in hits:
                fact: ellcarm.Factorization = ellcarm.factorize(n)
                if fact.num_primes == 2 and fact.is_squarefree():
                    self.assertTrue(ellcarm.classify_pq(curve, n).tags)

    def test_errors(self) -> None:
        with self.assertRaises(ellcarm.DomainError):
            ellcarm.classify_pq(E1, 875)
        with self.assertRaises(ellcarm.DomainError):
            ellcarm.classify_pq(E1, 21)

class CensusTest(unittest.TestCase):
    def test_fifteen(self) -> None:
        result: ellcarm.CensusResult = ellcarm.census_carmichael_curves(15, list_limit=4)
        self.assertEqual(result.unit_total, (3 ** 5 - 3 ** 4) * (5 ** 5 - 5 ** 4))
        self.assertEqual(sum(c.count for c in result.classes[3]), 3 ** 5 - 3 ** 4)
        self.assertEqual(sum(c.count for c in result.classes[5]), 5 ** 5 - 5 ** 4)
        self.assertGreaterEqual(result.count, 9 * 25)
        self.assertLess(result.count, result.unit_total)
        self.assertEqual(result.count % (9 * 25), 0)
        self.assertEqual(len(result.witnesses), 4)
        for witness in result.witnesses:
            curve: ellcarm.CurveModel = ellcarm.CurveModel(*witness)
            self.assertEqual(ellcarm.is_carmichael_oracle(curve, 15), ellcarm.Verdict.TRUE, f"witness {curve}")
        self.assertEqual(result.as_dict()["count"], result.count)

    def test_errors(self) -> None:
        with self.assertRaises(ellcarm.DomainError):
            ellcarm.census_carmichael_curves(9)
        with self.assertRaises(ellcarm.DomainError):
            ellcarm.census_carmichael_curves(30)
        with self.assertRaises(ellcarm.DomainError):
            ellcarm.census_carmichael_curves(7)
        with self.assertRaises(ellcarm.ResourceLimitError):
            ellcarm.census_carmichael_curves(51)

if __name__ == "__main__":
    unittest.main()
