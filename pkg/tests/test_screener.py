import itertools
import json
import os
import tempfile
import unittest
from fractions import Fraction

from dirac_series import norms, screener
from dirac_series.norms import KTypeWeight
from dirac_series.screener import InfChar, InvolutionError, InvolutionMatrix, ScreenStatus

SLOW = os.environ.get('DIRAC_SCREEN_SLOW') == '1'

SINGULAR = InfChar((1, 0, 0, 1, 0, 1, 0))
MINIMAL = InfChar((1, 1, 1, 0, 1, 1, 1))
RHO = InfChar((1,) * 7)
IDENTITY = tuple(tuple(Fraction(int(i == j)) for j in range(8)) for i in range(8))
MINUS_IDENTITY = tuple(tuple(-v for v in row) for row in IDENTITY)


def brute_force_phi(max_coord):
    found = []
    for labels in itertools.product(range(max_coord + 1), repeat=7):
        if max(labels) != max_coord or min(labels) != 0:
            continue
        if all(labels[i] + labels[j] > 0 for i, j in screener.POSITIVE_PAIRS):
            found.append(labels)
    return sorted(found)


class TestInfChar(unittest.TestCase):
    def test_parse(self):
        inf_char = InfChar.parse('[1, 1/2, 0, 0, 0, 0, 3]')
        self.assertEqual(inf_char.zeta_coords[1], Fraction(1, 2))
        self.assertFalse(inf_char.integral)
        self.assertTrue(SINGULAR.integral)
        with self.assertRaises(ValueError):
            InfChar.parse('1,2')
        with self.assertRaises(ValueError):
            InfChar.parse('1,a,0,0,0,0,0')

    def test_norms(self):
        self.assertEqual(SINGULAR.norm_sq(), 42)
        self.assertEqual(RHO.norm_sq(), Fraction(399, 2))
        self.assertEqual(InfChar((0,) * 7).norm_sq(), 0)


class TestDiracInequality(unittest.TestCase):
    def test_equality(self):
        verdict = screener.dirac_inequality_check(KTypeWeight((0, 1, 0, 1, 0, 0, 8)), SINGULAR)
        self.assertEqual(verdict.status, ScreenStatus.PASSES_EQUALITY)
        self.assertEqual(verdict.inf_char_norm_sq, 42)

    def test_strict(self):
        verdict = screener.dirac_inequality_check(KTypeWeight((0, 0, 0, 0, 1, 2, 7)), SINGULAR)
        self.assertEqual(verdict.status, ScreenStatus.PASSES_STRICT)
        self.assertEqual(verdict.witness[2], 74)

    def test_trivial_at_rho(self):
        verdict = screener.dirac_inequality_check(KTypeWeight((0,) * 7), RHO)
        self.assertEqual(verdict.status, ScreenStatus.PASSES_EQUALITY)

    def test_failure(self):
        verdict = screener.dirac_inequality_check(KTypeWeight((0, 1, 0, 1, 0, 0, 8)), RHO)
        self.assertEqual(verdict.status, ScreenStatus.FAILS_DIRAC_INEQUALITY)
        self.assertEqual(verdict.to_json()['status'], 'FailsDiracInequality')

    def test_rejects_non_dominant(self):
        with self.assertRaises(ValueError):
            screener.dirac_inequality_check(KTypeWeight((0,) * 7), InfChar((1, -1, 0, 0, 0, 0, 0)))

    def test_screen_with_involutions(self):
        identity = [InvolutionMatrix(IDENTITY, 'identity')]
        minus = [InvolutionMatrix(MINUS_IDENTITY, 'split')]
        mu = KTypeWeight((0,) * 7)
        self.assertEqual(screener.screen(mu, MINIMAL, identity).status, ScreenStatus.PASSES_EQUALITY)
        self.assertEqual(screener.screen(mu, MINIMAL, minus).status, ScreenStatus.FAILS_HJ_BOUND)
        self.assertEqual(screener.screen(mu, MINIMAL).status, ScreenStatus.PASSES_EQUALITY)


class TestScreen(unittest.TestCase):
    def test_pencil_violation(self):
        mu = KTypeWeight((0,) * 7)
        for labels, norm_sq in [((1, 1, 1, 1, 1, 1, 0), 174), ((0, 1, 1, 1, 1, 1, 1), Fraction(335, 2)),
                                ((1, 1, 1, 1, 0, 1, 1), 132)]:
            inf_char = InfChar(labels)
            self.assertEqual(inf_char.norm_sq(), norm_sq)
            self.assertEqual(screener.dirac_inequality_check(mu, inf_char).status, ScreenStatus.PASSES_STRICT)
            verdict = screener.screen(mu, inf_char)
            self.assertEqual(verdict.status, ScreenStatus.FAILS_DIRAC_INEQUALITY, labels)
            self.assertEqual(verdict.witness, (KTypeWeight((0, 0, 0, 3, 0, 0, 0)), 3, Fraction(231, 2)))
            self.assertEqual(verdict.to_json()['witness']['n'], 3)

    def test_equality_along_pencil(self):
        verdict = screener.screen(KTypeWeight((0,) * 7), MINIMAL)
        self.assertEqual(verdict.status, ScreenStatus.PASSES_EQUALITY)
        self.assertEqual(verdict.witness[1], 3)
        self.assertEqual(screener.screen(KTypeWeight((0, 1, 0, 1, 0, 0, 8)), SINGULAR).status,
                         ScreenStatus.PASSES_EQUALITY)

    def test_strict_along_pencil(self):
        verdict = screener.screen(KTypeWeight((0,) * 7), SINGULAR)
        self.assertEqual(verdict.status, ScreenStatus.PASSES_STRICT)
        self.assertGreater(verdict.witness[2], SINGULAR.norm_sq())

    def test_inconclusive(self):
        verdict = screener.screen(KTypeWeight((0,) * 7), MINIMAL, cap=0)
        self.assertEqual(verdict.status, ScreenStatus.INCONCLUSIVE)
        self.assertEqual(verdict.witness, (KTypeWeight((0,) * 7), 0, Fraction(399, 2)))
        # a violation inside the scanned range is final even when the cap is hit
        self.assertEqual(screener.screen(KTypeWeight((0,) * 7), RHO, cap=1).status,
                         ScreenStatus.FAILS_DIRAC_INEQUALITY)


class TestPencil(unittest.TestCase):
    def test_minimal_representation(self):
        result = screener.pencil_min_spin(KTypeWeight((0,) * 7), MINIMAL, cap=10, early_stop=False)
        self.assertEqual(result.equality_ns, (3, 4, 5, 6))
        self.assertEqual(result.min_spin_norm_sq, MINIMAL.norm_sq())
        self.assertEqual(result.n_star, 3)
        self.assertEqual(result.profile[:3], (Fraction(399, 2), Fraction(335, 2), Fraction(279, 2)))
        self.assertTrue(all(v > MINIMAL.norm_sq() for n, v in enumerate(result.profile) if n not in (3, 4, 5, 6)))
        self.assertEqual(len(result.profile), 11)
        self.assertFalse(result.conclusive)

    def test_early_stop_is_prefix(self):
        mu = KTypeWeight((0,) * 7)
        full = screener.pencil_min_spin(mu, MINIMAL, cap=20, early_stop=False)
        short = screener.pencil_min_spin(mu, MINIMAL, cap=20)
        self.assertTrue(short.conclusive)
        self.assertEqual(full.profile[:len(short.profile)], short.profile)
        self.assertEqual(short.min_spin_norm_sq, full.min_spin_norm_sq)
        self.assertEqual(short.n_star, full.n_star)

    def test_cap(self):
        result = screener.pencil_min_spin(KTypeWeight((0,) * 7), MINIMAL, cap=0)
        self.assertEqual(result.profile, (Fraction(399, 2),))
        self.assertFalse(result.conclusive)
        with self.assertRaises(ValueError):
            screener.pencil_min_spin(KTypeWeight((0,) * 7), MINIMAL, cap=-1)


class TestNuBound(unittest.TestCase):
    def test_nu_norms(self):
        self.assertEqual(screener.nu_norm_sq(MINIMAL.zeta_coords), Fraction(231, 2))
        self.assertEqual(screener.nu_norm_sq((1, 1, 1, 0, 1, 0, 1)), Fraction(159, 2))
        self.assertEqual(screener.nu_norm_sq((0,) * 7), 0)
        self.assertEqual(screener.nu_norm_sq((1,) * 7), Fraction(399, 2))
        nu = [Fraction(v) for v in ("-3/2", "1", "5/2", "-3/2", "5/2", "-3/2", "5/2")]
        self.assertEqual(screener.nu_norm_sq(nu), 55)

    def test_hj_filter(self):
        self.assertTrue(screener.hj_filter(RHO))
        self.assertTrue(screener.hj_filter(RHO, [InvolutionMatrix(IDENTITY)]))
        self.assertFalse(screener.hj_filter(RHO, [InvolutionMatrix(MINUS_IDENTITY)]))
        self.assertTrue(screener.hj_filter(SINGULAR, [InvolutionMatrix(MINUS_IDENTITY)]))

    def test_validation(self):
        InvolutionMatrix(MINUS_IDENTITY).validate()
        doubled = tuple(tuple(2 * v for v in row) for row in IDENTITY)
        with self.assertRaises(InvolutionError) as context:
            InvolutionMatrix(doubled).validate(4)
        self.assertEqual(context.exception.index, 4)
        with self.assertRaises(InvolutionError):
            InvolutionMatrix(IDENTITY[:7]).validate()
        swap = list(IDENTITY)
        swap[0], swap[6] = swap[6], swap[0]
        with self.assertRaises(InvolutionError):
            InvolutionMatrix(tuple(swap)).validate()

    def test_load_involutions(self):
        data = [{'matrix': [[str(v) for v in row] for row in IDENTITY], 'tag': 'compact'},
                {'matrix': [[str(v) for v in row] for row in MINUS_IDENTITY], 'tag': 'split'}]
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'involutions.json')
            with open(path, 'w') as f:
                json.dump(data, f)
            involutions = screener.load_involutions(path)
            self.assertEqual([theta.source_tag for theta in involutions], ['compact', 'split'])

            data[1]['matrix'] = data[1]['matrix'][:3]
            with open(path, 'w') as f:
                json.dump(data, f)
            with self.assertRaises(InvolutionError) as context:
                screener.load_involutions(path)
            self.assertEqual(context.exception.index, 1)


class TestInfCharEnumeration(unittest.TestCase):
    def test_phi1(self):
        found = [tuple(int(c) for c in inf_char.zeta_coords) for inf_char in screener.enumerate_inf_chars(1)]
        self.assertEqual(found, brute_force_phi(1))
        self.assertEqual(len(found), 35)
        self.assertNotIn((1,) * 7, found)

    def test_phi2(self):
        found = [tuple(int(c) for c in inf_char.zeta_coords) for inf_char in screener.enumerate_inf_chars(2)]
        self.assertEqual(found, brute_force_phi(2))

    def test_counts(self):
        counts = screener.phi_counts(2, progress=False)
        self.assertEqual(counts, {1: 35, 2: len(brute_force_phi(2))})

    def test_involutions_cut(self):
        compact = [InvolutionMatrix(IDENTITY)]
        split = [InvolutionMatrix(MINUS_IDENTITY)]
        self.assertEqual(len(screener.enumerate_inf_chars(1, compact)), 35)
        remaining = screener.enumerate_inf_chars(1, split)
        self.assertTrue(all(inf_char.norm_sq() < screener.NU_BOUND for inf_char in remaining))
        self.assertLess(len(remaining), 35)
        self.assertIn(SINGULAR, remaining)

    def test_bad_max_coord(self):
        with self.assertRaises(ValueError):
            screener.enumerate_inf_chars(0)

    def test_lemma_vanishing(self):
        self.assertFalse(screener.lemma_vanishing_check(RHO))
        self.assertFalse(screener.lemma_vanishing_check(SINGULAR))
        self.assertTrue(screener.lemma_vanishing_check(InfChar((0,) * 7)))
        self.assertTrue(screener.lemma_vanishing_check(InfChar((0, 1, 0, 1, 1, 1, 1))))


class TestCerts(unittest.TestCase):
    def test_small_sample(self):
        sample = [KTypeWeight((0,) * 7), KTypeWeight((0, 1, 0, 1, 0, 0, 8))]
        members = screener.certs_census(sample, progress=False)
        expected = [mu for mu in sample
                    if norms.spin_norm_sq(mu)[0] - norms.lambda_norm_sq(mu) >= screener.LAMBDA_GAP]
        self.assertEqual([m.ktype for m in members], expected)
        self.assertNotIn(KTypeWeight((0, 1, 0, 1, 0, 0, 8)), expected)
        self.assertIn(KTypeWeight((0,) * 7), expected)
        self.assertTrue(all(m.gap >= screener.LAMBDA_GAP for m in members))

    @unittest.skipUnless(SLOW, "set DIRAC_SCREEN_SLOW=1 for the Certs census")
    def test_census(self):
        members = screener.certs_census(threads=int(os.environ.get('DIRAC_SCREEN_THREADS', '1')), progress=False)
        self.assertEqual(len(members), 61)
        self.assertEqual(max(m.lambda_norm_sq for m in members), Fraction(49, 2))


if __name__ == '__main__':
    unittest.main()
