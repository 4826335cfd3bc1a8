import unittest

import numpy as np
import sympy

from eulerkronecker import multgroup


class TestPrimality(unittest.TestCase):
    def test_small_numbers(self):
        for n in range(-3, 2000):
            self.assertEqual(multgroup.is_prime(n), sympy.isprime(n), msg=n)

    def test_strong_pseudoprimes(self):
        # strong pseudoprimes to several small bases
        for n in (2047, 3215031751, 3825123056546413051):
            self.assertFalse(multgroup.is_prime(n), msg=n)

    def test_large_primes(self):
        for n in (964477901, 2918643191, 2 ** 61 - 1, 18446744073709551557):
            self.assertEqual(multgroup.is_prime(n), sympy.isprime(n), msg=n)

    def test_check_odd_prime(self):
        self.assertEqual(multgroup.check_odd_prime(3), 3)
        for n in (1, 2, 9, 15, 100):
            with self.assertRaises(multgroup.NotPrimeError) as cm:
                multgroup.check_odd_prime(n)
            self.assertIn('not an odd prime', str(cm.exception))


class TestPrimitiveRoot(unittest.TestCase):
    def test_against_sympy(self):
        for q in sympy.primerange(3, 3000):
            self.assertEqual(multgroup.primitive_root(q), sympy.primitive_root(q), msg=q)

    def test_known(self):
        self.assertEqual(multgroup.primitive_root(3), 2)
        self.assertEqual(multgroup.primitive_root(7), 3)
        self.assertEqual(multgroup.primitive_root(41), 6)


class TestContext(unittest.TestCase):
    def test_q7(self):
        ctx = multgroup.build_context(7)
        self.assertEqual(ctx.g, 3)
        self.assertEqual(ctx.m, 3)
        np.testing.assert_array_equal(ctx.a_seq, [1, 3, 2, 6, 4, 5])
        np.testing.assert_allclose(ctx.x_seq, np.array([1, 3, 2, 6, 4, 5]) / 7.)

    def test_permutation_and_halves(self):
        for q in (3, 5, 101, 1009):
            ctx = multgroup.build_context(q)
            self.assertEqual(sorted(ctx.a_seq.tolist()), list(range(1, q)))
            # g^m = -1, so the second half mirrors the first
            np.testing.assert_array_equal(ctx.a_seq[ctx.m:], q - ctx.a_seq[:ctx.m])

    def test_read_only(self):
        ctx = multgroup.build_context(11)
        with self.assertRaises(ValueError):
            ctx.a_seq[0] = 5

    def test_not_prime(self):
        with self.assertRaises(multgroup.NotPrimeError):
            multgroup.build_context(9)


if __name__ == '__main__':
    unittest.main()
