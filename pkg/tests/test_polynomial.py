from unittest import TestCase

import numpy as np
import pytest

import scalelab
from scalelab.polynomial import Polynomial


class TestPolynomial(TestCase):
    def setUp(self):
        # 1 + 2 z0 z1 - i z1**2
        self.poly = Polynomial(
            2, (((0, 0), 1.0), ((1, 1), 2.0), ((0, 2), -1j))
        )

    def test_terms_are_canonical(self):
        """Repeated monomials merge and zero coefficients disappear."""
        poly = Polynomial(2, (((1, 0), 1.0), ((1, 0), -1.0), ((0, 1), 2.0)))
        assert poly.terms == (((0, 1), 2 + 0j),)
        assert poly == Polynomial(2, (((0, 1), 2.0),))

    def test_invalid_multi_index(self):
        with pytest.raises(scalelab.DomainError):
            Polynomial(2, (((1, 0, 0), 1.0),))
        with pytest.raises(scalelab.DomainError):
            Polynomial(2, (((-1, 0), 1.0),))

    def test_degree(self):
        assert self.poly.degree == 2
        assert Polynomial(3).degree == 0
        assert Polynomial(3).is_zero()

    def test_evaluate(self):
        points = np.array([[1.0, 2.0], [0.5, -1.0]])
        expected = 1 + 2 * points[:, 0] * points[:, 1] - 1j * points[:, 1] ** 2
        np.testing.assert_allclose(self.poly.evaluate(points), expected)

    def test_arithmetic(self):
        points = np.array([[0.3, -0.4], [1.2, 0.7]])
        other = Polynomial.linear([1.0, 3.0])
        values = self.poly.evaluate(points)
        other_values = other.evaluate(points)
        np.testing.assert_allclose((self.poly + other).evaluate(points), values + other_values)
        np.testing.assert_allclose((self.poly * other).evaluate(points), values * other_values)
        np.testing.assert_allclose((self.poly - other).evaluate(points), values - other_values)
        np.testing.assert_allclose((other**3).evaluate(points), other_values**3)

    def test_derivative(self):
        # d/dz1 = 2 z0 - 2i z1
        expected = Polynomial(2, (((1, 0), 2.0), ((0, 1), -2j)))
        assert self.poly.derivative(1) == expected
        with pytest.raises(scalelab.DomainError):
            self.poly.derivative(2)

    def test_rescale_and_substitute(self):
        points = np.array([[0.3, -0.4], [1.2, 0.7]])
        np.testing.assert_allclose(
            self.poly.rescale(2.0).evaluate(points), self.poly.evaluate(2.0 * points)
        )
        matrix = np.array([[1.0, 0.5], [-0.25, 2.0]])
        np.testing.assert_allclose(
            self.poly.substitute(matrix).evaluate(points),
            self.poly.evaluate(points @ matrix.T),
        )

    def test_conjugate_and_reality(self):
        assert not self.poly.is_real()
        assert (self.poly + self.poly.conjugate()).is_real()

    def test_record_round_trip(self):
        record = self.poly.to_record()
        assert Polynomial.from_record(2, record) == self.poly
        assert Polynomial.from_record(
            2, [{"exponents": [1, 0], "coefficient": 3.0}]
        ) == Polynomial.linear([3.0, 0.0])

    def test_isclose(self):
        nearby = self.poly + Polynomial.constant(2, 1e-15)
        assert self.poly.isclose(nearby)
        assert not self.poly.isclose(self.poly * 1.01)
