"""Multivariate polynomials with complex coefficients.

Polynomials are the prefactors of Gaussian packets. They are immutable,
hashable and closed under the operations packets need: sums, products,
partial derivatives, complex conjugation and linear changes of variables.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import exceptions


@dataclass(frozen=True)
class Polynomial:
    """A polynomial in ``dim`` variables.

    :param int dim: Number of variables.
    :param tuple terms: ``(exponents, coefficient)`` pairs. Repeated
        exponents are merged, exact zeros dropped and the terms sorted, so
        equal polynomials compare equal.
    """

    dim: int
    terms: tuple = ()

    def __post_init__(self):
        merged = {}
        for exponents, coefficient in self.terms:
            exponents = tuple(int(power) for power in exponents)
            if len(exponents) != self.dim:
                raise exceptions.DomainError(
                    f"Multi-index {exponents!r} does not have {self.dim} entries"
                )
            if any(power < 0 for power in exponents):
                raise exceptions.DomainError(
                    f"Negative exponent in multi-index {exponents!r}"
                )
            merged[exponents] = merged.get(exponents, 0j) + complex(coefficient)
        terms = tuple(
            sorted(
                (exponents, coefficient)
                for exponents, coefficient in merged.items()
                if coefficient != 0
            )
        )
        object.__setattr__(self, "terms", terms)

    @classmethod
    def constant(cls, dim, value=1.0):
        return cls(dim, (((0,) * dim, value),))

    @classmethod
    def linear(cls, coefficients):
        """Return sum_j c_j z_j."""
        dim = len(coefficients)
        terms = []
        for axis, coefficient in enumerate(coefficients):
            exponents = [0] * dim
            exponents[axis] = 1
            terms.append((tuple(exponents), coefficient))
        return cls(dim, tuple(terms))

    @property
    def degree(self):
        """Total degree; the zero polynomial has degree 0."""
        return max((sum(exponents) for exponents, _ in self.terms), default=0)

    def is_zero(self):
        return not self.terms

    def coefficient(self, exponents):
        for term_exponents, coefficient in self.terms:
            if term_exponents == tuple(exponents):
                return coefficient
        return 0j

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.dim, other)
        self._check_compatible(other)
        return Polynomial(self.dim, self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            other = complex(other)
            return Polynomial(
                self.dim,
                tuple(
                    (exponents, coefficient * other)
                    for exponents, coefficient in self.terms
                ),
            )
        self._check_compatible(other)
        terms = []
        for left, left_coefficient in self.terms:
            for right, right_coefficient in other.terms:
                terms.append(
                    (
                        tuple(a + b for a, b in zip(left, right)),
                        left_coefficient * right_coefficient,
                    )
                )
        return Polynomial(self.dim, tuple(terms))

    __rmul__ = __mul__

    def __pow__(self, exponent):
        result = Polynomial.constant(self.dim)
        for _ in range(int(exponent)):
            result = result * self
        return result

    def conjugate(self):
        return Polynomial(
            self.dim,
            tuple(
                (exponents, coefficient.conjugate())
                for exponents, coefficient in self.terms
            ),
        )

    def derivative(self, axis):
        """Partial derivative with respect to variable ``axis``."""
        if not 0 <= axis < self.dim:
            raise exceptions.DomainError(
                f"Axis {axis} out of range for {self.dim} variables"
            )
        terms = []
        for exponents, coefficient in self.terms:
            power = exponents[axis]
            if power == 0:
                continue
            lowered = list(exponents)
            lowered[axis] = power - 1
            terms.append((tuple(lowered), coefficient * power))
        return Polynomial(self.dim, tuple(terms))

    def rescale(self, factor):
        """Return z -> P(factor * z)."""
        return Polynomial(
            self.dim,
            tuple(
                (exponents, coefficient * factor ** sum(exponents))
                for exponents, coefficient in self.terms
            ),
        )

    def substitute(self, matrix):
        """Return z -> P(M z) for a square matrix ``M``."""
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (self.dim, self.dim):
            raise exceptions.DomainError(
                f"Substitution matrix must be {self.dim}x{self.dim}"
            )
        forms = [Polynomial.linear(row) for row in matrix]
        powers = {}
        result = Polynomial(self.dim)
        for exponents, coefficient in self.terms:
            term = Polynomial.constant(self.dim, coefficient)
            for axis, power in enumerate(exponents):
                if power == 0:
                    continue
                key = (axis, power)
                if key not in powers:
                    powers[key] = forms[axis] ** power
                term = term * powers[key]
            result = result + term
        return result

    def evaluate(self, points):
        """Evaluate at ``points`` of shape ``(..., dim)``."""
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != self.dim:
            raise exceptions.DomainError(
                f"Points must have {self.dim} components on the last axis"
            )
        return self._evaluate(points)

    def _evaluate(self, points):
        result = np.zeros(points.shape[:-1], dtype=complex)
        if not self.terms:
            return result
        powers = [
            [np.ones(points.shape[:-1])] for _ in range(self.dim)
        ]  # powers[axis][k] = z_axis ** k
        degree = self.degree
        for axis in range(self.dim):
            for _ in range(degree):
                powers[axis].append(powers[axis][-1] * points[..., axis])
        for exponents, coefficient in self.terms:
            monomial = np.ones(points.shape[:-1])
            for axis, power in enumerate(exponents):
                if power:
                    monomial = monomial * powers[axis][power]
            result = result + coefficient * monomial
        return result

    def is_real(self, rtol=1e-14):
        return all(
            abs(coefficient.imag) <= rtol * max(1.0, abs(coefficient))
            for _, coefficient in self.terms
        )

    def isclose(self, other, rtol=1e-12, atol=1e-14):
        """Coefficient-wise comparison with tolerance."""
        self._check_compatible(other)
        keys = {exponents for exponents, _ in self.terms + other.terms}
        return all(
            math.isclose(
                abs(self.coefficient(key) - other.coefficient(key)),
                0.0,
                abs_tol=atol
                + rtol * max(abs(self.coefficient(key)), abs(other.coefficient(key))),
            )
            for key in keys
        )

    def _check_compatible(self, other):
        if other.dim != self.dim:
            raise exceptions.DomainError(
                f"Polynomials in {self.dim} and {other.dim} variables do not mix"
            )

    def to_record(self):
        return [
            {
                "exponents": list(exponents),
                "coefficient": [coefficient.real, coefficient.imag],
            }
            for exponents, coefficient in self.terms
        ]

    @classmethod
    def from_record(cls, dim, records):
        terms = []
        for record in records:
            coefficient = record.get("coefficient", 1.0)
            if isinstance(coefficient, (list, tuple)):
                coefficient = complex(coefficient[0], coefficient[1])
            terms.append((tuple(record["exponents"]), coefficient))
        return cls(dim, tuple(terms))
