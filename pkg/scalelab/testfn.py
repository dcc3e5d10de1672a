"""Closed-form test functions on d-dimensional Minkowski space.

A :class:`GaussianPacket` is

    amplitude * P(x - x0) * exp(-1/2 (x - x0)^T A (x - x0)) * exp(i k0 . x)

with ``A`` symmetric positive definite (``diag(w**2)`` for the diagonal
constructor) and ``k0 . x`` the Euclidean dot product. A
:class:`TestFunction` is a finite linear combination of packets. Scaling,
translation, Lorentz boosts, partial derivatives, complex conjugation and
the Fourier transform all stay in closed form; nothing is ever put on a
grid.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from dataclasses import field
from functools import cached_property

import numpy as np
from scipy import stats

from . import exceptions
from . import utils
from .polynomial import Polynomial

LOGGER = logging.getLogger(__name__)

DEFAULT_MAX_DEGREE = 8
DEFAULT_EPS_SUPP = 1e-8
LORENTZ_TOLERANCE = 1e-12


####################################
# LORENTZ MATRICES                 #
####################################


def check_lorentz(matrix, dim, tol=LORENTZ_TOLERANCE):
    """Return ``matrix`` as an array if it is a proper orthochronous Lorentz
    transformation, else raise ``DomainError``.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape != (dim, dim):
        raise exceptions.DomainError(f"Lorentz matrix must be {dim}x{dim}")
    metric = utils.minkowski_metric(dim)
    defect = np.max(np.abs(matrix.T @ metric @ matrix - metric))
    if defect > tol * max(1.0, np.max(np.abs(matrix)) ** 2):
        raise exceptions.DomainError(
            f"Matrix does not preserve the Minkowski metric (defect {defect:.3g})"
        )
    if matrix[0, 0] <= 0:
        raise exceptions.DomainError("Lorentz matrix is not orthochronous")
    if np.linalg.det(matrix) <= 0:
        raise exceptions.DomainError("Lorentz matrix is not proper")
    return matrix


def lorentz_boost(dim, rapidity, axis=1):
    """Boost with the given rapidity along spatial ``axis``."""
    dim = utils.check_dim(dim)
    if not 1 <= axis < dim:
        raise exceptions.DomainError(f"Boost axis {axis} is not spatial")
    matrix = np.eye(dim)
    matrix[0, 0] = matrix[axis, axis] = math.cosh(rapidity)
    matrix[0, axis] = matrix[axis, 0] = -math.sinh(rapidity)
    return matrix


def spatial_rotation(dim, angle, axes=(1, 2)):
    """Rotation by ``angle`` in the plane of two spatial axes."""
    dim = utils.check_dim(dim)
    first, second = axes
    if dim < 3 or not (1 <= first < dim and 1 <= second < dim) or first == second:
        raise exceptions.DomainError(f"No spatial rotation plane {axes} in d={dim}")
    matrix = np.eye(dim)
    matrix[first, first] = matrix[second, second] = math.cos(angle)
    matrix[first, second] = -math.sin(angle)
    matrix[second, first] = math.sin(angle)
    return matrix


####################################
# EFFECTIVE SUPPORT                #
####################################


@dataclass(frozen=True)
class Ellipsoid:
    """Axis-aligned ellipsoid ``sum_nu ((x - c)_nu / r_nu)**2 <= 1``."""

    center: tuple
    radii: tuple

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if len(self.center) != len(self.radii):
            raise exceptions.DomainError("Ellipsoid center and radii differ in length")
        if any(not r > 0 for r in self.radii):
            raise exceptions.DomainError(
                f"Ellipsoid radii must be positive: {self.radii}"
            )

    @property
    def dim(self):
        return len(self.center)

    def scaled(self, lam):
        return Ellipsoid(
            tuple(lam * c for c in self.center), tuple(lam * r for r in self.radii)
        )

    def translated(self, shift):
        shift = utils.as_vector(shift, self.dim, "translation")
        return Ellipsoid(tuple(c + a for c, a in zip(self.center, shift)), self.radii)

    def contains(self, other, rtol=1e-12):
        """Conservative containment test: the bounding box of ``other`` must
        lie inside this ellipsoid.
        """
        total = sum(
            ((abs(c1 - c) + r1) / r) ** 2
            for c1, r1, c, r in zip(other.center, other.radii, self.center, self.radii)
        )
        return total <= 1.0 + rtol

    @classmethod
    def bounding(cls, ellipsoids):
        """Smallest ellipsoid (of this family) containing the bounding boxes
        of ``ellipsoids``: the box half widths inflated by sqrt(d).
        """
        ellipsoids = list(ellipsoids)
        if not ellipsoids:
            raise exceptions.DomainError("Cannot bound an empty set of ellipsoids")
        lows = np.min(
            [np.subtract(e.center, e.radii) for e in ellipsoids], axis=0
        )
        highs = np.max([np.add(e.center, e.radii) for e in ellipsoids], axis=0)
        dim = len(lows)
        return cls(tuple((lows + highs) / 2), tuple(math.sqrt(dim) * (highs - lows) / 2))

    def to_record(self):
        return {"center": list(self.center), "radii": list(self.radii)}


####################################
# GAUSSIAN PACKETS                 #
####################################


@dataclass(frozen=True)
class GaussianPacket:
    """A polynomial times a modulated Gaussian.

    :param int dim: Spacetime dimension (2, 3 or 4).
    :param complex amplitude: Overall factor.
    :param tuple center: x0 (length units).
    :param tuple width_matrix: Symmetric positive-definite ``A``
        (inverse length squared). Use :meth:`diagonal` for ``diag(w**2)``.
    :param tuple modulation: k0 (momentum units).
    :param Polynomial poly: Prefactor P(x - x0); constant 1 by default.
    :param int max_degree: Largest accepted total degree of ``poly``.
    :raises DomainError: on invalid dimension, a non-positive width matrix
        or a polynomial above ``max_degree``.
    """

    dim: int
    amplitude: complex = 1.0
    center: tuple = None
    width_matrix: tuple = None
    modulation: tuple = None
    poly: Polynomial = None
    max_degree: int = field(default=DEFAULT_MAX_DEGREE, compare=False)

    def __post_init__(self):
        dim = utils.check_dim(self.dim)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "amplitude", complex(self.amplitude))
        center = (0.0,) * dim if self.center is None else self.center
        object.__setattr__(self, "center", utils.as_vector(center, dim, "center"))
        modulation = (0.0,) * dim if self.modulation is None else self.modulation
        object.__setattr__(
            self, "modulation", utils.as_vector(modulation, dim, "modulation")
        )
        matrix = np.eye(dim) if self.width_matrix is None else self.width_matrix
        object.__setattr__(self, "width_matrix", _spd_tuple(matrix, dim))
        poly = Polynomial.constant(dim) if self.poly is None else self.poly
        if poly.dim != dim:
            raise exceptions.DomainError(
                f"Polynomial in {poly.dim} variables for a d={dim} packet"
            )
        if poly.degree > self.max_degree:
            raise exceptions.DomainError(
                f"Polynomial degree {poly.degree} exceeds the cap {self.max_degree}"
            )
        object.__setattr__(self, "poly", poly)

    @classmethod
    def diagonal(
        cls, dim, widths=1.0, center=None, modulation=None, amplitude=1.0, poly=None
    ):
        """Packet with ``A = diag(widths**2)``; ``widths`` may be a scalar."""
        widths = np.broadcast_to(np.asarray(widths, dtype=float), (dim,))
        if np.any(widths <= 0):
            raise exceptions.DomainError(f"Widths must be positive: {widths}")
        return cls(
            dim,
            amplitude=amplitude,
            center=center,
            width_matrix=np.diag(widths**2),
            modulation=modulation,
            poly=poly,
        )

    # Cached array views of the fields.

    @cached_property
    def _center(self):
        return np.array(self.center)

    @cached_property
    def _matrix(self):
        return np.array(self.width_matrix)

    @cached_property
    def _inverse(self):
        inverse = np.linalg.inv(self._matrix)
        return (inverse + inverse.T) / 2

    @cached_property
    def _modulation(self):
        return np.array(self.modulation)

    @cached_property
    def _gaussian_norm(self):
        return (2 * math.pi) ** (self.dim / 2) / math.sqrt(np.linalg.det(self._matrix))

    @cached_property
    def _fourier_polynomial(self):
        # int y^a exp(-y.Ay/2 + i q.y) dy = (-i d/dq)^a G(q); each -i d/dq_j
        # acting on Q(q) G(q) gives -i (dQ/dq_j - (A^-1 q)_j Q) G(q).
        forms = [Polynomial.linear(row) for row in self._inverse]
        result = Polynomial(self.dim)
        for exponents, coefficient in self.poly.terms:
            ladder = Polynomial.constant(self.dim, coefficient)
            for axis, power in enumerate(exponents):
                for _ in range(power):
                    ladder = (ladder.derivative(axis) - forms[axis] * ladder) * -1j
            result = result + ladder
        return result

    @property
    def widths(self):
        """sqrt of the diagonal of the width matrix."""
        return tuple(float(w) for w in np.sqrt(np.diag(self._matrix)))

    @property
    def momentum_scale(self):
        """Typical momentum of the packet: sqrt of the largest eigenvalue of
        ``A`` plus the size of the modulation.
        """
        return float(
            math.sqrt(np.max(np.linalg.eigvalsh(self._matrix)))
            + np.linalg.norm(self._modulation)
        )

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        offset = x - self._center
        quadratic = np.einsum("...i,ij,...j->...", offset, self._matrix, offset)
        return (
            self.amplitude
            * self.poly.evaluate(offset)
            * np.exp(-0.5 * quadratic + 1j * (x @ self._modulation))
        )

    def fourier(self, p):
        """Closed-form transform at contravariant momenta ``p`` (``(..., d)``)."""
        p = np.asarray(p, dtype=float)
        q = utils.lower_index(p) + self._modulation
        quadratic = np.einsum("...i,ij,...j->...", q, self._inverse, q)
        return (
            self.amplitude
            * self._gaussian_norm
            * self._fourier_polynomial.evaluate(q)
            * np.exp(-0.5 * quadratic + 1j * (q @ self._center))
        )

    def _replace(self, **changes):
        values = {
            "dim": self.dim,
            "amplitude": self.amplitude,
            "center": self.center,
            "width_matrix": self.width_matrix,
            "modulation": self.modulation,
            "poly": self.poly,
            "max_degree": self.max_degree,
        }
        values.update(changes)
        return GaussianPacket(**values)

    def scale(self, lam):
        """Return g(x) = f(x / lam)."""
        lam = _check_scale(lam)
        return self._replace(
            center=tuple(lam * c for c in self.center),
            width_matrix=self._matrix / lam**2,
            modulation=tuple(k / lam for k in self.modulation),
            poly=self.poly.rescale(1.0 / lam),
        )

    def translate(self, shift):
        """Return g(x) = f(x - shift)."""
        shift = np.array(utils.as_vector(shift, self.dim, "translation"))
        return self._replace(
            center=tuple(self._center + shift),
            amplitude=self.amplitude * cmath.exp(-1j * float(self._modulation @ shift)),
        )

    def boost(self, matrix):
        """Return g(x) = f(matrix^-1 x) for a Lorentz ``matrix``."""
        matrix = check_lorentz(matrix, self.dim)
        metric = utils.minkowski_metric(self.dim)
        inverse = metric @ matrix.T @ metric
        return self._replace(
            center=tuple(matrix @ self._center),
            width_matrix=inverse.T @ self._matrix @ inverse,
            modulation=tuple(inverse.T @ self._modulation),
            poly=self.poly.substitute(inverse),
        )

    def derivative(self, axis):
        """Closed-form partial derivative along ``axis``."""
        if not 0 <= axis < self.dim:
            raise exceptions.DomainError(f"Axis {axis} out of range for d={self.dim}")
        poly = (
            self.poly.derivative(axis)
            + self.poly * (1j * self.modulation[axis])
            - Polynomial.linear(self._matrix[axis]) * self.poly
        )
        return self._replace(poly=poly)

    def conjugate(self):
        return self._replace(
            amplitude=self.amplitude.conjugate(),
            modulation=tuple(-k for k in self.modulation),
            poly=self.poly.conjugate(),
        )

    def times(self, factor):
        return self._replace(amplitude=self.amplitude * complex(factor))

    def normalized_poly(self):
        """The prefactor with the amplitude absorbed."""
        return self.poly * self.amplitude

    def effective_support(self, eps=DEFAULT_EPS_SUPP):
        """Axis-aligned ellipsoid holding at least ``1 - eps`` of the L1 mass.

        The radius is a chi-square tail bound, not the smallest such
        ellipsoid. A polynomial prefactor of degree n adds 2n degrees of
        freedom where its radial growth needs only n. This is a heuristic that
        is generous for ordinary prefactors; strong cancellation near the
        center is not covered. Correlated widths are widened further by the
        largest eigenvalue of the correlation matrix.
        """
        if not 0 < eps < 1:
            raise exceptions.DomainError(f"eps_supp must lie in (0, 1), got {eps}")
        radius = math.sqrt(stats.chi2.isf(eps, self.dim + 2 * self.poly.degree))
        covariance = self._inverse
        spread = np.sqrt(np.diag(covariance))
        correlation = covariance / np.outer(spread, spread)
        stretch = math.sqrt(np.max(np.linalg.eigvalsh(correlation)))
        return Ellipsoid(self.center, tuple(radius * stretch * spread))

    def is_real(self):
        return not any(self.modulation) and self.normalized_poly().is_real()

    def to_record(self):
        return {
            "center": list(self.center),
            "width_matrix": [list(row) for row in self.width_matrix],
            "modulation": list(self.modulation),
            "amplitude": [self.amplitude.real, self.amplitude.imag],
            "poly": self.poly.to_record(),
        }

    @classmethod
    def from_record(cls, dim, record, max_degree=DEFAULT_MAX_DEGREE):
        """Build a packet from a config record (see ``docs/config.rst``)."""
        amplitude = record.get("amplitude", 1.0)
        if isinstance(amplitude, (list, tuple)):
            amplitude = complex(amplitude[0], amplitude[1])
        poly = None
        if record.get("poly") is not None:
            poly = Polynomial.from_record(dim, record["poly"])
        if "width_matrix" in record:
            matrix = record["width_matrix"]
        else:
            widths = np.broadcast_to(
                np.asarray(record.get("widths", 1.0), dtype=float), (dim,)
            )
            if np.any(widths <= 0):
                raise exceptions.DomainError(f"Widths must be positive: {widths}")
            matrix = np.diag(widths**2)
        return cls(
            dim,
            amplitude=amplitude,
            center=record.get("center"),
            width_matrix=matrix,
            modulation=record.get("modulation"),
            poly=poly,
            max_degree=max_degree,
        )


def _spd_tuple(matrix, dim):
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape != (dim, dim):
        raise exceptions.DomainError(f"Width matrix must be {dim}x{dim}")
    if np.max(np.abs(matrix - matrix.T)) > 1e-12 * max(1.0, np.max(np.abs(matrix))):
        raise exceptions.DomainError("Width matrix must be symmetric")
    matrix = (matrix + matrix.T) / 2
    if not np.all(np.isfinite(matrix)) or np.min(np.linalg.eigvalsh(matrix)) <= 0:
        raise exceptions.DomainError("Width matrix must be positive definite")
    return tuple(tuple(float(v) for v in row) for row in matrix)


def _check_scale(lam):
    lam = float(lam)
    if not lam > 0 or not math.isfinite(lam):
        raise exceptions.DomainError(f"Scaling parameter must be positive, got {lam}")
    return lam


####################################
# TEST FUNCTIONS                   #
####################################


@dataclass(frozen=True)
class TestFunction:
    """A finite linear combination of :class:`GaussianPacket`.

    :param int dim: Spacetime dimension shared by all packets.
    :param tuple terms: The packets.
    """

    __test__ = False

    dim: int
    terms: tuple = ()

    def __post_init__(self):
        dim = utils.check_dim(self.dim)
        object.__setattr__(self, "dim", dim)
        terms = tuple(self.terms)
        for packet in terms:
            if not isinstance(packet, GaussianPacket):
                raise exceptions.DomainError(f"Not a GaussianPacket: {packet!r}")
            if packet.dim != dim:
                raise exceptions.DomainError(
                    f"Packet of dimension {packet.dim} in a d={dim} test function"
                )
        object.__setattr__(self, "terms", terms)

    @classmethod
    def gaussian(cls, dim, widths=1.0, center=None, modulation=None, amplitude=1.0, poly=None):
        """Single diagonal packet, the workhorse of the probe sets."""
        return cls(
            dim,
            (
                GaussianPacket.diagonal(
                    dim,
                    widths=widths,
                    center=center,
                    modulation=modulation,
                    amplitude=amplitude,
                    poly=poly,
                ),
            ),
        )

    def _map(self, method, *args):
        return TestFunction(self.dim, tuple(getattr(p, method)(*args) for p in self.terms))

    def __add__(self, other):
        if other.dim != self.dim:
            raise exceptions.DomainError("Cannot add test functions of different dimension")
        return TestFunction(self.dim, self.terms + other.terms)

    def __mul__(self, factor):
        return self._map("times", factor)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        result = np.zeros(x.shape[:-1], dtype=complex)
        for packet in self.terms:
            result = result + packet.evaluate(x)
        return result

    def fourier(self, p):
        p = np.asarray(p, dtype=float)
        result = np.zeros(p.shape[:-1], dtype=complex)
        for packet in self.terms:
            result = result + packet.fourier(p)
        return result

    @property
    def momentum_scale(self):
        return max((packet.momentum_scale for packet in self.terms), default=1.0)

    def effective_support(self, eps=DEFAULT_EPS_SUPP):
        return tuple(packet.effective_support(eps) for packet in self.terms)

    def is_real(self):
        """True iff the function equals its complex conjugate.

        Packets sharing center, width matrix and modulation are merged; the
        function is real iff each merged prefactor is the conjugate of the
        one carrying the opposite modulation.
        """
        merged = {}
        for packet in self.terms:
            key = (packet.center, packet.width_matrix, packet.modulation)
            merged[key] = merged.get(key, Polynomial(self.dim)) + packet.normalized_poly()
        for (center, matrix, modulation), poly in merged.items():
            mirror = merged.get(
                (center, matrix, tuple(-k for k in modulation)), Polynomial(self.dim)
            )
            if not poly.isclose(mirror.conjugate()):
                return False
        return True

    def to_record(self):
        return {"packets": [packet.to_record() for packet in self.terms]}

    @classmethod
    def from_record(cls, dim, record, max_degree=DEFAULT_MAX_DEGREE):
        """Accepts a single packet record or ``{"packets": [...]}``."""
        records = record["packets"] if "packets" in record else [record]
        return cls(
            dim,
            tuple(GaussianPacket.from_record(dim, r, max_degree) for r in records),
        )


####################################
# OPERATIONS                       #
####################################


def scale(f, lam):
    """f_lam(x) := f(x / lam).

    :raises DomainError: if ``lam <= 0``.
    """
    lam = _check_scale(lam)
    return f._map("scale", lam)


def translate(f, shift):
    """(translate f)(x) := f(x - shift)."""
    return f._map("translate", shift)


def boost(f, matrix):
    """(boost f)(x) := f(matrix^-1 x) for a proper orthochronous Lorentz matrix."""
    check_lorentz(matrix, f.dim)
    return f._map("boost", matrix)


def derivative(f, axis):
    """Partial derivative d f / d x^axis."""
    if not 0 <= axis < f.dim:
        raise exceptions.DomainError(f"Axis {axis} out of range for d={f.dim}")
    return f._map("derivative", axis)


def conjugate(f):
    return f._map("conjugate")


def fourier(f, p):
    """f^(p) = int exp(i (p^0 x^0 - p.x)) f(x) d^d x in closed form."""
    return f.fourier(p)


def effective_support(f, eps=DEFAULT_EPS_SUPP):
    return f.effective_support(eps)
