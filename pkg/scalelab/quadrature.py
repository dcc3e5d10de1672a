"""Quadrature over the positive mass shell.

Integrals of the form

    (2 pi)^-(d-1) \int d^(d-1)p / (2 omega_p) h(omega_p, p),
    omega_p = sqrt(|p|^2 + m^2),

are evaluated with

* d = 2: adaptive Gauss-Kronrod (``scipy.integrate.quad``) on the p-axis
  mapped to (-1, 1) by p = s artanh(u);
* d = 3: Gauss-Legendre in u on (0, 1) with r = s artanh(u), times a
  uniform rule on the circle;
* d = 4: the same radial rule times a Lebedev rule on the sphere
  (``scipy.integrate.lebedev_rule``).

The radial map puts no node at r = 0, so the integrable 1/|p| of massless
fields is harmless. The scale ``s`` is taken from the test functions, which
makes the fixed rules exactly covariant under test-function scaling.
"""

import functools
import logging
import math
from collections import namedtuple
from dataclasses import dataclass
from dataclasses import replace

import numpy as np
from scipy import integrate
from scipy import special

from . import exceptions
from . import utils

LOGGER = logging.getLogger(__name__)

# Orders provided by scipy.integrate.lebedev_rule.
LEBEDEV_ORDERS = (
    3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25, 27, 29, 31, 35, 41, 47, 53, 59,
    65, 71, 77, 83, 89, 95, 101, 107, 113, 119, 125, 131,
)  # fmt: skip

ShellIntegral = namedtuple("ShellIntegral", "value abs_error magnitude")


@dataclass(frozen=True)
class QuadratureSettings:
    """Node counts and tolerances of the mass-shell rules.

    :param int radial_nodes: Gauss-Legendre nodes of the coarse radial rule;
        the refined rule doubles them.
    :param int planar_nodes: Uniform angular nodes of the coarse d=3 rule.
    :param int lebedev_order: Order of the coarse d=4 angular rule; the
        refined rule uses the next order with about twice the points. The
        default order 35 has 434 points; the 74-point rule is order 13.
    :param float rtol: Accepted error relative to the integral of |h|.
    :param float atol: Accepted absolute error.
    :param int max_refinements: Refinement rounds before giving up.
    :param int adaptive_limit: Subinterval limit of the d=2 adaptive rule.
    """

    radial_nodes: int = 256
    planar_nodes: int = 74
    lebedev_order: int = 35
    rtol: float = 1e-8
    atol: float = 1e-300
    max_refinements: int = 2
    adaptive_limit: int = 200

    def __post_init__(self):
        if self.radial_nodes < 4 or self.planar_nodes < 4:
            raise exceptions.DomainError("Quadrature rules need at least 4 nodes")
        if self.lebedev_order not in LEBEDEV_ORDERS:
            raise exceptions.DomainError(
                f"Unsupported Lebedev order {self.lebedev_order}; "
                f"choose one of {LEBEDEV_ORDERS}"
            )
        if not self.rtol > 0:
            raise exceptions.DomainError("rtol must be positive")

    def refined(self):
        """Settings with every rule roughly doubled."""
        return replace(
            self,
            radial_nodes=2 * self.radial_nodes,
            planar_nodes=2 * self.planar_nodes,
            lebedev_order=refined_lebedev_order(self.lebedev_order),
        )

    @classmethod
    def from_record(cls, record):
        return cls(**{key: value for key, value in (record or {}).items()})

    def to_record(self):
        return {
            "radial_nodes": self.radial_nodes,
            "planar_nodes": self.planar_nodes,
            "lebedev_order": self.lebedev_order,
            "rtol": self.rtol,
            "atol": self.atol,
            "max_refinements": self.max_refinements,
            "adaptive_limit": self.adaptive_limit,
        }


DEFAULT_SETTINGS = QuadratureSettings()


def refined_lebedev_order(order):
    """Smallest supported order with about twice as many points."""
    target = math.sqrt(2) * order
    for candidate in LEBEDEV_ORDERS:
        if candidate >= target:
            return candidate
    return LEBEDEV_ORDERS[-1]


####################################
# BASIC RULES                      #
####################################


@functools.lru_cache(maxsize=None)
def unit_legendre(n):
    """Gauss-Legendre nodes and weights on (0, 1)."""
    nodes, weights = special.roots_legendre(n)
    return (nodes + 1.0) / 2.0, weights / 2.0


def radial_rule(n, scale):
    """Nodes and weights on (0, inf) with r = scale * artanh(u)."""
    u, weights = unit_legendre(n)
    return scale * np.arctanh(u), weights * scale / (1.0 - u**2)


def interval_rule(n, upper):
    """Gauss-Legendre nodes and weights on (0, upper)."""
    u, weights = unit_legendre(n)
    return upper * u, upper * weights


@functools.lru_cache(maxsize=None)
def angular_rule(spatial_dim, size):
    """Unit directions (``(N, spatial_dim)``) and weights summing to the
    area of the unit sphere. ``size`` is the node count on the circle and
    the Lebedev order on the sphere; it is ignored on the line.
    """
    if spatial_dim == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if spatial_dim == 2:
        angles = 2 * math.pi * np.arange(size) / size
        directions = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
        return directions, np.full(size, 2 * math.pi / size)
    if spatial_dim == 3:
        directions, weights = integrate.lebedev_rule(size)
        return np.ascontiguousarray(directions.T), np.asarray(weights)
    raise exceptions.DomainError(f"No angular rule in {spatial_dim} dimensions")


def _angular_size(dim, settings):
    return settings.planar_nodes if dim == 3 else settings.lebedev_order


def shell_momenta(dim, mass, radii, directions):
    """On-shell contravariant momenta for every (radius, direction) pair."""
    spatial = radii[:, None, None] * directions[None, :, :]
    omega = np.sqrt(radii**2 + mass**2)
    energies = np.broadcast_to(omega[:, None, None], spatial.shape[:2] + (1,))
    return np.concatenate([energies, spatial], axis=-1).reshape(-1, dim)


def shell_measure(dim, mass, radii):
    """Radial factor r^(d-2) / ((2 pi)^(d-1) 2 omega) of the invariant measure."""
    omega = np.sqrt(radii**2 + mass**2)
    return radii ** (dim - 2) / ((2 * math.pi) ** (dim - 1) * 2 * omega)


####################################
# MASS-SHELL INTEGRALS             #
####################################


def shell_integral(dim, mass, integrand, scale, settings=DEFAULT_SETTINGS):
    """Integrate ``integrand`` against the invariant measure of mass ``mass``.

    :param int dim: Spacetime dimension.
    :param float mass: Mass of the shell (> 0 in d = 2).
    :param callable integrand: Maps contravariant momenta ``(N, dim)`` to
        complex values ``(N,)``.
    :param float scale: Momentum scale of the integrand.
    :returns: :class:`ShellIntegral` with value, error estimate and the
        integral of the absolute integrand.
    :raises NumericalError: if the error estimate stays above tolerance.
    """
    dim = utils.check_dim(dim)
    if mass < 0 or (dim == 2 and mass == 0):
        raise exceptions.DomainError(f"Mass {mass} not allowed in d={dim}")
    if not scale > 0:
        raise exceptions.DomainError(f"Momentum scale must be positive, got {scale}")
    if dim == 2:
        return _line_integral(mass, integrand, scale, settings)
    return _fixed_integral(dim, mass, integrand, scale, settings)


def shell_density(dim, mass, integrand, radii, settings=DEFAULT_SETTINGS):
    """Angular integral of the measure times ``integrand`` at each radius,
    so that ``shell_integral = int_0^inf shell_density(r) dr``.
    """
    radii = np.asarray(radii, dtype=float)
    directions, weights = angular_rule(dim - 1, _angular_size(dim, settings))
    momenta = shell_momenta(dim, mass, radii, directions)
    values = integrand(momenta).reshape(len(radii), len(weights))
    return (values @ weights) * shell_measure(dim, mass, radii)


def _rule_sum(dim, mass, integrand, scale, radial_nodes, angular_size):
    radii, radial_weights = radial_rule(radial_nodes, scale)
    directions, angular_weights = angular_rule(dim - 1, angular_size)
    momenta = shell_momenta(dim, mass, radii, directions)
    weights = np.outer(radial_weights * shell_measure(dim, mass, radii), angular_weights)
    terms = integrand(momenta) * weights.ravel()
    return complex(np.sum(terms)), float(np.sum(np.abs(terms)))


def _fixed_integral(dim, mass, integrand, scale, settings):
    coarse = settings
    coarse_value, _ = _rule_sum(
        dim, mass, integrand, scale, coarse.radial_nodes, _angular_size(dim, coarse)
    )
    for attempt in range(settings.max_refinements + 1):
        fine = coarse.refined()
        value, magnitude = _rule_sum(
            dim, mass, integrand, scale, fine.radial_nodes, _angular_size(dim, fine)
        )
        error = abs(value - coarse_value)
        if error <= max(settings.rtol * magnitude, settings.atol):
            return ShellIntegral(value, error, magnitude)
        LOGGER.debug(
            "Refining shell rule (attempt %d): error %.3g, magnitude %.3g",
            attempt,
            error,
            magnitude,
        )
        coarse, coarse_value = fine, value
    raise exceptions.NumericalError(
        "Mass-shell quadrature did not converge",
        dim=dim,
        mass=mass,
        error=error,
        magnitude=magnitude,
        radial_nodes=fine.radial_nodes,
    )


def _line_integral(mass, integrand, scale, settings):
    measure = 1.0 / (2 * math.pi * 2)

    def mapped(u):
        if abs(u) >= 1.0:
            return 0j
        p = scale * math.atanh(u)
        omega = math.hypot(p, mass)
        jacobian = scale / (1.0 - u * u)
        value = integrand(np.array([[omega, p]]))[0]
        return complex(value) * jacobian * measure / omega

    options = {"limit": settings.adaptive_limit}
    magnitude, _ = integrate.quad(lambda u: abs(mapped(u)), -1.0, 1.0, epsrel=1e-3, **options)
    tolerance = max(settings.rtol * magnitude, settings.atol)
    real, real_error = integrate.quad(
        lambda u: mapped(u).real, -1.0, 1.0, epsabs=tolerance / 2, epsrel=0.0, **options
    )
    imag, imag_error = integrate.quad(
        lambda u: mapped(u).imag, -1.0, 1.0, epsabs=tolerance / 2, epsrel=0.0, **options
    )
    error = real_error + imag_error
    if error > tolerance:
        raise exceptions.NumericalError(
            "Adaptive mass-shell quadrature did not converge",
            dim=2,
            mass=mass,
            error=error,
            magnitude=magnitude,
        )
    return ShellIntegral(complex(real, imag), error, magnitude)
