"""Vacuum correlation functions of free and generalized free scalar fields.

Conventions: the two-point function

    W_m(f, g) = (2 pi)^-(d-1) \int d^(d-1)p / (2 omega_p) conj(f^(p)) g^(p)

is antilinear in ``f`` and linear in ``g``, so ``W(f, f) >= 0`` and
``W(g, f) = conj(W(f, g))``. For real test functions

    sigma(f, g) = -i (W(f, g) - W(g, f)) = 2 Im W(f, g),
    mu(f, g)    = (W(f, g) + W(g, f)) / 2 = Re W(f, g).

Weyl operators ``W(f) = exp(i phi(f))`` satisfy
``W(f) W(g) = exp(-i sigma(f, g) / 2) W(f + g)`` and the quasi-free vacuum
gives ``<W(f)> = exp(-mu(f, f) / 2)``; everything below follows from
these two facts.
"""

import cmath
import logging
import math
from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from . import exceptions
from . import quadrature
from . import spectral
from . import testfn
from . import utils

LOGGER = logging.getLogger(__name__)

DEFAULT_MAX_POINTS = 12

TwoPointValue = namedtuple("TwoPointValue", "value abs_error")


@dataclass(frozen=True)
class WeylWord:
    """Ordered product ``W(g_1) ... W(g_n)`` of Weyl operators."""

    arguments: tuple = ()

    def __post_init__(self):
        arguments = tuple(self.arguments)
        object.__setattr__(self, "arguments", arguments)
        dims = {g.dim for g in arguments}
        if len(dims) > 1:
            raise exceptions.DomainError(
                f"Weyl word mixes test functions of dimensions {sorted(dims)}"
            )
        for position, g in enumerate(arguments):
            if not g.is_real():
                raise exceptions.DomainError(
                    f"Weyl operator argument {position} is not real-valued"
                )

    def __len__(self):
        return len(self.arguments)


def _check_arguments(dim, *functions):
    for f in functions:
        if f.dim != dim:
            raise exceptions.DomainError(
                f"Test function of dimension {f.dim} used with a d={dim} field"
            )


def _check_real(*functions):
    for f in functions:
        if not f.is_real():
            raise exceptions.DomainError("Argument must be a real-valued test function")


####################################
# TWO-POINT FUNCTIONS              #
####################################


def w2_mass(dim, mass, f, g, settings=quadrature.DEFAULT_SETTINGS):
    """Free two-point function of mass ``mass`` smeared with ``f`` and ``g``.

    :param int dim: Spacetime dimension.
    :param float mass: Mass (must be positive in d = 2).
    :param TestFunction f: Antilinear argument.
    :param TestFunction g: Linear argument.
    :param QuadratureSettings settings: Momentum-space rule settings.
    :returns: :class:`TwoPointValue`.
    :raises NumericalError: if the momentum quadrature does not converge.
    """
    dim = utils.check_dim(dim)
    _check_arguments(dim, f, g)
    scale = max(f.momentum_scale, g.momentum_scale)

    def integrand(momenta):
        return np.conj(f.fourier(momenta)) * g.fourier(momenta)

    result = quadrature.shell_integral(dim, mass, integrand, scale, settings)
    return TwoPointValue(result.value, result.abs_error)


def w2(model, f, g, settings=quadrature.DEFAULT_SETTINGS, threads=1):
    """Two-point function of ``model``: the spectral average of :func:`w2_mass`."""
    _check_arguments(model.dim, f, g)
    result = spectral.integrate_mass(
        model.measure,
        lambda mass: w2_mass(model.dim, mass, f, g, settings),
        threads=threads,
    )
    return TwoPointValue(result.value, result.abs_error)


def commutator_sigma(model, f, g, settings=quadrature.DEFAULT_SETTINGS, threads=1):
    """sigma(f, g) = -i (W(f, g) - W(g, f)) for real ``f`` and ``g``.

    ``W(g, f)`` is the complex conjugate of ``W(f, g)`` node by node, so
    the value is real and antisymmetric exactly.
    """
    _check_real(f, g)
    return 2.0 * w2(model, f, g, settings, threads).value.imag


def symmetric_mu(model, f, g, settings=quadrature.DEFAULT_SETTINGS, threads=1):
    """mu(f, g) = (W(f, g) + W(g, f)) / 2 for real ``f`` and ``g``."""
    _check_real(f, g)
    return w2(model, f, g, settings, threads).value.real


def _pairing_sum(indices, table):
    if not indices:
        return 1.0 + 0j
    first, rest = indices[0], indices[1:]
    total = 0j
    for position, partner in enumerate(rest):
        remaining = rest[:position] + rest[position + 1 :]
        total += table[first, partner] * _pairing_sum(remaining, table)
    return total


def npoint_wick(
    model,
    functions,
    settings=quadrature.DEFAULT_SETTINGS,
    threads=1,
    max_points=DEFAULT_MAX_POINTS,
):
    """Vacuum expectation of ``phi(f_1) ... phi(f_n)`` by Wick's theorem.

    Each pair ``i < j`` contributes the bilinear two-point value
    ``W(conj f_i, f_j)``, which is ``W(f_i, f_j)`` for real functions.

    :param int max_points: Largest accepted ``n``; the number of pairings
        grows as ``(n - 1)!!``.
    :raises DomainError: if ``n > max_points``.
    """
    functions = list(functions)
    n = len(functions)
    if n > max_points:
        raise exceptions.DomainError(
            f"{n}-point function requested; at most {max_points} points supported"
        )
    _check_arguments(model.dim, *functions)
    if n % 2:
        return 0j
    if n == 0:
        return 1.0 + 0j
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    values = utils.parallel_map(
        lambda pair: w2(
            model, testfn.conjugate(functions[pair[0]]), functions[pair[1]], settings
        ).value,
        pairs,
        threads,
    )
    table = dict(zip(pairs, values))
    return _pairing_sum(tuple(range(n)), table)


####################################
# WEYL OPERATORS                   #
####################################


def weyl_correlator(model, word, settings=quadrature.DEFAULT_SETTINGS, threads=1):
    """<Omega, W(g_1) ... W(g_n) Omega> for a :class:`WeylWord`.

    Equals ``exp(-(i/2) sum_{j<k} sigma(g_j, g_k)) * exp(-mu(G, G) / 2)``
    with ``G = g_1 + ... + g_n``.
    """
    if not isinstance(word, WeylWord):
        word = WeylWord(tuple(word))
    arguments = word.arguments
    if not arguments:
        return 1.0 + 0j
    _check_arguments(model.dim, *arguments)
    pairs = [
        (j, k) for j in range(len(arguments)) for k in range(j + 1, len(arguments))
    ]
    sigmas = utils.parallel_map(
        lambda pair: commutator_sigma(
            model, arguments[pair[0]], arguments[pair[1]], settings
        ),
        pairs,
        threads,
    )
    total = arguments[0]
    for g in arguments[1:]:
        total = total + g
    mu = symmetric_mu(model, total, total, settings, threads)
    phase = -0.5 * math.fsum(sigmas)
    return cmath.exp(1j * phase) * math.exp(-0.5 * mu)


def weyl_vector_norm(model, g, settings=quadrature.DEFAULT_SETTINGS):
    """||W(g) Omega||, from <W(g) Omega, W(g) Omega> = <W(-g) W(g)>."""
    value = weyl_correlator(model, WeylWord((-g, g)), settings)
    return math.sqrt(max(value.real, 0.0))


def weyl_continuity_proxy(model, g, shift, settings=quadrature.DEFAULT_SETTINGS):
    """||(W(g_a) - W(g)) Omega||^2 with ``g_a = translate(g, shift)``.

    Evaluated as ``2 (1 - r) + 4 r sin^2(sigma(g, g_a) / 4)`` with
    ``r = exp(-mu(h, h) / 2)`` and ``h = g_a - g``, which equals
    ``2 - 2 Re <W(g_a)* W(g)>`` without its cancellation at small shifts.
    """
    _check_real(g)
    moved = testfn.translate(g, shift)
    difference = moved - g
    mu = symmetric_mu(model, difference, difference, settings)
    sigma = commutator_sigma(model, g, moved, settings)
    overlap = math.exp(-0.5 * mu)
    return 2.0 * -math.expm1(-0.5 * mu) + 4.0 * overlap * math.sin(sigma / 4.0) ** 2
