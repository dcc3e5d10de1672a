"""Renormalization-group scaling orbits.

An orbit ``lam -> N_lam * phi(f_lam)`` is fixed by a base test function
``f``, a renormalization model for the positive factors ``N_lam`` and a
localization region. Scaled correlators, the fit of the factors to a power
law, energy-momentum transfer diagnostics and the orbit conditions
(uniform boundedness, localization, continuity) live here.
"""

import functools
import logging
import math
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import exceptions
from . import quadrature
from . import spectral
from . import testfn
from . import utils
from . import wightman

LOGGER = logging.getLogger(__name__)

# Local slopes of log N_lam differing by more than this are reported.
EXPONENT_DRIFT = 0.05

RenormFit = namedtuple("RenormFit", "c delta residual")
EmtIdentity = namedtuple("EmtIdentity", "lhs rhs")


def canonical_exponent(dim):
    """Exponent ``-(d + 2) / 2`` that makes the massless field scale invariant."""
    return -(utils.check_dim(dim) + 2) / 2.0


####################################
# RENORMALIZATION MODELS           #
####################################


@dataclass(frozen=True)
class PowerLaw:
    """N_lam = c * lam**delta."""

    c: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise exceptions.DomainError(f"Power-law prefactor must be positive: {self.c}")

    def factor(self, model, lam, settings=quadrature.DEFAULT_SETTINGS):
        return self.c * lam**self.delta

    def to_record(self):
        return {"kind": "power_law", "c": self.c, "delta": self.delta}


@functools.lru_cache(maxsize=1024)
def _auto_factor(model, reference, lam, settings):
    scaled = testfn.scale(reference, lam)
    norm = wightman.w2(model, scaled, scaled, settings).value.real
    if not norm > 0:
        raise exceptions.NumericalError(
            "Reference two-point value is not positive", lam=lam, value=norm
        )
    return norm**-0.5


@dataclass(frozen=True)
class AutoNormalized:
    """N_lam = W(f0_lam, f0_lam)**-1/2 for a reference function ``f0``.

    Values are memoized per model, reference, lam and quadrature settings.
    """

    reference: testfn.TestFunction

    def factor(self, model, lam, settings=quadrature.DEFAULT_SETTINGS):
        return _auto_factor(model, self.reference, float(lam), settings)

    def to_record(self):
        return {"kind": "auto", "reference": self.reference.to_record()}


@dataclass(frozen=True)
class Tabulated:
    """N_lam interpolated linearly in (log lam, log N) between table points.

    :param tuple lambdas: Strictly decreasing positive scales.
    :param tuple values: Positive factors, one per scale.
    """

    lambdas: tuple
    values: tuple

    def __post_init__(self):
        lambdas = tuple(float(lam) for lam in self.lambdas)
        values = tuple(float(value) for value in self.values)
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "values", values)
        if len(lambdas) != len(values) or len(lambdas) < 2:
            raise exceptions.DomainError(
                "A renormalization table needs at least two (lambda, N) pairs"
            )
        if any(lam <= 0 for lam in lambdas) or any(value <= 0 for value in values):
            raise exceptions.DomainError("Table scales and factors must be positive")
        if any(later >= earlier for earlier, later in zip(lambdas, lambdas[1:])):
            raise exceptions.DomainError("Table scales must be strictly decreasing")

    def factor(self, model, lam, settings=quadrature.DEFAULT_SETTINGS):
        lam = float(lam)
        upper, lower = self.lambdas[0], self.lambdas[-1]
        if not lower * (1 - 1e-12) <= lam <= upper * (1 + 1e-12):
            raise exceptions.DomainError(
                f"lambda={lam} outside the tabulated range [{lower}, {upper}]"
            )
        logs = np.log(self.lambdas[::-1])
        return float(np.exp(np.interp(math.log(lam), logs, np.log(self.values[::-1]))))

    def to_record(self):
        return {
            "kind": "tabulated",
            "lambdas": list(self.lambdas),
            "values": list(self.values),
        }


####################################
# ORBITS                           #
####################################


@dataclass(frozen=True)
class ScalingOrbit:
    """The orbit ``lam -> N_lam phi(scale(base, lam))`` localized in ``region``.

    :param TestFunction base: The function ``f``.
    :param renorm: :class:`PowerLaw`, :class:`AutoNormalized` or
        :class:`Tabulated`.
    :param Ellipsoid region: Localization region ``O``; defaults to an
        ellipsoid bounding the effective support of ``base``.
    :param float eps_supp: Mass fraction allowed outside the effective support.
    :raises DomainError: if the effective support is not inside ``region``.
    """

    base: testfn.TestFunction
    renorm: object
    region: testfn.Ellipsoid = None
    eps_supp: float = testfn.DEFAULT_EPS_SUPP

    def __post_init__(self):
        supports = testfn.effective_support(self.base, self.eps_supp)
        if self.region is None:
            object.__setattr__(self, "region", testfn.Ellipsoid.bounding(supports))
        elif not all(self.region.contains(support) for support in supports):
            raise exceptions.DomainError(
                "Effective support of the base function is not inside the region"
            )

    @property
    def dim(self):
        return self.base.dim

    def at(self, lam):
        return testfn.scale(self.base, lam)

    def factor(self, model, lam, settings=quadrature.DEFAULT_SETTINGS):
        value = self.renorm.factor(model, lam, settings)
        if not (value > 0 and math.isfinite(value)):
            raise exceptions.NumericalError(
                "Renormalization factor is not positive", lam=lam, value=value
            )
        return value

    def region_at(self, lam):
        return self.region.scaled(lam)

    def translated(self, shift):
        return ScalingOrbit(
            testfn.translate(self.base, shift),
            self.renorm,
            self.region.translated(shift),
            self.eps_supp,
        )

    def dilated(self, mu):
        """Orbit of ``scale(base, mu)`` with the same renormalization."""
        return ScalingOrbit(
            testfn.scale(self.base, mu), self.renorm, self.region.scaled(mu), self.eps_supp
        )


####################################
# SCALED CORRELATORS               #
####################################


def scaled_w2(model, orbit_f, orbit_g, lam, settings=quadrature.DEFAULT_SETTINGS, threads=1):
    """N^f_lam N^g_lam W(f_lam, g_lam)."""
    if orbit_f.dim != orbit_g.dim:
        raise exceptions.DomainError("Orbits of different dimensions")
    factor = orbit_f.factor(model, lam, settings) * orbit_g.factor(model, lam, settings)
    value = wightman.w2(model, orbit_f.at(lam), orbit_g.at(lam), settings, threads)
    LOGGER.debug("scaled_w2 at lam=%.6g: %r (N=%.6g)", lam, value.value, factor)
    return wightman.TwoPointValue(factor * value.value, factor * value.abs_error)


def scaled_npoint(model, orbits, lam, settings=quadrature.DEFAULT_SETTINGS, threads=1):
    orbits = list(orbits)
    if len(orbits) % 2:
        return 0j
    factor = math.prod(orbit.factor(model, lam, settings) for orbit in orbits)
    functions = [orbit.at(lam) for orbit in orbits]
    return factor * wightman.npoint_wick(model, functions, settings, threads)


def scaled_weyl(model, orbits, lam, settings=quadrature.DEFAULT_SETTINGS, threads=1):
    """<W(N_lam f1_lam) ... W(N_lam fn_lam)> on the bounded Weyl orbits."""
    arguments = tuple(orbit.factor(model, lam, settings) * orbit.at(lam) for orbit in orbits)
    return wightman.weyl_correlator(model, wightman.WeylWord(arguments), settings, threads)


def _check_grid(lambdas, minimum=4, decades=2.0):
    lambdas = [float(lam) for lam in lambdas]
    if len(lambdas) < minimum:
        raise exceptions.DomainError(f"Need at least {minimum} scales, got {len(lambdas)}")
    if any(lam <= 0 for lam in lambdas):
        raise exceptions.DomainError("Scales must be positive")
    if any(later >= earlier for earlier, later in zip(lambdas, lambdas[1:])):
        raise exceptions.DomainError("Scales must be strictly decreasing")
    if math.log10(lambdas[0] / lambdas[-1]) < decades - 1e-9:
        raise exceptions.DomainError(f"Scales must span at least {decades:g} decades")
    return lambdas


def fit_renorm_exponent(
    model, f, lambdas, settings=quadrature.DEFAULT_SETTINGS, threads=1, corrections=1
):
    """Fit ``N_lam = W(f_lam, f_lam)**-1/2`` to ``c * lam**delta``.

    The least-squares fit of ``log N`` against ``log lam`` carries
    ``corrections`` extra terms ``a_k * lam**k``. Masses enter the scaled
    two-point function through ``lam * m``; in odd dimensions the leading
    correction is linear in ``lam``.

    :param ModelSpec model: The field.
    :param TestFunction f: Test function.
    :param lambdas: Strictly decreasing scales spanning at least two decades.
    :param int corrections: Number of analytic correction terms, 0 for a
        pure power law.
    :returns: :class:`RenormFit` with the maximal residual of log N.
    """
    lambdas = _check_grid(lambdas)
    if int(corrections) != corrections or not 0 <= corrections <= len(lambdas) - 3:
        raise exceptions.DomainError(
            f"Cannot fit {corrections} correction terms on {len(lambdas)} scales"
        )
    norms = utils.parallel_map(
        lambda lam: wightman.w2(
            model, testfn.scale(f, lam), testfn.scale(f, lam), settings
        ).value.real,
        lambdas,
        threads,
    )
    if any(norm <= 0 for norm in norms):
        raise exceptions.NumericalError("Non-positive two-point value in exponent fit")
    scales = np.asarray(lambdas)
    logs = np.log(scales)
    log_factors = -0.5 * np.log(norms)
    columns = [np.ones_like(logs), logs]
    columns += [scales**k for k in range(1, int(corrections) + 1)]
    design = np.column_stack(columns)
    coefficients, *_ = np.linalg.lstsq(design, log_factors, rcond=None)
    log_c, delta = coefficients[:2]
    residual = float(np.max(np.abs(log_factors - design @ coefficients)))
    leading = log_factors - design[:, 2:] @ coefficients[2:]
    slopes = np.diff(leading) / np.diff(logs)
    if np.ptp(slopes) > EXPONENT_DRIFT:
        LOGGER.warning(
            "Renormalization exponent drifts across the grid: local slopes %s",
            np.array2string(slopes, precision=4),
        )
    return RenormFit(float(math.exp(log_c)), float(delta), residual)


####################################
# ENERGY-MOMENTUM TRANSFER         #
####################################


def _single_atom(model):
    measure = model.measure
    if measure.density is not None or len(measure.atoms) != 1:
        raise exceptions.DomainError(
            "Energy-momentum insertions need a single-mass model"
        )
    return measure.atoms[0]


def emt_identity(model, orbit, lam, axis, settings=quadrature.DEFAULT_SETTINGS):
    """Both sides of ``|<A Omega, P_nu A Omega>| = lam^-1 |<A Omega, A' Omega>|``
    with ``A = N_lam phi(f_lam)`` and ``A' = N_lam phi((d_nu f)_lam)``.

    The left side weights ``|f_lam^|^2`` with the on-shell momentum
    component directly; the right side goes through the derivative packet.
    """
    mass, weight = _single_atom(model)
    f = orbit.base
    if not f.is_real():
        raise exceptions.DomainError("Energy-momentum transfer needs a real function")
    if not 0 <= axis < model.dim:
        raise exceptions.DomainError(f"Axis {axis} out of range for d={model.dim}")
    factor = orbit.factor(model, lam, settings) ** 2 * weight
    scaled = orbit.at(lam)

    def weighted(momenta):
        return momenta[..., axis] * np.abs(scaled.fourier(momenta)) ** 2

    direct = quadrature.shell_integral(
        model.dim, mass, weighted, scaled.momentum_scale, settings
    )
    derived = wightman.w2_mass(
        model.dim, mass, scaled, testfn.scale(testfn.derivative(f, axis), lam), settings
    )
    return EmtIdentity(factor * abs(direct.value), factor * abs(derived.value) / lam)


def emt_relative_differences(sides, rtol):
    """``|lhs - rhs| / max(lhs, rhs)`` for each :class:`EmtIdentity`.

    The denominator is floored at ``rtol`` times the largest side in
    ``sides``, so axes on which the transfer vanishes by parity report
    their quadrature noise relative to the non-vanishing axes.
    """
    sides = list(sides)
    floor = rtol * max((max(side.lhs, side.rhs) for side in sides), default=0.0)
    return [
        abs(side.lhs - side.rhs) / max(side.lhs, side.rhs, floor, 1e-300) for side in sides
    ]


def emt_radius(model, orbit, lam, quantile=0.9, settings=quadrature.DEFAULT_SETTINGS):
    """Radius ``R`` with a fraction ``quantile`` of the one-particle
    energy-momentum density ``|f_lam^(p)|^2 / (2 omega_p)`` inside ``|p| <= R``.

    Generalized free fields use the mass-integrated density.
    """
    if not 0 < quantile < 1:
        raise exceptions.DomainError(f"Quantile must lie in (0, 1), got {quantile}")
    if not orbit.base.is_real():
        raise exceptions.DomainError("Energy-momentum transfer needs a real function")
    scaled = orbit.at(lam)
    scale = scaled.momentum_scale
    nodes = 2 * settings.radial_nodes

    def density(momenta):
        return np.abs(scaled.fourier(momenta)) ** 2

    def inside(radius):
        if radius <= 0:
            return 0.0
        radii, weights = quadrature.interval_rule(nodes, radius)
        return spectral.integrate_mass(
            model.measure,
            lambda mass: complex(
                weights
                @ quadrature.shell_density(model.dim, mass, density, radii, settings)
            ),
        ).value.real

    total = spectral.integrate_mass(
        model.measure,
        lambda mass: quadrature.shell_integral(
            model.dim, mass, density, scale, settings
        ),
    ).value.real
    if not total > 0:
        raise exceptions.NumericalError("Energy-momentum density vanishes", lam=lam)

    target = quantile * total
    upper = scale
    for _ in range(64):
        if inside(upper) > target:
            break
        upper *= 2.0
    else:
        raise exceptions.NumericalError("Could not bracket the momentum quantile", lam=lam)
    return optimize.brentq(
        lambda radius: inside(radius) - target,
        0.0,
        upper,
        xtol=1e-14 * upper,
        rtol=1e-13,
    )


####################################
# ORBIT CONDITIONS                 #
####################################

PROXY_NOTE = (
    "operator norms replaced by vacuum-vector norms ||(W(g_a) - W(g)) Omega|| (proxy)"
)
SUPPORT_NOTE = (
    "localization checked on effective supports holding all but eps_supp of the L1 mass"
)


def _halvings(shift, count):
    shift = np.asarray(shift, dtype=float)
    return [shift / 2**k for k in range(count + 1)]


def orbit_condition_report(
    model,
    orbit,
    lambdas,
    displacements,
    halvings=4,
    settings=quadrature.DEFAULT_SETTINGS,
    threads=1,
):
    """Computable surrogates of the three orbit conditions.

    * ``alpha``: sup over ``lambdas`` of ``||W(N_lam f_lam) Omega||``.
    * ``beta``: the effective support of ``f_lam`` lies in ``lam * region``.
    * ``gamma``: for each displacement ``a`` and its successive halvings,
      ``s(a) = sup_lam ||(W(g_{lam a}) - W(g)) Omega||`` with
      ``g = N_lam f_lam``, and whether ``s`` decreases along the halvings.

    :returns: dict with ``alpha``, ``beta`` and ``gamma`` sections.
    """
    if not orbit.base.is_real():
        raise exceptions.DomainError("Orbit conditions are checked on real (Weyl) orbits")
    lambdas = [float(lam) for lam in lambdas]
    carriers = {
        lam: orbit.factor(model, lam, settings) * orbit.at(lam) for lam in lambdas
    }

    norms = utils.parallel_map(
        lambda lam: wightman.weyl_vector_norm(model, carriers[lam], settings),
        lambdas,
        threads,
    )
    localized = [
        all(
            orbit.region_at(lam).contains(support)
            for support in testfn.effective_support(orbit.at(lam), orbit.eps_supp)
        )
        for lam in lambdas
    ]
    LOGGER.warning("Localization verdict is a surrogate: %s", SUPPORT_NOTE)

    sequences = []
    for displacement in displacements:
        shifts = _halvings(utils.as_vector(displacement, model.dim, "displacement"), halvings)
        sups = []
        for shift in shifts:
            proxies = utils.parallel_map(
                lambda lam, shift=shift: math.sqrt(
                    max(
                        wightman.weyl_continuity_proxy(
                            model, carriers[lam], lam * shift, settings
                        ),
                        0.0,
                    )
                ),
                lambdas,
                threads,
            )
            sups.append(max(proxies))
        ratios = [
            earlier / later if later > 0 else math.inf
            for earlier, later in zip(sups, sups[1:])
        ]
        sequences.append(
            {
                "displacement": [float(value) for value in shifts[0]],
                "sup_proxy": sups,
                "ratios": ratios,
                "monotone": all(later <= earlier for earlier, later in zip(sups, sups[1:])),
            }
        )

    return {
        "lambdas": lambdas,
        "alpha": {"norms": norms, "sup_norm": max(norms), "bounded": math.isfinite(max(norms))},
        "beta": {
            "localized": localized,
            "holds": all(localized),
            "eps_supp": orbit.eps_supp,
            "note": SUPPORT_NOTE,
        },
        "gamma": {"label": "proxy", "note": PROXY_NOTE, "sequences": sequences},
    }
