"""Källén-Lehmann spectral measures.

A generalized free scalar field is determined by a positive measure
d rho(m) on the masses: its two-point function is the rho-average of the
free two-point functions. Measures here are a finite list of atoms plus an
optional density on a compact interval, described by a small serializable
grammar (power law, optional log-periodic modulation, optional Gaussian
cutoff).
"""

import logging
import math
from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from . import exceptions
from . import quadrature
from . import utils

LOGGER = logging.getLogger(__name__)

RULES = ("legendre", "log-legendre")
DEFAULT_MASS_NODES = 128

MassIntegral = namedtuple("MassIntegral", "value abs_error")


@dataclass(frozen=True)
class LogPeriodic:
    """Modulation ``1 + epsilon * sin(2 pi ln(m / m1) / ln(tau))``."""

    epsilon: float
    tau: float
    m1: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.epsilon < 1.0:
            raise exceptions.DomainError(
                f"Modulation amplitude must lie in [0, 1), got {self.epsilon}"
            )
        if not self.tau > 1.0:
            raise exceptions.DomainError(f"Period base must exceed 1, got {self.tau}")
        if not self.m1 > 0.0:
            raise exceptions.DomainError(
                f"Reference mass must be positive, got {self.m1}"
            )

    def __call__(self, masses):
        phase = 2 * np.pi * np.log(masses / self.m1) / math.log(self.tau)
        return 1.0 + self.epsilon * np.sin(phase)


@dataclass(frozen=True)
class DensityDescriptor:
    """Density ``m**power * modulation(m) * exp(-(m/cutoff)**2)`` on ``support``.

    :param tuple support: ``(m_lo, m_hi)`` with ``0 <= m_lo < m_hi < inf``.
    :param float power: Exponent of the power law.
    :param LogPeriodic log_periodic: Optional modulation.
    :param float cutoff: Optional Gaussian cutoff scale.
    :param int nodes: Nodes of the fine Gauss-Legendre rule; the error
        estimate compares against ``nodes // 2``.
    :param str rule: ``legendre`` (uniform in m) or ``log-legendre``
        (uniform in ln m, requires ``m_lo > 0``).
    """

    support: tuple
    power: float = 0.0
    log_periodic: LogPeriodic = None
    cutoff: float = None
    nodes: int = DEFAULT_MASS_NODES
    rule: str = "legendre"

    def __post_init__(self):
        lo, hi = (float(value) for value in self.support)
        object.__setattr__(self, "support", (lo, hi))
        if not (0.0 <= lo < hi and math.isfinite(hi)):
            raise exceptions.DomainError(
                f"Density support must satisfy 0 <= m_lo < m_hi < inf, got {self.support}"
            )
        if self.rule not in RULES:
            raise exceptions.DomainError(
                f"Unknown mass quadrature rule {self.rule!r}; use one of {RULES}"
            )
        if self.rule == "log-legendre" and lo == 0.0:
            raise exceptions.DomainError("The log-legendre rule needs m_lo > 0")
        if lo == 0.0 and self.power <= -1.0:
            raise exceptions.DomainError(
                f"m**{self.power} is not integrable at m = 0"
            )
        if self.cutoff is not None and not self.cutoff > 0:
            raise exceptions.DomainError(f"Cutoff must be positive, got {self.cutoff}")
        if int(self.nodes) != self.nodes or self.nodes < 4:
            raise exceptions.DomainError(f"Need at least 4 mass nodes, got {self.nodes}")
        masses, _ = self.rule_nodes()
        values = self(masses)
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise exceptions.DomainError("Density is negative or non-finite on its support")

    def __call__(self, masses):
        masses = np.asarray(masses, dtype=float)
        values = masses**self.power
        if self.log_periodic is not None:
            values = values * self.log_periodic(masses)
        if self.cutoff is not None:
            values = values * np.exp(-((masses / self.cutoff) ** 2))
        return values

    def rule_nodes(self, nodes=None):
        """Masses and weights (density included) of a Gauss-Legendre rule."""
        nodes = self.nodes if nodes is None else nodes
        lo, hi = self.support
        if self.rule == "legendre":
            masses, weights = quadrature.interval_rule(nodes, hi - lo)
            masses = masses + lo
        else:
            logs, weights = quadrature.interval_rule(nodes, math.log(hi / lo))
            masses = lo * np.exp(logs)
            weights = weights * masses
        return masses, weights * self(masses)

    def total(self):
        return float(np.sum(self.rule_nodes()[1]))

    def to_record(self):
        record = {
            "support": list(self.support),
            "power": self.power,
            "nodes": self.nodes,
            "rule": self.rule,
        }
        if self.log_periodic is not None:
            record["log_periodic"] = {
                "epsilon": self.log_periodic.epsilon,
                "tau": self.log_periodic.tau,
                "m1": self.log_periodic.m1,
            }
        if self.cutoff is not None:
            record["cutoff"] = self.cutoff
        return record

    @classmethod
    def from_record(cls, record):
        modulation = record.get("log_periodic")
        return cls(
            support=tuple(record["support"]),
            power=float(record.get("power", 0.0)),
            log_periodic=LogPeriodic(**modulation) if modulation else None,
            cutoff=record.get("cutoff"),
            nodes=int(record.get("nodes", DEFAULT_MASS_NODES)),
            rule=record.get("rule", "legendre"),
        )


@dataclass(frozen=True)
class SpectralMeasure:
    """Atoms ``(mass, weight)`` plus an optional density."""

    dim: int
    atoms: tuple = ()
    density: DensityDescriptor = None

    def __post_init__(self):
        utils.check_dim(self.dim)
        atoms = tuple((float(mass), float(weight)) for mass, weight in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms and self.density is None:
            raise exceptions.DomainError("A spectral measure needs atoms or a density")
        for mass, weight in atoms:
            if not (mass >= 0 and math.isfinite(mass)):
                raise exceptions.DomainError(f"Atom mass must be >= 0, got {mass}")
            if not (weight > 0 and math.isfinite(weight)):
                raise exceptions.DomainError(f"Atom weight must be > 0, got {weight}")
        if self.dim == 2:
            if any(mass == 0 for mass, _ in atoms):
                raise exceptions.DomainError(
                    "No massless scalar Wightman field exists in d=2: "
                    "atoms at m=0 are not allowed"
                )
            if self.density is not None and self.density.support[0] == 0:
                raise exceptions.DomainError(
                    "No massless scalar Wightman field exists in d=2: "
                    "the density support must start above m=0"
                )

    def total(self):
        atoms = math.fsum(weight for _, weight in self.atoms)
        return atoms + (self.density.total() if self.density is not None else 0.0)

    def to_record(self):
        record = {
            "atoms": [{"mass": mass, "weight": weight} for mass, weight in self.atoms]
        }
        if self.density is not None:
            record["density"] = self.density.to_record()
        return record

    @classmethod
    def from_record(cls, dim, record):
        density = record.get("density")
        return cls(
            dim=dim,
            atoms=tuple(
                (atom["mass"], atom.get("weight", 1.0)) for atom in record.get("atoms", ())
            ),
            density=DensityDescriptor.from_record(density) if density else None,
        )


@dataclass(frozen=True)
class ModelSpec:
    dim: int
    measure: SpectralMeasure
    label: str = ""

    def __post_init__(self):
        if self.measure.dim != self.dim:
            raise exceptions.DomainError(
                f"Model dimension {self.dim} differs from measure dimension "
                f"{self.measure.dim}"
            )

    def to_record(self):
        return {
            "dim": self.dim,
            "label": self.label,
            "measure": self.measure.to_record(),
        }

    @classmethod
    def from_record(cls, record):
        dim = int(record["dim"])
        return cls(
            dim=dim,
            measure=SpectralMeasure.from_record(dim, record["measure"]),
            label=record.get("label", ""),
        )


####################################
# CONSTRUCTORS                     #
####################################


def free_field(dim, mass, label=None):
    """Free scalar field of mass ``mass`` (single-atom measure)."""
    dim = utils.check_dim(dim)
    if mass < 0:
        raise exceptions.DomainError(f"Mass must be nonnegative, got {mass}")
    measure = SpectralMeasure(dim, atoms=((mass, 1.0),))
    return ModelSpec(dim, measure, label or f"free(d={dim}, m={mass:g})")


def log_periodic_gff(
    dim,
    a,
    epsilon,
    tau,
    m1,
    support,
    nodes=DEFAULT_MASS_NODES,
    rule="legendre",
    cutoff=None,
    label=None,
):
    """Generalized free field with density
    ``m**(2a) * (1 + epsilon * sin(2 pi ln(m/m1) / ln(tau)))`` on ``support``.
    """
    dim = utils.check_dim(dim)
    density = DensityDescriptor(
        support=tuple(support),
        power=2.0 * a,
        log_periodic=LogPeriodic(epsilon, tau, m1),
        cutoff=cutoff,
        nodes=nodes,
        rule=rule,
    )
    measure = SpectralMeasure(dim, density=density)
    return ModelSpec(
        dim, measure, label or f"log-periodic(d={dim}, a={a:g}, eps={epsilon:g})"
    )


####################################
# MASS INTEGRATION                 #
####################################


def _split(result):
    """Kernel results may carry their own error as ``.value``/``.abs_error``."""
    if hasattr(result, "abs_error"):
        return complex(result.value), float(result.abs_error)
    return complex(result), 0.0


def integrate_mass(measure, kernel, threads=1):
    """Return ``int d rho(m) kernel(m)`` as a :class:`MassIntegral`.

    :param SpectralMeasure measure: The measure.
    :param callable kernel: Function of the mass returning a complex number
        or a value with ``value`` and ``abs_error`` attributes.
    :param int threads: Kernel evaluations run on this many threads; the
        result is independent of it.
    :raises NumericalError: on a non-finite kernel value.
    """
    fine_masses = coarse_masses = fine_weights = coarse_weights = np.empty(0)
    if measure.density is not None:
        fine_masses, fine_weights = measure.density.rule_nodes()
        coarse_masses, coarse_weights = measure.density.rule_nodes(
            measure.density.nodes // 2
        )
    masses = (
        [mass for mass, _ in measure.atoms]
        + list(fine_masses)
        + list(coarse_masses)
    )

    def evaluate(mass):
        value, error = _split(kernel(float(mass)))
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise exceptions.NumericalError("Non-finite mass kernel value", m=mass)
        return value, error

    results = utils.parallel_map(evaluate, masses, threads)
    count = len(measure.atoms)
    atoms = results[:count]
    fine = results[count : count + len(fine_masses)]
    coarse = results[count + len(fine_masses) :]

    atom_value = utils.stable_sum(
        weight * value for (_, weight), (value, _) in zip(measure.atoms, atoms)
    )
    error = math.fsum(
        weight * node_error for (_, weight), (_, node_error) in zip(measure.atoms, atoms)
    )
    if not fine:
        return MassIntegral(atom_value, error)

    fine_value = utils.stable_sum(
        weight * value for weight, (value, _) in zip(fine_weights, fine)
    )
    coarse_value = utils.stable_sum(
        weight * value for weight, (value, _) in zip(coarse_weights, coarse)
    )
    node_error = max(node_error for _, node_error in fine + coarse)
    error += abs(fine_value - coarse_value) + float(np.sum(fine_weights)) * node_error
    LOGGER.debug(
        "Mass integral: atoms %r, density %r (rule error %.3g)",
        atom_value,
        fine_value,
        abs(fine_value - coarse_value),
    )
    return MassIntegral(atom_value + fine_value, error)
