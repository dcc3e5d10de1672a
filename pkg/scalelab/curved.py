"""Local stability at a point of a conformally flat spacetime.

Spacetimes are spatially flat FRW models in conformal coordinates,
``g = a(eta)**2 * diag(1, -1, ..., -1)``, with the conformally coupled
massless scalar field in its conformal vacuum. Its two-point function is
the Minkowski one divided by ``(a(eta) a(eta'))**((d-2)/2)``, evaluated
pointwise at spacelike separation. Normal coordinates at a base point are
built by integrating geodesics numerically.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy import special

from . import exceptions
from . import scalinglimit
from . import testfn
from . import utils

LOGGER = logging.getLogger(__name__)

MINKOWSKI = "minkowski"
POWER_LAW = "power_law"
DE_SITTER = "de_sitter"
KINDS = (MINKOWSKI, POWER_LAW, DE_SITTER)
CURVED_DIMS = (3, 4)

STABLE = "stable"
UNSTABLE = "unstable"

DEFAULT_SEQUENCE = scalinglimit.LambdaSequence(lambda0=0.32, ratio=0.5, length=6)

POINTWISE_NOTE = (
    "pointwise off-diagonal correlators at spacelike separation replace smeared ones"
)
DYNAMICS_NOTE = (
    "dynamical content limited to translation invariance of the limit; "
    "irreducibility and propagator families are not checked"
)


####################################
# SPACETIMES                       #
####################################


@dataclass(frozen=True)
class SpacetimeModel:
    """Spatially flat FRW spacetime in conformal coordinates.

    :param str kind: ``minkowski``; ``power_law`` with ``a = eta**exponent``
        on ``eta > 0``; or ``de_sitter`` with ``a = -1 / (hubble * eta)`` on
        ``eta < 0``.
    :param int dim: 3 or 4.
    """

    kind: str = MINKOWSKI
    dim: int = 4
    hubble: float = 1.0
    exponent: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise exceptions.DomainError(f"Unknown spacetime kind {self.kind!r}")
        if self.dim not in CURVED_DIMS:
            raise exceptions.DomainError(
                f"Conformal vacuum states are provided for d in {CURVED_DIMS}, "
                f"got {self.dim}"
            )
        if self.kind == DE_SITTER and not self.hubble > 0:
            raise exceptions.DomainError("Hubble rate must be positive")

    def in_domain(self, eta):
        if self.kind == POWER_LAW:
            return eta > 0
        if self.kind == DE_SITTER:
            return eta < 0
        return True

    def _check(self, eta):
        if not np.all(self.in_domain(np.asarray(eta))):
            raise exceptions.DomainError(
                f"Conformal time outside the {self.kind} patch: {eta}"
            )

    def scale_factor(self, eta):
        self._check(eta)
        eta = np.asarray(eta, dtype=float)
        if self.kind == POWER_LAW:
            return eta**self.exponent
        if self.kind == DE_SITTER:
            return -1.0 / (self.hubble * eta)
        return np.ones_like(eta)

    def hubble_rate(self, eta):
        """a'(eta) / a(eta)."""
        if self.kind == POWER_LAW:
            return self.exponent / eta
        if self.kind == DE_SITTER:
            return -1.0 / eta
        return 0.0

    def metric(self, eta):
        return float(self.scale_factor(eta)) ** 2 * utils.minkowski_metric(self.dim)

    def to_record(self):
        record = {"kind": self.kind, "dim": self.dim}
        if self.kind == DE_SITTER:
            record["hubble"] = self.hubble
        if self.kind == POWER_LAW:
            record["exponent"] = self.exponent
        return record

    @classmethod
    def from_record(cls, record):
        return cls(
            kind=record.get("kind", MINKOWSKI),
            dim=int(record.get("dim", 4)),
            hubble=float(record.get("hubble", 1.0)),
            exponent=float(record.get("exponent", 1.0)),
        )


####################################
# NORMAL CHARTS                    #
####################################


@dataclass(frozen=True)
class NormalChart:
    """Riemannian normal coordinates at ``base_point``.

    :param SpacetimeModel spacetime: The spacetime.
    :param tuple base_point: Conformal coordinates of p.
    :param frame: Columns are the frame vectors e_a at p in conformal
        coordinates; defaults to ``identity / a(p)``.
    :param float max_radius: Largest Euclidean norm of tangent components
        for which the chart is used.
    :param float rtol: Relative tolerance of the geodesic integrator.
    :param float atol: Absolute tolerance of the geodesic integrator.
    :param str method: ``scipy.integrate.solve_ivp`` method.
    """

    spacetime: SpacetimeModel
    base_point: tuple
    frame: tuple = None
    max_radius: float = 1.0
    rtol: float = 1e-10
    atol: float = 1e-12
    method: str = "RK45"

    def __post_init__(self):
        dim = self.spacetime.dim
        point = utils.as_vector(self.base_point, dim, "base point")
        object.__setattr__(self, "base_point", point)
        if not self.spacetime.in_domain(point[0]):
            raise exceptions.DomainError(
                f"Base point {point} outside the {self.spacetime.kind} patch"
            )
        frame = self.frame
        if frame is None:
            frame = np.eye(dim) / float(self.spacetime.scale_factor(point[0]))
        frame = np.asarray(frame, dtype=float)
        if frame.shape != (dim, dim):
            raise exceptions.DomainError(f"Frame must be a {dim}x{dim} matrix")
        gram = frame.T @ self.spacetime.metric(point[0]) @ frame
        if np.max(np.abs(gram - utils.minkowski_metric(dim))) > 1e-10:
            raise exceptions.DomainError("Frame is not orthonormal at the base point")
        object.__setattr__(self, "frame", tuple(tuple(row) for row in frame))
        if not self.max_radius > 0:
            raise exceptions.DomainError("max_radius must be positive")

    @property
    def dim(self):
        return self.spacetime.dim

    @property
    def _frame(self):
        return np.array(self.frame)

    def metric_at_base(self):
        """Metric components at p in the chart (the Minkowski matrix)."""
        frame = self._frame
        return frame.T @ self.spacetime.metric(self.base_point[0]) @ frame

    def with_frame(self, transformation):
        """Chart at the same point with frame ``frame @ transformation``."""
        return NormalChart(
            self.spacetime,
            self.base_point,
            self._frame @ np.asarray(transformation, dtype=float),
            self.max_radius,
            self.rtol,
            self.atol,
            self.method,
        )

    def _geodesic(self, v):
        dim = self.dim
        spacetime = self.spacetime

        def rhs(_, state):
            position, velocity = state[:dim], state[dim : 2 * dim]
            rate = spacetime.hubble_rate(position[0])
            square = velocity[0] ** 2 - np.dot(velocity[1:], velocity[1:])
            acceleration = -2.0 * rate * velocity[0] * velocity
            acceleration[0] += rate * square
            speed = float(spacetime.scale_factor(position[0])) * math.sqrt(abs(square))
            return np.concatenate([velocity, acceleration, [speed]])

        def leaves_patch(_, state):
            return state[0]

        leaves_patch.terminal = True

        start = np.concatenate([self.base_point, self._frame @ v, [0.0]])
        events = None if spacetime.kind == MINKOWSKI else leaves_patch
        solution = integrate.solve_ivp(
            rhs,
            (0.0, 1.0),
            start,
            method=self.method,
            rtol=self.rtol,
            atol=self.atol,
            events=events,
        )
        if solution.status != 0:
            raise exceptions.DomainError(
                f"Geodesic integration failed for v={v.tolist()}: {solution.message}"
            )
        return solution.y[:, -1]

    def _tangent(self, v):
        v = np.asarray(utils.as_vector(v, self.dim, "tangent vector"))
        if np.linalg.norm(v) > self.max_radius:
            raise exceptions.DomainError(
                f"Tangent vector {v.tolist()} outside the chart radius {self.max_radius}"
            )
        return v

    def exp_map(self, v):
        """exp_p(sum_a v^a e_a) in conformal coordinates."""
        v = self._tangent(v)
        if self.spacetime.kind == MINKOWSKI:
            return np.asarray(self.base_point) + self._frame @ v
        return self._geodesic(v)[: self.dim]

    def geodesic_length(self, v):
        """Metric length of the geodesic from p to ``exp_map(v)``."""
        v = self._tangent(v)
        if self.spacetime.kind == MINKOWSKI:
            return math.sqrt(abs(utils.minkowski_square(v)))
        return float(self._geodesic(v)[-1])


def exp_map(chart, v):
    return chart.exp_map(v)


####################################
# CONFORMAL VACUUM                 #
####################################


def minkowski_w0(dim, separation):
    """Massless Minkowski vacuum two-point function at spacelike separation.

    ``Gamma(d/2 - 1) / (4 pi**(d/2)) * (-x**2)**(-(d-2)/2)``.

    :raises DomainError: for causal or coincident separations.
    """
    square = float(utils.minkowski_square(separation))
    if not square < 0:
        raise exceptions.DomainError(
            f"Points are not spacelike separated (x^2 = {square:.6g})"
        )
    prefactor = special.gamma(dim / 2 - 1) / (4 * math.pi ** (dim / 2))
    return prefactor * (-square) ** (-(dim - 2) / 2)


@dataclass(frozen=True)
class CurvedTwoPoint:
    """Conformal vacuum two-point kernel of ``spacetime``.

    ``log_modulation`` multiplies the kernel by
    ``1 + log_modulation * sin(ln sqrt(-(x - x')**2))``, a state without a
    scaling limit.
    """

    spacetime: SpacetimeModel
    log_modulation: float = 0.0

    def kernel(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        dim = self.spacetime.dim
        separation = x - y
        value = minkowski_w0(dim, separation)
        weight = float(self.spacetime.scale_factor(x[0]) * self.spacetime.scale_factor(y[0]))
        value /= weight ** ((dim - 2) / 2)
        if self.log_modulation:
            distance = math.sqrt(-float(utils.minkowski_square(separation)))
            value *= 1.0 + self.log_modulation * math.sin(math.log(distance))
        return value


def scaled_pointpair_2pt(state, chart, x, y, lam):
    """lam**(d-2) * K(exp_p(lam x), exp_p(lam y)) for spacelike ``x - y``."""
    dim = chart.dim
    x = np.asarray(utils.as_vector(x, dim, "x"))
    y = np.asarray(utils.as_vector(y, dim, "y"))
    if not float(utils.minkowski_square(x - y)) < 0:
        raise exceptions.DomainError("Probe points must be spacelike separated")
    if not lam > 0:
        raise exceptions.DomainError(f"lambda must be positive, got {lam}")
    value = state.kernel(chart.exp_map(lam * x), chart.exp_map(lam * y))
    return lam ** (dim - 2) * value


####################################
# LOCAL STABILITY                  #
####################################


def _probe_limit(state, chart, pair, seq, tolerances):
    x, y = pair
    lambdas = seq.values
    values = [scaled_pointpair_2pt(state, chart, x, y, lam) for lam in lambdas]
    return scalinglimit.estimate_limit(lambdas, values, tol=tolerances.conv)


def _agree(first, second, tolerance):
    scale = max(abs(first.limit), abs(second.limit))
    deviation = abs(first.limit - second.limit)
    allowed = tolerance * scale + 3 * (first.error + second.error)
    return deviation, deviation <= allowed


def local_stability_report(
    state,
    chart,
    probes,
    seq=DEFAULT_SEQUENCE,
    translation=None,
    boost_rapidity=0.3,
    tolerances=scalinglimit.DEFAULT_TOLERANCES,
    threads=1,
):
    """Correlator-level local stability checks at the chart's base point.

    :param CurvedTwoPoint state: The state.
    :param NormalChart chart: Normal chart at p.
    :param list probes: Spacelike ``(x, y)`` pairs in chart components.
    :param LambdaSequence seq: Scales approaching 0.
    :param translation: Shift ``a``; the duplicates ``(x + a, y + a)`` are
        added to the probe set. Defaults to ``0.1 e_1``.
    :param float boost_rapidity: Rapidity of the frame change of the
        second chart.
    :returns: dict with ``existence``, ``translation``, ``frame`` and
        ``identification`` sections and an overall ``verdict``.
    """
    dim = chart.dim
    probes = [
        (np.asarray(utils.as_vector(x, dim, "x")), np.asarray(utils.as_vector(y, dim, "y")))
        for x, y in probes
    ]
    if not probes:
        raise exceptions.DomainError("local_stability_report needs probe pairs")
    if translation is None:
        translation = np.zeros(dim)
        translation[1] = 0.1
    translation = np.asarray(utils.as_vector(translation, dim, "translation"))
    shifted = [(x + translation, y + translation) for x, y in probes]
    boosted = chart.with_frame(testfn.lorentz_boost(dim, boost_rapidity))

    def limit_of(job):
        which, pair = job
        return _probe_limit(state, boosted if which == "boosted" else chart, pair, seq, tolerances)

    jobs = (
        [("base", pair) for pair in probes]
        + [("base", pair) for pair in shifted]
        + [("boosted", pair) for pair in probes]
    )
    limits = utils.parallel_map(limit_of, jobs, threads)
    count = len(probes)
    base, moved, framed = limits[:count], limits[count : 2 * count], limits[2 * count :]

    existence = [estimate.converged for estimate in limits]
    translation_checks = [_agree(a, b, tolerances.stab) for a, b in zip(base, moved)]
    frame_checks = [_agree(a, b, tolerances.stab) for a, b in zip(base, framed)]

    reference = np.array([minkowski_w0(dim, x - y) for x, y in probes + shifted])
    values = np.array([estimate.limit for estimate in base + moved])
    z = float(np.dot(reference, values) / np.dot(reference, reference))
    residual = float(np.max(np.abs(values - z * reference)) / np.max(np.abs(z * reference)))

    passed = {
        "existence": all(existence),
        "translation": all(ok for _, ok in translation_checks),
        "frame": all(ok for _, ok in frame_checks),
        "identification": z > 0 and residual <= tolerances.stab,
    }
    if not passed["existence"]:
        verdict = scalinglimit.INCONCLUSIVE
    elif all(passed.values()):
        verdict = STABLE
    else:
        verdict = UNSTABLE
    LOGGER.info("Local stability at %s: %s", chart.base_point, verdict)

    return {
        "verdict": verdict,
        "spacetime": chart.spacetime.to_record(),
        "base_point": list(chart.base_point),
        "lambdas": list(seq.values),
        "tolerances": tolerances.to_record(),
        "existence": {
            "passed": passed["existence"],
            "converged": existence,
            "limits": [estimate.limit for estimate in limits],
            "errors": [estimate.error for estimate in limits],
        },
        "translation": {
            "passed": passed["translation"],
            "shift": translation.tolist(),
            "deviations": [deviation for deviation, _ in translation_checks],
        },
        "frame": {
            "passed": passed["frame"],
            "boost_rapidity": boost_rapidity,
            "deviations": [deviation for deviation, _ in frame_checks],
        },
        "identification": {
            "passed": passed["identification"],
            "z": z,
            "residual": residual,
        },
        "notes": [POINTWISE_NOTE, DYNAMICS_NOTE],
    }
