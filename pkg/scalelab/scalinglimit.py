"""Scaling limits of correlators along explicit lambda-sequences.

Limits are taken along geometric sequences ``lam_k = lam0 * q**(k + phase)``
and accelerated with Aitken's delta-squared process. Running several
phases over the same probes exposes limits that depend on the chosen
subsequence, which is how degenerate scaling limits are detected.
"""

import logging
import math
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import exceptions
from . import quadrature
from . import rgflow
from . import spectral
from . import utils
from . import wightman

LOGGER = logging.getLogger(__name__)

MIN_SEQUENCE_LENGTH = 6
MAX_CONDITION = 1e15

CLASSICAL = "classical"
QUANTUM = "quantum"
DEGENERATE = "degenerate"
INCONCLUSIVE = "inconclusive"
VERDICTS = (CLASSICAL, QUANTUM, DEGENERATE, INCONCLUSIVE)

PASS = "pass"
FAIL = "fail"

APPROXIMATION_NOTE = (
    "isomorphy classes are compared at correlator level: equality of limit "
    "two-point and commutator values over the probe set"
)

MasslessComparison = namedtuple("MasslessComparison", "residual z reference")


@dataclass(frozen=True)
class Tolerances:
    """Relative tolerances of the limit extraction and the classifier.

    :param float conv: Agreement of the last three accelerated values,
        relative to the largest raw value.
    :param float triv: Threshold for a vanishing limit, relative to the
        probe's value at lam = 1.
    :param float deg: Threshold for sequence dependence of a limit.
    :param float stab: Tolerance of the structural checks (dilation,
        spectrum fit, local stability).
    """

    conv: float = 1e-4
    triv: float = 1e-3
    deg: float = 1e-2
    stab: float = 1e-2

    def __post_init__(self):
        for name in ("conv", "triv", "deg", "stab"):
            if not getattr(self, name) > 0:
                raise exceptions.DomainError(f"Tolerance {name} must be positive")

    def scaled(self, factor):
        return Tolerances(
            self.conv * factor, self.triv * factor, self.deg * factor, self.stab * factor
        )

    def to_record(self):
        return {"conv": self.conv, "triv": self.triv, "deg": self.deg, "stab": self.stab}


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class LambdaSequence:
    """lam_k = lambda0 * ratio**(k + phase) for k = 0, ..., length - 1."""

    lambda0: float = 1.0
    ratio: float = 0.5
    length: int = 10
    phase: float = 0.0

    def __post_init__(self):
        if not self.lambda0 > 0:
            raise exceptions.DomainError(f"lambda0 must be positive, got {self.lambda0}")
        if not 0 < self.ratio < 1:
            raise exceptions.DomainError(f"Ratio must lie in (0, 1), got {self.ratio}")
        if int(self.length) != self.length or self.length < MIN_SEQUENCE_LENGTH:
            raise exceptions.DomainError(
                f"Sequences need at least {MIN_SEQUENCE_LENGTH} points, got {self.length}"
            )
        if not 0 <= self.phase < 1:
            raise exceptions.DomainError(f"Phase must lie in [0, 1), got {self.phase}")

    @property
    def values(self):
        return tuple(
            self.lambda0 * self.ratio ** (k + self.phase) for k in range(self.length)
        )

    def refined(self):
        """Sequence with ratio sqrt(q) and 2K - 1 points containing this one."""
        return LambdaSequence(
            self.lambda0 * self.ratio**self.phase,
            math.sqrt(self.ratio),
            2 * self.length - 1,
            0.0,
        )

    def to_record(self):
        return {
            "lambda0": self.lambda0,
            "ratio": self.ratio,
            "length": self.length,
            "phase": self.phase,
        }


@dataclass(frozen=True)
class LimitEstimate:
    """Raw sequence values, their Aitken acceleration and the extrapolation.

    Points whose evaluation failed are listed in ``failed`` and left out of
    ``lambdas``/``values``/``errors``.
    """

    lambdas: tuple
    values: tuple
    errors: tuple
    accelerated: tuple
    limit: complex
    error: float
    converged: bool
    failed: tuple = ()

    def to_record(self):
        return {
            "limit": self.limit,
            "error": self.error,
            "converged": self.converged,
            "lambdas": list(self.lambdas),
            "values": list(self.values),
            "errors": list(self.errors),
            "accelerated": list(self.accelerated),
            "failed": list(self.failed),
        }


####################################
# LIMIT EXTRACTION                 #
####################################


def aitken(values):
    """Aitken delta-squared transform of a complex sequence.

    ``A_k = v_{k+2} - (v_{k+2} - v_{k+1})**2 / (v_{k+2} - 2 v_{k+1} + v_k)``;
    where the second difference vanishes to rounding, ``A_k = v_{k+2}``.
    """
    values = [complex(value) for value in values]
    scale = max((abs(value) for value in values), default=0.0)
    accelerated = []
    for first, second, third in zip(values, values[1:], values[2:]):
        step = third - second
        curvature = step - (second - first)
        if abs(curvature) <= 1e-14 * scale:
            accelerated.append(third)
        else:
            accelerated.append(third - step * step / curvature)
    return accelerated


def estimate_limit(lambdas, values, errors=None, tol=DEFAULT_TOLERANCES.conv, failed=()):
    """Extrapolate ``values`` (taken at decreasing ``lambdas``) to lam -> 0.

    The estimate has converged iff the last three accelerated values agree
    within ``tol`` times the largest raw value. Its error is the largest of
    that spread, a third of the distance from the last raw value and the
    quadrature error of the last raw value.

    :raises ScalingLimitError: if no values are given.
    """
    values = tuple(complex(value) for value in values)
    lambdas = tuple(float(lam) for lam in lambdas)
    errors = tuple(float(e) for e in (errors or [0.0] * len(values)))
    if not values:
        raise exceptions.ScalingLimitError("No sequence point could be evaluated")
    accelerated = tuple(aitken(values))
    last = values[-1]
    if len(accelerated) < 3:
        limit = accelerated[-1] if accelerated else last
        return LimitEstimate(
            lambdas, values, errors, accelerated, limit, math.inf, False, tuple(failed)
        )
    tail = accelerated[-3:]
    spread = max(abs(a - b) for a in tail for b in tail)
    limit = tail[-1]
    error = max(spread, abs(last - limit) / 3.0, errors[-1])
    scale = max(abs(value) for value in values)
    converged = spread <= tol * scale
    return LimitEstimate(
        lambdas, values, errors, accelerated, limit, error, converged, tuple(failed)
    )


def _evaluate_sequence(evaluate, lambdas, threads):
    def attempt(lam):
        try:
            return evaluate(lam)
        except exceptions.NumericalError as err:
            LOGGER.warning("Sequence point lam=%.6g failed: %s", lam, err)
            return None

    results = utils.parallel_map(attempt, lambdas, threads)
    kept = [(lam, result) for lam, result in zip(lambdas, results) if result is not None]
    failed = tuple(lam for lam, result in zip(lambdas, results) if result is None)
    if not kept:
        raise exceptions.ScalingLimitError("All sequence points failed")
    return kept, failed


def limit_correlator(
    model,
    orbit_f,
    orbit_g,
    seq,
    tolerances=DEFAULT_TOLERANCES,
    settings=quadrature.DEFAULT_SETTINGS,
    threads=1,
):
    """Limit of ``scaled_w2(model, orbit_f, orbit_g, lam)`` along ``seq``.

    :returns: :class:`LimitEstimate`.
    :raises ScalingLimitError: if every point of the sequence failed.
    """
    if orbit_f.dim != model.dim or orbit_g.dim != model.dim:
        raise exceptions.DomainError("Orbits and model differ in dimension")
    kept, failed = _evaluate_sequence(
        lambda lam: rgflow.scaled_w2(model, orbit_f, orbit_g, lam, settings),
        seq.values,
        threads,
    )
    return estimate_limit(
        [lam for lam, _ in kept],
        [result.value for _, result in kept],
        [result.abs_error for _, result in kept],
        tolerances.conv,
        failed,
    )


def sigma_estimate(estimate, tol=DEFAULT_TOLERANCES.conv):
    """Limit of ``N_lam**2 sigma(f_lam, g_lam) = 2 Im scaled_w2`` from the
    raw values of a two-point estimate.
    """
    return estimate_limit(
        estimate.lambdas,
        [2.0 * value.imag for value in estimate.values],
        [2.0 * error for error in estimate.errors],
        tol,
        estimate.failed,
    )


####################################
# CLASSIFICATION                   #
####################################


@dataclass(frozen=True)
class SequenceEvidence:
    sequence: LambdaSequence
    two_point: LimitEstimate
    commutator: LimitEstimate


@dataclass(frozen=True)
class ProbeEvidence:
    """Limits of one probe pair along every sequence.

    ``reference`` is ``|scaled_w2|`` at lam = 1, the magnitude that the
    triviality threshold is relative to.
    """

    probe: str
    reference: float
    sequences: tuple

    def converged(self):
        return all(
            item.two_point.converged and item.commutator.converged
            for item in self.sequences
        )


@dataclass(frozen=True)
class Verdict:
    kind: str
    evidence: tuple
    tolerances: Tolerances
    reason: str = ""
    failing: tuple = ()
    degenerate_test: bool = True
    note: str = APPROXIMATION_NOTE

    def rows(self):
        """Evidence table: one row per probe, sequence and lambda."""
        rows = []
        for probe in self.evidence:
            for index, item in enumerate(probe.sequences):
                estimate = item.two_point
                for lam, value, error in zip(
                    estimate.lambdas, estimate.values, estimate.errors
                ):
                    rows.append(
                        {
                            "probe": probe.probe,
                            "sequence": f"s{index}",
                            "lambda": lam,
                            "re": value.real,
                            "im": value.imag,
                            "err": error,
                        }
                    )
        return rows

    def to_record(self):
        return {
            "verdict": self.kind,
            "reason": self.reason,
            "failing": list(self.failing),
            "degenerate_test": self.degenerate_test,
            "note": self.note,
            "tolerances": self.tolerances.to_record(),
            "probes": [
                {
                    "probe": probe.probe,
                    "reference": probe.reference,
                    "sequences": [
                        {
                            "sequence": item.sequence.to_record(),
                            "two_point": item.two_point.to_record(),
                            "commutator": item.commutator.to_record(),
                        }
                        for item in probe.sequences
                    ],
                }
                for probe in self.evidence
            ],
        }


def _spread(limits):
    return max((abs(a - b) for a in limits for b in limits), default=0.0)


def decide(evidence, tolerances=DEFAULT_TOLERANCES, degenerate_test=True):
    """Apply the decision rule to ``evidence``; returns ``(kind, reason, failing)``.

    * any estimate not converged: inconclusive;
    * some probe whose two-point or commutator limits differ across
      sequences by more than ``deg * max(max |L|, triv * reference)``:
      degenerate (only with ``degenerate_test``);
    * all limits at most ``triv * reference``: classical;
    * otherwise quantum.
    """
    failing = tuple(probe.probe for probe in evidence if not probe.converged())
    if failing:
        return INCONCLUSIVE, "limits did not converge", failing
    if degenerate_test:
        for probe in evidence:
            for attribute in ("two_point", "commutator"):
                limits = [getattr(item, attribute).limit for item in probe.sequences]
                scale = max(
                    max(abs(limit) for limit in limits), tolerances.triv * probe.reference
                )
                gap = _spread(limits)
                if gap > tolerances.deg * scale:
                    return (
                        DEGENERATE,
                        f"{attribute} limits of {probe.probe} differ by {gap:.6g} "
                        f"(relative {gap / scale:.6g}) across sequences",
                        (),
                    )
    trivial = all(
        abs(getattr(item, attribute).limit) <= tolerances.triv * probe.reference
        for probe in evidence
        for item in probe.sequences
        for attribute in ("two_point", "commutator")
    )
    if trivial:
        return CLASSICAL, "all limits vanish", ()
    return QUANTUM, "non-vanishing limits independent of the sequence", ()


def classify(
    model,
    probes,
    sequences,
    tolerances=DEFAULT_TOLERANCES,
    settings=quadrature.DEFAULT_SETTINGS,
    threads=1,
):
    """Classify the scaling limit of ``model`` on a set of orbit pairs.

    :param ModelSpec model: The field.
    :param list probes: ``(orbit_f, orbit_g)`` pairs; at least one must
        have a non-vanishing commutator at lam = 1.
    :param list sequences: :class:`LambdaSequence` objects, normally at
        least two with distinct phases.
    :returns: :class:`Verdict`.
    """
    probes = list(probes)
    sequences = list(sequences)
    if not probes:
        raise exceptions.DomainError("classify needs at least one probe pair")
    if not sequences:
        raise exceptions.DomainError("classify needs at least one sequence")
    if len(set(sequences)) != len(sequences):
        raise exceptions.DomainError("Sequences must be distinct")
    degenerate_test = len(sequences) > 1
    if not degenerate_test:
        LOGGER.warning(
            "Single sequence supplied: degenerate scaling limits cannot be detected"
        )

    references = utils.parallel_map(
        lambda pair: rgflow.scaled_w2(model, pair[0], pair[1], 1.0, settings).value,
        probes,
        threads,
    )
    if not any(
        abs(2.0 * value.imag) > tolerances.triv * abs(value) for value in references
    ):
        raise exceptions.DomainError(
            "No probe pair has a non-vanishing commutator at lambda = 1"
        )

    evidence = []
    for index, ((orbit_f, orbit_g), reference) in enumerate(zip(probes, references)):
        items = []
        for seq in sequences:
            estimate = limit_correlator(
                model, orbit_f, orbit_g, seq, tolerances, settings, threads
            )
            items.append(
                SequenceEvidence(seq, estimate, sigma_estimate(estimate, tolerances.conv))
            )
        evidence.append(ProbeEvidence(f"p{index}", abs(reference), tuple(items)))

    kind, reason, failing = decide(evidence, tolerances, degenerate_test)
    LOGGER.info("Verdict %s: %s", kind, reason)
    return Verdict(
        kind, tuple(evidence), tolerances, reason, failing, degenerate_test
    )


####################################
# STRUCTURE OF THE LIMIT           #
####################################


def compare_to_massless(limits, probes, settings=quadrature.DEFAULT_SETTINGS, threads=1):
    """Fit ``L_p = Z * W0(f_p, g_p)`` with the massless two-point function.

    :param limits: A quantum :class:`Verdict` (its first sequence is used)
        or one complex limit per probe.
    :param list probes: ``(orbit_f, orbit_g)`` pairs; the base functions
        enter ``W0`` unscaled.
    :returns: :class:`MasslessComparison` with the maximal residual
        ``|L_p - Z W0_p|`` relative to ``max_q |Z W0_q|``.
    :raises ScalingLimitError: if all ``W0`` vanish or ``Z <= 0``.
    """
    if isinstance(limits, Verdict):
        if limits.kind != QUANTUM:
            raise exceptions.ScalingLimitError(
                f"Massless comparison needs a quantum verdict, got {limits.kind}"
            )
        limits = [probe.sequences[0].two_point.limit for probe in limits.evidence]
    limits = np.asarray([complex(value) for value in limits])
    probes = list(probes)
    if len(limits) != len(probes):
        raise exceptions.DomainError("One limit per probe pair is required")
    massless = spectral.free_field(probes[0][0].dim, 0.0)
    reference = np.asarray(
        utils.parallel_map(
            lambda pair: wightman.w2(massless, pair[0].base, pair[1].base, settings).value,
            probes,
            threads,
        )
    )
    norm = float(np.sum(np.abs(reference) ** 2))
    if not norm > 1e-300:
        raise exceptions.ScalingLimitError("All massless reference values vanish")
    z = float(np.real(np.sum(np.conj(reference) * limits)) / norm)
    if not z > 0:
        raise exceptions.ScalingLimitError(f"Fitted normalization {z:.6g} is not positive")
    fitted = z * reference
    residual = float(np.max(np.abs(limits - fitted)) / np.max(np.abs(fitted)))
    return MasslessComparison(residual, z, tuple(complex(value) for value in reference))


def dilation_check(
    model,
    orbit_f,
    orbit_g,
    seq,
    mus=(0.5, 2.0),
    tolerances=DEFAULT_TOLERANCES,
    settings=quadrature.DEFAULT_SETTINGS,
    threads=1,
):
    """Check ``L(f_mu, g_mu) = mu**(d+2) L(f, g)`` for the limit.

    The dilated orbits keep the renormalization of the original ones.
    """
    exponent = model.dim + 2
    base = limit_correlator(model, orbit_f, orbit_g, seq, tolerances, settings, threads)
    entries = []
    status = PASS if base.converged else INCONCLUSIVE
    for mu in mus:
        mu = float(mu)
        dilated = limit_correlator(
            model, orbit_f.dilated(mu), orbit_g.dilated(mu), seq, tolerances, settings, threads
        )
        expected = mu**exponent * base.limit
        deviation = abs(dilated.limit - expected) / max(abs(expected), 1e-300)
        allowed = tolerances.stab + 3 * (dilated.error + mu**exponent * base.error) / max(
            abs(expected), 1e-300
        )
        passed = deviation <= allowed
        if not dilated.converged:
            status = INCONCLUSIVE
        elif not passed and status == PASS:
            status = FAIL
        entries.append(
            {
                "mu": mu,
                "limit": dilated.limit,
                "expected": expected,
                "relative_deviation": deviation,
                "converged": dilated.converged,
                "passed": passed,
            }
        )
    return {
        "exponent": exponent,
        "base_limit": base.limit,
        "base_converged": base.converged,
        "entries": entries,
        "status": status,
    }


def translation_family_limits(
    model,
    orbit,
    seq,
    times,
    tolerances=DEFAULT_TOLERANCES,
    settings=quadrature.DEFAULT_SETTINGS,
    threads=1,
):
    """Limits of ``scaled_w2(orbit, orbit translated by t e_0)`` for each time.

    Both the base function and the region of the second orbit are moved.
    """
    estimates = []
    for time in times:
        shift = np.zeros(model.dim)
        shift[0] = float(time)
        estimates.append(
            limit_correlator(
                model, orbit, orbit.translated(shift), seq, tolerances, settings, threads
            )
        )
    return estimates


def _mode_basis(times, energies):
    phases = np.exp(1j * np.outer(times, energies))
    return np.vstack([phases.real, phases.imag])


def spectrum_condition_check(times, values, tol=DEFAULT_TOLERANCES.stab, oversampling=8):
    """Fit ``L(t) = sum_j w_j exp(i E_j t)`` with ``w_j >= 0`` and ``E_j >= 0``.

    The energies are spaced by ``pi / (oversampling * T)`` up to the Nyquist
    energy ``pi / dt`` of the (uniform, symmetric) time grid. Continuous
    spectra, such as the free field limits, need the fine default grid;
    with ``oversampling=2`` only modes on the coarse grid are fitted well.
    The weights come from non-negative least squares on the real-stacked
    system. The check passes iff the relative residual is at most ``tol``. A second,
    unconstrained-sign fit over energies of both signs reports the weight
    fraction at negative energy.

    :param times: Symmetric, uniformly spaced times.
    :param values: Complex limits or :class:`LimitEstimate` objects.
    :returns: dict with ``status``, ``residual``, ``negative_fraction``,
        ``condition``, ``energies`` and ``weights``.
    """
    times = np.asarray(times, dtype=float)
    values = list(values)
    if len(times) != len(values) or len(times) < 3:
        raise exceptions.DomainError("Need at least three (time, value) pairs")
    converged = True
    if values and isinstance(values[0], LimitEstimate):
        converged = all(estimate.converged for estimate in values)
        values = [estimate.limit for estimate in values]
    values = np.asarray([complex(value) for value in values])
    steps = np.diff(np.sort(times))
    if np.ptp(steps) > 1e-9 * np.max(np.abs(times)):
        raise exceptions.DomainError("Times must be uniformly spaced")
    horizon = float(np.max(np.abs(times)))
    spacing = math.pi / (oversampling * horizon)
    nyquist = math.pi / float(steps[0])
    energies = np.arange(0.0, nyquist + 0.5 * spacing, spacing)

    target = np.concatenate([values.real, values.imag])
    norm = float(np.linalg.norm(target))
    if norm == 0:
        raise exceptions.DomainError("Cannot fit an identically vanishing function")
    basis = _mode_basis(times, energies)
    weights, misfit = optimize.nnls(basis, target)
    residual = misfit / norm
    active = weights > 0
    condition = float(np.linalg.cond(basis[:, active])) if np.any(active) else math.inf

    symmetric = np.concatenate([-energies[:0:-1], energies])
    both, _ = optimize.nnls(_mode_basis(times, symmetric), target)
    total = float(np.sum(both))
    negative = float(np.sum(both[symmetric < 0]) / total) if total > 0 else 0.0

    if not converged or condition > MAX_CONDITION:
        status = INCONCLUSIVE
    else:
        status = PASS if residual <= tol else FAIL
    LOGGER.debug(
        "Spectrum fit: residual %.3g, negative fraction %.3g, condition %.3g",
        residual,
        negative,
        condition,
    )
    return {
        "status": status,
        "residual": float(residual),
        "negative_fraction": negative,
        "condition": condition,
        "energies": energies.tolist(),
        "weights": weights.tolist(),
    }


def time_reflected(values):
    """The dataset ``t -> L(-t)`` on a symmetric grid, which carries
    negative energies and must fail :func:`spectrum_condition_check`.
    """
    return list(values)[::-1]
