"""Scaling limits of free and generalized free quantum fields."""

import logging

from .curved import CurvedTwoPoint
from .curved import NormalChart
from .curved import SpacetimeModel
from .curved import exp_map
from .curved import local_stability_report
from .curved import minkowski_w0
from .curved import scaled_pointpair_2pt
from .exceptions import ConfigError
from .exceptions import DomainError
from .exceptions import NumericalError
from .exceptions import ScaleLabError
from .exceptions import ScalingLimitError
from .polynomial import Polynomial
from .quadrature import DEFAULT_SETTINGS
from .quadrature import QuadratureSettings
from .rgflow import AutoNormalized
from .rgflow import PowerLaw
from .rgflow import ScalingOrbit
from .rgflow import Tabulated
from .rgflow import canonical_exponent
from .rgflow import emt_identity
from .rgflow import emt_radius
from .rgflow import fit_renorm_exponent
from .rgflow import orbit_condition_report
from .rgflow import scaled_npoint
from .rgflow import scaled_w2
from .rgflow import scaled_weyl
from .scalinglimit import CLASSICAL
from .scalinglimit import DEFAULT_TOLERANCES
from .scalinglimit import DEGENERATE
from .scalinglimit import INCONCLUSIVE
from .scalinglimit import LambdaSequence
from .scalinglimit import LimitEstimate
from .scalinglimit import QUANTUM
from .scalinglimit import Tolerances
from .scalinglimit import Verdict
from .scalinglimit import aitken
from .scalinglimit import classify
from .scalinglimit import compare_to_massless
from .scalinglimit import dilation_check
from .scalinglimit import estimate_limit
from .scalinglimit import limit_correlator
from .scalinglimit import spectrum_condition_check
from .scalinglimit import time_reflected
from .scalinglimit import translation_family_limits
from .spectral import DensityDescriptor
from .spectral import LogPeriodic
from .spectral import ModelSpec
from .spectral import SpectralMeasure
from .spectral import free_field
from .spectral import integrate_mass
from .spectral import log_periodic_gff
from .testfn import Ellipsoid
from .testfn import GaussianPacket
from .testfn import TestFunction
from .testfn import boost
from .testfn import conjugate
from .testfn import derivative
from .testfn import effective_support
from .testfn import fourier
from .testfn import lorentz_boost
from .testfn import scale
from .testfn import translate
from .validate import report_string
from .validate import validate
from .wightman import WeylWord
from .wightman import commutator_sigma
from .wightman import npoint_wick
from .wightman import symmetric_mu
from .wightman import w2
from .wightman import w2_mass
from .wightman import weyl_continuity_proxy
from .wightman import weyl_correlator
from .wightman import weyl_vector_norm

LOGGER = logging.getLogger(__name__)
LOGGER.addHandler(logging.NullHandler())
__version__ = "0.1.0"

__all__ = [
    "AutoNormalized",
    "CLASSICAL",
    "ConfigError",
    "CurvedTwoPoint",
    "DEFAULT_SETTINGS",
    "DEFAULT_TOLERANCES",
    "DEGENERATE",
    "DensityDescriptor",
    "DomainError",
    "Ellipsoid",
    "GaussianPacket",
    "INCONCLUSIVE",
    "LambdaSequence",
    "LimitEstimate",
    "LogPeriodic",
    "ModelSpec",
    "NormalChart",
    "NumericalError",
    "Polynomial",
    "PowerLaw",
    "QUANTUM",
    "QuadratureSettings",
    "ScaleLabError",
    "ScalingLimitError",
    "ScalingOrbit",
    "SpacetimeModel",
    "SpectralMeasure",
    "Tabulated",
    "TestFunction",
    "Tolerances",
    "Verdict",
    "WeylWord",
    "__version__",
    "aitken",
    "boost",
    "canonical_exponent",
    "classify",
    "commutator_sigma",
    "compare_to_massless",
    "conjugate",
    "derivative",
    "dilation_check",
    "effective_support",
    "emt_identity",
    "emt_radius",
    "estimate_limit",
    "exp_map",
    "fit_renorm_exponent",
    "fourier",
    "free_field",
    "integrate_mass",
    "limit_correlator",
    "local_stability_report",
    "log_periodic_gff",
    "lorentz_boost",
    "minkowski_w0",
    "npoint_wick",
    "orbit_condition_report",
    "report_string",
    "scale",
    "scaled_npoint",
    "scaled_pointpair_2pt",
    "scaled_w2",
    "scaled_weyl",
    "spectrum_condition_check",
    "symmetric_mu",
    "time_reflected",
    "translate",
    "translation_family_limits",
    "validate",
    "w2",
    "w2_mass",
    "weyl_continuity_proxy",
    "weyl_correlator",
    "weyl_vector_norm",
]
