import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import exceptions

####################################
# SPACETIME CONVENTIONS            #
####################################

# Metric signature (+, -, ..., -). The Fourier convention used everywhere is
#
#     f^(p) = \int exp(i (p^0 x^0 - p.x)) f(x) d^d x
#
# so momentum-space formulas pair the covariant vector (p^0, -p) with x
# through the Euclidean dot product.
SPACETIME_DIMS = (2, 3, 4)

FOURIER_CONVENTION = "f^(p) = int exp(i(p0 x0 - p.x)) f(x) d^d x"


def check_dim(dim):
    """Return ``dim`` as an int or raise ``DomainError``."""
    if int(dim) != dim or int(dim) not in SPACETIME_DIMS:
        raise exceptions.DomainError(
            f"Spacetime dimension must be one of {SPACETIME_DIMS}, got {dim!r}"
        )
    return int(dim)


def minkowski_metric(dim):
    """Return the Minkowski metric diag(1, -1, ..., -1) as an array."""
    signature = -np.ones(dim)
    signature[0] = 1.0
    return np.diag(signature)


def minkowski_square(x):
    """Return x^0 x^0 - |x|^2 along the last axis of ``x``."""
    x = np.asarray(x, dtype=float)
    return x[..., 0] ** 2 - np.sum(x[..., 1:] ** 2, axis=-1)


def lower_index(p):
    """Return (p^0, -p) so that ``lower_index(p) . x`` is the Minkowski pairing."""
    p = np.array(p, dtype=float, copy=True)
    p[..., 1:] *= -1.0
    return p


def as_vector(values, dim, name="vector"):
    """Return ``values`` as a float tuple of length ``dim``."""
    vector = tuple(float(value) for value in np.ravel(values))
    if len(vector) != dim:
        raise exceptions.DomainError(
            f"{name} must have {dim} components, got {len(vector)}"
        )
    if not all(math.isfinite(value) for value in vector):
        raise exceptions.DomainError(f"{name} must be finite, got {vector!r}")
    return vector


####################################
# DETERMINISTIC REDUCTIONS         #
####################################


def stable_sum(values):
    """Sum (complex) ``values`` with ``math.fsum`` on each part.

    The result does not depend on the order in which the values were
    produced, which keeps threaded and serial runs bit-identical.
    """
    values = [complex(value) for value in values]
    return complex(
        math.fsum(value.real for value in values),
        math.fsum(value.imag for value in values),
    )


def parallel_map(func, items, threads=1):
    """Return ``[func(item) for item in items]``, optionally on a thread pool.

    Results come back in input order whatever the number of threads.
    """
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=int(threads)) as executor:
        return list(executor.map(func, items))


####################################
# NUMBER FORMATTING                #
####################################

SIGNIFICANT_DIGITS = 12


def round_significant(value, digits=SIGNIFICANT_DIGITS):
    """Round a float to ``digits`` significant digits (non-finite unchanged)."""
    value = float(value)
    if value == 0.0 or not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")
