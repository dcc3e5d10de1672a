import itertools
import math
import pathlib

import yaml

import scalelab

from .constants import CONFIGS_DIR
from .constants import WIDTH

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent


def d3_gaussian_norm(mass, width=WIDTH):
    """W_m(f, f) in d=3 for the centred Gaussian ``exp(-w**2 x**2 / 2)``."""
    return (
        math.pi**2
        * math.sqrt(math.pi / 2)
        / width**5
        * math.exp(mass**2 / width**2)
        * math.erfc(math.sqrt(2) * mass / width)
    )


def relative_difference(a, b):
    return abs(a - b) / max(abs(a), abs(b))


def random_gaussian(rng, dim, poly=None):
    """Real Gaussian with random widths, centre and amplitude."""
    return scalelab.TestFunction.gaussian(
        dim,
        widths=rng.uniform(1.0, 1.5, dim),
        center=rng.uniform(-0.3, 0.3, dim),
        amplitude=rng.uniform(0.5, 1.0),
        poly=poly,
    )


def _central_mixed_difference(function, order, step):
    total = 0j
    for signs in itertools.product((1, -1), repeat=order):
        total += math.prod(signs) * function([step * sign for sign in signs])
    return total / (2 * step) ** order


def mixed_derivative(function, order, step=1e-3):
    """d^n F / ds_1 ... ds_n at the origin for ``F([s_1, ..., s_n])``.

    Central differences at ``step`` and ``step / 2``, combined by one
    Richardson step.
    """
    coarse = _central_mixed_difference(function, order, step)
    fine = _central_mixed_difference(function, order, step / 2)
    return (4 * fine - coarse) / 3


def load_example(name):
    path = REPO_ROOT / CONFIGS_DIR / name
    with open(path, encoding="utf-8") as handle:
        return yaml.safe_load(handle)


def write_config(directory, config, name="run.yaml"):
    path = pathlib.Path(directory) / name
    path.write_text(yaml.safe_dump(config), encoding="utf-8")
    return str(path)
