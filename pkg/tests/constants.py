import math

import scalelab

# Coarse rules keep the suite fast; closed-form checks below stay well
# inside their tolerance with them.
FAST_SETTINGS = scalelab.QuadratureSettings(
    radial_nodes=64, planar_nodes=32, lebedev_order=23, rtol=1e-7
)

D3_MASSLESS = scalelab.free_field(3, 0.0)
D3_MASSIVE = scalelab.free_field(3, 1.0)
D4_MASSLESS = scalelab.free_field(4, 0.0)
D4_MASSIVE = scalelab.free_field(4, 1.0)

WIDTH = 1.0
D3_F = scalelab.TestFunction.gaussian(3, widths=WIDTH)
D3_G = scalelab.TestFunction.gaussian(3, widths=WIDTH, center=(0.5, 0.3, 0.0))
D4_F = scalelab.TestFunction.gaussian(4, widths=WIDTH)
D4_G = scalelab.TestFunction.gaussian(4, widths=WIDTH, center=(0.5, 0.3, 0.0, 0.0))

# <f, f> for the centred Gaussian of width w, massless field.
D3_MASSLESS_NORM = math.pi**2 * math.sqrt(math.pi / 2) / WIDTH**5
D4_MASSLESS_NORM = math.pi**2 / WIDTH**6

CONFIGS_DIR = "configs"
