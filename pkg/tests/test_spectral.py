import math
from unittest import TestCase

import numpy as np
import pytest

import scalelab
from scalelab import spectral


class TestMeasures(TestCase):
    def test_free_field(self):
        model = scalelab.free_field(4, 1.5)
        assert model.dim == 4
        assert model.measure.atoms == ((1.5, 1.0),)
        assert model.measure.total() == 1.0
        assert "m=1.5" in model.label

    def test_massless_d2_rejected(self):
        with pytest.raises(scalelab.DomainError):
            scalelab.free_field(2, 0.0)
        density = scalelab.DensityDescriptor(support=(0.0, 1.0))
        with pytest.raises(scalelab.DomainError):
            scalelab.SpectralMeasure(2, density=density)
        # the same density is fine in d=3
        assert scalelab.SpectralMeasure(3, density=density).density is density

    def test_invalid_atoms(self):
        with pytest.raises(scalelab.DomainError):
            scalelab.SpectralMeasure(3, atoms=((-1.0, 1.0),))
        with pytest.raises(scalelab.DomainError):
            scalelab.SpectralMeasure(3, atoms=((1.0, 0.0),))
        with pytest.raises(scalelab.DomainError):
            scalelab.SpectralMeasure(3)

    def test_invalid_densities(self):
        with pytest.raises(scalelab.DomainError):
            scalelab.DensityDescriptor(support=(2.0, 1.0))
        with pytest.raises(scalelab.DomainError):
            scalelab.DensityDescriptor(support=(0.0, 1.0), rule="log-legendre")
        with pytest.raises(scalelab.DomainError):
            scalelab.DensityDescriptor(support=(0.0, 1.0), power=-1.0)
        with pytest.raises(scalelab.DomainError):
            scalelab.DensityDescriptor(support=(0.0, 1.0), rule="simpson")
        with pytest.raises(scalelab.DomainError):
            scalelab.DensityDescriptor(support=(0.0, 1.0), nodes=2)

    def test_log_periodic_validation(self):
        with pytest.raises(scalelab.DomainError):
            scalelab.LogPeriodic(epsilon=1.0, tau=2.0)
        with pytest.raises(scalelab.DomainError):
            scalelab.LogPeriodic(epsilon=0.5, tau=1.0)
        modulation = scalelab.LogPeriodic(epsilon=0.5, tau=4.0, m1=1.0)
        masses = np.array([1.0, math.sqrt(2.0), 2.0, 2.0 * math.sqrt(2.0)])
        np.testing.assert_allclose(modulation(masses), [1.0, 1.5, 1.0, 0.5], atol=1e-14)

    def test_log_periodic_gff(self):
        model = scalelab.log_periodic_gff(3, 1.5, 0.5, 4.0, 1.0, (0.1, 1e5), rule="log-legendre")
        density = model.measure.density
        assert density.power == 3.0
        assert density.log_periodic == scalelab.LogPeriodic(0.5, 4.0, 1.0)
        assert model.measure.atoms == ()

    def test_model_record_round_trip(self):
        model = scalelab.ModelSpec(
            3,
            scalelab.SpectralMeasure(
                3,
                atoms=((1.0, 0.5),),
                density=scalelab.DensityDescriptor(
                    support=(0.5, 2.0),
                    power=1.0,
                    log_periodic=scalelab.LogPeriodic(0.2, 3.0),
                    cutoff=1.5,
                    nodes=32,
                ),
            ),
            "mixed",
        )
        assert scalelab.ModelSpec.from_record(model.to_record()) == model

    def test_dimension_mismatch(self):
        with pytest.raises(scalelab.DomainError):
            scalelab.ModelSpec(4, scalelab.SpectralMeasure(3, atoms=((1.0, 1.0),)))


class TestIntegrateMass(TestCase):
    def test_atoms(self):
        measure = scalelab.SpectralMeasure(3, atoms=((1.0, 2.0), (3.0, 0.5)))
        result = scalelab.integrate_mass(measure, lambda m: m + 1j)
        assert result.value == 2.0 * (1 + 1j) + 0.5 * (3 + 1j)
        assert result.abs_error == 0.0

    def test_polynomial_density_is_exact(self):
        measure = scalelab.SpectralMeasure(
            3, density=scalelab.DensityDescriptor(support=(0.0, 2.0), nodes=16)
        )
        result = scalelab.integrate_mass(measure, lambda m: m**2)
        assert result.value == pytest.approx(8.0 / 3.0, rel=1e-13)
        assert result.abs_error < 1e-12

    def test_log_rule(self):
        measure = scalelab.SpectralMeasure(
            3,
            density=scalelab.DensityDescriptor(
                support=(0.1, 10.0), power=-1.0, rule="log-legendre", nodes=16
            ),
        )
        result = scalelab.integrate_mass(measure, lambda m: 1.0)
        assert result.value == pytest.approx(math.log(100.0), rel=1e-13)

    def test_kernel_errors_are_propagated(self):
        measure = scalelab.SpectralMeasure(3, atoms=((1.0, 2.0),))
        result = scalelab.integrate_mass(
            measure, lambda m: spectral.MassIntegral(1.0 + 0j, 1e-6)
        )
        assert result.abs_error == pytest.approx(2e-6)

    def test_non_finite_kernel(self):
        measure = scalelab.SpectralMeasure(3, atoms=((1.0, 1.0), (2.0, 1.0)))
        with pytest.raises(scalelab.NumericalError) as excinfo:
            scalelab.integrate_mass(measure, lambda m: math.nan if m == 2.0 else 1.0)
        assert excinfo.value.diagnostics["m"] == 2.0

    def test_thread_count_does_not_change_result(self):
        measure = scalelab.SpectralMeasure(
            3,
            atoms=((0.5, 1.0),),
            density=scalelab.DensityDescriptor(
                support=(0.1, 10.0),
                power=2.0,
                log_periodic=scalelab.LogPeriodic(0.5, 4.0),
                rule="log-legendre",
                nodes=64,
            ),
        )

        def kernel(m):
            return math.exp(-m) * (1 + 1j * m)

        serial = scalelab.integrate_mass(measure, kernel, threads=1)
        threaded = scalelab.integrate_mass(measure, kernel, threads=4)
        assert serial == threaded
