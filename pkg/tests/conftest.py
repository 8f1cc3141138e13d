import math

import pytest

from fermi_spectra import make_domain, reconstruct_from_curvature, width_profile


@pytest.fixture(scope="session")
def rectangle():
    # straight spine, constant width 0.4: the strip [0, pi] x [0, 0.4]
    curve = reconstruct_from_curvature(math.pi, lambda s: 0.0)
    width = width_profile(lambda s: 0.4, math.pi)
    return make_domain(curve, width)


@pytest.fixture(scope="session")
def annulus():
    # constant curvature -0.5, constant width 0.5: annular sector, radii 1.5..2
    curve = reconstruct_from_curvature(math.pi, lambda s: -0.5)
    width = width_profile(lambda s: 0.5, math.pi)
    return make_domain(curve, width)


@pytest.fixture(scope="session")
def wavy():
    # variable even width on a curved spine; jacobian stays positive
    curve = reconstruct_from_curvature(math.pi, lambda s: -0.5)
    width = width_profile(
        lambda s: 0.3 + 0.1 * math.cos(2.0 * math.pi * s / math.pi), math.pi
    )
    return make_domain(curve, width)
