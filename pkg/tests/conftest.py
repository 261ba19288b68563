import math

import pytest
from hypothesis import settings

from hgpdc import dispersion as disp
from hgpdc import phasematch as pm
from hgpdc.amplitude import PumpSpec

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

RECIPES = __import__("pathlib").Path(__file__).resolve().parent.parent / "recipes"


@pytest.fixture(scope="session")
def fig2_geometry():
    return pm.ProcessGeometry(disp.BBO, "I", 0.355, math.radians(34.9), (pm.Segment(5e-3),))


@pytest.fixture(scope="session")
def fig2_pump():
    return PumpSpec(0.355, waist_fwhm=60e-6)


@pytest.fixture(scope="session")
def gvm_geometry():
    return pm.ProcessGeometry(disp.BBO, "II", 0.400, math.radians(37.5), (pm.Segment(5e-3),))


@pytest.fixture(scope="session")
def stack_geometry():
    segs = (pm.Segment(5e-3, 3e-3),) * 3 + (pm.Segment(5e-3),)
    return pm.ProcessGeometry(disp.BBO, "II", 0.400, math.radians(37.5), segs)


@pytest.fixture(scope="session")
def pulsed_pump():
    return PumpSpec(0.400, duration_fwhm=1.2e-12)
