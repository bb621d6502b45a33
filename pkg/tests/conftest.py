import pytest

from geofilter.core import ImuSample, default_config


@pytest.fixture
def config():
    return default_config()


@pytest.fixture
def imu():
    return ImuSample(v_v=2.0, a_v=0.0, omega=(0.0, 0.0, 0.0), t_f=1.0)
