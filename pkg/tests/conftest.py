import pytest

from sigforge import _pykernels, kernels
from sigforge.sampling import RngStream


@pytest.fixture
def rng():
    return RngStream(12345, 0)


def backends():
    out = [pytest.param(_pykernels, id="python")]
    core = kernels.load_compiled()
    if core is not None:
        out.append(pytest.param(core, id="compiled"))
    return out
