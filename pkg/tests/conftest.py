import pytest

from spectra.algebraic import field_from
from spectra.spectrum import compute_delta, enumerate_patch
from spectra.transition import build_digit_matrices, delta_spectral_data

GOLDEN = "x^2-x-1"
TRIB = "x^3-x^2-x-1"


@pytest.fixture(scope="session")
def golden():
    return field_from(GOLDEN)


@pytest.fixture(scope="session")
def trib():
    return field_from(TRIB)


@pytest.fixture(scope="session")
def golden_family(golden):
    D = compute_delta(golden)
    mats = build_digit_matrices(D)
    return D, mats, delta_spectral_data(mats)


@pytest.fixture(scope="session")
def trib_family(trib):
    D = compute_delta(trib)
    mats = build_digit_matrices(D)
    return D, mats, delta_spectral_data(mats)


@pytest.fixture(scope="session")
def golden_patch8(golden):
    return enumerate_patch(golden, 8)
