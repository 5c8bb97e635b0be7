import numpy as np
import pytest

from combodose import CompletionConfig, CompletionVariant, DesignKind, DesignParams


@pytest.fixture
def boin():
    return DesignParams(kind=DesignKind.BOIN, phi=0.3)


@pytest.fixture
def keyboard():
    return DesignParams(kind=DesignKind.KEYBOARD, phi=0.3)


@pytest.fixture
def drp_config():
    return CompletionConfig(variant=CompletionVariant.DRP, tau=0.4, cohort_size=3)


@pytest.fixture
def rng():
    return np.random.default_rng(1)


# The 3x3 example trial: cohort DLT counts that produce the count matrix
# ((3,0) at d11, (6,1) at d21, (9,3) at d22, (3,2) at d23, (3,2) at d32)
# under trial seed 1 with N=30 and cohort size 3.
EXAMPLE_OUTCOMES = [0, 1, 0, 0, 2, 1, 2, 2]
EXAMPLE_SEED = 1
EXAMPLE_N = 30
EXAMPLE_DRP = 0.4930069930069921
