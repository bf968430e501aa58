"""Shared fixtures: kernels of the three Gaussian regimes, ReLU, tanh and the identity."""

import numpy as np
import pytest

from critfield.core.constants import HIGH_DISORDER_A2, LOW_DISORDER_A2, SPARSE_A2
from critfield.core.models import Activation
from critfield.kernel import build_kernel


@pytest.fixture(scope="module")
def low_kernel():
    return build_kernel(Activation.gaussian(a2=LOW_DISORDER_A2))


@pytest.fixture(scope="module")
def sparse_kernel():
    return build_kernel(Activation.gaussian(a2=SPARSE_A2))


@pytest.fixture(scope="module")
def high_kernel():
    return build_kernel(Activation.gaussian(a2=HIGH_DISORDER_A2))


@pytest.fixture(scope="module")
def relu_kernel():
    return build_kernel(Activation.relu())


@pytest.fixture(scope="module")
def tanh_kernel():
    return build_kernel(Activation.tanh())


@pytest.fixture(scope="module")
def identity_kernel():
    xs = np.linspace(-12.0, 12.0, 49)
    return build_kernel(Activation.numeric_table(xs, xs))
