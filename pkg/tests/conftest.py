import numpy as np
import pytest

from disjoint_link import _kernels
from disjoint_link.data import Dataset, FeatureSchema


def _available_backends():
    backends = ["numpy"]
    if _kernels._HAVE_NUMBA:
        backends.append("numba")
    return backends


@pytest.fixture(params=_available_backends())
def backend(request):
    return request.param


def numeric_dataset(X, y, ds_id="test"):
    X = np.asarray(X, dtype=float)
    schema = tuple(FeatureSchema(f"f{j}", "numeric") for j in range(X.shape[1]))
    return Dataset(schema, X, np.asarray(y), ds_id)


@pytest.fixture
def make_dataset():
    return numeric_dataset
