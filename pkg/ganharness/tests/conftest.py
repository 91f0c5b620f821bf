import pytest

import toydata


@pytest.fixture(scope="session")
def paired_data(tmp_path_factory):
    """Read-only 16-pair toy dataset; returns the manifest path."""
    root = tmp_path_factory.mktemp("paired_toy")
    return toydata.make_paired_data(root, 16, seed=7)


@pytest.fixture(scope="session")
def unpaired_data(tmp_path_factory):
    """Read-only 12-item toy dataset; returns the manifest path."""
    root = tmp_path_factory.mktemp("unpaired_toy")
    return toydata.make_unpaired_data(root, 12, seed=9)
