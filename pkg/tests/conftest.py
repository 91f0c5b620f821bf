import numpy as np
import pytest

import helpers


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def frame():
    return helpers.make_frame()


@pytest.fixture
def sequence_dir(tmp_path):
    """One 8-frame plane sequence with lateral camera motion."""
    root = tmp_path / "seq_a"
    helpers.write_sequence(root, n_frames=8, seed=3)
    return root
