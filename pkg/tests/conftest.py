import numpy as np
import pytest

from xylab import ModelParams, full_spectrum

# standard acceptance grid: spans phases 1-3, the V-line (h=1), the H-line
# (eta=0, h<1) and the C-line point (0.6, 0.8); chosen to avoid accidental
# zero modes on the eta=0 rows for every even n <= 12
H_GRID = (0.25, 0.6, 0.9, 1.0, 2.0)
ETA_GRID = (0.0, 0.3, 0.5, 0.8, 1.0)
T_GRID = (0.1, 0.5, 1.0, 5.0)


@pytest.fixture(scope="session")
def parity_spectra():
    """Memoized dense parity-resolved spectra, shared across test modules."""
    cache = {}

    def get(n, h, eta):
        key = (int(n), float(h), float(eta))
        if key not in cache:
            spec = full_spectrum(ModelParams(h=key[1], eta=key[2], n=key[0]))
            cache[key] = {
                1: spec.eigenvalues[spec.parities == 1],
                -1: spec.eigenvalues[spec.parities == -1],
            }
        return cache[key]

    return get


@pytest.fixture()
def rng():
    return np.random.default_rng(20260809)
