"Hypothesis strategies for stable, weakly coupled networks with time-reversal invariant drives."

import numpy as np
from hypothesis import strategies as st

from floquetheat.model import NetworkModel, ReservoirSpec
from floquetheat.spectral import PowerLawCutoff

temperatures = st.floats(0.05, 1.0)
strengths = st.floats(0.005, 0.05)


@st.composite
def spectral_densities(draw):
    return PowerLawCutoff(
        strength=draw(strengths),
        exponent=draw(st.sampled_from([1.0, 2.0])),
        cutoff=draw(st.floats(1.2, 2.0)),
        sharpness=0.1,
    )


@st.composite
def networks(draw, max_sites: int = 2):
    """A chain of 1 to ``max_sites`` oscillators with diagonal-dominant potential,
    2 or 3 reservoirs, and a weak cosine drive away from parametric resonance."""
    n = draw(st.integers(1, max_sites))
    diagonal = draw(st.lists(st.floats(0.8, 1.6), min_size=n, max_size=n))
    v_static = np.diag(diagonal)
    for i in range(n - 1):
        # With nonzero bonds every normal mode has weight on the first site, where the
        # first reservoir sits.
        bond = draw(st.floats(0.05, 0.2)) * draw(st.sampled_from([-1.0, 1.0]))
        v_static[i, i + 1] = v_static[i + 1, i] = bond
    v1 = draw(st.floats(0.01, 0.05)) * np.eye(n)
    drive_freq = draw(st.floats(0.3, 0.6))
    m = draw(st.integers(2, 3))
    reservoirs = [
        ReservoirSpec.on_sites(
            [0 if i == 0 else draw(st.integers(0, n - 1))], n, draw(spectral_densities()), draw(temperatures), f"r{i}"
        )
        for i in range(m)
    ]
    return NetworkModel.cosine_drive(np.eye(n), v_static, v1, drive_freq), reservoirs
