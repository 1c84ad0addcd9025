import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from beadtrack import load_bundled  # noqa: E402
from beadtrack.core import EdgePath, tighten  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# maps whose images stay small enough for property tests
SMALL_MAPS = ("example", "identity_rose", "linear", "linear_tower", "fibonacci", "exp_over_fixed", "exp_inp")


@pytest.fixture(scope="session")
def example():
    return load_bundled("example")


@pytest.fixture(scope="session")
def linear():
    return load_bundled("linear")


_cache = {}


def bundled(name):
    if name not in _cache:
        _cache[name] = load_bundled(name)
    return _cache[name]


@st.composite
def walks(draw, fmap, max_len=12, tight=False, min_len=0):
    """A random edge path in ``fmap``'s graph; tight when asked."""
    out_at = {}
    for e in fmap.letters:
        out_at.setdefault(e.origin, []).append(e)
    v = draw(st.sampled_from(sorted(out_at)))
    n = draw(st.integers(min_len, max_len))
    edges = []
    for _ in range(n):
        choices = out_at[v]
        if tight and edges:
            choices = [e for e in choices if e != ~edges[-1]]
        e = draw(st.sampled_from(choices))
        edges.append(e)
        v = e.terminus
    return EdgePath(tuple(edges), edges[0].origin if edges else v)


@st.composite
def map_and_walk(draw, names=SMALL_MAPS, max_len=12, tight=False, min_len=0):
    f = bundled(draw(st.sampled_from(names)))
    return f, draw(walks(f, max_len, tight, min_len))


def tight_walk(draw_result):
    f, p = draw_result
    return f, tighten(p)
