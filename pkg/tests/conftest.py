from __future__ import annotations

import pytest

from catrew.core import FinGraph


@pytest.fixture
def dot():
    """Single vertex, no edges."""
    return FinGraph(["v"], {})


@pytest.fixture
def e2():
    """Two vertices joined by one edge a -> b."""
    return FinGraph(["a", "b"], {"e": ("a", "b")})


@pytest.fixture
def l1():
    """One vertex with a self-loop."""
    return FinGraph(["u"], {"loop": ("u", "u")})
