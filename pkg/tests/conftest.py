from __future__ import annotations

import pytest


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    """Trigger JIT compilation (or cache loading) once so timed tests measure work only."""
    from divlab import constructions as C
    from divlab.canon import canonical_form
    from divlab.family import covering_number, diversity, is_intersecting, matching_number

    tiny = C.complete(4, 2)
    diversity(tiny, 1)
    covering_number(tiny)
    matching_number(tiny)
    is_intersecting(tiny)
    canonical_form(tiny)
    yield
