"""Size caps for exhaustive computations.

The caps are plain attributes on :data:`caps` and can be changed at runtime::

    from qubokit.config import caps
    caps.brute_force = 32
"""

from dataclasses import dataclass

from .errors import ResourceCapError


@dataclass
class Caps:
    array: int = 20        # dense (2^n, ...) arrays: all_bitvectors_array, probabilities
    exact: int = 26        # streaming exact sums: log partition, marginals
    brute_force: int = 30  # exhaustive solver
    enumerate: int = 20    # free variables in enumerate_matches


caps = Caps()


def check_cap(what: str, n: int, cap: int) -> None:
    if n > cap:
        raise ResourceCapError(what, n, cap)
