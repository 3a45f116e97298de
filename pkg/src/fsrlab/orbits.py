"""Forward orbits of base vertices under the subdivision map."""

from __future__ import annotations


def orbit_cycle(vmap: list[int], v: int) -> tuple[list[int], list[int]]:
    """Split the forward orbit of ``v`` into its preperiodic tail and its cycle."""
    seen: dict[int, int] = {}
    path = []
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        v = vmap[v]
    start = seen[v]
    return path[:start], path[start:]


def ideal_vertices(vmap: list[int], degrees: list[int]) -> list[int]:
    """Vertices whose orbit enters a cycle with local-degree product > 1.

    Valences obey ``val_{n+1}(v) = d_v * val_n(f(v))``, so the valence of ``v``
    at level ``n`` is the degree product along the first ``n`` orbit steps
    times a level-0 valence; it is unbounded exactly when the periodic part
    of the orbit carries a degree > 1.
    """
    ideal = []
    for v in range(len(vmap)):
        _, cycle = orbit_cycle(vmap, v)
        prod = 1
        for w in cycle:
            prod *= degrees[w]
        if prod > 1:
            ideal.append(v)
    return ideal
