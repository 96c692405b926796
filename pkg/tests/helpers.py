"""Small presentations shared by several test modules."""
from gehman.cover_core import explicit_presentation


def odometer_levels(sizes=(4, 16)):
    levels = [{"cells": ["C"], "edges": [["C", "C"]]}]
    homs = []
    prev = 1
    for m in sizes:
        cells = [str(x) for x in range(m)]
        levels.append({"cells": cells, "edges": [[str(x), str((x + 1) % m)] for x in range(m)]})
        homs.append({str(x): (str(x % prev) if prev > 1 else "C") for x in range(m)})
        prev = m
    return levels, homs


def odometer(sizes=(4, 16)):
    return explicit_presentation(*odometer_levels(sizes))


def as_explicit(seq):
    """Levels and homs of a presentation as plain mutable records."""
    levels = [{"cells": list(g.cells), "edges": sorted([u, v] for u, v in g.edges)}
              for g in seq.levels]
    homs = [dict(h.mapping) for h in seq.homs]
    return levels, homs
