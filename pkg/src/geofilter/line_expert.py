"""First-stage reduction: suppress edges in ignorance regions, then cluster
the survivors into collectors."""

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np

from .core import Collector, IgnoranceRegion, PixelPoint


def apply_ignorance(raw_edges: Sequence[PixelPoint],
                    psi: Sequence[IgnoranceRegion]) -> Tuple[List[PixelPoint], int]:
    """Drop every edge lying inside any ignorance region (boundary inclusive).
    Returns the kept edges in input order and the dropped count."""
    if not psi or not raw_edges:
        return list(raw_edges), 0
    pts = np.array([(p.x, p.y) for p in raw_edges])
    drop = np.zeros(len(raw_edges), dtype=bool)
    for r in psi:
        dx = pts[:, 0] - r.loc.x
        dy = pts[:, 1] - r.loc.y
        if r.ty == 1:
            drop |= dx * dx + dy * dy <= r.extent[0] ** 2
        else:
            drop |= (np.abs(dx) <= r.extent[0]) & (np.abs(dy) <= r.extent[1])
    kept = [p for p, d in zip(raw_edges, drop) if not d]
    return kept, int(drop.sum())


def group_edges(kept: Sequence[PixelPoint],
                mu_0: float) -> Tuple[List[Tuple[PixelPoint, int]], List[Collector]]:
    """Greedy single-pass clustering in input order.

    Each edge joins the first collector whose center is within mu_0; the center
    is updated to the running centroid.  Unmatched edges seed new collectors.
    """
    # parallel arrays for the vectorized distance test
    cap = max(16, len(kept))
    centers = np.empty((cap, 2))
    counts: List[int] = []
    n_col = 0
    for p in kept:
        if n_col:
            dx = centers[:n_col, 0] - p.x
            dy = centers[:n_col, 1] - p.y
            hit = np.nonzero(dx * dx + dy * dy <= mu_0 * mu_0)[0]
        else:
            hit = ()
        if len(hit):
            i = int(hit[0])
            n = counts[i] + 1
            centers[i, 0] += (p.x - centers[i, 0]) / n
            centers[i, 1] += (p.y - centers[i, 1]) / n
            counts[i] = n
        else:
            if n_col == cap:
                cap *= 2
                grown = np.empty((cap, 2))
                grown[:n_col] = centers[:n_col]
                centers = grown
            centers[n_col] = (p.x, p.y)
            counts.append(1)
            n_col += 1
    collectors = [Collector(center=PixelPoint(float(centers[i, 0]), float(centers[i, 1])),
                            radius=mu_0, count=counts[i])
                  for i in range(n_col)]
    chi = [(c.center, c.count) for c in collectors]
    return chi, collectors
