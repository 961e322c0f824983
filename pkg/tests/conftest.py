from __future__ import annotations

import numpy as np

from aksoliton.catalog import get_entry, list_entries
from aksoliton.expr import coefficient


def compatible_metric(entry, params):
    """Metric making the entry's form compatible: canonical for canonical forms,
    g^T g for the recorded basis change g otherwise."""
    spec = entry.extra.get("basis_change")
    if spec is None:
        return None
    g = np.array([[coefficient(v, params) for v in row] for row in spec["matrix"]])
    if spec.get("apply_inverse"):
        g = np.linalg.inv(g)
    return g.T @ g


def catalog_instances():
    """(id, params, mu, omega, metric) for every entry with bracket data."""
    out = []
    for eid in list_entries():
        entry = get_entry(eid)
        if not entry.has_bracket:
            continue
        for p in entry.samples():
            out.append((eid, p, entry.bracket(p), entry.form(p), compatible_metric(entry, p)))
    return out
