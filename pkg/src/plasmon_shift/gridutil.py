"""Frequency-grid construction helpers shared by the quadrature modules."""

from __future__ import annotations

import numpy as np
from scipy.signal import find_peaks, peak_widths


def merge_grids(*parts, lo=None, hi=None, min_sep=1e-12):
    """Union of node sets, sorted, clipped to [lo, hi], near-duplicates dropped."""
    nodes = np.concatenate([np.atleast_1d(np.asarray(p, dtype=float)) for p in parts])
    if lo is not None:
        nodes = nodes[nodes >= lo]
    if hi is not None:
        nodes = nodes[nodes <= hi]
    nodes = np.unique(nodes)
    if nodes.size > 1:
        keep = np.concatenate([[True], np.diff(nodes) > min_sep])
        nodes = nodes[keep]
    return nodes


def geometric_ladder(center, inner, outer, growth=1.2, two_sided=True):
    """Nodes clustering geometrically toward ``center`` from distance ``inner`` out to ``outer``."""
    if inner <= 0 or outer <= inner or growth <= 1.0:
        raise ValueError("need 0 < inner < outer and growth > 1")
    n = int(np.ceil(np.log(outer / inner) / np.log(growth))) + 1
    offsets = inner * growth ** np.arange(n)
    offsets = offsets[offsets <= outer * growth]
    if two_sided:
        return np.concatenate([center - offsets[::-1], [center], center + offsets])
    return center + offsets


def detect_peaks(omega, values, height_over_median=10.0):
    """Local maxima of a sampled spectrum rising well above its median level.

    Returns (positions, widths) where widths are full widths at half
    prominence, floored at twice the local sample spacing.
    """
    values = np.asarray(values, dtype=float)
    positive = values[values > 0]
    if positive.size == 0:
        return np.array([]), np.array([])
    floor = height_over_median * np.median(positive)
    idx, _ = find_peaks(values, height=floor)
    if idx.size == 0:
        return np.array([]), np.array([])
    width_samples = peak_widths(values, idx, rel_height=0.5)[0]
    spacing = np.gradient(omega)
    widths = np.maximum(width_samples * spacing[idx], 2.0 * spacing[idx])
    return omega[idx], widths


def trapezoid_weights(nodes):
    """Weights w such that sum(w * f(nodes)) is the trapezoid rule."""
    nodes = np.asarray(nodes, dtype=float)
    w = np.zeros_like(nodes)
    d = np.diff(nodes)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w
