"""Pure-numpy split-finding kernels (fallback when the extension is absent).

Both kernels receive arrays already sorted by feature value and scan every
split position between adjacent distinct values. The arithmetic mirrors the
compiled kernels expression-for-expression (cumulative sums are sequential
in numpy) so both engines pick identical splits.
"""

from __future__ import annotations

import numpy as np


def best_split_grad_hess(
    values: np.ndarray,
    grad: np.ndarray,
    hess: np.ndarray,
    reg_lambda: float,
    min_child_weight: float,
) -> tuple[float, int]:
    """Best second-order gain split.

    Returns ``(gain, pos)`` where the split separates ``[0..pos]`` from
    ``[pos+1..n)``; ``(-inf, -1)`` when no valid split exists. Requires
    ``reg_lambda > 0``.
    """
    n = values.shape[0]
    if n < 2:
        return float("-inf"), -1
    cum_g = np.cumsum(grad)
    cum_h = np.cumsum(hess)
    total_g = cum_g[-1]
    total_h = cum_h[-1]
    parent = total_g * total_g / (total_h + reg_lambda)
    gl = cum_g[:-1]
    hl = cum_h[:-1]
    gr = total_g - gl
    hr = total_h - hl
    gains = 0.5 * (
        gl * gl / (hl + reg_lambda) + gr * gr / (hr + reg_lambda) - parent
    )
    valid = (
        (values[:-1] != values[1:])
        & (hl >= min_child_weight)
        & (hr >= min_child_weight)
    )
    if not np.any(valid):
        return float("-inf"), -1
    gains = np.where(valid, gains, -np.inf)
    pos = int(np.argmax(gains))
    return float(gains[pos]), pos


def best_split_gini(
    values: np.ndarray,
    weights: np.ndarray,
    pos_weights: np.ndarray,
) -> tuple[float, int]:
    """Best weighted-Gini impurity decrease split.

    ``weights`` must be strictly positive; ``pos_weights`` is the weight
    carried by positive labels per row. Returns ``(decrease, pos)`` or
    ``(-inf, -1)``.
    """
    n = values.shape[0]
    if n < 2:
        return float("-inf"), -1
    cum_w = np.cumsum(weights)
    cum_p = np.cumsum(pos_weights)
    total_w = cum_w[-1]
    total_p = cum_p[-1]
    frac_p = total_p / total_w
    frac_n = (total_w - total_p) / total_w
    parent = total_w * (1.0 - frac_p * frac_p - frac_n * frac_n)
    wl = cum_w[:-1]
    pl = cum_p[:-1]
    wr = total_w - wl
    pr = total_p - pl
    fl_p = pl / wl
    fl_n = (wl - pl) / wl
    fr_p = pr / wr
    fr_n = (wr - pr) / wr
    children = wl * (1.0 - fl_p * fl_p - fl_n * fl_n) + wr * (
        1.0 - fr_p * fr_p - fr_n * fr_n
    )
    decreases = parent - children
    valid = values[:-1] != values[1:]
    if not np.any(valid):
        return float("-inf"), -1
    decreases = np.where(valid, decreases, -np.inf)
    pos = int(np.argmax(decreases))
    return float(decreases[pos]), pos
