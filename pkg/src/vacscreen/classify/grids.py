"""Published hyperparameter search surfaces and class weighting."""

from __future__ import annotations

import numpy as np

# Grid per model family. Fixed settings (balanced class weights for
# logistic/forest, scale_pos_weight 2.5 for gbt) are trainer defaults, not
# searched.
HYPERPARAMETER_GRIDS: dict[str, dict[str, list]] = {
    "logistic": {
        "C": [0.01, 0.05, 0.1, 0.5, 1, 5, 10, 50, 100],
    },
    "gbt": {
        "min_child_weight": [2, 5, 10],
        "learning_rate": [0.3, 0.2, 0.1, 0.05, 0.01, 0.005],
        "max_depth": [10, 50, 100],
    },
    "forest": {
        "max_depth": [10, 50, 100],
        "n_estimators": [200, 600, 1000, 1400, 2000],
        "min_samples_split": [2, 5, 10, 50],
    },
}


def balanced_class_weights(y: np.ndarray) -> tuple[float, float]:
    """``(w_neg, w_pos)`` with ``w_c = N / (2 * N_c)``.

    Equalizes the aggregate influence of both classes.
    """
    y = np.asarray(y)
    n = y.shape[0]
    n_pos = int(np.count_nonzero(y))
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("both classes must be present to balance weights")
    return n / (2.0 * n_neg), n / (2.0 * n_pos)
