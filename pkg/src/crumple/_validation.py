"""Input checks shared by the estimators and the functional API."""

import numpy as np
from sklearn.utils.validation import check_array


def check_points(X, name="X", min_points=1):
    """Coerce ``X`` to a finite float64 (n, 3) array."""
    X = check_array(X, dtype=np.float64, ensure_2d=True, ensure_min_samples=min_points, input_name=name)
    if X.shape[1] != 3:
        raise ValueError(f"{name} must have shape (n, 3), got {X.shape}")
    return X


def check_positive(value, name):
    value = float(value)
    if not value > 0:
        raise ValueError(f"{name} must be > 0, got {value}")
    return value
