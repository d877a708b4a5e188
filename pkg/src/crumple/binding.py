"""Normalized inverse-distance coupling between control points and a surface.

Every surface vertex ``v_j`` follows the control points through weights
``phi_ij ~ 1 / |c_i0 - v_j| ** alpha`` normalized to sum to one, so a
deformed vertex is ``v_j + sum_i phi_ij (c_i - c_i0)``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_points, check_positive
from .errors import BindingFormatError, ConfigurationError, StaleBindingError

DEFAULT_ALPHA = 3.5
COINCIDENT_DISTANCE = 1e-9
WEIGHT_FLOOR = 1e-6

CRBW_MAGIC = b"CRBW"
CRBW_VERSION = 1


@dataclass(frozen=True)
class BindingTable:
    """Per-vertex weights over the control points.

    ``weights`` is a dense (n_vertices, n_controls) array, or a CSR matrix
    when a weight floor was applied. Arrays are made read-only.
    """

    alpha: float
    weights: np.ndarray | sparse.csr_matrix
    n_vertices: int
    n_controls: int

    @property
    def built_against(self):
        return self.n_vertices, self.n_controls

    @property
    def is_sparse(self):
        return sparse.issparse(self.weights)

    def dense(self):
        return self.weights.toarray() if self.is_sparse else self.weights

    def runs(self):
        """Yield (control_indices, weights) per vertex.

        Dense tables emit every control; sparse tables only stored entries.
        """
        if not self.is_sparse:
            idx = np.arange(self.n_controls)
            for row in self.weights:
                yield idx, row
            return
        csr = self.weights
        for j in range(self.n_vertices):
            lo, hi = csr.indptr[j], csr.indptr[j + 1]
            yield csr.indices[lo:hi], csr.data[lo:hi]


def _raw_weights(vertices, controls, alpha):
    diff = vertices[:, None, :] - controls[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    nearest = dist.min(axis=1, keepdims=True)
    coincident = nearest[:, 0] < COINCIDENT_DISTANCE
    # (d_min / d)^alpha keeps the largest raw weight at 1 and avoids overflow
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(dist > 0, (nearest / dist) ** alpha, 1.0)
    if np.any(coincident):
        rows = np.flatnonzero(coincident)
        w[rows] = 0.0
        w[rows, dist[rows].argmin(axis=1)] = 1.0
    return w / w.sum(axis=1, keepdims=True)


def compute_weights(vertices, control_rest, alpha=DEFAULT_ALPHA, weight_floor=None, chunk_size=65536):
    """Build the binding table for surface ``vertices`` against ``control_rest``.

    With ``weight_floor`` set, normalized weights below it are dropped and
    the remaining ones renormalized; the table is then stored sparse.
    """
    vertices = check_points(vertices, "vertices")
    controls = np.asarray(control_rest, dtype=float).reshape(-1, 3)
    if len(controls) == 0:
        raise ConfigurationError("binding needs at least one control point")
    alpha = check_positive(alpha, "alpha")

    blocks = []
    for lo in range(0, len(vertices), chunk_size):
        w = _raw_weights(vertices[lo : lo + chunk_size], controls, alpha)
        if weight_floor is not None:
            w[w < weight_floor] = 0.0
            w /= w.sum(axis=1, keepdims=True)
            w = sparse.csr_matrix(w)
        blocks.append(w)
    if weight_floor is not None:
        weights = sparse.vstack(blocks, format="csr")
        weights.data.setflags(write=False)
    else:
        weights = blocks[0] if len(blocks) == 1 else np.vstack(blocks)
        weights.setflags(write=False)
    return BindingTable(alpha=alpha, weights=weights, n_vertices=len(vertices), n_controls=len(controls))


def apply_deformation(rest_vertices, binding: BindingTable, control_rest, control_current):
    """Deformed vertices ``v_j + sum_i phi_ij (c_i - c_i0)``."""
    rest_vertices = np.asarray(rest_vertices, dtype=float)
    c0 = np.asarray(control_rest, dtype=float)
    c = np.asarray(control_current, dtype=float)
    if (len(rest_vertices), len(c0)) != binding.built_against or len(c) != len(c0):
        raise StaleBindingError(
            f"binding built for {binding.built_against} (vertices, controls), "
            f"got {len(rest_vertices)} vertices and {len(c0)}/{len(c)} controls"
        )
    return rest_vertices + binding.weights @ (c - c0)


class InverseDistanceBinding(TransformerMixin, BaseEstimator):
    """Estimator wrapper: ``fit`` computes weights, ``transform`` deforms.

    ``fit(X, control_points)`` takes the rest surface vertices ``X`` and the
    rest control points. ``transform(C)`` maps current control positions
    ``C`` to deformed surface vertices.
    """

    def __init__(self, alpha=DEFAULT_ALPHA, weight_floor=None):
        self.alpha = alpha
        self.weight_floor = weight_floor

    def fit(self, X, control_points, **fit_params):
        X = check_points(X)
        self.control_rest_ = check_points(control_points, "control_points")
        self.rest_vertices_ = X
        self.table_ = compute_weights(X, self.control_rest_, self.alpha, self.weight_floor)
        self.n_features_in_ = 3
        return self

    def transform(self, X):
        check_is_fitted(self, "table_")
        C = check_points(X, "control positions")
        return apply_deformation(self.rest_vertices_, self.table_, self.control_rest_, C)

    def fit_transform(self, X, control_points, **fit_params):
        return self.fit(X, control_points).transform(control_points)


# --- CRBW sidecar -------------------------------------------------------
# header: magic, u16 version, f64 alpha, u32 n_vertices, u32 n_controls
# then per vertex: u32 run length k, k x u32 control index, k x f64 weight

_HEADER = struct.Struct("<4sHdII")


def encode_binding(table: BindingTable) -> bytes:
    out = [_HEADER.pack(CRBW_MAGIC, CRBW_VERSION, table.alpha, table.n_vertices, table.n_controls)]
    for idx, w in table.runs():
        out.append(struct.pack("<I", len(idx)))
        out.append(np.asarray(idx, dtype="<u4").tobytes())
        out.append(np.asarray(w, dtype="<f8").tobytes())
    return b"".join(out)


def decode_binding(data: bytes) -> BindingTable:
    if len(data) < _HEADER.size:
        raise BindingFormatError("truncated CRBW header")
    magic, version, alpha, nv, nc = _HEADER.unpack_from(data, 0)
    if magic != CRBW_MAGIC:
        raise BindingFormatError(f"bad magic {magic!r}")
    if version != CRBW_VERSION:
        raise BindingFormatError(f"unsupported CRBW version {version}")
    pos = _HEADER.size
    indptr = np.zeros(nv + 1, dtype=np.int64)
    indices, values = [], []
    for j in range(nv):
        if pos + 4 > len(data):
            raise BindingFormatError(f"truncated at vertex {j}")
        (k,) = struct.unpack_from("<I", data, pos)
        pos += 4
        end = pos + 12 * k
        if end > len(data):
            raise BindingFormatError(f"truncated weight run at vertex {j}")
        idx = np.frombuffer(data, dtype="<u4", count=k, offset=pos)
        w = np.frombuffer(data, dtype="<f8", count=k, offset=pos + 4 * k)
        if k and idx.max() >= nc:
            raise BindingFormatError(f"control index out of range at vertex {j}")
        indices.append(idx)
        values.append(w)
        indptr[j + 1] = indptr[j] + k
        pos = end
    if pos != len(data):
        raise BindingFormatError("trailing bytes after weight runs")
    csr = sparse.csr_matrix(
        (np.concatenate(values) if values else np.zeros(0), np.concatenate(indices) if indices else np.zeros(0, int), indptr),
        shape=(nv, nc),
    )
    dense_rows = np.all(np.diff(indptr) == nc)
    weights = csr.toarray() if dense_rows else csr
    if dense_rows:
        weights.setflags(write=False)
    return BindingTable(alpha=alpha, weights=weights, n_vertices=nv, n_controls=nc)


def save_binding(path, table: BindingTable):
    with open(path, "wb") as fh:
        fh.write(encode_binding(table))


def load_binding(path) -> BindingTable:
    with open(path, "rb") as fh:
        return decode_binding(fh.read())
