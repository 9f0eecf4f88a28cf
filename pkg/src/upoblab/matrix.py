"""Dense complex matrix kernel.

All matrices are 2-D complex128 numpy arrays.  The Hilbert-Schmidt inner
product Tr(A^dag B) is the orthogonality notion throughout; rank decisions
go through singular values with a relative threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ConfigError,
    EmptyInputError,
    ShapeError,
    SingularError,
    SizeError,
)

#: Hard cap on the row/column count of any kron result.
MAX_PRODUCT_DIM = 4096


@dataclass(frozen=True)
class Tolerance:
    """Absolute tolerance on complex magnitudes and singular values."""

    eps: float = 1e-9

    def __post_init__(self):
        if not (0.0 < self.eps < 1.0):
            raise ConfigError(f"tolerance eps must lie in (0, 1), got {self.eps}")


DEFAULT_TOL = Tolerance()


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D complex array, rejecting non-finite entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m.view(float))):
        raise ShapeError("matrix contains NaN or Inf entries")
    return m


def kron(a, b) -> np.ndarray:
    """Kronecker product with a dimension cap."""
    a = as_matrix(a)
    b = as_matrix(b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > MAX_PRODUCT_DIM or cols > MAX_PRODUCT_DIM:
        raise SizeError(
            f"kron result {rows}x{cols} exceeds the cap of {MAX_PRODUCT_DIM}"
        )
    return np.kron(a, b)


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Left-to-right Kronecker product of a nonempty factor list."""
    if len(factors) == 0:
        raise EmptyInputError("kron_all requires at least one factor")
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = kron(out, f)
    return out


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product Tr(a^dag b), conjugate-linear in a."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def frobenius_norm(a) -> float:
    return float(np.linalg.norm(as_matrix(a)))


def _stack_vectorized(mats: Sequence[np.ndarray]) -> np.ndarray:
    if len(mats) == 0:
        raise EmptyInputError("need at least one matrix")
    mats = [as_matrix(m) for m in mats]
    shape = mats[0].shape
    for m in mats[1:]:
        if m.shape != shape:
            raise ShapeError(f"shape mismatch {m.shape} vs {shape}")
    return np.stack([m.ravel() for m in mats])


def numeric_rank(mats: Sequence[np.ndarray], tol: Tolerance = DEFAULT_TOL) -> int:
    """Dimension of the span, via singular values of the stacked vectorizations.

    A singular value counts when it exceeds ``tol.eps`` times the largest one.
    """
    stacked = _stack_vectorized(mats)
    s = np.linalg.svd(stacked, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.eps * s[0]))


def is_unitary(a, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff max-entry magnitude of a^dag a - I is within tol.eps."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"unitarity needs a square matrix, got {a.shape}")
    gram = a.conj().T @ a
    dev = np.abs(gram - np.eye(a.shape[0])).max()
    return bool(dev <= tol.eps)


def standard_basis(rows: int, cols: int) -> list[np.ndarray]:
    """Row-major list of the matrix units E_pq."""
    out = []
    for p in range(rows):
        for q in range(cols):
            e = np.zeros((rows, cols), dtype=complex)
            e[p, q] = 1.0
            out.append(e)
    return out


def complement_basis(
    span: Sequence[np.ndarray],
    ambient_shape: tuple[int, int],
    tol: Tolerance = DEFAULT_TOL,
) -> list[np.ndarray]:
    """Hilbert-Schmidt orthonormal basis of the orthogonal complement of span.

    The returned count is rows*cols - numeric_rank(span).  With an empty span
    the standard matrix units are returned.
    """
    rows, cols = ambient_shape
    if len(span) == 0:
        return standard_basis(rows, cols)
    for m in span:
        if as_matrix(m).shape != (rows, cols):
            raise ShapeError(f"span element shape {np.shape(m)} != {ambient_shape}")
    # Rows conj(vec(s_j)) so that S @ vec(e) stacks the inner products
    # hs_inner(s_j, e); the null space of S is the complement.
    stacked = _stack_vectorized(span).conj()
    u, s, vh = np.linalg.svd(stacked, full_matrices=True)
    if s.size and s[0] > 0.0:
        rank = int(np.count_nonzero(s > tol.eps * s[0]))
    else:
        rank = 0
    return [vh[i].conj().reshape(rows, cols) for i in range(rank, rows * cols)]


def nearest_unitary(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Unitary polar factor, the Frobenius-closest unitary to a."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"polar factor needs a square matrix, got {a.shape}")
    u, s, vh = np.linalg.svd(a)
    if s[-1] <= tol.eps:
        raise SingularError(
            f"matrix is numerically singular (smallest sv {s[-1]:.3e})"
        )
    return u @ vh


def matrix_to_json(a) -> dict:
    """JSON form: {"rows", "cols", "entries": [[re, im], ...]} row-major."""
    a = as_matrix(a)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    rows = int(obj["rows"])
    cols = int(obj["cols"])
    if rows <= 0 or cols <= 0:
        raise ShapeError(f"matrix dimensions must be positive, got {rows}x{cols}")
    entries = obj["entries"]
    if len(entries) != rows * cols:
        raise ShapeError(
            f"entry count {len(entries)} does not match {rows}x{cols}"
        )
    flat = np.array([complex(re, im) for re, im in entries])
    return as_matrix(flat.reshape(rows, cols))
