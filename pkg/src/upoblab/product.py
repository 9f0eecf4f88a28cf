"""Product operators, operator sets, and the vector/matrix correspondence.

An OperatorSet stores its members unnormalized, exactly as authored; the
orthonormality checks rescale on the fly.  Product vectors (states) are
handled uniformly as sets with column-vector party shapes (d, 1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptyInputError, ShapeError
from .matrix import (
    DEFAULT_TOL,
    Tolerance,
    as_matrix,
    frobenius_norm,
    hs_inner,
    kron_all,
    matrix_from_json,
    matrix_to_json,
)

PartyShape = tuple[tuple[int, int], ...]


def validate_party_shape(shape: Sequence[Sequence[int]]) -> PartyShape:
    shape = tuple((int(r), int(c)) for r, c in shape)
    if len(shape) == 0:
        raise ShapeError("a party shape needs at least one party")
    for r, c in shape:
        if r < 1 or c < 1:
            raise ShapeError(f"party dimensions must be >= 1, got ({r}, {c})")
    return shape


@dataclass(frozen=True)
class ProductOperator:
    """Ordered list of local factors, one per party."""

    factors: tuple[np.ndarray, ...]
    label: str = ""

    def __post_init__(self):
        factors = tuple(as_matrix(f) for f in self.factors)
        if len(factors) == 0:
            raise ShapeError("a product operator needs at least one factor")
        for f in factors:
            if np.linalg.norm(f) == 0.0:
                raise ShapeError(f"zero factor in product operator {self.label!r}")
            f.setflags(write=False)
        object.__setattr__(self, "factors", factors)

    @property
    def party_shape(self) -> PartyShape:
        return tuple(f.shape for f in self.factors)

    def full_matrix(self) -> np.ndarray:
        return kron_all(self.factors)

    def norm(self) -> float:
        out = 1.0
        for f in self.factors:
            out *= frobenius_norm(f)
        return out

    def relabel(self, label: str) -> "ProductOperator":
        return ProductOperator(self.factors, label)


@dataclass(frozen=True)
class OperatorSet:
    """A finite set of product operators sharing a party shape."""

    shape: PartyShape
    members: tuple[ProductOperator, ...]

    def __post_init__(self):
        shape = validate_party_shape(self.shape)
        members = tuple(self.members)
        labels = set()
        for m in members:
            if m.party_shape != shape:
                raise ShapeError(
                    f"member {m.label!r} shape {m.party_shape} != set shape {shape}"
                )
            if m.label in labels:
                raise ShapeError(f"duplicate member label {m.label!r}")
            labels.add(m.label)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)

    @property
    def n_parties(self) -> int:
        return len(self.shape)

    def labels(self) -> list[str]:
        return [m.label for m in self.members]

    def total_dimension(self) -> int:
        """Product of party row counts (the d of Tr(U^dag U) = d)."""
        out = 1
        for r, _ in self.shape:
            out *= r
        return out

    def to_json(self) -> dict:
        return {
            "shape": [[r, c] for r, c in self.shape],
            "members": [
                {"label": m.label, "factors": [matrix_to_json(f) for f in m.factors]}
                for m in self.members
            ],
        }

    @staticmethod
    def from_json(obj: dict) -> "OperatorSet":
        shape = validate_party_shape(obj["shape"])
        members = tuple(
            ProductOperator(
                tuple(matrix_from_json(f) for f in m["factors"]), m["label"]
            )
            for m in obj["members"]
        )
        return OperatorSet(shape, members)


@dataclass(frozen=True)
class IndexSet:
    """Ordered positions (p, q) receiving the vector entries under F."""

    positions: tuple[tuple[int, int], ...]

    def __post_init__(self):
        positions = tuple((int(p), int(q)) for p, q in self.positions)
        if len(set(positions)) != len(positions):
            raise ShapeError("index set positions must be distinct")
        object.__setattr__(self, "positions", positions)

    def __len__(self) -> int:
        return len(self.positions)


def row_major_index_set(m: int, n: int, d: int | None = None) -> IndexSet:
    """The default index set {(0,0), (0,1), ...}, truncated to d positions."""
    if d is None:
        d = m * n
    positions = list(itertools.product(range(m), range(n)))[:d]
    return IndexSet(tuple(positions))


def gram(op_set: OperatorSet) -> np.ndarray:
    """G(j, k) = hs_inner(U_j, U_k), via the per-party factorization."""
    if len(op_set) == 0:
        raise EmptyInputError("gram of an empty set")
    n = len(op_set)
    out = np.ones((n, n), dtype=complex)
    for party in range(op_set.n_parties):
        stacked = np.stack([m.factors[party].ravel() for m in op_set.members])
        out *= stacked.conj() @ stacked.T
    return out


def check_orthonormal(op_set: OperatorSet, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Tr(U_j^dag U_k) = d delta_jk after normalizing members to norm sqrt(d)."""
    for r, c in op_set.shape:
        if r != c:
            raise ShapeError("orthonormality is defined for square parties only")
    d = op_set.total_dimension()
    g = gram(op_set)
    norms = np.array([m.norm() for m in op_set.members])
    scale = np.sqrt(d) / norms
    g = g * np.outer(scale, scale)
    dev = np.abs(g - d * np.eye(len(op_set))).max()
    return bool(dev <= tol.eps * d)


def check_pairwise_orthogonal(op_set: OperatorSet, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Off-diagonal Gram entries vanish after unit normalization.

    The orthogonality notion for sets with non-square parties (e.g. product
    vectors), where the sqrt(d) convention does not apply.
    """
    g = gram(op_set)
    norms = np.array([m.norm() for m in op_set.members])
    g = g / np.outer(norms, norms)
    off = g - np.diag(np.diag(g))
    return bool(np.abs(off).max() <= tol.eps)


def k_orthonormal(
    u: ProductOperator,
    v: ProductOperator,
    k: int,
    tol: Tolerance = DEFAULT_TOL,
) -> bool:
    """True iff the k-th party factors are Hilbert-Schmidt orthogonal."""
    if u.party_shape != v.party_shape:
        raise ShapeError("operators must share a party shape")
    if not (0 <= k < len(u.factors)):
        raise IndexError(f"party index {k} out of range for {len(u.factors)} parties")
    return abs(hs_inner(u.factors[k], v.factors[k])) <= tol.eps


def vector_to_matrix(
    v: Sequence[complex], idx: IndexSet, shape: tuple[int, int]
) -> np.ndarray:
    """The bijection F: entry t of v lands at position idx[t], zeros elsewhere."""
    v = np.asarray(v, dtype=complex).ravel()
    m, n = shape
    d = len(v)
    if len(idx) != d:
        raise IndexError(f"index set has {len(idx)} positions for a length-{d} vector")
    if d > m * n or d < max(m, n):
        raise IndexError(f"need max(m,n) <= d <= m*n, got d={d} for shape {shape}")
    out = np.zeros((m, n), dtype=complex)
    for t, (p, q) in enumerate(idx.positions):
        if not (0 <= p < m and 0 <= q < n):
            raise IndexError(f"position {(p, q)} outside shape {shape}")
        out[p, q] = v[t]
    return out


def matrix_to_vector(a: np.ndarray, idx: IndexSet) -> np.ndarray:
    """Read the indexed positions back; inverse of vector_to_matrix."""
    a = as_matrix(a)
    return np.array([a[p, q] for p, q in idx.positions])


def upb_to_upob(
    upb: Sequence[Sequence[np.ndarray]],
    idx_per_party: Sequence[IndexSet],
    shapes: Sequence[tuple[int, int]],
    labels: Sequence[str] | None = None,
) -> OperatorSet:
    """Apply F partywise to a product-vector set, preserving inner products."""
    shapes = validate_party_shape(shapes)
    if len(idx_per_party) != len(shapes):
        raise ShapeError("need one index set per party")
    if labels is None:
        labels = [f"M_{j + 1}" for j in range(len(upb))]
    members = []
    for j, vec_factors in enumerate(upb):
        if len(vec_factors) != len(shapes):
            raise ShapeError(f"product vector {j} has {len(vec_factors)} parties")
        factors = []
        for v, idx, shape in zip(vec_factors, idx_per_party, shapes):
            v = np.asarray(v, dtype=complex).ravel()
            if len(v) != shape[0] * shape[1]:
                raise ShapeError(
                    f"party vector of length {len(v)} cannot fill shape {shape}"
                )
            factors.append(vector_to_matrix(v, idx, shape))
        members.append(ProductOperator(tuple(factors), labels[j]))
    return OperatorSet(shapes, tuple(members))


def product_vector_set(
    vectors: Sequence[Sequence[np.ndarray]],
    labels: Sequence[str] | None = None,
) -> OperatorSet:
    """Wrap product vectors as an OperatorSet with (d, 1) party shapes."""
    if len(vectors) == 0:
        raise EmptyInputError("no product vectors given")
    shape = tuple((len(np.ravel(v)), 1) for v in vectors[0])
    if labels is None:
        labels = [f"psi_{j + 1}" for j in range(len(vectors))]
    members = tuple(
        ProductOperator(
            tuple(np.asarray(v, dtype=complex).reshape(-1, 1) for v in vec),
            labels[j],
        )
        for j, vec in enumerate(vectors)
    )
    return OperatorSet(shape, members)


def vectorize_set(op_set: OperatorSet) -> OperatorSet:
    """Flatten each party factor row-major into a column vector.

    The result is the product-vector set corresponding to the operator set
    under |i><j| <-> |i,j|; all Gram entries are preserved exactly.
    """
    shape = tuple((r * c, 1) for r, c in op_set.shape)
    members = tuple(
        ProductOperator(
            tuple(f.reshape(-1, 1) for f in m.factors), m.label
        )
        for m in op_set.members
    )
    return OperatorSet(shape, members)
