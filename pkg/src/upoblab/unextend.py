"""Extendibility certification and UPOB / UPUOB classification.

The partition search assigns each member to one party and prunes a branch as
soon as some party's assigned factors span that party's whole local operator
space; a surviving complete assignment yields an explicit product-operator
witness from the per-party complements.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NoWitnessError, ShapeError
from .matrix import (
    DEFAULT_TOL,
    Tolerance,
    complement_basis,
    hs_inner,
    is_unitary,
    nearest_unitary,
)
from .errors import SingularError
from .product import (
    OperatorSet,
    ProductOperator,
    check_orthonormal,
    check_pairwise_orthogonal,
)

DEFAULT_BUDGET = 50_000_000
DEFAULT_SEED = 0x5EED
DEFAULT_RESTARTS = 64
DEFAULT_ITERS = 500

UNEXTENDIBLE = "unextendible"
EXTENDIBLE = "extendible"
UNKNOWN = "unknown"


@dataclass
class ExtendibilityVerdict:
    status: str
    witness: ProductOperator | None = None
    partition: tuple[int, ...] | None = None
    nodes_explored: int = 0
    budget: int = DEFAULT_BUDGET

    def to_json(self) -> dict:
        from .matrix import matrix_to_json

        out = {
            "status": self.status,
            "nodes_explored": self.nodes_explored,
            "budget": self.budget,
        }
        if self.witness is not None:
            out["witness"] = {
                "label": self.witness.label,
                "factors": [matrix_to_json(f) for f in self.witness.factors],
            }
        if self.partition is not None:
            out["partition"] = list(self.partition)
        return out


@dataclass
class Classification:
    is_product_set: bool
    is_orthonormal: bool
    is_all_unitary: bool
    upob: ExtendibilityVerdict
    unitary_witness: ProductOperator | None
    verdict_labels: frozenset[str]

    def to_json(self) -> dict:
        from .matrix import matrix_to_json

        out = {
            "is_product_set": self.is_product_set,
            "is_orthonormal": self.is_orthonormal,
            "is_all_unitary": self.is_all_unitary,
            "upob": self.upob.to_json(),
            "verdict_labels": sorted(self.verdict_labels),
        }
        if self.unitary_witness is not None:
            out["unitary_witness"] = {
                "label": self.unitary_witness.label,
                "factors": [matrix_to_json(f) for f in self.unitary_witness.factors],
            }
        return out


class _BudgetExhausted(Exception):
    pass


def _direction_table(op_set: OperatorSet):
    """Per member and party: unit vectorized factor plus a phase-canonical id.

    Members sharing a factor direction (up to a complex scalar) get the same
    id, so repeated factors skip the Gram-Schmidt projection entirely.
    """
    n = len(op_set)
    vecs = [[None] * op_set.n_parties for _ in range(n)]
    ids = [[0] * op_set.n_parties for _ in range(n)]
    for p in range(op_set.n_parties):
        key_to_id: dict = {}
        for j, m in enumerate(op_set.members):
            v = m.factors[p].ravel().astype(complex)
            v = v / np.linalg.norm(v)
            pivot = np.argmax(np.abs(v))
            canon = v * (abs(v[pivot]) / v[pivot])
            key = tuple(np.round(canon, 10))
            ids[j][p] = key_to_id.setdefault(key, len(key_to_id))
            vecs[j][p] = v
    return vecs, ids


def _greedy_member_order(op_set: OperatorSet, vecs, tol: Tolerance) -> list[int]:
    """Members sorted by decreasing rank contribution across all parties."""
    n = len(op_set)
    n_parties = op_set.n_parties
    bases = [[] for _ in range(n_parties)]
    remaining = list(range(n))
    order = []
    while remaining:
        best, best_score = remaining[0], -1
        for j in remaining:
            score = 0
            for p in range(n_parties):
                v = vecs[j][p].copy()
                for b in bases[p]:
                    v -= np.vdot(b, v) * b
                if np.linalg.norm(v) > tol.eps:
                    score += 1
            if score > best_score:
                best, best_score = j, score
        order.append(best)
        remaining.remove(best)
        for p in range(n_parties):
            v = vecs[best][p].copy()
            for b in bases[p]:
                v -= np.vdot(b, v) * b
            nrm = np.linalg.norm(v)
            if nrm > tol.eps:
                bases[p].append(v / nrm)
    return order


def extendibility_search(
    op_set: OperatorSet,
    tol: Tolerance = DEFAULT_TOL,
    budget: int = DEFAULT_BUDGET,
) -> ExtendibilityVerdict:
    """Lemma-style partition search with span-dimension pruning.

    Depth-first over assignments of members to parties; a branch dies as soon
    as a party's assigned span reaches its full local dimension rows*cols.
    Exhaustion certifies unextendibility; a surviving complete assignment
    yields a witness; hitting the node budget yields an unknown verdict.
    """
    if budget <= 0:
        raise ConfigError(f"budget must be positive, got {budget}")
    if len(op_set) == 0:
        raise ConfigError("cannot search an empty set")

    n_parties = op_set.n_parties
    full_dims = [r * c for r, c in op_set.shape]
    vecs, ids = _direction_table(op_set)
    order = _greedy_member_order(op_set, vecs, tol)

    bases: list[list[np.ndarray]] = [[] for _ in range(n_parties)]
    in_span: list[dict] = [dict() for _ in range(n_parties)]
    assignment = [0] * len(op_set)
    nodes = 0
    eps = tol.eps
    # A party's span depends only on which direction ids it holds, so a
    # (depth, per-party id set) state that already failed can be cut.
    failed_states: set = set()

    def try_assign(j: int, p: int):
        """Returns an undo token on success, None when the branch is pruned."""
        did = ids[j][p]
        span = in_span[p]
        if did in span:
            span[did] += 1
            return (p, did, False)
        v = vecs[j][p]
        basis = bases[p]
        if basis:
            v = v.copy()
            for b in basis:
                v -= np.vdot(b, v) * b
            nrm = np.linalg.norm(v)
        else:
            nrm = 1.0
        if nrm > eps:
            if len(basis) + 1 >= full_dims[p]:
                return None
            basis.append(v / nrm)
            span[did] = 1
            return (p, did, True)
        span[did] = 1
        return (p, did, False)

    def undo(token):
        p, did, added_basis = token
        in_span[p][did] -= 1
        if in_span[p][did] == 0:
            del in_span[p][did]
        if added_basis:
            bases[p].pop()

    def dfs(depth: int) -> bool:
        nonlocal nodes
        if depth == len(order):
            return True
        key = (depth, tuple(frozenset(in_span[p]) for p in range(n_parties)))
        if key in failed_states:
            return False
        j = order[depth]
        parties = sorted(range(n_parties), key=lambda p: full_dims[p] - len(bases[p]))
        for p in parties:
            nodes += 1
            if nodes >= budget:
                raise _BudgetExhausted
            token = try_assign(j, p)
            if token is None:
                continue
            assignment[j] = p
            if dfs(depth + 1):
                return True
            undo(token)
        failed_states.add(key)
        return False

    try:
        found = dfs(0)
    except _BudgetExhausted:
        return ExtendibilityVerdict(UNKNOWN, nodes_explored=budget, budget=budget)

    if not found:
        return ExtendibilityVerdict(UNEXTENDIBLE, nodes_explored=nodes, budget=budget)

    partition = tuple(assignment)
    witness = extract_witness(partition, op_set, tol)
    return ExtendibilityVerdict(
        EXTENDIBLE,
        witness=witness,
        partition=partition,
        nodes_explored=nodes,
        budget=budget,
    )


def extract_witness(
    partition: tuple[int, ...],
    op_set: OperatorSet,
    tol: Tolerance = DEFAULT_TOL,
) -> ProductOperator:
    """Witness W = (x)_i W_i with W_i in the complement of party i's span.

    Deterministic: the first element of the canonically ordered complement;
    an empty subset gets the first standard basis matrix.
    """
    if len(partition) != len(op_set):
        raise ShapeError("partition length does not match the member count")
    factors = []
    for p, (rows, cols) in enumerate(op_set.shape):
        assigned = [
            m.factors[p] for j, m in enumerate(op_set.members) if partition[j] == p
        ]
        comp = complement_basis(assigned, (rows, cols), tol)
        if not comp:
            raise NoWitnessError(f"party {p} span is full; no witness factor exists")
        factors.append(comp[0])
    return ProductOperator(tuple(factors), "witness")


def verify_witness(
    w: ProductOperator,
    op_set: OperatorSet,
    tol: Tolerance = DEFAULT_TOL,
) -> bool:
    """True iff |hs_inner(w, s)| <= 10 * tol.eps for every member s."""
    if w.party_shape != op_set.shape:
        raise ShapeError(
            f"witness shape {w.party_shape} does not match set shape {op_set.shape}"
        )
    for m in op_set.members:
        inner = 1.0 + 0.0j
        for wf, mf in zip(w.factors, m.factors):
            inner *= hs_inner(wf, mf)
        if abs(inner) > 10.0 * tol.eps:
            return False
    return True


def _product_factorization(vec: np.ndarray, shape, iters: int = 40):
    """Best product (rank-one across parties) approximation of a vectorized
    operator, by alternating least squares on the party-blocked tensor."""
    dims = [r * c for r, c in shape]
    tensor = vec
    n = len(dims)
    if n == 1:
        return [vec.copy()]
    t = vec.reshape(dims)
    factors = []
    rest = t
    for p in range(n - 1):
        mat = rest.reshape(dims[p], -1)
        u, s, vh = np.linalg.svd(mat, full_matrices=False)
        factors.append(u[:, 0] * s[0])
        rest = vh[0]
    factors.append(rest.copy())
    if n > 2:
        for _ in range(iters):
            for p in range(n):
                others = [factors[q] / np.linalg.norm(factors[q]) for q in range(n)]
                contraction = t
                for q in sorted((x for x in range(n) if x != p), reverse=True):
                    contraction = np.tensordot(
                        contraction, others[q].conj(), axes=([q], [0])
                    )
                factors[p] = contraction
    return factors


def unitary_witness_search(
    op_set: OperatorSet,
    tol: Tolerance = DEFAULT_TOL,
    restarts: int = DEFAULT_RESTARTS,
    iters: int = DEFAULT_ITERS,
    seed: int = DEFAULT_SEED,
) -> ProductOperator | None:
    """Heuristic alternating-projection hunt for a product unitary in the
    complement of the set's span.  Absence of a result is not a proof."""
    for r, c in op_set.shape:
        if r != c:
            raise ShapeError("product-unitary search needs square parties")
    shape = op_set.shape
    full_dim = 1
    for r, _ in shape:
        full_dim *= r
    span_rows = np.stack([m.full_matrix().ravel() for m in op_set.members])
    # Orthonormal basis of the complement inside the full operator space.
    u, s, vh = np.linalg.svd(span_rows.conj(), full_matrices=True)
    rank = int(np.count_nonzero(s > tol.eps * s[0])) if s.size else 0
    comp = vh[rank:].conj()
    if comp.shape[0] == 0:
        return None

    # The vectorized full operator is reindexed so each party's (row, col)
    # pair becomes one axis of size rows*cols; product operators are then
    # rank-one tensors.
    n = len(shape)
    row_dims = [r for r, _ in shape]
    col_dims = [c for _, c in shape]
    perm = [x for p in range(n) for x in (p, n + p)]

    def to_party_vec(full_mat: np.ndarray) -> np.ndarray:
        t = full_mat.reshape(row_dims + col_dims).transpose(perm)
        return t.reshape([r * c for r, c in shape]).ravel()

    def from_factors(factors) -> np.ndarray:
        out = factors[0]
        for f in factors[1:]:
            out = np.multiply.outer(out, f)
        return out.ravel()

    comp_party = np.stack(
        [to_party_vec(row.reshape(full_dim, full_dim)) for row in comp]
    )

    def project(v: np.ndarray) -> np.ndarray:
        coeffs = comp_party.conj() @ v
        return coeffs @ comp_party

    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        coeffs = rng.normal(size=comp.shape[0]) + 1j * rng.normal(size=comp.shape[0])
        v = coeffs @ comp_party
        v /= np.linalg.norm(v)
        for _ in range(iters):
            factors = _product_factorization(v, shape)
            try:
                unitary_factors = [
                    nearest_unitary(f.reshape(r, c), tol)
                    for f, (r, c) in zip(factors, shape)
                ]
            except SingularError:
                break
            w_vec = from_factors([uf.ravel() for uf in unitary_factors])
            proj = project(w_vec)
            residual = np.linalg.norm(w_vec - proj) / np.linalg.norm(w_vec)
            if residual <= tol.eps:
                candidate = ProductOperator(tuple(unitary_factors), "unitary-witness")
                if verify_witness(candidate, op_set, tol):
                    return candidate
            nrm = np.linalg.norm(proj)
            if nrm <= tol.eps:
                break
            v = proj / nrm
    return None


def _all_factors_unitary(op_set: OperatorSet, tol: Tolerance) -> bool:
    """Every factor unitary after rescaling to Frobenius norm sqrt(dim)."""
    for r, c in op_set.shape:
        if r != c:
            return False
    for m in op_set.members:
        for f in m.factors:
            d = f.shape[0]
            scaled = f * (np.sqrt(d) / np.linalg.norm(f))
            if not is_unitary(scaled, Tolerance(tol.eps * 10)):
                return False
    return True


UPOB_LABEL = "UPOB"
STRONG_LABEL = "strongly-UPUOB"
EVIDENCE_LABEL = "UPUOB-evidence"


def classify(
    op_set: OperatorSet,
    tol: Tolerance = DEFAULT_TOL,
    budget: int = DEFAULT_BUDGET,
    restarts: int = DEFAULT_RESTARTS,
    iters: int = DEFAULT_ITERS,
    seed: int = DEFAULT_SEED,
) -> Classification:
    """Assemble the UPOB / strongly-UPUOB / UPUOB-evidence verdict."""
    square = all(r == c for r, c in op_set.shape)
    if square:
        orthonormal = check_orthonormal(op_set, tol)
    else:
        orthonormal = check_pairwise_orthogonal(op_set, tol)
    all_unitary = _all_factors_unitary(op_set, tol)
    upob = extendibility_search(op_set, tol, budget)

    labels = set()
    if orthonormal and upob.status == UNEXTENDIBLE:
        labels.add(UPOB_LABEL)
        if all_unitary:
            labels.add(STRONG_LABEL)

    witness = None
    if all_unitary and orthonormal:
        if upob.status == UNEXTENDIBLE:
            labels.add(EVIDENCE_LABEL)
        elif upob.status == EXTENDIBLE:
            witness = unitary_witness_search(op_set, tol, restarts, iters, seed)
            if witness is None:
                labels.add(EVIDENCE_LABEL)

    return Classification(
        is_product_set=True,
        is_orthonormal=orthonormal,
        is_all_unitary=all_unitary,
        upob=upob,
        unitary_witness=witness,
        verdict_labels=frozenset(labels),
    )
