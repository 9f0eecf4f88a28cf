"""Acceptance suite: one pass/fail line per criterion.

Each test exercises one end-to-end claim at its stated tolerance and prints a
summary line that bypasses pytest's capture so the verdicts are always
visible in the run log.
"""

import itertools
import time

import numpy as np

from upoblab.catalog import (
    antisym_witness_2x3,
    example1_upb,
    example1_upob,
    example_upuob_2x3,
    golden_states,
    lift_uuo,
    LiftParams,
    nqubit_strong_upuob,
    qutrit_uuo_set,
    tensor_combine,
    u2_strong_upuob,
)
from upoblab.locc import (
    build_a_states,
    product_sides,
    qutrit_embed,
    regroup_bipartite,
    run_three_ebit_protocol,
    triple_independence_check,
)
from upoblab.matrix import hs_inner
from upoblab.product import (
    IndexSet,
    OperatorSet,
    ProductOperator,
    check_orthonormal,
    gram,
    product_vector_set,
    vector_to_matrix,
)
from upoblab.unextend import (
    EXTENDIBLE,
    UNEXTENDIBLE,
    classify,
    extendibility_search,
)

TOL = 1e-9

#: One verdict line per criterion; echoed by the terminal-summary hook.
RESULT_LINES = []


def report(criterion, passed, detail):
    status = "PASS" if passed else "FAIL"
    line = f"criterion {criterion}: {status} - {detail}"
    RESULT_LINES.append(line)
    print(line)
    assert passed, line


def test_criterion_01_gram_exactness():
    s = u2_strong_upuob()
    gram(s)  # warm-up so the timing reflects steady-state cost
    t0 = time.perf_counter()
    g = gram(s)
    elapsed = time.perf_counter() - t0
    dev = np.abs(g - 4.0 * np.eye(12)).max()
    report(
        1,
        dev < TOL and elapsed < 0.010,
        f"gram deviation {dev:.2e} from 4*I12, {elapsed * 1e3:.2f} ms",
    )


def test_criterion_02_strong_upuob_certification():
    t0 = time.perf_counter()
    v = extendibility_search(u2_strong_upuob())
    elapsed = time.perf_counter() - t0
    report(
        2,
        v.status == UNEXTENDIBLE and v.nodes_explored <= 2**12 * 2 and elapsed < 1.0,
        f"status {v.status}, {v.nodes_explored} nodes, {elapsed:.3f} s",
    )


def test_criterion_03_example1_pipeline():
    t0 = time.perf_counter()
    vec_verdict = extendibility_search(product_vector_set(example1_upb()))
    op_verdict = extendibility_search(example1_upob())
    elapsed = time.perf_counter() - t0
    ok = (
        vec_verdict.status == UNEXTENDIBLE
        and op_verdict.status == UNEXTENDIBLE
        and vec_verdict.status == op_verdict.status
        and elapsed < 5.0
    )
    report(
        3,
        ok,
        f"vector {vec_verdict.status}, operator {op_verdict.status}, "
        f"{elapsed:.3f} s",
    )


def test_criterion_04_qutrit_uuo_numbers():
    states = golden_states()
    max_overlap_dev = max(
        abs(abs(np.vdot(states[s], states[t])) ** 2 - 0.2)
        for s in range(6)
        for t in range(s + 1, 6)
    )
    g = gram(qutrit_uuo_set())
    gram_dev = np.abs(g - 3.0 * np.eye(6)).max()
    report(
        4,
        max_overlap_dev < TOL and gram_dev < TOL,
        f"overlap-squared deviation {max_overlap_dev:.2e}, "
        f"gram deviation {gram_dev:.2e} from 3*I6",
    )


def test_criterion_05_lift_cardinality_and_gram():
    s = lift_uuo(LiftParams(2, qutrit_uuo_set()))
    q, d, n = 2, 3, 6
    expected = q * q * d * d - q * d * d + q * n
    dev = np.abs(gram(s) - 6.0 * np.eye(len(s))).max()
    report(
        5,
        len(s) == expected == 30 and dev < TOL,
        f"{len(s)} members (formula gives {expected}), gram deviation {dev:.2e}",
    )


def test_criterion_06_non_strong_witness():
    x = np.array([[0, 1, 0], [-1, 0, 0], [0, 0, 0]], dtype=complex)
    w = antisym_witness_2x3(1.0, 1.0, x)
    members = example_upuob_2x3().members
    max_inner = max(
        abs(hs_inner(w.full_matrix(), m.full_matrix())) for m in members
    )
    smallest_sv = np.linalg.svd(w.full_matrix(), compute_uv=False)[-1]
    report(
        6,
        max_inner < TOL and smallest_sv < TOL,
        f"max |inner| {max_inner:.2e} over 30 members, "
        f"smallest singular value {smallest_sv:.2e}",
    )


def test_criterion_07_nqubit_family():
    t0 = time.perf_counter()
    s = nqubit_strong_upuob(3)
    orthonormal = check_orthonormal(s)
    c = classify(s, budget=10**7)
    elapsed = time.perf_counter() - t0
    ok = (
        len(s) == 48
        and orthonormal
        and c.upob.status != EXTENDIBLE
        and elapsed < 60.0
    )
    report(
        7,
        ok,
        f"{len(s)} members, orthonormal {orthonormal}, status {c.upob.status} "
        f"({c.upob.nodes_explored} nodes), {elapsed:.1f} s",
    )


def test_criterion_08_protocol_replay():
    trace = run_three_ebit_protocol()
    survivors_ok = (
        trace.surviving["M_1"] == [f"b_{k}" for k in range(6, 10)]
        and trace.surviving["M_2"] == [f"b_{k}" for k in range(10, 13)]
        and trace.surviving["M_2_bar"] == [f"b_{k}" for k in range(1, 6)]
    )
    prob_dev = max(
        min(abs(p), abs(p - 1.0))
        for step in trace.steps
        for p in step.probabilities.values()
    )
    report(
        8,
        survivors_ok and prob_dev < TOL and trace.ebits_consumed == 3,
        f"survivors ok {survivors_ok}, branch probability deviation "
        f"{prob_dev:.2e}, ebits {trace.ebits_consumed}",
    )


def _expected_c_states():
    s2 = np.sqrt(2.0)

    def kr(x, y):
        return np.kron(np.asarray(x, complex), np.asarray(y, complex))

    return {
        "c_1": kr([0, 1, 1], [0, 1 + 1j, 1 - 1j]) / (2 * s2),
        "c_2": kr([0, 1 + 1j, 1 - 1j], [s2, 0, 0]) / (2 * s2),
        "c_3": kr([s2, 0, 0], [s2, 1j, -1j]) / (2 * s2),
        "c_4": kr([s2, 1j, -1j], [0, 1, 1]) / (2 * s2),
        "c_5": kr([s2, 1 - 1j, 1 + 1j], [s2, 1 - 1j, 1 + 1j]) / 6.0,
    }


def test_criterion_09_qutrit_embedding_checks():
    b = regroup_bipartite(build_a_states(u2_strong_upuob(), 2))
    c = qutrit_embed(b[:5])
    expected = _expected_c_states()
    max_dev = 0.0
    for state in c:
        e = expected[state.label]
        phase = np.vdot(e, state.amplitudes)
        phase /= abs(phase)
        max_dev = max(max_dev, np.abs(state.amplitudes - phase * e).max())
    sides = [product_sides(s) for s in c]
    triples_ok = triple_independence_check(
        [sd[0] for sd in sides]
    ) and triple_independence_check([sd[1] for sd in sides])
    verdict = extendibility_search(
        product_vector_set([(sd[0], sd[1]) for sd in sides])
    )
    report(
        9,
        max_dev < TOL and triples_ok and verdict.status == UNEXTENDIBLE,
        f"entrywise deviation {max_dev:.2e} up to global phase, triples ok "
        f"{triples_ok}, five-state set {verdict.status}",
    )


def _random_unitary(rng, d):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_criterion_10a_bijection_preserves_inner_products():
    rng = np.random.default_rng(0x5EED)
    worst = 0.0
    for _ in range(1000):
        m = int(rng.integers(2, 5))
        n = int(rng.integers(2, 5))
        d = int(rng.integers(max(m, n), m * n + 1))
        positions = list(itertools.product(range(m), range(n)))
        rng.shuffle(positions)
        idx = IndexSet(tuple(positions[:d]))
        u = rng.normal(size=d) + 1j * rng.normal(size=d)
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        lhs = np.vdot(u, v)
        rhs = hs_inner(
            vector_to_matrix(u, idx, (m, n)), vector_to_matrix(v, idx, (m, n))
        )
        worst = max(worst, abs(lhs - rhs))
    report("10a", worst < TOL, f"1000 cases, max inner-product deviation {worst:.2e}")


def _random_single_party_set(rng, dim, count, tag):
    members = tuple(
        ProductOperator(
            (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)),),
            f"{tag}{j}",
        )
        for j in range(count)
    )
    return OperatorSet(((dim, dim),), members)


def test_criterion_10b_tensor_combine_gram_kronecker():
    rng = np.random.default_rng(0xFEED)
    worst = 0.0
    for case in range(1000):
        da = int(rng.integers(2, 4))
        db = int(rng.integers(2, 4))
        a = _random_single_party_set(rng, da, int(rng.integers(2, 4)), "a")
        b = _random_single_party_set(rng, db, int(rng.integers(2, 4)), "b")
        regroup = [[0, 1]] if case % 3 == 0 else None
        c = tensor_combine(a, b, regroup=regroup)
        dev = np.abs(gram(c) - np.kron(gram(a), gram(b))).max()
        scale = max(1.0, np.abs(gram(c)).max())
        worst = max(worst, dev / scale)
    report(
        "10b", worst < TOL, f"1000 cases, max relative gram deviation {worst:.2e}"
    )


def test_criterion_10c_verdict_invariance_under_local_symmetries():
    rng = np.random.default_rng(0xCAFE)
    base = example1_upob()
    baseline = classify(base).verdict_labels
    failures = 0
    for case in range(1000):
        left = [_random_unitary(rng, 2) for _ in range(2)]
        right = [_random_unitary(rng, 2) for _ in range(2)]
        swap = bool(rng.integers(2))
        members = []
        for m in base.members:
            factors = tuple(
                left[p] @ m.factors[p] @ right[p] for p in range(2)
            )
            if swap:
                factors = factors[::-1]
            members.append(ProductOperator(factors, m.label))
        transformed = OperatorSet(base.shape, tuple(members))
        if classify(transformed).verdict_labels != baseline:
            failures += 1
    report(
        "10c",
        failures == 0 and baseline == frozenset({"UPOB"}),
        f"1000 cases, {failures} label changes from {sorted(baseline)}",
    )


def _subset_ranks(vectors):
    """Rank of every subset of vectorized factors, built up the subset lattice."""
    n = len(vectors)
    bases = [[] for _ in range(1 << n)]
    for mask in range(1, 1 << n):
        low = mask & -mask
        j = low.bit_length() - 1
        prev = bases[mask ^ low]
        v = vectors[j].copy()
        for u in prev:
            v -= np.vdot(u, v) * u
        nrm = np.linalg.norm(v)
        if nrm > 1e-9:
            bases[mask] = prev + [v / nrm]
        else:
            bases[mask] = prev
    return [len(b) for b in bases]


def _exhaustive_verdict(op_set):
    n = len(op_set)
    full = [r * c for r, c in op_set.shape]
    ranks = []
    for p in range(2):
        vecs = [m.factors[p].ravel().astype(complex) for m in op_set.members]
        vecs = [v / np.linalg.norm(v) for v in vecs]
        ranks.append(_subset_ranks(vecs))
    all_mask = (1 << n) - 1
    for mask in range(1 << n):
        if ranks[0][mask] < full[0] and ranks[1][all_mask ^ mask] < full[1]:
            return EXTENDIBLE
    return UNEXTENDIBLE


def test_criterion_10d_pruned_vs_exhaustive_search():
    rng = np.random.default_rng(0xD1CE)
    shape = ((2, 2), (2, 2))
    mismatches = 0
    verdicts = {EXTENDIBLE: 0, UNEXTENDIBLE: 0}
    for case in range(1000):
        n = int(rng.integers(2, 11))
        pool = [
            rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(4)
        ]
        members = []
        for j in range(n):
            factors = []
            for _ in range(2):
                if case % 2 and rng.integers(2):
                    factors.append(pool[rng.integers(4)] * (0.5 + 1j))
                else:
                    factors.append(
                        rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
                    )
            members.append(ProductOperator(tuple(factors), f"m_{j}"))
        s = OperatorSet(shape, tuple(members))
        got = extendibility_search(s).status
        want = _exhaustive_verdict(s)
        verdicts[want] += 1
        if got != want:
            mismatches += 1
    report(
        "10d",
        mismatches == 0 and min(verdicts.values()) > 0,
        f"1000 cases ({verdicts[EXTENDIBLE]} extendible, "
        f"{verdicts[UNEXTENDIBLE]} unextendible), {mismatches} mismatches",
    )
