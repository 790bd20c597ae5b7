import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from unclonable import gf2, qsim, rom
from unclonable.cosets import membership_oracle, point_oracle_from_membership
from unclonable.errors import QueryBudgetExceeded


def test_consistency_and_width():
    rng = np.random.default_rng(0)
    O = rom.new_oracle(8, 5, rng)
    for x in range(256):
        assert O(x) == O(x)
        assert 0 <= O(x) < 32
    wide = rom.new_oracle(80, 130, rng)
    x = (1 << 79) | 12345
    assert wide(x) == wide(x) and wide(x) >> 130 == 0


def test_table_agrees_with_classical_access():
    rng = np.random.default_rng(1)
    for m, k in [(1, 1), (6, 3), (10, 40), (4, 62), (4, 70)]:
        O = rom.new_oracle(m, k, rng)
        t = O.table()
        assert [int(v) for v in t] == [O(x) for x in range(1 << m)]


def test_truth_tables_uniform():
    # m = k = 1: four truth tables, each with probability 1/4
    rng = np.random.default_rng(2)
    trials = 10000
    counts = np.zeros(4)
    for _ in range(trials):
        O = rom.new_oracle(1, 1, rng)
        counts[2 * O(0) + O(1)] += 1
    sigma = np.sqrt(trials * 0.25 * 0.75)
    assert np.all(np.abs(counts - trials / 4) < 3 * sigma)


def test_output_bits_balanced():
    rng = np.random.default_rng(3)
    O = rom.new_oracle(14, 8, rng)
    t = O.table()
    for bit in range(8):
        frac = ((t >> bit) & 1).mean()
        assert abs(frac - 0.5) < 4 * np.sqrt(0.25 / len(t))


def test_same_key_rematerializes():
    a = rom.new_oracle(6, 6, np.random.default_rng(4))
    b = rom.OracleTable(6, 6, a.key)
    assert all(a(x) == b(x) for x in range(64))


# reprogramming


def test_reprogram_examples():
    rng = np.random.default_rng(5)
    O = rom.new_oracle(4, 3, rng)
    O2 = rom.reprogram(O, 5, 6)
    assert O2(5) == 6
    assert all(O2(x) == O(x) for x in range(16) if x != 5)
    assert rom.reprogram(O2, 5, 1)(5) == 1
    # persistence
    before = [O(x) for x in range(16)]
    rom.reprogram(O, 3, 0)
    assert [O(x) for x in range(16)] == before
    assert O2.table()[5] == 6 and O.table()[5] == before[5]


def test_reprogram_length_checks():
    O = rom.new_oracle(3, 2, np.random.default_rng(6))
    with pytest.raises(ValueError):
        O.reprogram(8, 0)
    with pytest.raises(ValueError):
        O.reprogram(0, 4)


def test_reprogram_callable_sees_layer_below():
    O = rom.new_oracle(3, 1, np.random.default_rng(7))
    O2 = O.reprogram(2, rom.flip)
    assert O2(2) == 1 - O(2)
    assert O2.reprogram(2, rom.flip)(2) == O(2)
    assert O2.table()[2] == 1 - O(2)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_reprogram_via_membership_matches_point_reprogram(half, seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(0, half + 1))
    A = gf2.sample_subspace(half, d, rng)
    D = gf2.dual(A)
    s, sp = gf2.sample_coset_rep(A, rng), gf2.sample_coset_rep(D, rng)
    Qs = point_oracle_from_membership(A, membership_oracle(A, s))
    Qsp = point_oracle_from_membership(D, membership_oracle(D, sp))
    O = rom.new_oracle(2 * half, 2, rng)
    val = int(rng.integers(4))
    R1 = rom.reprogram_via_membership(O, Qs, Qsp, val)
    R2 = rom.reprogram(O, (s << half) | sp, val)
    assert [R1(x) for x in range(1 << 2 * half)] == [R2(x) for x in range(1 << 2 * half)]
    assert R1.table().tolist() == R2.table().tolist()
    hits = [x for x in range(1 << 2 * half) if Qs(x >> half) and Qsp(x & ((1 << half) - 1))]
    assert hits == [(s << half) | sp]
    wrong = sp ^ 1 if half > 0 else sp
    if gf2.canonical_rep(D, wrong) == wrong and wrong != sp:
        assert R1((s << half) | wrong) == O((s << half) | wrong)


# coherent access


def test_apply_coherent_classical_inputs():
    rng = np.random.default_rng(8)
    O = rom.new_oracle(3, 2, rng)
    for x in range(8):
        psi = qsim.basis_state(5, x << 2)
        out = rom.apply_coherent(O, psi, [0, 1, 2], [3, 4])
        assert np.allclose(out, qsim.basis_state(5, (x << 2) | O(x)))


def test_apply_coherent_is_involution_and_linear():
    rng = np.random.default_rng(9)
    O = rom.new_oracle(3, 2, rng)
    psi = qsim.haar_state(6, rng)
    regs = ([5, 0, 2], [3, 1])
    once = rom.apply_coherent(O, psi, *regs)
    assert np.allclose(rom.apply_coherent(O, once, *regs), psi)
    x0, x1 = 2, 6
    sup = (qsim.basis_state(5, x0 << 2) + qsim.basis_state(5, x1 << 2)) / np.sqrt(2)
    out = rom.apply_coherent(O, sup, [0, 1, 2], [3, 4])
    expected = (qsim.basis_state(5, (x0 << 2) | O(x0)) + qsim.basis_state(5, (x1 << 2) | O(x1))) / np.sqrt(2)
    assert np.allclose(out, expected)


def test_apply_coherent_register_mismatch():
    O = rom.new_oracle(2, 1, np.random.default_rng(10))
    with pytest.raises(ValueError):
        rom.apply_coherent(O, qsim.basis_state(3), [0], [1])


def test_query_log_weights_sum_to_one():
    rng = np.random.default_rng(11)
    c = rom.random_oracle_circuit(rng, T=5)
    O = rom.new_oracle(2, 1, rng)
    log = rom.QueryLog()
    rom.run_circuit(c, lambda i: O, log)
    assert len(log) == 5
    for w in log.weights:
        assert abs(w.sum() - 1) < 1e-10


def test_budgeted_oracle():
    O = rom.BudgetedOracle(rom.new_oracle(2, 1, np.random.default_rng(12)), budget=1)
    O(0)
    with pytest.raises(QueryBudgetExceeded):
        O(1)


# BBBV


def test_bbbv_empty_set():
    rng = np.random.default_rng(13)
    c = rom.random_oracle_circuit(rng, T=4)
    O = rom.new_oracle(2, 1, rng)
    delta, w = rom.bbbv_experiment(c, O, [], rng)
    assert delta < 1e-12 and w == 0


def test_bbbv_full_weight_query():
    # a circuit that classically queries y = 1 with the output register in |0>
    nq = 3
    c = rom.OracleCircuit(nq, (0, 1), (2,), qsim.basis_state(nq, 0b010), [np.eye(8), np.eye(8)])
    O = rom.new_oracle(2, 1, np.random.default_rng(14))
    delta, w = rom.bbbv_experiment(c, O, [(0, 1)], np.random.default_rng(0))
    assert w == pytest.approx(1)
    assert delta == pytest.approx(1)


def test_bbbv_budget():
    rng = np.random.default_rng(15)
    c = rom.random_oracle_circuit(rng, T=3)
    with pytest.raises(QueryBudgetExceeded):
        rom.bbbv_experiment(c, rom.new_oracle(2, 1, rng), [], rng, max_queries=2)


def _bbbv_instances(seed, count):
    rng = np.random.default_rng(seed)
    for j in range(count):
        T = int(rng.integers(1, 9))
        c = rom.random_oracle_circuit(rng, T, spread=[None, 0.3, 1.0, 3.0][j % 4])
        O = rom.new_oracle(2, 1, rng)
        log = rom.QueryLog()
        rom.run_circuit(c, lambda i: O, log)
        yield rng, c, O, log


def test_bbbv_hybrid_bound_two_eps():
    # the hybrid argument gives || phi_T - phi'_T || <= 2 sqrt(T sum W) <= 2 eps
    for rng, c, O, log in _bbbv_instances(16, 200):
        pairs = [(i, y) for i in range(c.T) for y in range(4)]
        F = [p for p in pairs if rng.random() < 0.5]
        delta, w = rom.bbbv_experiment(c, O, F, rng)
        assert delta <= 2 * np.sqrt(c.T * w) + 1e-9


def test_bbbv_half_eps_counterexample():
    # one query on sqrt(w)|0> + sqrt(1-w)|1> with the output in |->, reprogramming input 0:
    # weight sum w but trace distance 2 sqrt(w(1-w)), far above sqrt(w)/2
    w = 0.01
    init = np.kron(np.array([np.sqrt(w), np.sqrt(1 - w)]), np.array([1, -1]) / np.sqrt(2))
    c = rom.OracleCircuit(2, (0,), (1,), init, [np.eye(4), np.eye(4)])
    O = rom.OracleTable(1, 1, 0).reprogram(0, 0).reprogram(1, 0)
    delta, ws = rom.bbbv_experiment(c, O, [(0, 0)], np.random.default_rng(0), values={(0, 0): 1})
    eps = np.sqrt(ws * c.T)
    assert ws == pytest.approx(w)
    assert delta == pytest.approx(2 * np.sqrt(w * (1 - w)))
    assert delta > eps / 2
    assert delta <= 2 * eps


def test_bbbv_sweep_hybrid_bound_and_budget():
    rec = rom.bbbv_sweep(0.2, 40, seed=3)
    assert rec["checked"] == 40
    assert rec["hybrid_violations"] == 0
    assert rec["max_delta_over_eps"] <= 2 + 1e-9
    assert rom.bbbv_sweep(0.2, 40, seed=3) == rec
