"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line."""

import time

import numpy as np
import pytest

from unclonable import cli, cosets, gf2, qsim, rom, schemes, spectral
from unclonable import games as g
from unclonable.games import InputDistribution


def within_3sigma(est, p, trials):
    return abs(est - p) <= 3 * np.sqrt(p * (1 - p) / trials)


# 1. exact correctness of every encryption variant


def test_01_scheme_correctness(acceptance):
    start = time.perf_counter()
    failures, checks = 0, 0
    for lam in (2, 4, 6):
        for variant in ("coset", "bl", "wiesner", "conjugate"):
            msg_bits = 2 if variant in ("coset", "bl") else lam
            for k in range(1000):
                rng = np.random.default_rng([1, lam, k, schemes.VARIANTS.index(variant)])
                key = schemes.ue_gen(variant, lam, rng)
                H = schemes.ue_oracle(variant, lam, rng, msg_bits)
                for m in range(1 << msg_bits):
                    ct = schemes.ue_enc(key, m, H, rng)
                    failures += schemes.ue_dec(key, ct, H, rng) != m
                    checks += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 60
    acceptance(1, ok, f"{failures} failures in {checks} dec(enc(m)) checks, {elapsed:.1f} s (< 60 s)")
    assert ok


# 2. coset-state structure


def test_02_coset_structure(acceptance):
    rng = np.random.default_rng(2)
    worst_signed, worst_literal, flips = 0.0, 0.0, 0
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        A = gf2.sample_subspace(n, int(rng.integers(0, n + 1)), rng)
        D = gf2.dual(A)
        s, sp = gf2.sample_coset_rep(A, rng), gf2.sample_coset_rep(D, rng)
        lhs = qsim.hadamard_all(cosets.prepare(A, s, sp))
        rhs = cosets.prepare(D, sp, s)
        sign = (-1) ** gf2.inner(s, sp)
        worst_signed = max(worst_signed, float(np.linalg.norm(lhs - sign * rhs)))
        if sign == 1:
            worst_literal = max(worst_literal, float(np.linalg.norm(lhs - rhs)))
        else:
            flips += 1
    worst_gram = 0.0
    for d in range(5):
        _, M = cosets.coset_family(gf2.sample_subspace(4, d, rng))
        worst_gram = max(worst_gram, float(np.abs(M.conj().T @ M - np.eye(16)).max()))
    ok = worst_signed <= 1e-10 and worst_literal <= 1e-10 and worst_gram <= 1e-10
    acceptance(
        2,
        ok,
        f"duality err {worst_signed:.1e} (with sign (-1)^<s,s'>; {flips}/1000 triples flip sign), "
        f"unsigned err on <s,s'>=0 {worst_literal:.1e}, Gram err {worst_gram:.1e}",
    )
    assert ok


# 3. Breidbart MOE


def test_03_breidbart(acceptance):
    start = time.perf_counter()
    parts, ok = [], True
    for lam in range(1, 7):
        out = g.run_moe_wiesner("breidbart", lam, 100_000, seed=7)
        p = g.breidbart_closed_form(lam)
        hit = within_3sigma(out.estimate, p, out.trials)
        ok &= hit
        parts.append(f"{lam}:{out.estimate:.4f}/{p:.4f}{'' if hit else '!'}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 120
    acceptance(3, ok, f"estimate/closed form {' '.join(parts)}, {elapsed:.0f} s (< 120 s)")
    assert ok


# 4. half-message attack on the Wiesner one-time pad


def test_04_half_message_attack(acceptance):
    out = g.run_ind_cpa("wiesner", "half-split", 6, 10_000, seed=4)
    ok = out.estimate == 1.0
    acceptance(4, ok, f"win estimate {out.estimate} over {out.trials} trials (need exactly 1.0)")
    assert ok


# 5. Haar statistic and the deterministic-scheme attack


def test_05_haar(acceptance):
    start = time.perf_counter()
    rec = g.run_haar_statistic(14, 200, seed=1)
    out = g.run_deterministic_attack("conjugate", 10, 300, seed=5)
    bound = (out.stats["mean_T_B"] + out.stats["mean_T_C"]) / 2
    elapsed = time.perf_counter() - start
    ok_stat = abs(rec["mean"] - g.HAAR_LIMIT) <= 0.03
    ok_attack = out.estimate >= 0.55 and out.estimate >= bound - 3 * out.mc_sigma
    ok = ok_stat and ok_attack and elapsed < 600
    acceptance(
        5,
        ok,
        f"Haar mean {rec['mean']:.4f} vs {g.HAAR_LIMIT:.5f} (+-0.03); attack win {out.estimate:.3f} "
        f">= 0.55 and >= {bound:.3f} - 3 sigma; {elapsed:.0f} s (< 600 s)",
    )
    assert ok


# 6. Jordan suite


def _projector_pair(rng):
    dim = int(rng.integers(4, 65))
    if rng.random() < 0.5:
        return (
            spectral.random_projector(dim, int(rng.integers(0, dim + 1)), rng),
            spectral.random_projector(dim, int(rng.integers(0, dim + 1)), rng),
        )
    # shared, exclusive and generic directions
    U = qsim.haar_unitary_dim(dim, rng)
    k = dim // 4
    rest = dim - 3 * k
    tail = U[:, 3 * k :]
    g0 = tail @ qsim.haar_unitary_dim(rest, rng)[:, : rest // 2]
    g1 = tail @ qsim.haar_unitary_dim(rest, rng)[:, : rest // 2]
    P0 = qsim.projector_onto(np.hstack([U[:, :k], U[:, k : 2 * k], g0]))
    P1 = qsim.projector_onto(np.hstack([U[:, :k], U[:, 2 * k : 3 * k], g1]))
    return P0, P1


def _cross_terms(P0, P1):
    vals, vecs = np.linalg.eigh((P0 + P1) / 2)
    hyp = (np.abs(vals[:, None] - vals[None, :]) > 1e-6) & (np.abs(vals[:, None] + vals[None, :] - 1) > 1e-6)
    worst = 0.0
    for P in (P0, P1):
        C = vecs.conj().T @ P @ vecs
        if hyp.any():
            worst = max(worst, float(np.abs(C[hyp]).max()))
    return worst


def test_06_jordan(acceptance):
    rng = np.random.default_rng(6)
    worst_sum, worst_cross, blocks = 0.0, 0.0, 0
    for _ in range(500):
        P0, P1 = _projector_pair(rng)
        dec = spectral.jordan(P0, P1)
        for b in dec.two_dim():
            worst_sum = max(worst_sum, abs(float(np.sum(b.eigenvalues)) - 1))
            blocks += 1
        worst_cross = max(worst_cross, _cross_terms(P0, P1))
    P, vals, vecs = spectral.three_projector_example()
    hi, lo = (4 + np.sqrt(2)) / 6, (4 - np.sqrt(2)) / 6
    i, j = int(np.argmin(np.abs(vals - hi))), int(np.argmin(np.abs(vals - lo)))
    ex_err = max(abs(vals[i] - hi), abs(vals[j] - lo))
    cross = abs(spectral.cross_term(vecs[:, i], P[0], vecs[:, j]))
    total = vals[i] + vals[j]
    ok = worst_sum <= 1e-9 and worst_cross <= 1e-9 and ex_err <= 1e-9 and cross > 0.1 and abs(total - 4 / 3) <= 1e-9
    acceptance(
        6,
        ok,
        f"{blocks} two-dim blocks, max |sum-1| {worst_sum:.1e}, max cross term {worst_cross:.1e}; "
        f"example eigenvalue err {ex_err:.1e}, |<v1|P1|v2>| {cross:.3f}, sum {total:.12f}",
    )
    assert ok


# 7. threshold measurements


def _random_povm(dim, rng):
    U = qsim.haar_unitary_dim(dim, rng)
    vals = rng.random(dim)
    vals[: dim // 3] = vals[0]
    return (U * vals) @ U.conj().T


def test_07_threshold(acceptance):
    rng = np.random.default_rng(7)
    disagree, worst_complete, worst_conserve = 0, 0.0, 0.0
    for k in range(1000):
        dim = int(rng.choice([2, 4, 8, 16]))
        P = _random_povm(dim, rng)
        mode = "one-sided" if k % 2 else "symmetric"
        gamma = rng.uniform(0.01, 0.99) if mode == "one-sided" else rng.uniform(0.01, 0.49)
        T = spectral.ThresholdMeasurement(P, gamma, mode)
        Elo, Ehi = T.projectors()
        worst_complete = max(worst_complete, float(np.linalg.norm(Elo + Ehi - np.eye(dim))))
        psi = qsim.haar_state(int(np.log2(dim)), rng)
        bit, post = T.measure(psi, rng)
        again, _ = T.measure(post, rng)
        disagree += again != bit
        rho = np.outer(psi, psi.conj())
        branches = spectral.measurement_branches(P, rho)
        lhs = sum(np.trace(P @ r) for _, r in branches)
        worst_conserve = max(worst_conserve, float(abs(lhs - np.trace(P @ rho))))
    ok = disagree == 0 and worst_complete <= 1e-9 and worst_conserve <= 1e-9
    acceptance(
        7,
        ok,
        f"repeat disagreements {disagree}/1000, completeness err {worst_complete:.1e}, "
        f"conservation err {worst_conserve:.1e}",
    )
    assert ok


# 8. BBBV reprogramming bound


def test_08_bbbv(acceptance):
    recs = [rom.bbbv_sweep(eps, 500, seed=8) for eps in (0.1, 0.3)]
    ok = all(r["checked"] > 0 and r["violations"] == 0 for r in recs)
    detail = "; ".join(
        f"eps={r['eps']}: {r['violations']}/{r['checked']} instances exceed eps/2, "
        f"max delta/eps {r['max_delta_over_eps']:.3f}, 2 eps exceeded {r['hybrid_violations']}"
        for r in recs
    )
    acceptance(8, ok, detail)
    assert ok


# 9. copy-protection


def test_09_copy_protection(acceptance):
    rec = g.run_cp_correctness(4, 1000, seed=9)
    rng = np.random.default_rng(9)
    sizes = np.array(
        [2 ** gf2.intersection_dim(gf2.sample_subspace(8, 4, rng), gf2.sample_subspace(8, 4, rng)) for _ in range(10_000)],
        dtype=float,
    )
    mean, se = sizes.mean(), sizes.std(ddof=1) / np.sqrt(len(sizes))
    ok = (
        rec["accept_on_point"] == 1.0
        and rec["min_fidelity"] >= 1 - 1e-9
        and rec["accept_off_point"] <= 0.01
        and rec["abort_rate"] <= rec["abort_closed_form"] + 3 * rec["abort_sigma"]
        and mean < 2 + 3 * se
    )
    acceptance(
        9,
        ok,
        f"on-point {rec['accept_on_point']:.3f}, min fidelity {rec['min_fidelity']:.12f}, "
        f"off-point {rec['accept_off_point']:.3f} (<= 0.01), abort rate {rec['abort_rate']:.3f} "
        f"vs {rec['abort_closed_form']:.4f} + 3 sigma, E|A∩A'| {mean:.3f} (< 2 + {3 * se:.3f})",
    )
    assert ok


# 10. blind and trivial baselines in all six harnesses


BASELINES = [
    ("moe-wiesner forward-b l=2", lambda n: g.run_moe_wiesner("forward-b", 2, n, 10), 2**-2),
    ("moe-coset forward-b l=4", lambda n: g.run_moe_coset("forward-b", 4, n, 10), 2**-4),
    ("moe-coset measure-broadcast l=4", lambda n: g.run_moe_coset("measure-broadcast", 4, n, 10), 2**-2),
    ("direct-product random-pair l=4", lambda n: g.run_direct_product("random-pair", 4, n, 10), 2**-4),
    ("ind-cpa coset forward-b l=4", lambda n: g.run_ind_cpa("coset", "forward-b", 4, n, 10), 0.5),
    ("reprogram identical decode-compare l=4", lambda n: g.run_reprogram_game("identical", "decode-compare", 4, n, 10), 0.5),
    ("reprogram independent both-random l=2", lambda n: g.run_reprogram_game("independent", "both-random", 2, n, 10), 0.25),
    ("strengthened both-random l=2", lambda n: g.run_strengthened_moe("both-random", 2, 2, n, 10), 0.25),
    (
        "piracy trivial correlated:0.3 l=4",
        lambda n: g.run_piracy_point("trivial", 4, InputDistribution.correlated(0.3), n, 10),
        InputDistribution.correlated(0.3).p_triv(),
    ),
    (
        "piracy both-guess-0 correlated:0.5 l=4",
        lambda n: g.run_piracy_point("both-guess-0", 4, InputDistribution.correlated(0.5), n, 10),
        0.5,
    ),
]


def test_10_baselines(acceptance):
    misses = []
    for name, run, p in BASELINES:
        out = run(100_000)
        if not within_3sigma(out.estimate, p, out.trials):
            misses.append(f"{name}: {out.estimate:.5f} vs {p:.5f}")
    ok = not misses
    acceptance(10, ok, f"{len(BASELINES) - len(misses)}/{len(BASELINES)} baselines within 3 sigma at 1e5 trials" + (
        "; misses: " + ", ".join(misses) if misses else ""))
    assert ok


# 11. CLI reproducibility across thread counts


REPRO_RUNS = [
    ["--experiment", "moe-wiesner", "--lambda", "1..3", "--trials", "300"],
    ["--experiment", "moe-coset", "--lambda", "4", "--trials", "200", "--strategy", "measure-broadcast"],
    ["--experiment", "haar-attack", "--lambda", "6", "--trials", "40"],
    ["--experiment", "piracy", "--lambda", "3", "--trials", "100", "--inputs", "product:0.3,0.6"],
    ["--experiment", "reprogram", "--lambda", "2", "--trials", "100", "--mode", "independent"],
    ["--experiment", "haar-statistic", "--qubits", "10", "--trials", "30"],
    ["--experiment", "cp-correctness", "--lambda", "3", "--trials", "50"],
]


def test_11_reproducibility(acceptance, tmp_path):
    differing = []
    for k, argv in enumerate(REPRO_RUNS):
        blobs = []
        for threads in ("1", "2", "3", "1"):
            out, table = tmp_path / f"{k}-{threads}-{len(blobs)}.json", tmp_path / f"{k}-{threads}-{len(blobs)}.csv"
            assert cli.main([*argv, "--seed", "11", "--threads", threads, "--out", str(out), "--csv", str(table)]) == 0
            blobs.append(out.read_bytes() + table.read_bytes())
        if len(set(blobs)) != 1:
            differing.append(argv[1])
    ok = not differing
    acceptance(11, ok, f"{len(REPRO_RUNS) - len(differing)}/{len(REPRO_RUNS)} CLI configs byte-identical over threads 1, 2, 3, 1")
    assert ok
