"""Seeded experiment runner with JSON reports and CSV tables.

Reports never depend on --threads: every trial draws from its own indexed RNG
stream and the thread count is left out of the echoed config. Wall-clock time
goes to stderr, and into the report only with --timing.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from . import __version__, games, qsim, rom, spectral

EXPERIMENTS = (
    "moe-wiesner",
    "moe-coset",
    "direct-product",
    "ind-cpa",
    "reprogram",
    "strengthened-moe",
    "cp-correctness",
    "piracy",
    "haar-attack",
    "haar-statistic",
    "jordan",
    "bbbv",
)

# experiments whose records do not depend on lambda
NO_LAMBDA = ("haar-statistic", "jordan", "bbbv")

# (max lambda, lambda must be even) checked for the whole sweep before running
LAMBDA_LIMITS = {
    "moe-wiesner": (qsim.MAX_QUBITS, False),
    "moe-coset": (qsim.MAX_QUBITS, True),
    "direct-product": (qsim.MAX_QUBITS, True),
    "ind-cpa": (qsim.MAX_QUBITS, False),
    "reprogram": (rom.MAX_COHERENT_BITS // 2, True),
    "strengthened-moe": (rom.MAX_COHERENT_BITS // 2, True),
    "cp-correctness": (7, False),
    "piracy": (7, False),
    "haar-attack": (12, True),
}

DEFAULT_STRATEGY = {
    "moe-wiesner": "breidbart",
    "moe-coset": "forward-b",
    "direct-product": "random-pair",
    "ind-cpa": "forward-b",
    "reprogram": "decode-compare",
    "strengthened-moe": "forward-b",
    "piracy": "trivial",
}

CSV_FIELDS = ("param", "estimate", "sigma", "trials")


class ConfigError(ValueError):
    pass


def parse_lambda(text: str) -> list[int]:
    """'4' or an inclusive range '1..6'."""
    try:
        if ".." in text:
            a, b = text.split("..")
            lo, hi = int(a), int(b)
            if lo > hi:
                raise ConfigError(f"empty lambda range {text!r}")
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"bad --lambda {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="unclonable", description=__doc__.splitlines()[0])
    p.add_argument("--experiment", required=True, choices=EXPERIMENTS)
    p.add_argument("--lambda", dest="lam", default="4", help="security parameter, single value or range a..b")
    p.add_argument("--trials", type=int, default=1000, help="trials, samples, projector pairs or circuits")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strategy", help="adversary strategy for game experiments")
    p.add_argument("--variant", help="encryption variant (ind-cpa, haar-attack)")
    p.add_argument("--mode", help="challenge mode for the reprogram game")
    p.add_argument("--wiring", default="punctured", help="reprogram game oracle wiring: punctured or true")
    p.add_argument("--mixing", default="haar", help="haar-attack mixing unitary: haar or identity")
    p.add_argument("--inputs", default="product:0.5,0.5", help="piracy input distribution")
    p.add_argument("--n-bits", type=int, default=2, help="challenge bits in the strengthened MOE game")
    p.add_argument("--msg-bits", type=int, default=1, help="message length for the coset and bl variants")
    p.add_argument("--membership-oracles", action="store_true", help="hand membership oracles to B and C")
    p.add_argument("--qubits", type=int, default=14, help="total qubits for haar-statistic")
    p.add_argument("--eps", default="0.1,0.3", help="comma-separated epsilons for bbbv")
    p.add_argument("--out", help="JSON report path (default stdout)")
    p.add_argument("--csv", help="CSV table path")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--timing", action="store_true", help="include wall-clock seconds in the report")
    return p


def config_of(args) -> dict:
    """The replayable config echoed in every report (thread count excluded)."""
    exp = args.experiment
    cfg = {"experiment": exp, "trials": args.trials, "seed": args.seed}
    if exp not in NO_LAMBDA:
        cfg["lambda"] = args.lambdas
    if exp in DEFAULT_STRATEGY:
        cfg["strategy"] = args.strategy or DEFAULT_STRATEGY[exp]
    if exp == "ind-cpa":
        cfg["variant"] = args.variant or "coset"
        cfg["msg_bits"] = args.msg_bits
    if exp == "haar-attack":
        cfg["variant"] = args.variant or "conjugate"
        cfg["mixing"] = args.mixing
    if exp == "reprogram":
        cfg["mode"] = args.mode or "identical"
        cfg["wiring"] = args.wiring
    if exp == "strengthened-moe":
        cfg["n_bits"] = args.n_bits
    if exp == "moe-coset":
        cfg["membership_oracles"] = args.membership_oracles
    if exp == "piracy":
        cfg["inputs"] = args.inputs
    if exp == "haar-statistic":
        cfg["qubits"] = args.qubits
    if exp == "bbbv":
        cfg["eps"] = args.eps_values
    return cfg


def validate(args):
    if args.trials < 1:
        raise ConfigError("--trials must be >= 1")
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    args.lambdas = parse_lambda(args.lam)
    try:
        args.eps_values = [float(e) for e in args.eps.split(",")]
    except ValueError:
        raise ConfigError(f"bad --eps {args.eps!r}") from None
    if any(e <= 0 for e in args.eps_values):
        raise ConfigError("--eps values must be positive")
    if args.experiment == "piracy":
        args.dist = games.InputDistribution.parse(args.inputs)
    if args.experiment == "haar-statistic" and args.qubits > qsim.MAX_QUBITS:
        raise qsim.ResourceLimit(f"{args.qubits} qubits exceeds the dense limit of {qsim.MAX_QUBITS}")
    if args.experiment in LAMBDA_LIMITS:
        limit, even = LAMBDA_LIMITS[args.experiment]
        if args.experiment == "moe-wiesner" and (args.strategy or "breidbart") == "breidbart":
            limit = qsim.MAX_OPERATOR_QUBITS
        for lam in args.lambdas:
            if lam < 1:
                raise ConfigError(f"lambda must be >= 1, got {lam}")
            if even and lam % 2:
                raise ConfigError(f"{args.experiment} needs even lambda, got {lam}")
            if lam > limit:
                raise qsim.ResourceLimit(f"lambda {lam} exceeds the {args.experiment} limit of {limit}")


# runners return (JSON record, CSV rows)


def _game_row(out: games.GameOutcome, param) -> dict:
    return {"param": param, "estimate": out.estimate, "sigma": out.mc_sigma, "trials": out.trials}


def _run_game(args, cfg, lam):
    exp, t, seed, th = args.experiment, args.trials, args.seed, args.threads
    strategy = cfg.get("strategy")
    if exp == "moe-wiesner":
        out = games.run_moe_wiesner(strategy, lam, t, seed, threads=th)
    elif exp == "moe-coset":
        out = games.run_moe_coset(strategy, lam, t, seed, with_membership_oracles=cfg["membership_oracles"], threads=th)
    elif exp == "direct-product":
        out = games.run_direct_product(strategy, lam, t, seed, threads=th)
    elif exp == "ind-cpa":
        out = games.run_ind_cpa(cfg["variant"], strategy, lam, t, seed, msg_bits=cfg["msg_bits"], threads=th)
    elif exp == "reprogram":
        out = games.run_reprogram_game(cfg["mode"], strategy, lam, t, seed, wiring=cfg["wiring"], threads=th)
    elif exp == "strengthened-moe":
        out = games.run_strengthened_moe(strategy, lam, cfg["n_bits"], t, seed, threads=th)
    elif exp == "piracy":
        out = games.run_piracy_point(strategy, lam, args.dist, t, seed, threads=th)
    else:
        out = games.run_deterministic_attack(cfg["variant"], lam, t, seed, mixing=cfg["mixing"], threads=th)
    return out.to_record(), [_game_row(out, lam)]


def _run_cp(args, cfg, lam):
    rec = games.run_cp_correctness(lam, args.trials, args.seed, threads=args.threads)
    p = rec["accept_on_point"]
    row = {"param": lam, "estimate": p, "sigma": float(np.sqrt(p * (1 - p) / args.trials)), "trials": args.trials}
    return rec, [row]


def _run_haar_statistic(args, cfg):
    rec = games.run_haar_statistic(args.qubits, args.trials, args.seed, threads=args.threads)
    row = {"param": args.qubits, "estimate": rec["mean"], "sigma": rec["sd"] / np.sqrt(args.trials), "trials": args.trials}
    return [rec], [row], list(CSV_FIELDS)


def _run_bbbv(args, cfg):
    recs, rows = [], []
    for eps in args.eps_values:
        rec = rom.bbbv_sweep(eps, args.trials, args.seed)
        n = max(rec["checked"], 1)
        f = rec["violations"] / n
        recs.append(rec)
        rows.append({"param": eps, "estimate": f, "sigma": float(np.sqrt(f * (1 - f) / n)), "trials": rec["checked"]})
    return recs, rows, list(CSV_FIELDS)


def _run_jordan(args, cfg):
    """Random projector pairs of dimension 4..64; CSV holds the block tables."""
    worst_sum, worst_eig, blocks = 0.0, 0.0, 0
    rows = []
    for k in range(args.trials):
        rng = np.random.default_rng(np.random.SeedSequence([args.seed, k]))
        dim = int(rng.integers(4, 65))
        P0 = spectral.random_projector(dim, int(rng.integers(1, dim)), rng)
        P1 = spectral.random_projector(dim, int(rng.integers(1, dim)), rng)
        dec = spectral.jordan(P0, P1)
        for b in dec.two_dim():
            worst_sum = max(worst_sum, abs(float(np.sum(b.eigenvalues)) - 1))
        vals, _ = dec.eigenpairs()
        ref = np.linalg.eigvalsh(0.5 * P0 + 0.5 * P1)
        worst_eig = max(worst_eig, float(np.max(np.abs(np.sort(vals) - ref))))
        blocks += len(dec.blocks)
        for r in dec.rows():
            rows.append({"pair": k, "pair_dim": dim, "block": r["block"], "block_dim": r["dim"],
                         "angle": r["angle"], "eigenvalues": r["eigenvalues"]})
    rec = {
        "experiment": "jordan",
        "pairs": args.trials,
        "seed": args.seed,
        "blocks": blocks,
        "max_two_dim_sum_error": worst_sum,
        "max_eigenvalue_error": worst_eig,
    }
    return [rec], rows, ["pair", "pair_dim", "block", "block_dim", "angle", "eigenvalues"]


def run(args) -> tuple[dict, list, list]:
    """Validated args -> (report, csv rows, csv header)."""
    cfg = config_of(args)
    exp = args.experiment
    if exp == "haar-statistic":
        results, rows, header = _run_haar_statistic(args, cfg)
    elif exp == "bbbv":
        results, rows, header = _run_bbbv(args, cfg)
    elif exp == "jordan":
        results, rows, header = _run_jordan(args, cfg)
    else:
        results, rows, header = [], [], list(CSV_FIELDS)
        step = _run_cp if exp == "cp-correctness" else _run_game
        for lam in args.lambdas:
            rec, rr = step(args, cfg, lam)
            results.append(rec)
            rows.extend(rr)
    report = {"library": "unclonable", "version": __version__, "config": cfg, "results": results}
    return report, rows, header


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def dumps_csv(rows: list, header: list) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        validate(args)
        report, rows, header = run(args)
    except qsim.ResourceLimit as e:
        print(f"refused: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    elapsed = time.perf_counter() - start
    if args.timing:
        report["wall_clock_s"] = elapsed
    text = dumps_report(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as f:
            f.write(dumps_csv(rows, header))
    print(f"{args.experiment}: {elapsed:.2f} s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
