"""Command-line harness: ``torus-superres <command> [flags]``.

Exit codes: 0 on success, 1 when a verification fails, 2 on a usage error.
JSON goes through ``sort_keys`` so a fixed config and seed give identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from math import floor, sqrt

import numpy as np

from . import adversarial, bump, cube, recon
from .fourier import LinfBall, FourierTable, max_coeff_diff, perturb, table_of
from .metrics import HHParams, hh_distance, hh_violation, wasserstein
from .torus import DiracComb, ball_mass

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    command: str
    params: dict
    seed: int = 0
    output: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> ExperimentConfig:
        return cls(**json.loads(text))


# json helpers ----------------------------------------------------------------


def _plain(obj):
    """Convert numpy scalars/arrays and complex numbers to JSON-friendly values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc.msg}") from None


def _emit(report: dict, args, summary: str):
    text = dumps(report)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        print(summary)
    else:
        sys.stdout.write(text)


def _emit_rows(rows: list[dict], args, summary: str):
    if args.format == "json":
        _emit({"rows": rows}, args, summary)
        return
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(buf.getvalue())
        print(summary)
    else:
        sys.stdout.write(buf.getvalue())


# gen ---------------------------------------------------------------------------


def build_pair(construction: str, d: int, eps: float, seed: int, opts: dict) -> dict:
    """Pair document for one construction; every effective parameter is recorded."""
    params = {"construction": construction, "d": d, "epsilon": eps, "seed": seed}
    if construction == "grid":
        D1, D2, Tp = adversarial.grid_pair(d, eps)
        params["grid_size"] = Tp
        return {"params": params, "a": D1.to_dict(), "b": D2.to_dict()}
    if construction == "onedim":
        if d != 1:
            raise UsageError("--d must be 1 for the onedim construction")
        D1, D2 = adversarial.one_dim_pair(eps)
        return {"params": params, "a": D1.to_dict(), "b": D2.to_dict()}
    if construction == "random":
        pair = adversarial.random_separated_pair(
            d, eps, seed, opts.get("max_retries") or 100,
            M=opts.get("M"), n=opts.get("jackson_n"), kappa=opts.get("kappa"))
        params.update(M=pair.M, n=pair.n, kappa=pair.kappa, attempts=pair.attempts)
        c1, c2 = pair.base_combs()
        return {"params": params, "pair": pair.to_dict(), "a": c1.to_dict(), "b": c2.to_dict()}
    if construction == "cube":
        enforce = not opts.get("no_range_check")
        pair = cube.cube_mixture_pair(d, eps, opts.get("k"), enforce_range=enforce)
        params.update(k=pair.poly.k, gamma=pair.mu.gamma, enforce_range=enforce)
        doc = {"params": params, "cube": pair.to_dict()}
        if d <= cube.TABULATION_CAP:
            D1, D2 = cube.embed_cube_pair(d, pair)
            doc.update(a=D1.to_dict(), b=D2.to_dict())
        return doc
    if construction == "spikes":
        count = opts.get("spikes") or 3
        signed = bool(opts.get("signed"))
        T = opts.get("bandlimit") or recon.default_bandlimit(d, eps)
        kappa = opts.get("kappa")
        kappa = recon.default_kappa(d, eps) if kappa is None else kappa
        noise = opts.get("noise") or "worst_case_sign"
        signal = recon.random_spikes(d, count, seed, signed)
        table = perturb(table_of(signal, LinfBall(T)), kappa / 8, noise, seed)
        params.update(spikes=count, signed=signed, bandlimit=T, kappa=kappa,
                      noise=noise, noise_level=kappa / 8)
        return {"params": params, "signal": signal.to_dict(), "table": table.to_dict()}
    raise UsageError(f"--construction: unknown value {construction!r}")


def cmd_gen(args) -> int:
    doc = build_pair(args.construction, args.d, args.epsilon, args.seed, vars(args))
    _emit(doc, args, f"gen {args.construction}: d={args.d} epsilon={args.epsilon} -> {args.output}")
    return EXIT_OK


# reconstruct -----------------------------------------------------------------


def cmd_reconstruct(args) -> int:
    doc = _load(args.input)
    table = FourierTable.from_dict(doc["table"] if "table" in doc else doc)
    p = recon.default_params(args.d, args.epsilon, T=args.bandlimit, kappa=args.kappa,
                             n=args.jackson_n, K=args.grid_K)
    if table.index_set != LinfBall(p.T):
        raise UsageError(f"--bandlimit: table radius {table.index_set.T} differs from {p.T}")
    res = recon.reconstruct(table, p, args.mode)
    report = res.to_dict()
    if "signal" in doc:
        f = DiracComb.from_dict(doc["signal"])
        report["wasserstein_to_signal"] = wasserstein(f, res.comb)
    _emit(report, args, f"reconstruct {args.mode}: {len(res.comb)} spikes, gamma={res.gamma:.6g}")
    return EXIT_OK


# distance --------------------------------------------------------------------


def _pair_combs(args) -> tuple[DiracComb, DiracComb]:
    if args.pair:
        doc = _load(args.pair)
        if "a" not in doc or "b" not in doc:
            raise UsageError("--pair: file has no comb pair")
        return DiracComb.from_dict(doc["a"]), DiracComb.from_dict(doc["b"])
    if not (args.a and args.b):
        raise UsageError("--a and --b (or --pair) are required")
    return DiracComb.from_dict(_load(args.a)), DiracComb.from_dict(_load(args.b))


def cmd_distance(args) -> int:
    f, g = _pair_combs(args)
    if args.metric == "wasserstein":
        value = wasserstein(f, g)
        report = {"metric": "wasserstein", "value": value}
        summary = f"wasserstein = {value:.10g}"
    else:
        hp = HHParams(args.eps_dist, args.center_grid, args.radius_grid)
        res = hh_distance(f, g, hp)
        report = {"metric": "hh", "params": asdict(hp), **res.to_dict()}
        summary = f"hh in [{res.lower:.10g}, {res.upper:.10g}]"
    _emit(report, args, summary)
    return EXIT_OK


# bump ------------------------------------------------------------------------


def cmd_bump(args) -> int:
    B = bump.build_q(args.epsilon, args.eps_dist, args.d, args.regime,
                     degree_budget=args.degree_budget, verify=False, minimize=args.minimize)
    B.checks = bump.check_q(B.q, B.eps, B.A, B.b, B.d)
    report = {"bump": B.summary(), "inner_radius": B.inner_radius,
              "outer_radius": B.outer_radius}
    ok = all(c["ok"] for c in B.checks.values())
    if args.verify:
        v = bump.verify_bump(B, args.points, args.seed)
        s = bump.sandwich_check(B.d, B.outer_radius, args.points, args.seed)
        report["verification"] = {**v, "sandwich": s}
        ok = ok and all(c["ok"] for c in v.values()) and s["ok"]
    report["passed"] = ok
    _emit(report, args, f"bump d={B.d}: deg q={B.degree}, k={B.k}, "
                        f"{'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


# verify ----------------------------------------------------------------------


def _check(value, ok) -> dict:
    return {"value": value, "pass": bool(ok)}


def verify_grid(doc: dict) -> dict:
    p = doc["params"]
    D1, D2 = DiracComb.from_dict(doc["a"]), DiracComb.from_dict(doc["b"])
    Tp = p["grid_size"]
    _, diff = max_coeff_diff(table_of(D1, LinfBall(Tp - 1)), table_of(D2, LinfBall(Tp - 1)))
    w = wasserstein(D1, D2)
    bound = sqrt(p["d"]) / (2 * Tp)
    return {"max_fourier_diff": _check(diff, diff <= 1e-10),
            "wasserstein": _check(w, w >= bound - 1e-9),
            "wasserstein_lower_bound": bound,
            "wasserstein_at_least_eps": _check(w, w >= p["epsilon"] - 1e-9)}


def verify_onedim(doc: dict) -> dict:
    eps = doc["params"]["epsilon"]
    D1, D2 = DiracComb.from_dict(doc["a"]), DiracComb.from_dict(doc["b"])
    t1, t2 = table_of(D1, LinfBall(8)), table_of(D2, LinfBall(8))
    diffs = np.abs(t1.values - t2.values)
    parity = np.where(t1.indices[:, 0] % 2 == 0, 0.0, 4 * eps)
    w = wasserstein(D1, D2)
    hh = hh_distance(D1, D2, HHParams(0.49))
    return {"fourier_diff_by_parity": _check(float(np.max(np.abs(diffs - parity))),
                                             np.allclose(diffs, parity, atol=1e-12)),
            "wasserstein": _check(w, abs(w - eps) <= 1e-6),
            "hh": _check([hh.lower, hh.upper], abs(hh.lower - 2 * eps) <= 1e-6
                         and abs(hh.upper - 2 * eps) <= 1e-6)}


def verify_random(doc: dict) -> dict:
    pair = adversarial.SeparatedPair.from_dict(doc["pair"])
    chk = adversarial.check_separated(pair.x, pair.y, pair.eps, pair.n, pair.kappa)
    ell, gap = adversarial.max_infinite_fourier_diff(pair)
    return {"separation": _check(chk["min_cross_distance"], chk["separation_ok"]),
            "exp_sums": _check(chk["max_exp_sum"], chk["exp_sum_ok"]),
            "max_fourier_diff": _check(gap, gap < pair.kappa),
            "argmax_frequency": ell.tolist(), "kappa": pair.kappa}


def verify_cube(doc: dict) -> dict:
    pair = cube.CubePair.from_dict(doc["cube"])
    eps = pair.eps
    bek = cube.bek_supnorm_check(pair.poly)
    out = {"a0": _check(pair.poly.a0, abs(pair.poly.a0) >= 3 * eps),
           "split_masses": _check([float(pair.mu.weights.sum()), float(pair.nu.weights.sum())],
                                  abs(pair.mu.weights.sum() - 1) < 1e-12
                                  and abs(pair.nu.weights.sum() - 1) < 1e-12),
           "bek_sup": _check(bek.sup, bek.holds), "bek_bound": bek.bound,
           "mass_gap": _check(pair.mass_gap, abs(pair.mass_gap) >= 2 * eps),
           "allones_slack": _check(cube.allones_slack(pair), cube.allones_slack(pair) <= eps),
           "level_gaps": pair.level_gaps(cube.default_s_max(pair.d, eps)).tolist()}
    if "a" in doc:
        D1, D2 = DiracComb.from_dict(doc["a"]), DiracComb.from_dict(doc["b"])
        zero = np.zeros(pair.d)
        margin = ball_mass(D1, zero, 0.0) - ball_mass(D2, zero, 0.49)
        out["hh_witness"] = _check(margin, hh_violation(D1, D2, 0.49, eps, zero, 0.0))
    return out


VERIFIERS = {"grid": verify_grid, "onedim": verify_onedim,
             "random": verify_random, "cube": verify_cube}


def _all_pass(report: dict) -> bool:
    return all(v["pass"] for v in report.values() if isinstance(v, dict) and "pass" in v)


def cmd_verify(args) -> int:
    if args.input:
        doc = _load(args.input)
        construction = doc.get("params", {}).get("construction")
        if args.construction and construction != args.construction:
            raise UsageError(f"--construction {args.construction} does not match the file")
    else:
        if not (args.construction and args.d and args.epsilon):
            raise UsageError("--construction, --d and --epsilon are required without --input")
        construction = args.construction
        doc = build_pair(construction, args.d, args.epsilon, args.seed, vars(args))
    if construction not in VERIFIERS:
        raise UsageError(f"--construction: cannot verify {construction!r}")
    checks = VERIFIERS[construction](doc)
    ok = _all_pass(checks)
    flat = {k: v["value"] for k, v in checks.items() if isinstance(v, dict) and "value" in v}
    report = {"params": doc["params"], "checks": checks, "passed": ok, **flat}
    failed = [k for k, v in checks.items() if isinstance(v, dict) and not v.get("pass", True)]
    _emit(report, args, f"verify {construction}: {'PASS' if ok else 'FAIL ' + ','.join(failed)}")
    return EXIT_OK if ok else EXIT_FAIL


# report (sweeps) -------------------------------------------------------------


def _recon_row(cfg: dict) -> dict:
    d, eps, seed = cfg["d"], cfg["epsilon"], cfg["seed"]
    p = recon.default_params(d, eps, T=cfg["bandlimit"], n=cfg["jackson_n"],
                             K=cfg["grid_K"], kappa=cfg["kappa"])
    f = recon.random_spikes(d, cfg["spikes"], seed, cfg["signed"])
    u = perturb(table_of(f, LinfBall(p.T)), p.kappa / 8, "worst_case_sign")
    g = recon.reconstruct_signed(u, p)
    w = wasserstein(f, g)
    return {**cfg, "wasserstein": w, "pass": w <= 4 * eps}


def _hh_row(cfg: dict) -> dict:
    rng = np.random.Generator(np.random.Philox(cfg["seed"]))
    d, n = cfg["d"], cfg["points"]
    f = DiracComb(rng.uniform(size=(n, d)), rng.dirichlet(np.ones(n)))
    g = DiracComb(rng.uniform(size=(n, d)), rng.dirichlet(np.ones(n)))
    hp = HHParams(cfg["eps_dist"], center_grid=cfg["center_grid"])
    w = wasserstein(f, g)
    res = hh_distance(f, g, hp)
    scale = cfg["eps_dist"] - 2 * res.cover_radius
    return {**cfg, "wasserstein": w, "hh_lower": res.lower, "hh_upper": res.upper,
            "pass": res.upper <= w / scale + 1e-9}


def _bump_row(cfg: dict) -> dict:
    B = bump.build_q(cfg["epsilon"], cfg["eps_dist"], cfg["d"], cfg["regime"])
    return {**cfg, "deg_r": B.r.degree, "deg_q": B.degree, "remez_error": B.remez_error,
            "pass": all(c["ok"] for c in B.checks.values())}


def sweep_configs(args) -> tuple[list[dict], callable]:
    seeds = range(args.seed, args.seed + args.trials)
    if args.kind == "recon":
        base = {"d": args.d or 1, "epsilon": args.epsilon or 0.25, "bandlimit": args.bandlimit or 24,
                "jackson_n": args.jackson_n or 4, "grid_K": args.grid_K or 64,
                "kappa": args.kappa or 0.01, "spikes": args.spikes, "signed": args.signed}
        return [{**base, "seed": s} for s in seeds], _recon_row
    if args.kind == "hh":
        dims = [args.d] if args.d else [1, 2]
        return [{"d": d, "eps_dist": e, "seed": s, "points": 5, "center_grid": 64}
                for d in dims for e in (0.2, 0.4) for s in seeds], _hh_row
    if args.kind == "bump":
        dims = [args.d] if args.d else [4, 16, 64]
        return [{"d": d, "epsilon": args.epsilon or 0.25, "eps_dist": args.eps_dist,
                 "regime": args.regime} for d in dims], _bump_row
    raise UsageError(f"--kind: unknown sweep {args.kind!r}")


def cmd_report(args) -> int:
    configs, fn = sweep_configs(args)
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(fn, configs))
    else:
        rows = [fn(c) for c in configs]
    rows = [_plain(r) for r in rows]
    passed = sum(r["pass"] for r in rows)
    _emit_rows(rows, args, f"report {args.kind}: {passed}/{len(rows)} rows pass")
    return EXIT_OK if passed == len(rows) else EXIT_FAIL


# parser ----------------------------------------------------------------------


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    gen_opts = argparse.ArgumentParser(add_help=False)
    gen_opts.add_argument("--d", type=_positive_int)
    gen_opts.add_argument("--epsilon", type=float)
    gen_opts.add_argument("--M", type=_positive_int, help="points per cloud (random)")
    gen_opts.add_argument("--jackson-n", type=_positive_int)
    gen_opts.add_argument("--kappa", type=float)
    gen_opts.add_argument("--max-retries", type=_positive_int)
    gen_opts.add_argument("--k", type=_positive_int, help="root order (cube)")
    gen_opts.add_argument("--no-range-check", action="store_true")
    gen_opts.add_argument("--spikes", type=_positive_int, default=3)
    gen_opts.add_argument("--signed", action="store_true")
    gen_opts.add_argument("--bandlimit", type=int)
    gen_opts.add_argument("--noise", choices=("worst_case_sign", "uniform_disk", "none"))

    parser = argparse.ArgumentParser(prog="torus-superres", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    constructions = ("grid", "random", "onedim", "cube", "spikes")
    g = sub.add_parser("gen", parents=[common, gen_opts], help="generate a pair or a noisy table")
    g.add_argument("--construction", choices=constructions, required=True)
    g.set_defaults(func=cmd_gen, required=("d", "epsilon"))

    r = sub.add_parser("reconstruct", parents=[common], help="recover a comb from a table")
    r.add_argument("--input", required=True)
    r.add_argument("--d", type=_positive_int, required=True)
    r.add_argument("--epsilon", type=float, required=True)
    r.add_argument("--grid-K", type=_positive_int)
    r.add_argument("--kappa", type=float)
    r.add_argument("--bandlimit", type=int)
    r.add_argument("--jackson-n", type=_positive_int)
    r.add_argument("--mode", choices=("signed", "distribution"), default="signed")
    r.set_defaults(func=cmd_reconstruct)

    m = sub.add_parser("distance", parents=[common], help="distance between two combs")
    m.add_argument("--metric", choices=("wasserstein", "hh"), required=True)
    m.add_argument("--a")
    m.add_argument("--b")
    m.add_argument("--pair", help="pair file written by gen")
    m.add_argument("--eps-dist", type=float, default=0.49)
    m.add_argument("--center-grid", type=_positive_int, default=64)
    m.add_argument("--radius-grid", type=_positive_int, default=256)
    m.set_defaults(func=cmd_distance)

    b = sub.add_parser("bump", parents=[common], help="build and check a bump polynomial")
    b.add_argument("--d", type=_positive_int, required=True)
    b.add_argument("--epsilon", type=float, required=True)
    b.add_argument("--eps-dist", type=float, default=0.49)
    b.add_argument("--regime", choices=("near", "far"), default="far")
    b.add_argument("--degree-budget", type=_positive_int)
    b.add_argument("--minimize", action="store_true")
    b.add_argument("--verify", action="store_true")
    b.add_argument("--points", type=_positive_int, default=10_000)
    b.set_defaults(func=cmd_bump)

    v = sub.add_parser("verify", parents=[common, gen_opts], help="check a construction")
    v.add_argument("--construction", choices=tuple(VERIFIERS))
    v.add_argument("--input")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("report", parents=[common], help="parameter sweep as CSV")
    s.add_argument("--kind", choices=("recon", "hh", "bump"), required=True)
    s.add_argument("--trials", type=_positive_int, default=10)
    s.add_argument("--jobs", type=_positive_int, default=1)
    s.add_argument("--d", type=_positive_int)
    s.add_argument("--epsilon", type=float)
    s.add_argument("--eps-dist", type=float, default=0.49)
    s.add_argument("--regime", choices=("near", "far"), default="far")
    s.add_argument("--bandlimit", type=int)
    s.add_argument("--jackson-n", type=_positive_int)
    s.add_argument("--grid-K", type=_positive_int)
    s.add_argument("--kappa", type=float)
    s.add_argument("--spikes", type=_positive_int, default=3)
    s.add_argument("--signed", action="store_true")
    s.set_defaults(func=cmd_report, format="csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    for name in getattr(args, "required", ()):
        if getattr(args, name) is None:
            print(f"error: --{name} is required", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except adversarial.RetriesExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
