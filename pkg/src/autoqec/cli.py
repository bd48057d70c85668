"""Command-line front end.

Exit codes: 0 success, 1 analytic failure (KL violated, slope out of band,
figure checks failing), 2 usage or input error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    NothingToFit,
    average_fidelity,
    baseline_fidelity,
    perturbation_bounds,
    scaling_fit,
)
from .codes import (
    BUILTIN_CODES,
    KnillLaflammeError,
    build_corrupted_structure,
    builtin_code,
    check_knill_laflamme,
)
from .formats import (
    FormatError,
    code_from_dict,
    csv_text,
    dumps,
    engineered_to_dict,
    from_pairs,
    load_json,
)
from .lindblad import autoqec_lindbladian, decompose
from .numerics import MAX_HILBERT_DIM
from .physical import (
    AncillaRealization,
    M_estimate,
    adiabatic_comparison,
    effective_rate,
)
from .synthesis import synthesize

DEFAULT_TOLERANCES = {
    "kl_tol": 1e-8,
    "drop_tol": 1e-8,
    "ablation_margin": 0.02,
    "phi_agreement": 0.02,
    "break_even_max_M": 30.0,
    "slope_low": -1.15,
    "slope_high": -0.85,
    "halving_ratio": 0.55,
    "tau_variation": 0.2,
    "pcl2pc_max": 1e-10,
}

DEFAULT_CONFIG = {
    "code": "binomial_04_2_loss",
    "phi_policy": "first_codeword",
    "gamma": 1.0,
    "T": 1.0,
    "M": None,
    "times": {"start": 0.0, "stop": 5.0, "num": 101},
    "ancilla": {
        "ratios": [0.2, 0.1, 0.05, 0.025],
        "effective_rate": 10.0,
        "T": 1.0,
        "num": 51,
        "corrective_only": False,
    },
}

DEFAULT_M = {
    "scaling": [50, 100, 200, 400, 800],
    "bounds": [100, 200, 400, 1000],
    "fig2": [0, 1, 3, 10, 30, 100, 1000],
}


class UsageError(Exception):
    """Bad configuration or input; maps to exit code 2."""


class Context:
    """Resolved configuration with everything parsed up front."""

    def __init__(self, args, command: str):
        cfg = json.loads(json.dumps(DEFAULT_CONFIG))
        if args.config:
            path = Path(args.config)
            if not path.is_file():
                raise UsageError(f"config file not found: {path}")
            user = _load(path)
            for key, val in user.items():
                if key == "ancilla":
                    cfg["ancilla"].update(val)
                else:
                    cfg[key] = val
            base = path.parent
        else:
            base = Path(".")
        if args.code:
            cfg["code"] = args.code
        if cfg.get("M") is None:
            cfg["M"] = DEFAULT_M.get(command, DEFAULT_M["fig2"])
        cfg["seed"] = args.seed

        tol = dict(DEFAULT_TOLERANCES)
        tol.update(cfg.pop("tolerances", {}) or {})
        for item in args.tol_override or []:
            key, sep, val = item.partition("=")
            if not sep or key not in DEFAULT_TOLERANCES:
                raise UsageError(f"bad --tol-override {item!r}; keys: {sorted(DEFAULT_TOLERANCES)}")
            try:
                tol[key] = float(val)
            except ValueError:
                raise UsageError(f"tolerance {key} needs a number, got {val!r}") from None
        self.tol = tol
        self.cfg = cfg
        self.command = command
        self.seed = args.seed
        self.threads = max(1, args.threads)
        self.out = Path(args.out)

        self.code, self.errors = self._load_code(cfg["code"], base)
        if "errors" in cfg:
            _, self.errors = self._load_code(cfg["errors"], base)
        self.gamma = float(cfg["gamma"])
        self.T = float(cfg["T"])
        self.M = [float(m) for m in cfg["M"]]
        if any(m < 0 for m in self.M):
            raise UsageError("M values must be >= 0")
        if self.gamma < 0:
            raise UsageError("gamma must be >= 0")
        t = cfg["times"]
        self.times = np.linspace(float(t["start"]), float(t["stop"]), int(t["num"]))
        if self.times[0] < 0 or np.any(np.diff(self.times) < 0):
            raise UsageError("time grid must be nonnegative and ascending")
        self.phi_policy = cfg["phi_policy"]
        self.phi = None
        if self.phi_policy == "explicit":
            try:
                self.phi = [from_pairs(v, 1) for v in cfg["phi"]]
            except (KeyError, FormatError) as exc:
                raise UsageError(f"explicit phi_policy needs a 'phi' list: {exc}") from None
        elif self.phi_policy not in ("first_codeword", "zero"):
            raise UsageError(f"unknown phi_policy {self.phi_policy!r}")

    @staticmethod
    def _load_code(source, base: Path):
        if isinstance(source, str):
            if source not in BUILTIN_CODES:
                raise UsageError(f"unknown builtin code {source!r}; choose from {BUILTIN_CODES}")
            return builtin_code(source)
        if isinstance(source, dict) and "file" in source:
            path = Path(source["file"])
            if not path.is_absolute():
                path = base / path
            if not path.is_file():
                raise UsageError(f"code file not found: {path}")
            try:
                return code_from_dict(_load(path))
            except (FormatError, ValueError) as exc:
                raise UsageError(f"{path}: {exc}") from None
        raise UsageError(f"cannot interpret code source {source!r}")

    @property
    def config_hash(self) -> str:
        blob = json.dumps({"cfg": self.cfg, "tol": self.tol}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    def metadata(self) -> dict:
        return {
            "tool": "autoqec",
            "version": __version__,
            "command": self.command,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "tolerances": self.tol,
            "config": self.cfg,
        }

    def csv_comments(self) -> list[str]:
        return [
            f"autoqec {__version__} {self.command}",
            f"config_hash={self.config_hash} seed={self.seed}",
            "tolerances=" + json.dumps(self.tol, sort_keys=True),
        ]

    def map(self, fn, items):
        items = list(items)
        if self.threads == 1:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(self.threads) as pool:
            return list(pool.map(fn, items))

    def write(self, files: dict) -> None:
        """Write all outputs at once, after every computation has finished."""
        self.out.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            (self.out / name).write_text(text, encoding="utf-8", newline="")


def _load(path):
    try:
        return load_json(path)
    except FormatError as exc:
        raise UsageError(str(exc)) from None


def _structure(ctx: Context):
    rep = check_knill_laflamme(ctx.code, ctx.errors, ctx.tol["kl_tol"])
    if not rep.satisfied:
        return rep, None
    return rep, build_corrupted_structure(ctx.code, ctx.errors, ctx.tol["drop_tol"])


def _engineered(ctx: Context, cs, policy=None, phi=None):
    policy = policy or ctx.phi_policy
    try:
        return synthesize(cs, policy, phi if phi is not None else ctx.phi)
    except ValueError as exc:
        raise UsageError(f"bad phi: {exc}") from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(ctx: Context) -> int:
    rep = check_knill_laflamme(ctx.code, ctx.errors, ctx.tol["kl_tol"])
    doc = {**ctx.metadata(), "code": ctx.code.name, "report": rep.to_dict()}
    sys.stdout.write(dumps(doc))
    ctx.write({"check.json": dumps(doc)})
    return 0 if rep.satisfied else 1


def cmd_synthesize(ctx: Context) -> int:
    rep, cs = _structure(ctx)
    if cs is None:
        sys.stderr.write(f"Knill-Laflamme condition violated (residual {rep.residual:.3e})\n")
        return 1
    eng = _engineered(ctx, cs)
    doc = {**engineered_to_dict(eng, cs.m), "metadata": ctx.metadata()}
    ctx.write({"engineered.json": dumps(doc)})
    sys.stdout.write(dumps({"m": cs.m, "L": eng.L, "corrective": len(eng.corrective),
                            "preventive": len(eng.preventive)}))
    return 0


def _fig2_panels(ctx: Context):
    from .codes import fock

    if ctx.code.name != "binomial_04_2_loss":
        raise UsageError("fig2 reproduces the binomial example; use code binomial_04_2_loss")
    _, cs = _structure(ctx)
    w0 = ctx.code.codewords[0]
    scenarios = {
        "a": ("zero", None),
        "b": ("explicit", [w0]),
        "c": ("explicit", [fock(5, 2)]),
    }
    if ctx.gamma <= 0:
        raise UsageError("fig2 needs a positive loss rate gamma")
    times = ctx.times
    phys = times / ctx.gamma
    base = baseline_fidelity(phys, ctx.gamma)
    curves = {}
    for panel, (policy, phi) in scenarios.items():
        eng = _engineered(ctx, cs, policy, phi)

        def run(M, eng=eng):
            return average_fidelity(autoqec_lindbladian(ctx.errors, eng, M, ctx.gamma), ctx.code, phys)

        curves[panel] = dict(zip(ctx.M, ctx.map(run, ctx.M)))
    return times, base, curves


def cmd_fig2(ctx: Context) -> int:
    times, base, curves = _fig2_panels(ctx)
    tol = ctx.tol
    i2 = int(np.argmin(np.abs(times - 2.0)))
    window = (times >= 0.5 - 1e-12) & (times <= 3.0 + 1e-12)
    m_top = max(ctx.M)
    ablation = float(curves["a"][m_top][i2] - base[i2])
    break_even = None
    for M in sorted(ctx.M):
        if M > 0 and np.all(curves["b"][M][window] >= base[window]):
            break_even = M
            break
    phi_diff = float(np.max(np.abs(curves["b"][m_top] - curves["c"][m_top])))
    checks = {
        "ablation_advantage_at_2": ablation,
        "ablation_ok": ablation <= tol["ablation_margin"],
        "break_even_M": break_even,
        "break_even_ok": break_even is not None and break_even <= tol["break_even_max_M"],
        "phi_max_difference": phi_diff,
        "phi_ok": phi_diff <= tol["phi_agreement"],
        "M_reference": m_top,
        "time_axis": "dimensionless gamma*t; grid is a convention",
    }
    files = {}
    header = ["gamma_t", "baseline"] + [f"M={M:g}" for M in ctx.M]
    for panel in "abc":
        rows = np.column_stack([times, base] + [curves[panel][M] for M in ctx.M])
        files[f"fig2_{panel}.csv"] = csv_text(header, rows, ctx.csv_comments())
    ok = checks["ablation_ok"] and checks["break_even_ok"] and checks["phi_ok"]
    files["fig2_summary.json"] = dumps({**ctx.metadata(), "checks": checks, "passed": bool(ok)})
    ctx.write(files)
    sys.stdout.write(dumps(checks))
    return 0 if ok else 1


def cmd_scaling(ctx: Context) -> int:
    rep, cs = _structure(ctx)
    if cs is None:
        sys.stderr.write("Knill-Laflamme condition violated\n")
        return 1
    eng = _engineered(ctx, cs)
    try:
        report = scaling_fit(ctx.code, ctx.errors, eng, ctx.T, ctx.M, ctx.gamma)
    except NothingToFit as exc:
        sys.stderr.write(f"{exc}\n")
        ctx.write({"scaling.json": dumps({**ctx.metadata(), "error": str(exc), "passed": False})})
        return 1
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    band = (ctx.tol["slope_low"], ctx.tol["slope_high"])
    ok = band[0] <= report.slope <= band[1]
    doc = {**ctx.metadata(), "report": report.to_dict(), "slope_band": list(band), "passed": ok}
    ctx.write({"scaling.json": dumps(doc)})
    sys.stdout.write(dumps({"slope": report.slope, "passed": ok}))
    return 0 if ok else 1


def cmd_bounds(ctx: Context) -> int:
    rep, cs = _structure(ctx)
    if cs is None:
        sys.stderr.write("Knill-Laflamme condition violated\n")
        return 1
    eng = _engineered(ctx, cs)
    Ms = [m for m in ctx.M if m > 0]

    def run(M):
        return perturbation_bounds(decompose(ctx.code, ctx.errors, eng, M, ctx.gamma or 1.0), ctx.seed)

    reports = ctx.map(run, Ms)
    ratios = []
    for a, b in zip(reports, reports[1:]):
        ratios.append({
            "M_pair": [a.M, b.M],
            "P_diff_upper_ratio": b.P_diff[1] / a.P_diff[1] if a.P_diff[1] else None,
            "PeL2Pe_upper_ratio": b.PeL2Pe[1] / a.PeL2Pe[1] if a.PeL2Pe[1] else None,
            "tau_upper_ratio": b.tau[1] / a.tau[1] if a.tau[1] else None,
        })
    tol = ctx.tol
    # only M pairs that double are held to the halving tolerance
    halving = [
        r for r in ratios
        if r["M_pair"][1] == 2 * r["M_pair"][0]
        and None not in (r["P_diff_upper_ratio"], r["PeL2Pe_upper_ratio"])
    ]
    taus = [r.tau[1] for r in reports]
    checks = {
        "PCL2PC_max": max((r.PCL2PC for r in reports), default=0.0),
        "halving_pairs": len(halving),
        "halving_ok": all(
            r["P_diff_upper_ratio"] <= tol["halving_ratio"]
            and r["PeL2Pe_upper_ratio"] <= tol["halving_ratio"]
            for r in halving
        ),
        "tau_variation": (max(taus) / min(taus) - 1) if taus and min(taus) > 0 else None,
    }
    checks["PCL2PC_ok"] = checks["PCL2PC_max"] <= tol["pcl2pc_max"]
    checks["tau_ok"] = checks["tau_variation"] is not None and checks["tau_variation"] < tol["tau_variation"]
    ok = checks["PCL2PC_ok"] and checks["halving_ok"] and checks["tau_ok"]
    doc = {**ctx.metadata(), "reports": [r.to_dict() for r in reports], "ratios": ratios,
           "checks": checks, "passed": bool(ok)}
    ctx.write({"bounds.json": dumps(doc)})
    sys.stdout.write(dumps({"ratios": ratios, "checks": checks}))
    return 0 if ok else 1


def cmd_ancilla(ctx: Context) -> int:
    rep, cs = _structure(ctx)
    if cs is None:
        sys.stderr.write("Knill-Laflamme condition violated\n")
        return 1
    eng = _engineered(ctx, cs)
    acfg = ctx.cfg["ancilla"]
    n_anc = len(eng.corrective) if acfg.get("corrective_only") else len(eng.jumps)
    full_dim = ctx.code.ambient_dim * 2**n_anc
    if full_dim > MAX_HILBERT_DIM:
        sys.stderr.write(f"full dimension {full_dim} exceeds the cap of {MAX_HILBERT_DIM}\n")
        return 2
    rate = float(acfg["effective_rate"])
    times = np.linspace(0.0, float(acfg["T"]), int(acfg["num"]))
    w0 = ctx.code.codewords[0]
    rho0 = np.outer(w0, w0.conj())

    def run(r):
        kappa = rate / (4 * r * r)
        real = AncillaRealization.from_engineered(
            eng, kappa, r * kappa, ctx.errors, ctx.gamma, bool(acfg.get("corrective_only"))
        )
        return kappa, r * kappa, adiabatic_comparison(real, rho0, times)

    ratios = [float(r) for r in acfg["ratios"]]
    results = ctx.map(run, ratios)
    rows = np.column_stack([times] + [res.distance for _, _, res in results])
    header = ["t"] + [f"lambda/kappa={r:g}" for r in ratios]
    summary = [
        {
            "lambda_over_kappa": r,
            "kappa": k,
            "lambda": lam,
            "effective_rate": effective_rate(lam, k),
            "max_trace_distance": res.max_distance,
            "max_excited_population": res.max_excited,
            "excited_threshold": 4 * r * r,
        }
        for r, (k, lam, res) in zip(ratios, results)
    ]
    experiments = {
        "early": {"lambda": 0.7, "kappa": 40.0, "gamma": 0.05, "M": M_estimate(0.7, 40.0, 0.05)},
        "later": {"lambda": 0.9, "kappa": 3.0, "gamma": 0.01, "M": M_estimate(0.9, 3.0, 0.01)},
    }
    doc = {
        **ctx.metadata(),
        "full_dim": full_dim,
        "runs": summary,
        "M_estimates_MHz": experiments,
        "note": "weak-coupling tolerances are empirical conventions",
    }
    ctx.write({
        "ancilla.csv": csv_text(header, rows, ctx.csv_comments()),
        "ancilla.json": dumps(doc),
    })
    sys.stdout.write(dumps({"runs": summary}))
    return 0


COMMANDS = {
    "check": cmd_check,
    "synthesize": cmd_synthesize,
    "fig2": cmd_fig2,
    "scaling": cmd_scaling,
    "bounds": cmd_bounds,
    "ancilla": cmd_ancilla,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="autoqec",
        description="Synthesize and check engineered dissipation for quantum error correction.",
        epilog="commands: check (KL report), synthesize (jump operators), fig2 (fidelity "
        "curves), scaling (error vs M fit), bounds (perturbative norms), ancilla "
        "(weak-coupling realization)",
    )
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", default="autoqec_out", help="output directory")
    p.add_argument("--seed", type=int, default=0, help="seed for the norm probes")
    p.add_argument("--threads", type=int, default=1, help="workers for parameter sweeps")
    p.add_argument("--tol-override", action="append", metavar="KEY=VAL",
                   help=f"override a tolerance ({', '.join(DEFAULT_TOLERANCES)})")
    p.add_argument("--code", help=f"builtin code, one of {', '.join(BUILTIN_CODES)}")
    p.add_argument("command", choices=sorted(COMMANDS))
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        ctx = Context(args, args.command)
        return COMMANDS[args.command](ctx)
    except (UsageError, FormatError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except KnillLaflammeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
