"""``rydgate`` command line front end.

Every command loads a config (``--config``, default ``rb150s_gate``), applies
``--set key=value`` overrides, runs, and writes CSV or JSON to ``--out``
(default stdout).  Output starts with ``#`` header lines recording the package
version, command, config hash, overrides and seed; there are no timestamps, so
identical inputs give byte-identical files.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from . import budget as bd
from . import dynamics as dy
from . import montecarlo as mc
from .blockade import blockade_shift
from .errors import ConfigError, RydgateError
from .params import load_config, to_mhz

DEFAULT_CONFIG = "rb150s_gate"
STOCHASTIC = {"ramsey", "simulate-bell", "parity"}


def _num(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return repr(x) if math.isfinite(x) else str(x)
    return str(x)


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(type(x))


def _json_clean(obj):
    if isinstance(obj, dict):
        return {k: _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    return obj


class Output:
    """A table of rows plus an optional dict of scalar results."""

    def __init__(self, columns, rows, results=None):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        self.results = dict(results or {})

    def render(self, fmt, header):
        if fmt == "json":
            doc = {"header": header, "columns": self.columns, "rows": self.rows, "results": self.results}
            return json.dumps(_json_clean(doc), indent=2, default=_json_default) + "\n"
        buf = io.StringIO()
        for k, v in header.items():
            buf.write(f"# {k}: {v}\n")
        for k, v in self.results.items():
            buf.write(f"# result {k}: {_num(v) if not isinstance(v, (list, dict)) else json.dumps(_json_clean(v), default=_json_default)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_num(x) for x in r])
        return buf.getvalue()


def _floats(text, name):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(None, f"--{name}: expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise ConfigError(None, f"--{name}: empty grid")
    return vals


# ---------------------------------------------------------------- commands

def cmd_budget(cfg, args):
    rep = bd.assemble_budget(cfg)
    d = rep.to_dict()
    rows = [[k, ",".join(_num(x) for x in v) if isinstance(v, list) else v] for k, v in d.items()]
    return Output(["quantity", "value"], rows)


def cmd_scan_separation(cfg, args):
    grid = _floats(args.r_um, "r-um")
    if any(r <= 0 for r in grid):
        raise ConfigError("geometry.r_um", "separations must be > 0")
    tau, whf = cfg.level.tau, cfg.species.omega_hf
    rows = []
    for r in grid:
        B = blockade_shift(cfg.blockade, r * 1e-6)
        w = bd.omega_opt(B, tau)
        E = bd.gate_error_full(w, B, whf, tau) if w < whf else math.nan
        rows.append([r, to_mhz(B), to_mhz(w), E, bd.e_min(B, tau), int(bd.hyperfine_regime_violated(B, whf))])
    cols = ["r_um", "b_over_2pi_mhz", "omega_opt_over_2pi_mhz", "e_at_omega_opt", "e_min", "hyperfine_flag"]
    return Output(cols, rows)


def cmd_fidelity_limit(cfg, args):
    t = np.linspace(0.0, args.t_max_us, args.points) * 1e-6
    r = bd.assemble_budget(cfg)
    cols, curves = ["t_us"], []
    for name, T2 in (("magnetic", r.t2_b_s), ("doppler", r.t2_d_s), ("combined", r.t2_s)):
        cols.append(f"f_{name}")
        curves.append(np.ones_like(t) if math.isinf(T2) else bd.fidelity_limit(t, T2))
    rows = [[ti * 1e6, *(c[i] for c in curves)] for i, ti in enumerate(t)]
    return Output(cols, rows, {"t2_b_us": r.t2_b_s * 1e6, "t2_d_us": r.t2_d_s * 1e6, "t2_us": r.t2_s * 1e6})


def cmd_ramsey(cfg, args):
    t = np.linspace(0.0, args.t_max_us, args.points) * 1e-6
    res = mc.ramsey_simulate(t, args.shots, cfg, args.seed, detuning=2 * math.pi * args.detuning_mhz * 1e6)
    f = res.fit
    results = {"fit_ok": f.ok, "t2_us": f.T2 * 1e6, "t2_uncertainty_us": f.uncertainty * 1e6,
               "amplitude": f.amplitude, "residual_norm": f.residual_norm,
               "t2_budget_us": bd.assemble_budget(cfg).t2_s * 1e6}
    if not f.ok:
        results["fit_message"] = f.message
    cols = ["t_us", "signal", "p_bright", "p_dark", "contrast", "contrast_err"]
    return Output(cols, [[r[c] for c in cols] for r in res.to_rows()], results)


SEQUENCES = {
    "cz": dy.cz_sequence,
    "cnot-hadamard": dy.cnot_hadamard_variant,
    "cnot-swap": dy.cnot_amplitude_swap,
    "amplitude-swap": dy.amplitude_swap,
}


def cmd_simulate_gate(cfg, args):
    p = dy.GateParams.from_config(cfg)
    if args.ideal:
        p = p.ideal()
    seq = SEQUENCES[args.sequence](cfg)
    S = dy.sequence_superoperator(p, seq)
    A = dy.align_global_phase(dy.computational_map(S), seq.ideal_map)
    rows = [[f"map_{i}_{j}", A[i, j].real, A[i, j].imag] for i in range(4) for j in range(4)]
    results = {
        "gate_error": dy.gate_error(p, seq, S=S),
        "gate_error_phase_corrected": dy.gate_error(p, seq, phase_corrected=True, S=S),
        "leakage": dy.leakage(S),
        "phase_frame_rad": list(dy.phase_frame(S, seq.ideal_map)),
    }
    if not args.ideal:
        terms = bd.gate_error_terms(p.omega, p.B, p.omega_hf, p.tau)
        results["eq2_total"] = float(sum(terms))
        for name, v in zip(("radiative", "radiative_hf", "radiative_blockade", "blockade", "blockade_hf"), terms):
            results[f"eq2_{name}"] = v
    return Output(["element", "re", "im"], rows, results)


def _rows_from_record(rec):
    par = rec.parity()
    rows = []
    for ph, c, lc, pi in zip(rec.phases, rec.counts, rec.lost_counts, par):
        rows.append(["none" if np.isnan(ph) else float(ph), rec.shots, *map(int, c), int(lc.sum()), pi])
    return rows


RECORD_COLUMNS = ["analysis_phase_rad", "shots", "n00", "n01", "n10", "n11", "lost", "parity_survivors"]


def cmd_simulate_bell(cfg, args):
    gap = args.gap_us * 1e-6 if args.gap_us is not None else (
        cfg.environment.gap_time if cfg.environment.gap_time is not None else 2 * math.pi / cfg.laser.omega)
    res = mc.bell_experiment(gap, args.shots, cfg, args.seed, variant=args.variant,
                             ideal_dynamics=args.dynamics == "ideal", cnot=args.cnot)
    results = res.summary()
    T2 = bd.assemble_budget(cfg).t2_s
    results["fidelity_limit"] = 1.0 if math.isinf(T2) else bd.fidelity_limit(gap, T2)
    return Output(RECORD_COLUMNS, _rows_from_record(res.record), results)


def cmd_parity(cfg, args):
    P00, P11, c = args.p00, args.p11, args.coherence
    if not (0 <= P00 <= 1 and 0 <= P11 <= 1 and P00 + P11 <= 1 + 1e-12 and 0 <= c <= 1):
        raise ConfigError(None, "need 0 <= p00, p11, coherence <= 1 and p00 + p11 <= 1")
    rest = (1 - P00 - P11) / 2
    rho = np.diag([P00, rest, rest, P11]).astype(complex)
    rho[0, 3] = rho[3, 0] = c * math.sqrt(P00 * P11)
    phases = np.linspace(0, math.pi, args.points, endpoint=False)
    scan = mc.parity_scan(rho, phases, args.shots, args.seed)
    A = min(scan.fit.amplitude, 1.0)
    period = mc.fit_parity(phases, scan.parity, frequency=None).frequency
    results = {"parity_amplitude": scan.fit.amplitude, "parity_phase_rad": scan.fit.phase,
               "parity_offset": scan.fit.offset, "fitted_frequency": period,
               "fidelity_estimate": mc.extract_fidelity(P00, P11, A),
               "fidelity_exact": dy.state_fidelity(rho, np.array([1, 0, 0, 1]) / math.sqrt(2))}
    return Output(RECORD_COLUMNS, _rows_from_record(scan.record), results)


COMMANDS = {
    "budget": cmd_budget,
    "scan-separation": cmd_scan_separation,
    "fidelity-limit": cmd_fidelity_limit,
    "ramsey": cmd_ramsey,
    "simulate-gate": cmd_simulate_gate,
    "simulate-bell": cmd_simulate_bell,
    "parity": cmd_parity,
}


# ------------------------------------------------------------------ parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=DEFAULT_CONFIG,
                        help="config file, or a built-in name (rb150s_gate, ramsey_97d)")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key (repeatable)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, help="RNG seed (required for stochastic commands)")
    common.add_argument("--shots", type=int, default=10000, help="shots per scan point")

    p = argparse.ArgumentParser(prog="rydgate", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"rydgate {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("budget", parents=[common], help="analytic error budget at the configured point")
    s = sub.add_parser("scan-separation", parents=[common], help="B, Omega_opt and E versus separation")
    s.add_argument("--r-um", default="3,4,5,6,7,8,9,10", help="comma-separated separations in um")
    s = sub.add_parser("fidelity-limit", parents=[common], help="Bell fidelity limit F(t) per channel")
    s.add_argument("--t-max-us", type=float, default=10.0)
    s.add_argument("--points", type=int, default=201)
    s = sub.add_parser("ramsey", parents=[common], help="Monte Carlo Ramsey decay and envelope fit")
    s.add_argument("--t-max-us", type=float, default=8.0)
    s.add_argument("--points", type=int, default=17)
    s.add_argument("--detuning-mhz", type=float, default=1.0, help="fringe detuning / 2pi")
    s = sub.add_parser("simulate-gate", parents=[common], help="density-matrix gate simulation")
    s.add_argument("--sequence", choices=sorted(SEQUENCES), default="cz")
    s.add_argument("--ideal", action="store_true", help="perfect blockade, no decay, no spectator coupling")
    s = sub.add_parser("simulate-bell", parents=[common], help="Monte Carlo Bell-state experiment")
    s.add_argument("--gap-us", type=float, help="Rydberg gap time (default: config, else 2pi/Omega)")
    s.add_argument("--variant", choices=("B1", "B2"), default="B1")
    s.add_argument("--dynamics", choices=("ideal", "full"), default="ideal")
    s.add_argument("--cnot", choices=("hadamard", "swap"), default="hadamard")
    s = sub.add_parser("parity", parents=[common], help="parity scan of a Bell-like state")
    s.add_argument("--p00", type=float, default=0.5)
    s.add_argument("--p11", type=float, default=0.5)
    s.add_argument("--coherence", type=float, default=1.0, help="|rho_00,11| / sqrt(P00 P11)")
    s.add_argument("--points", type=int, default=16)
    return p


def _overrides(items):
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(None, f"--set expects KEY=VALUE, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        out[k] = v
    return out


def run(argv=None, stdout=None):
    """Run the CLI and return the exit code."""
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        overrides = _overrides(args.set)
        cfg = load_config(args.config)
        if overrides:
            cfg = cfg.with_overrides(overrides)
        if args.command in STOCHASTIC and args.seed is None:
            raise ConfigError(None, f"{args.command} is stochastic and needs --seed")
        if args.shots < 1:
            raise ConfigError(None, "--shots must be positive")
        out = COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"rydgate: configuration error: {exc}", file=sys.stderr)
        return 2
    except (RydgateError, ValueError, ArithmeticError) as exc:
        print(f"rydgate: error: {exc}", file=sys.stderr)
        return 3
    header = {
        "rydgate": __version__,
        "command": args.command,
        "config": f"{args.config} sha256={cfg.sha256()}",
        "overrides": ";".join(f"{k}={v}" for k, v in overrides.items()) or "none",
        "seed": args.seed if args.seed is not None else "none",
    }
    if args.command in STOCHASTIC:
        header["shots"] = args.shots
    text = out.render(args.format, header)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
