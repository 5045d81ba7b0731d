"""Command-line interface.

One executable, subcommand dispatch; every command reads JSON input files,
writes canonical JSON (and CSV, for trajectories) via the serialize module,
and is deterministic for a fixed --seed.  Numeric parameters are flags; an
optional --config JSON file overrides flags of the same name.

Exit codes: 0 success (including definitive negative verdicts), 1 validation
or input-format failure, 2 solver gave up (iteration caps, inconclusive
search).
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import correspondence as corr
from . import embed as emb
from . import oscillator as osc
from . import serialize as ser
from . import stochastic as stoch
from .errors import InputFormatError, UnsupportedSizeError, ValidationError

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# Input catalogs and helpers
# ---------------------------------------------------------------------------

def _law_registry(name: str, params: dict):
    if name == "harmonic":
        k = float(params.get("k", 1.0))
        return lambda x, y: -k * x
    if name == "damped":
        k = float(params.get("k", 1.0))
        c = float(params.get("c", 0.1))
        return lambda x, y: -k * x - c * y
    if name == "cubic":
        k = float(params.get("k", 1.0))
        return lambda x, y: -k * x ** 3
    if name == "free":
        return lambda x, y: 0.0
    raise InputFormatError("law", f"unknown law {name!r}; "
                           "expected harmonic, damped, cubic, or free")


def _report_path(args) -> Path:
    return Path(args.output)


def _csv_path(args) -> Path:
    if args.csv is not None:
        return Path(args.csv)
    return Path(args.output).with_suffix(".csv")


def _emit(args, report: dict) -> None:
    report["schema"] = SCHEMA_VERSION
    ser.write_json(_report_path(args), report)


def _status_line(text: str) -> None:
    sys.stdout.write(text + "\n")


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_embed(args) -> int:
    spec = ser.load_json(args.input)
    if not isinstance(spec, dict) or "law" not in spec:
        raise InputFormatError("law", "input must be an object naming a law")
    params = spec.get("params", {})
    if not isinstance(params, dict):
        raise InputFormatError("params", "expected an object")
    ode = emb.SecondOrderODE(_law_registry(spec["law"], params))
    x0 = float(spec.get("x0", 1.0))
    v0 = float(spec.get("v0", 0.0))
    traj = emb.integrate_embedded(ode, x0, v0, args.dt, args.duration)
    invariant, violation = emb.check_time_reversal_invariance(
        ode, samples=256, seed=args.seed)
    energy = 0.5 * (traj.x ** 2 + traj.y ** 2)
    ser.write_csv(_csv_path(args), ["t", "x", "y"],
                  zip(traj.times, traj.x, traj.y))
    _emit(args, {
        "command": "embed",
        "law": spec["law"],
        "dt": args.dt,
        "duration": args.duration,
        "seed": args.seed,
        "samples": len(traj),
        "final": {"t": float(traj.times[-1]), "x": float(traj.x[-1]),
                  "y": float(traj.y[-1])},
        "embedded_energy": {"first": float(energy[0]), "last": float(energy[-1])},
        "time_reversal": {"invariant": invariant, "max_violation": violation,
                          "tolerance": emb.INVARIANCE_TOL},
    })
    _status_line(f"embed: {len(traj)} samples written")
    return 0


def _parse_state_vector(obj, field: str, n: int) -> osc.StateVector:
    if not isinstance(obj, dict):
        raise InputFormatError(field, "expected an object with re/im lists")
    re = ser.parse_vector(obj.get("re"), f"{field}.re", n)
    im = ser.parse_vector(obj.get("im"), f"{field}.im", n)
    return osc.StateVector(re + 1j * im)


def _cmd_sh_sim(args) -> int:
    payload = ser.load_json(args.input)
    h = ser.parse_hermitian(payload)
    if isinstance(payload, dict) and "psi0" in payload:
        psi0 = _parse_state_vector(payload["psi0"], "psi0", h.n)
    else:
        e1 = np.zeros(h.n, dtype=complex)
        e1[0] = 1.0
        psi0 = osc.StateVector(e1)
    system = osc.sh_decompose(h)
    state0 = osc.sh_split(psi0)
    traj = osc.sh_integrate(system, state0, args.dt, args.duration,
                            method=args.method, sample_stride=args.stride)
    energies = np.array([osc.sh_energy(system, traj.state(k))
                         for k in range(len(traj))])
    drift = float(np.max(np.abs(energies - energies[0])))
    deviation = 0.0
    for k in range(len(traj)):
        expected = osc.exact_evolve(h, psi0, float(traj.times[k]))
        got = osc.sh_recombine(traj.state(k))
        deviation = max(deviation,
                        float(np.linalg.norm(got.psi - expected.psi)))
    header = (["t"] + [f"q_{i + 1}" for i in range(h.n)]
              + [f"p_{i + 1}" for i in range(h.n)])
    rows = (np.concatenate(([traj.times[k]], traj.q[k], traj.p[k]))
            for k in range(len(traj)))
    ser.write_csv(_csv_path(args), header, rows)
    _emit(args, {
        "command": "sh-sim",
        "n": h.n,
        "dt": args.dt,
        "duration": args.duration,
        "method": args.method,
        "stride": args.stride,
        "seed": args.seed,
        "samples": len(traj),
        "energy": {"initial": float(energies[0]),
                   "max_drift": drift},
        "max_deviation_from_exact": deviation,
        "tolerances": {"hermiticity": osc.HERMITICITY_TOL,
                       "normalization": osc.NORMALIZATION_TOL},
    })
    _status_line(f"sh-sim: {len(traj)} samples, max deviation {deviation:.3e}")
    return 0


def _select_pair(process: stoch.IndivisibleProcess, args):
    if args.t is not None and args.tp is not None:
        t0 = args.t0 if args.t0 is not None else min(process.conditioning)
        return process.transition(args.t, t0), process.transition(args.tp, t0)
    t0 = args.t0 if args.t0 is not None else min(process.conditioning)
    stamps = sorted(t for (t, s) in process.transitions if s == t0)
    if len(stamps) < 2:
        raise InputFormatError(
            "transitions", f"need two transitions from t0={t0} to compare")
    return process.transition(stamps[-1], t0), process.transition(stamps[-2], t0)


def _verdict_payload(verdict: stoch.DivisibilityVerdict, t: float, tp: float) -> dict:
    payload = {
        "t": t,
        "tp": tp,
        "status": verdict.status,
        "residual": verdict.residual,
        "witness": None if verdict.witness is None
        else verdict.witness.matrix.tolist(),
    }
    if verdict.certificate is not None:
        payload["certificate"] = verdict.certificate
    return payload


def _cmd_divisibility(args) -> int:
    process = ser.parse_process(ser.load_json(args.input))
    tolerances = {"witness_residual": stoch.WITNESS_RESIDUAL_TOL,
                  "lp_relaxation": stoch.LP_RELAXATION,
                  "column_sum": stoch.SUM_TOL}
    if args.all_pairs:
        t0 = args.t0 if args.t0 is not None else min(process.conditioning)
        stamps = sorted(t for (t, s) in process.transitions if s == t0)
        pairs = [(hi, lo) for i, hi in enumerate(stamps) for lo in stamps[:i]]

        def check(pair):
            hi, lo = pair
            return stoch.divisibility_check(process.transition(hi, t0),
                                            process.transition(lo, t0))

        with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
            verdicts = list(pool.map(check, pairs))
        results = [_verdict_payload(v, hi, lo)
                   for (hi, lo), v in zip(pairs, verdicts)]
        _emit(args, {"command": "divisibility", "t0": t0, "seed": args.seed,
                     "pairs": results, "tolerances": tolerances})
        statuses = {r["status"] for r in results}
        _status_line(f"divisibility: {len(results)} pairs, "
                     f"statuses {sorted(statuses)}")
        return 2 if "indeterminate" in statuses else 0

    gamma_t, gamma_tp = _select_pair(process, args)
    verdict = stoch.divisibility_check(gamma_t, gamma_tp)
    _emit(args, {"command": "divisibility", "t0": gamma_t.t0,
                 "seed": args.seed,
                 "tolerances": tolerances,
                 **_verdict_payload(verdict, gamma_t.t, gamma_tp.t)})
    _status_line(f"divisibility: {verdict.status}")
    return 2 if verdict.status == "indeterminate" else 0


def _cmd_correspond(args) -> int:
    payload = ser.load_json(args.input)
    matrix = ser.parse_complex_matrix(payload, "<root>")
    u = corr.UnitaryMatrix(matrix, t=args.t if args.t is not None else 1.0,
                           t0=args.t0 if args.t0 is not None else 0.0)
    gamma = corr.quantum_to_stochastic(u)
    row_dev = float(np.max(np.abs(gamma.matrix.sum(axis=1) - 1.0)))
    col_dev = float(np.max(np.abs(gamma.matrix.sum(axis=0) - 1.0)))
    _emit(args, {
        "command": "correspond",
        "seed": args.seed,
        "n": u.n,
        "t": u.t,
        "t0": u.t0,
        "gamma": gamma.matrix.tolist(),
        "row_sum_deviation": row_dev,
        "column_sum_deviation": col_dev,
        "tolerances": {"unitarity": corr.UNITARITY_TOL,
                       "doubly_stochastic": corr.DOUBLY_STOCHASTIC_TOL},
    })
    _status_line(f"correspond: {u.n}x{u.n} transition matrix written")
    return 0


def _load_transition(args) -> tuple[stoch.TransitionMatrix, dict]:
    payload = ser.load_json(args.input)
    if not isinstance(payload, dict) or "matrix" not in payload:
        raise InputFormatError("matrix", "input must be an object with a matrix")
    matrix = ser.parse_real_matrix(payload["matrix"], "matrix")
    t = float(payload.get("t", 1.0))
    t0 = float(payload.get("t0", 0.0))
    return stoch.TransitionMatrix(matrix, t=t, t0=t0), payload


def _cmd_unistochastic(args) -> int:
    gamma, _ = _load_transition(args)
    result = corr.unistochastic_search(gamma, max_iters=args.max_iters,
                                       tol=args.tol, seed=args.seed)
    report = {
        "command": "unistochastic",
        "seed": args.seed,
        "status": result.status,
        "residual": result.residual,
        "unitary": None if result.unitary is None
        else ser.complex_matrix_payload(result.unitary.matrix),
        "tolerances": {"objective": args.tol,
                       "doubly_stochastic": corr.DOUBLY_STOCHASTIC_TOL},
        "max_iters": args.max_iters,
        "restarts": corr.SEARCH_RESTARTS,
    }
    if result.certificate is not None:
        report["certificate"] = result.certificate
    _emit(args, report)
    _status_line(f"unistochastic: {result.status}")
    return 2 if result.status == "not_found" else 0


def _cmd_dilate(args) -> int:
    gamma, payload = _load_transition(args)
    if "phases" in payload:
        phases = ser.parse_real_matrix(payload["phases"], "phases", gamma.n)
    else:
        phases = np.zeros((gamma.n, gamma.n))
    theta = corr.potential_from_transition(gamma, phases)
    kraus = corr.kraus_from_potential(theta)
    identity_dev = float(np.max(np.abs(
        sum(k.conj().T @ k for k in kraus.operators) - np.eye(gamma.n))))
    u = corr.stinespring_dilate(kraus)
    marginal = corr.dilation_marginal(u, gamma.n)
    marginal_dev = float(np.max(np.abs(marginal - gamma.matrix)))
    unitarity_dev = float(np.max(np.abs(
        u.matrix.conj().T @ u.matrix - np.eye(u.n))))
    _emit(args, {
        "command": "dilate",
        "seed": args.seed,
        "n": gamma.n,
        "dilation_dim": u.n,
        "unitary": ser.complex_matrix_payload(u.matrix),
        "kraus_identity_residual": identity_dev,
        "marginal_residual": marginal_dev,
        "unitarity_residual": unitarity_dev,
        "tolerances": {"kraus_identity": corr.KRAUS_IDENTITY_TOL,
                       "unitarity": corr.UNITARITY_TOL},
    })
    _status_line(f"dilate: {gamma.n} -> {u.n} unitary dilation written")
    return 0


def _cmd_extract_hamiltonian(args) -> int:
    h = ser.parse_hermitian(ser.load_json(args.input))
    w, v = np.linalg.eigh(h.matrix)

    def evolution(s: float) -> np.ndarray:
        return v @ (np.exp(-1j * w * s)[:, None] * v.conj().T)

    recovered, anti_dev = corr.hamiltonian_from_evolution(
        evolution, args.t, args.dt)
    error = float(np.max(np.abs(recovered.matrix - h.matrix)))
    _emit(args, {
        "command": "extract-hamiltonian",
        "seed": args.seed,
        "n": h.n,
        "t": args.t,
        "dt": args.dt,
        "hamiltonian": ser.complex_matrix_payload(recovered.matrix),
        "anti_hermitian_residual": anti_dev,
        "max_error_vs_input": error,
        "tolerances": {"hermiticity": osc.HERMITICITY_TOL},
    })
    _status_line(f"extract-hamiltonian: max error {error:.3e}")
    return 0


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------

def _add_common(sub: argparse.ArgumentParser, *, output: bool = True) -> None:
    sub.add_argument("--input", required=True, help="input JSON file")
    if output:
        sub.add_argument("--output", required=True, help="report JSON path")
    sub.add_argument("--seed", type=int, default=42)
    sub.add_argument("--config", default=None,
                     help="JSON file whose entries override flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="indivisible",
        description="Stochastic processes, divisibility, and unitary dilations")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("embed", help="integrate a second-order law")
    _add_common(p)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--T", "--duration", dest="duration", type=float, default=10.0)
    p.add_argument("--csv", default=None, help="trajectory CSV path")
    p.set_defaults(handler=_cmd_embed)

    p = subs.add_parser("sh-sim", help="symplectic Schrodinger evolution")
    _add_common(p)
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--T", "--duration", dest="duration", type=float, default=10.0)
    p.add_argument("--method", choices=("strang", "rk4"), default="strang")
    p.add_argument("--stride", type=int, default=100)
    p.add_argument("--csv", default=None, help="trajectory CSV path")
    p.set_defaults(handler=_cmd_sh_sim)

    p = subs.add_parser("divisibility", help="test divisibility of a process")
    _add_common(p)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--tp", type=float, default=None)
    p.add_argument("--t0", type=float, default=None)
    p.add_argument("--all-pairs", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(handler=_cmd_divisibility)

    p = subs.add_parser("correspond", help="unitary to transition matrix")
    _add_common(p)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--t0", type=float, default=None)
    p.set_defaults(handler=_cmd_correspond)

    p = subs.add_parser("unistochastic", help="search for a realizing unitary")
    _add_common(p)
    p.add_argument("--max-iters", type=int, default=corr.SEARCH_MAX_ITERS)
    p.add_argument("--tol", type=float, default=corr.SEARCH_TOL)
    p.set_defaults(handler=_cmd_unistochastic)

    p = subs.add_parser("dilate", help="Kraus set and Stinespring dilation")
    _add_common(p)
    p.set_defaults(handler=_cmd_dilate)

    p = subs.add_parser("extract-hamiltonian",
                        help="recover H from its own evolution family")
    _add_common(p)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-4)
    p.set_defaults(handler=_cmd_extract_hamiltonian)

    return parser


_CONFIG_ALIASES = {"T": "duration"}


def _apply_config(args) -> None:
    if args.config is None:
        return
    overrides = ser.load_json(args.config)
    if not isinstance(overrides, dict):
        raise InputFormatError("<config>", "config must be a JSON object")
    for key, value in overrides.items():
        attr = _CONFIG_ALIASES.get(key, key.replace("-", "_"))
        if not hasattr(args, attr) or attr in ("handler", "subcommand", "config"):
            raise InputFormatError(f"<config>.{key}", "not a known flag")
        setattr(args, attr, value)


def _structured_error(field: str, message: str) -> None:
    sys.stderr.write(ser.canonical_dumps(
        {"schema": SCHEMA_VERSION,
         "error": {"field": field, "message": message}}) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return args.handler(args)
    except InputFormatError as exc:
        _structured_error(exc.field, exc.reason)
        return 1
    except ValidationError as exc:
        _structured_error("<validation>", str(exc))
        return 1
    except UnsupportedSizeError as exc:
        _structured_error("<size>", str(exc))
        return 1
    except KeyError as exc:
        _structured_error("<lookup>", str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
