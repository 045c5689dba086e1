"""Command-line interface.

JSON commands print a single envelope ``{command, inputs, payload, elapsed_ms}``;
``curve``, ``signal synthesize`` and ``sweep`` print CSV by default.  Exit
status is 0 on success, 2 for invalid input and 3 for requests that have no
answer (e.g. a spin with no perfect protractor).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from . import entangle, metrology, protractor, search, uncertainty
from .errors import DomainError, ValidationError
from .spinalg import (
    HalfInt,
    PureState,
    angular_momentum_along,
    as_axis,
    eigenbasis_matrix,
    is_hermitian,
    is_unitary,
    operator_to_json,
    rotation,
)

EXIT_OK, EXIT_INVALID, EXIT_DOMAIN = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(f"{self.prog}: {message}")


# --- parsing helpers ------------------------------------------------------------


def parse_axis(text: str):
    text = text.strip()
    if text in ("x", "y", "z"):
        return text
    try:
        comps = [float(c) for c in text.split(",")]
    except ValueError as exc:
        raise ValidationError(f"axis must be x, y, z or 'nx,ny,nz', got {text!r}") from exc
    return as_axis(comps)


def _axis_echo(axis):
    return axis if isinstance(axis, str) else [float(c) for c in axis]


def _read_json(source: str):
    try:
        if source == "-":
            text = sys.stdin.read()
        else:
            with open(source) as fh:
                text = fh.read()
        return json.loads(text)
    except OSError as exc:
        raise ValidationError(f"cannot read {source}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source} is not valid JSON: {exc}") from exc


def read_state(source: str) -> PureState:
    """A bare PureState document or the envelope of a command that produced one."""
    data = _read_json(source)
    if isinstance(data, dict) and "payload" in data:
        data = data["payload"]
        if isinstance(data, dict) and "state" in data:
            data = data["state"]
    if not isinstance(data, dict):
        raise ValidationError("state JSON must be an object")
    return PureState.from_json(data)


def _default_probe() -> PureState:
    return metrology.protractor_target()


def _state_or_default(source):
    return _default_probe() if source is None else read_state(source)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else format(float(v), ".17g") for v in row])
    return buf.getvalue()


def _read_trace(source: str) -> np.ndarray:
    try:
        text = sys.stdin.read() if source == "-" else open(source).read()
    except OSError as exc:
        raise ValidationError(f"cannot read {source}: {exc}") from exc
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ValidationError("empty trace")
    if rows[0] and not _is_number(rows[0][0]):
        rows = rows[1:]
    try:
        return np.array([[float(r[0]), float(r[1])] for r in rows if r], dtype=float)
    except (ValueError, IndexError) as exc:
        raise ValidationError(f"trace rows must be 't,delta_alpha': {exc}") from exc


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


# --- commands -------------------------------------------------------------------
# each returns (inputs_echo, payload) for JSON output or a str for CSV output


def cmd_ops(args):
    j = HalfInt.parse(args.j)
    axis = parse_axis(args.axis)
    if args.theta is None:
        op, kind = angular_momentum_along(j, axis), "angular_momentum"
    else:
        op, kind = rotation(j, axis, args.theta), "rotation"
    inputs = {"j": str(j), "axis": _axis_echo(axis), "theta": args.theta}
    payload = {
        "kind": kind,
        "twice_j": j.twice_j,
        "dim": j.dim,
        "entries": operator_to_json(op),
        "hermitian": is_hermitian(op),
        "unitary": is_unitary(op),
    }
    return inputs, payload


def cmd_verify(args):
    state = read_state(args.state)
    report = protractor.protractor_rank(state, args.tol)
    payload = report.to_dict()
    payload["metadata"] = dict(state.metadata)
    return {"state": args.state, "tol": args.tol}, payload


def cmd_curve(args):
    state = read_state(args.state)
    axis = parse_axis(args.axis)
    phis = np.linspace(args.phi_min, args.phi_max, args.points)
    values = protractor.overlap_curve(state, axis, phis)
    if args.format == "csv":
        return _csv(["phi", "F"], zip(phis, values))
    inputs = {"state": args.state, "axis": _axis_echo(axis), "points": args.points}
    return inputs, {"phi": phis.tolist(), "F": values.tolist()}


def cmd_search(args):
    j = HalfInt.parse(args.j)
    cfg = search.SearchConfig(
        j,
        starts=args.starts,
        max_iterations=args.max_iterations,
        objective_tolerance=args.tol,
        seed=args.seed,
    )
    result = search.search_perfect(cfg)
    payload = result.to_dict()
    if not args.trace:
        payload.pop("trace")
    if args.emit_state:
        state = result.best_phases.state()
        meta = {"source": "search", "j": str(j), "seed": args.seed, "objective": result.best_objective}
        doc = PureState(j, state.amplitudes, metadata=meta).to_json()
        with open(args.emit_state, "w") as fh:
            json.dump(doc, fh, indent=2)
        payload["state_file"] = args.emit_state
    return cfg.to_dict(), payload


def cmd_metrics(args):
    state = read_state(args.state)
    profile = uncertainty.uncertainty_profile(state)
    payload = profile.to_dict()
    payload["variance_bound"] = uncertainty.variance_bound(state.j)
    payload["entropy_bound"] = uncertainty.trivial_entropy_bound(state.j)
    payload["anticoherent_order1"] = uncertainty.anticoherence_order1(state, args.tol)
    return {"state": args.state, "tol": args.tol}, payload


def cmd_entangle(args):
    state = read_state(args.state)
    parts = [HalfInt.parse(p) for p in args.parts.split(",")]
    try:
        keep = [int(k) for k in args.keep.split(",")]
    except ValueError as exc:
        raise ValidationError(f"--keep must list integers, got {args.keep!r}") from exc
    composite = entangle.embed(state, parts)
    rho = entangle.partial_trace(composite, [p.dim for p in parts], keep)
    payload = {
        "parts": [str(p) for p in parts],
        "keep": keep,
        "reduced": rho.to_json(),
        "entropy": entangle.entanglement_entropy(rho),
        "max_entropy": float(np.log(rho.dim)),
        "eigenvalues": rho.eigenvalues().tolist(),
    }
    return {"state": args.state, "parts": args.parts, "keep": args.keep}, payload


def cmd_estimate(args):
    state = _state_or_default(args.state)
    axis = parse_axis(args.axis)
    exact = metrology.discrete_success_probability(state, axis, args.n)
    payload = {"exact": exact.to_dict(), "crb_average": metrology.crb_average(state, 1)}
    if args.trials > 0:
        payload["simulation"] = metrology.simulate_discrimination(state, axis, args.n, args.trials, args.seed).to_dict()
    inputs = {"state": args.state or "spin-1 protractor", "axis": _axis_echo(axis), "n": args.n, "trials": args.trials, "seed": args.seed}
    return inputs, payload


def _signal_params(args) -> metrology.SignalParams:
    times = np.linspace(args.t_start, args.t_stop, args.points)
    return metrology.SignalParams(
        eta=args.eta,
        zeta=args.zeta,
        gamma1=args.gamma1,
        gamma2=args.gamma2,
        omega_L=args.omega_L,
        noise_sigma=getattr(args, "noise", 0.0),
        times=times,
    )


def cmd_signal(args):
    if args.action == "synthesize":
        state = _state_or_default(args.state)
        m = metrology.m_vector(state, args.axis_label)
        trace = metrology.synthesize_signal(m, _signal_params(args), seed=args.seed)
        return _csv(["t", "delta_alpha"], trace)
    trace = _read_trace(args.trace)
    params = _signal_params(args)
    fit = metrology.fit_signal(trace, params, args.axis_label)
    inputs = {"trace": args.trace, **{k: v for k, v in params.to_dict().items() if k not in ("points", "t_start", "t_stop", "noise_sigma")}}
    return inputs, fit.to_dict()


FIGURE_PROBES = {
    "protractor": lambda: metrology.protractor_target(),
    "minus1_x": lambda: PureState(HalfInt(2), eigenbasis_matrix(1, "x")[:, 2]),
    "zero_z": lambda: PureState.basis_state(1, 0),
    "ry_pi4_minus1_x": lambda: PureState(
        HalfInt(2), rotation(1, "y", np.pi / 4) @ eigenbasis_matrix(1, "x")[:, 2]
    ),
}


def cmd_sweep(args):
    if args.state is not None:
        probes = {"input": read_state(args.state)}
    else:
        probes = {name: make() for name, make in FIGURE_PROBES.items()}
    angles = metrology.sweep_angles(args.steps)
    rows = []
    for name, state in probes.items():
        for k in args.axes:
            for t, m1, m2, m3 in metrology.rotation_sweep(state, k, angles):
                rows.append([name, k, t, m1, m2, m3])
    return _csv(["probe", "axis", "theta", "m1", "m2", "m3"], rows)


def cmd_catalogue(args):
    if args.list:
        entries = [
            {"j": str(j), "twice_j": j.twice_j, "variants": protractor.catalogue_size(j)}
            for j in protractor.catalogue_spins()
        ]
        return {"list": True}, {"catalogue": entries}
    j = HalfInt.parse(args.j)
    state = protractor.known_protractor(j, args.variant)
    return {"j": str(j), "variant": args.variant}, state.to_json()


# --- wiring ---------------------------------------------------------------------


def _add_signal_params(p):
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--zeta", type=float, default=1.0)
    p.add_argument("--gamma1", type=float, default=2.0, help="coherence decay rate, 1/s")
    p.add_argument("--gamma2", type=float, default=1.0, help="population decay rate, 1/s")
    p.add_argument("--omega-L", dest="omega_L", type=float, default=50.0, help="Larmor frequency, rad/s")
    p.add_argument("--axis-label", choices=["x", "y", "z"], default="z")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qprotractor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ops", help="angular-momentum or rotation matrix")
    p.add_argument("--j", required=True)
    p.add_argument("--axis", default="z", help="x, y, z or 'nx,ny,nz'")
    p.add_argument("--theta", type=float, default=None, help="rotation angle; omit for n.J")
    p.set_defaults(func=cmd_ops)

    p = sub.add_parser("verify", help="protractor report for a state")
    p.add_argument("state", help="PureState JSON file or '-' for stdin")
    p.add_argument("--tol", type=float, default=protractor.ANALYTIC_TOL)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("curve", help="overlap |<psi|R(phi)|psi>|^2 on a grid")
    p.add_argument("state")
    p.add_argument("--axis", default="z")
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--phi-min", type=float, default=0.0)
    p.add_argument("--phi-max", type=float, default=2 * np.pi)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("search", help="multi-start search for perfect protractors")
    p.add_argument("--j", required=True)
    p.add_argument("--starts", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iterations", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-9, help="objective tolerance for a perfect candidate")
    p.add_argument("--trace", action="store_true", help="include per-start final objectives")
    p.add_argument("--emit-state", metavar="PATH", help="write the best candidate as PureState JSON")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("metrics", help="entropies, variances and their means")
    p.add_argument("state")
    p.add_argument("--tol", type=float, default=1e-10, help="anticoherence tolerance")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("entangle", help="embed into subsystems and reduce")
    p.add_argument("state")
    p.add_argument("--parts", required=True, help="comma-separated spins, e.g. 1/2,1/2")
    p.add_argument("--keep", default="0", help="comma-separated subsystem indices to keep")
    p.set_defaults(func=cmd_entangle)

    p = sub.add_parser("estimate", help="discrete angle-discrimination game")
    p.add_argument("--state", default=None, help="probe state (default: spin-1 protractor)")
    p.add_argument("--axis", default="z")
    p.add_argument("--n", type=int, required=True, help="number of candidate angles")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("signal", help="synthesize or fit polarization-rotation traces")
    sig = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    syn = sig.add_parser("synthesize", help="write a (t, delta_alpha) CSV")
    syn.add_argument("--state", default=None, help="spin-1 state (default: protractor)")
    syn.add_argument("--noise", type=float, default=0.0)
    syn.add_argument("--seed", type=int, default=0)
    fit = sig.add_parser("fit", help="least-squares (m1, m2, m3) from a trace CSV")
    fit.add_argument("trace", help="CSV file or '-'")
    for q in (syn, fit):
        _add_signal_params(q)
        q.add_argument("--points", type=int, default=2000)
        q.add_argument("--t-start", type=float, default=0.0)
        q.add_argument("--t-stop", type=float, default=1.0)
    p.set_defaults(func=cmd_signal)

    p = sub.add_parser("sweep", help="(m1, m2, m3) under rotations pi*l/steps")
    p.add_argument("--state", default=None, help="spin-1 state (default: the four reference probes)")
    p.add_argument("--steps", type=int, default=metrology.SWEEP_STEPS)
    p.add_argument("--axes", default="xyz")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("catalogue", help="known perfect protractors")
    p.add_argument("--j", default=None)
    p.add_argument("--variant", type=int, default=0)
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_catalogue)
    return parser


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command == "catalogue" and not args.list and args.j is None:
            raise ValidationError("catalogue needs --j or --list")
        if args.command == "sweep" and set(args.axes) - set("xyz"):
            raise ValidationError("--axes may only contain x, y, z")
        start = time.perf_counter()
        out = args.func(args)
        elapsed = (time.perf_counter() - start) * 1000
    except ValidationError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    except DomainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_DOMAIN
    if isinstance(out, str):
        stdout.write(out)
    else:
        inputs, payload = out
        envelope = {"command": args.command, "inputs": inputs, "payload": payload, "elapsed_ms": elapsed}
        json.dump(_jsonable(envelope), stdout, indent=2)
        stdout.write("\n")
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
