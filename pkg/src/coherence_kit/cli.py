"""Command-line front end.

Subcommands: classify, monotones, transform, reproduce, harness. Every
command routes straight into the library with the given seed, so outputs are
byte-identical to direct calls. Exit codes: 0 ok, 1 property violation,
2 parse failure, 3 invalid object, 4 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import channels as ch
from . import covariance as cov
from . import harness as hrn
from . import monotones as mo
from . import transforms as tr
from .states import (
    DensityMatrix,
    PureStateVector,
    qubit_standard_form,
    random_density,
    state_from_json_dict,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_USAGE = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _ParseFailure(str(exc)) from exc


class _ParseFailure(Exception):
    pass


def _load_state(path: str):
    payload = _load_json(path)
    return state_from_json_dict(payload)


def _as_density(state) -> DensityMatrix:
    return state.to_density() if isinstance(state, PureStateVector) else state


def _format_csv(rows: list, header: list) -> str:
    def fmt(v):
        if isinstance(v, float):
            return f"{v:.9g}"
        return str(v)

    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _emit(args, payload, csv_rows=None, csv_header=None):
    if getattr(args, "format", "json") == "csv":
        if csv_rows is None:
            raise UsageError("this command has no CSV form")
        text = _format_csv(csv_rows, csv_header)
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------


def _cmd_classify(args) -> int:
    payload = _load_json(args.channel)
    channel = ch.KrausChannel.from_json_dict(payload)
    tol = args.tol
    report = {
        "cptp": True,
        "mio": ch.is_mio(channel, tol),
        "dio": ch.is_dio(channel, tol),
        "io_rep": ch.is_io_rep(channel, tol),
        "sio_special_rep": ch.is_sio_special_rep(channel, tol),
    }
    for name, predicate in (("sio_rep", ch.is_sio_rep), ("pio_rep", ch.is_pio_rep)):
        try:
            report[name] = predicate(channel, tol)
        except ValueError:
            report[name] = None
    fit = ch.fit_g_covariant(channel) if channel.din == channel.dout else None
    report["g_covariant_fit"] = (
        None
        if fit is None
        else {"q1": fit.q1, "q2": fit.q2, "q3": fit.q3, "d": fit.d}
    )
    _emit(args, report)
    return EXIT_OK


# ---------------------------------------------------------------------------
# monotones
# ---------------------------------------------------------------------------

_DEFAULT_MEASURES = (
    "c_rel",
    "c_l1",
    "c_r",
    "c_delta_r",
    "r_d",
    "trace_norm",
    "c_alpha:0.5",
    "c_alpha:2",
)


def _measure_report(token: str, state) -> mo.MonotoneReport:
    rho = _as_density(state)
    parts = token.split(":")
    name = parts[0]
    if name == "c_rel":
        return mo.c_rel(rho)
    if name == "c_l1":
        return mo.c_l1(rho)
    if name == "c_r":
        return mo.c_r(rho)
    if name == "c_delta_r":
        return mo.c_delta_r(rho)
    if name == "r_d":
        return mo.log_robustness_dephasing(rho)
    if name == "trace_norm":
        return mo.trace_norm_coherence(rho)
    if name == "c_alpha":
        return mo.c_alpha(rho, float(parts[1]))
    if name == "c_delta_alpha":
        side = parts[2] if len(parts) > 2 else "right"
        return mo.c_delta_alpha(rho, float(parts[1]), side)
    if name == "c_q_alpha":
        if not isinstance(state, PureStateVector):
            raise UsageError("c_q_alpha needs a pure-state input")
        alpha = math.inf if parts[1] in ("inf", "infinity") else float(parts[1])
        return mo.c_q_alpha_pure(state, alpha)
    raise UsageError(f"unknown measure {token!r}")


def _cmd_monotones(args) -> int:
    state = _load_state(args.state)
    tokens = (
        list(_DEFAULT_MEASURES)
        if args.measures == "all"
        else [t.strip() for t in args.measures.split(",") if t.strip()]
    )
    reports = [_measure_report(token, state) for token in tokens]
    payload = [r.to_json_dict() for r in reports]
    rows = [(r.name, r.value, r.method) for r in reports]
    _emit(args, payload, rows, ["measure", "value", "method"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# transform
# ---------------------------------------------------------------------------


def _require_pure(state, label: str) -> PureStateVector:
    if not isinstance(state, PureStateVector):
        raise UsageError(f"{label} must be a pure state (amps payload) for this class")
    return state


def _cmd_transform(args) -> int:
    source = _load_state(args.source)
    target = _load_state(args.target)
    klass = args.klass
    if klass == "sio":
        decision = tr.sio_pure_decide(
            _require_pure(source, "source"), _require_pure(target, "target")
        )
    elif klass == "mio-pure":
        psi = _require_pure(source, "source")
        phi = _require_pure(target, "target")
        if psi.dim != 2:
            raise UsageError("mio-pure expects a qubit source")
        decision = tr.mio_qubit_pure_decide(psi.probs, phi.probs)
    elif klass == "qubit":
        rho, sigma = _as_density(source), _as_density(target)
        if rho.dim != 2 or sigma.dim != 2:
            raise UsageError("qubit class expects two qubit states")
        decision = tr.qubit_decide(rho, sigma)
    elif klass == "pio":
        decision = tr.pio_pure_decide(
            _require_pure(source, "source"), _require_pure(target, "target")
        )
    else:
        raise UsageError(f"unknown class {klass!r}")
    if decision.witness is not None and args.witness_out:
        with open(args.witness_out, "w", encoding="utf-8") as fh:
            json.dump(decision.witness.to_json_dict(), fh, indent=2, sort_keys=True)
    _emit(args, decision.to_json_dict())
    return EXIT_OK


# ---------------------------------------------------------------------------
# reproduce
# ---------------------------------------------------------------------------


def _artifact_example() -> tuple:
    channel = ch.qubit_to_qutrit_mio_example()
    stack = np.stack(channel.kraus)
    completeness = np.einsum("jyx,jyz->xz", stack.conj(), stack) - np.eye(2)
    completeness_residual = float(np.max(np.abs(completeness)))
    plus = np.array([1.0, 1.0]) / math.sqrt(2.0)
    target = np.array([4.0, 1.0, 1.0]) / math.sqrt(18.0)
    proportionality = []
    for k in channel.kraus:
        image = k @ plus
        overlap = target.conj() @ image
        proportionality.append(float(np.linalg.norm(image - overlap * target)))
    payload = {
        "completeness_residual": completeness_residual,
        "proportionality_residuals": proportionality,
        "mio": ch.is_mio(channel),
        "io_rep": ch.is_io_rep(channel),
        "dio": ch.is_dio(channel),
        "max_residual": max([completeness_residual] + proportionality),
    }
    return payload, None, None


def _artifact_fig1() -> tuple:
    p = np.array([0.5, 0.5])
    q = np.array([8.0 / 9.0, 1.0 / 18.0, 1.0 / 18.0])
    rows = []
    steps = int(round(4.0 / 0.02))
    for i in range(steps + 1):
        alpha = i * 0.02
        rows.append((alpha, mo.renyi(p, alpha), mo.renyi(q, alpha)))
    payload = [
        {"alpha": a, "s_alpha_uniform": s1, "s_alpha_target": s2} for a, s1, s2 in rows
    ]
    return payload, rows, ["alpha", "s_alpha_uniform", "s_alpha_target"]


def _artifact_cp_threshold() -> tuple:
    rows = []
    for d in range(2, 9):
        lo, hi = 0.0, 10.0
        for _ in range(40):
            mid = (lo + hi) / 2.0
            if cov.is_phi_t_cp(d, mid):
                hi = mid
            else:
                lo = mid
        rows.append((d, hi, float(d - 1)))
    payload = [{"d": d, "threshold": t, "expected": e} for d, t, e in rows]
    return payload, rows, ["d", "threshold", "expected"]


def _artifact_qubit_formulas(seed: int) -> tuple:
    rows = []
    for i in range(50):
        rho = random_density(2, seed + i)
        sf = qubit_standard_form(rho)
        std = DensityMatrix(sf.gauge @ rho.mat @ sf.gauge.conj().T)
        solver = mo.c_r(std, method="cutting_plane").value
        eigen = mo.c_delta_r(std).value
        closed_dr = 0.0 if sf.p >= 1.0 - 1e-12 else sf.r / math.sqrt(sf.p * (1.0 - sf.p))
        rows.append((sf.p, sf.r, solver, 2.0 * sf.r, eigen, closed_dr))
    payload = [
        {
            "p": p,
            "r": r,
            "c_r_solver": s,
            "c_r_closed": c,
            "c_delta_r_eigen": e,
            "c_delta_r_closed": cd,
        }
        for p, r, s, c, e, cd in rows
    ]
    header = ["p", "r", "c_r_solver", "c_r_closed", "c_delta_r_eigen", "c_delta_r_closed"]
    return payload, rows, header


def _cmd_reproduce(args) -> int:
    builders = {
        "example": lambda: _artifact_example(),
        "fig1": lambda: _artifact_fig1(),
        "cp-threshold": lambda: _artifact_cp_threshold(),
        "qubit-formulas": lambda: _artifact_qubit_formulas(args.seed),
    }
    if args.artifact not in builders:
        raise UsageError(f"unknown artifact {args.artifact!r}")
    payload, rows, header = builders[args.artifact]()
    _emit(args, payload, rows, header)
    return EXIT_OK


# ---------------------------------------------------------------------------
# harness
# ---------------------------------------------------------------------------


def _injection_hook():
    """Deliberate corruption hook, enabled by COHERENCE_KIT_HARNESS_INJECT.

    Replaces the sampled channel at the given index (default 0) by a plainly
    coherent rotation, which every sampled-class property then flags.
    """
    flag = os.environ.get("COHERENCE_KIT_HARNESS_INJECT")
    if not flag:
        return None
    target = int(flag) if flag.isdigit() else 0

    def hook(channel, index):
        if index != target:
            return channel
        d = channel.din
        rot = np.eye(d, dtype=complex)
        c, s = math.cos(0.3), math.sin(0.3)
        rot[0, 0], rot[0, 1], rot[1, 0], rot[1, 1] = c, -s, s, c
        return ch.KrausChannel([rot])

    return hook


def _cmd_harness(args) -> int:
    summary = hrn.run_suite(
        args.suite,
        samples=args.samples,
        seed=args.seed,
        corrupt_hook=_injection_hook(),
    )
    _emit(args, summary)
    return EXIT_OK if summary["passed"] else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="coherence-kit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("classify", help="class membership report for a channel file")
    p.add_argument("channel")
    common(p)
    p.set_defaults(run=_cmd_classify)

    p = sub.add_parser("monotones", help="coherence-measure panel for a state file")
    p.add_argument("state")
    p.add_argument("--measures", default="all")
    common(p)
    p.set_defaults(run=_cmd_monotones)

    p = sub.add_parser("transform", help="decide a state transformation")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--class", dest="klass", required=True, choices=("sio", "mio-pure", "qubit", "pio"))
    p.add_argument("--witness-out", default=None)
    common(p)
    p.set_defaults(run=_cmd_transform)

    p = sub.add_parser("reproduce", help="emit a reproducible artifact")
    p.add_argument("--artifact", required=True, choices=("example", "fig1", "cp-threshold", "qubit-formulas"))
    common(p)
    p.set_defaults(run=_cmd_reproduce)

    p = sub.add_parser("harness", help="run a sampled property suite")
    p.add_argument("--suite", required=True, choices=hrn.SUITES)
    p.add_argument("--samples", type=int, default=100)
    common(p)
    p.set_defaults(run=_cmd_harness)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.run(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _ParseFailure as exc:
        print(f"parse failure: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValueError, KeyError, TypeError) as exc:
        print(f"invalid object: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
