"""Command-line front end.

Exit codes: 0 success, 1 a residual above tolerance, 2 unparsable input, 3 domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import bootstrap, kinematics, nonscalar, structure
from .kinematics import TodaParams
from .lattice import Charge, CoeffB, WeylElement, dual
from .sampling import random_generic_charge, random_kappa
from .special import evaluator

COMMANDS = (
    "upsilon", "weights", "structure-constant", "classify",
    "fuse", "verify-shift", "verify-crossing", "sweep",
)
EXIT_OK, EXIT_TOLERANCE, EXIT_PARSE, EXIT_DOMAIN = 0, 1, 2, 3
THREADS_ENV = "TODA_BOOTSTRAP_THREADS"


class ParseError(Exception):
    pass


# serialization -------------------------------------------------------------


def _frac_str(x: Fraction) -> str:
    return str(Fraction(x))


def _parse_frac(x) -> Fraction:
    if isinstance(x, bool):
        raise ParseError("booleans are not numbers")
    try:
        if isinstance(x, float):
            return Fraction(x).limit_denominator(10**12)
        return Fraction(x)
    except (TypeError, ValueError, ZeroDivisionError) as err:
        raise ParseError(f"not a rational number: {x!r}") from err


def coeff_to_json(c: CoeffB) -> dict:
    return {"u": _frac_str(c.u), "v": _frac_str(c.v), "w": _frac_str(c.w)}


def coeff_from_json(d) -> CoeffB:
    if isinstance(d, (int, float, str)) and not isinstance(d, bool):
        return CoeffB(_parse_frac(d))
    if not isinstance(d, dict) or set(d) - {"u", "v", "w"}:
        raise ParseError(f"coefficient must be an object with keys u, v, w: {d!r}")
    return CoeffB(*(_parse_frac(d.get(k, 0)) for k in ("u", "v", "w")))


def charge_to_json(alpha: Charge) -> dict:
    return {
        "omega_coeffs": [coeff_to_json(c) for c in alpha.coords],
        "cont": {name: [coeff_to_json(c) for c in vec] for name, vec in alpha.cont},
    }


def charge_from_json(d) -> Charge:
    if not isinstance(d, dict) or "omega_coeffs" not in d:
        raise ParseError("charge must be an object with an 'omega_coeffs' list")
    coeffs = [coeff_from_json(c) for c in d["omega_coeffs"]]
    cont = d.get("cont", {}) or {}
    if not isinstance(cont, dict):
        raise ParseError("'cont' must map parameter names to direction lists")
    n = len(coeffs) + 1
    dirs = []
    for name, vec in cont.items():
        vec = [coeff_from_json(c) for c in vec]
        if len(vec) != n - 1:
            raise ParseError(f"direction {name!r} has the wrong length")
        dirs.append((name, tuple(vec)))
    if n < 2:
        raise ParseError("a charge needs at least one omega coefficient")
    return Charge(n, tuple(coeffs), tuple(dirs))


def field_to_json(f: nonscalar.FieldLabel) -> dict:
    tag = f.degeneracy
    out = {
        "alpha": charge_to_json(f.alpha),
        "alphabar": charge_to_json(f.alphabar),
        "sigma": list(f.sigma.perm),
        "degeneracy": {"kind": tag.kind},
    }
    if tag.direction is not None:
        out["degeneracy"]["direction"] = tag.direction
    if tag.kappa is not None:
        out["degeneracy"]["kappa"] = coeff_to_json(tag.kappa)
    if tag.label is not None:
        out["degeneracy"]["label"] = tag.label
    return out


def field_from_json(d) -> nonscalar.FieldLabel:
    if not isinstance(d, dict) or "alpha" not in d:
        raise ParseError("field must be an object with 'alpha'")
    alpha = charge_from_json(d["alpha"])
    alphabar = charge_from_json(d.get("alphabar", d["alpha"]))
    perm = d.get("sigma", list(range(1, alpha.n + 1)))
    try:
        sigma = WeylElement(tuple(int(k) for k in perm))
    except (TypeError, ValueError) as err:
        raise ParseError(f"bad permutation {perm!r}") from err
    tag = d.get("degeneracy", {"kind": "generic"})
    kappa = tag.get("kappa")
    return nonscalar.FieldLabel(
        alpha, alphabar, sigma,
        kinematics.DegeneracyTag(
            tag.get("kind", "generic"), tag.get("direction"),
            coeff_from_json(kappa) if kappa is not None else None, tag.get("label"),
        ),
    )


def special_to_json(v) -> dict:
    return {"log_abs": v.log_abs, "sign": v.sign, "order": v.order, "value": v.value()}


def parse_charge_arg(text: str, n: int | None = None) -> Charge:
    """A JSON charge object, or comma-separated rational omega-coordinates."""
    text = text.strip()
    if text.startswith("{"):
        try:
            alpha = charge_from_json(json.loads(text))
        except json.JSONDecodeError as err:
            raise ParseError(f"invalid JSON charge: {err}") from err
    else:
        alpha = Charge(len(text.split(",")) + 1, tuple(CoeffB(_parse_frac(t.strip())) for t in text.split(",")))
    if n is not None and alpha.n != n:
        raise ParseError(f"charge has rank {alpha.n}, expected {n}")
    return alpha


def parse_sigma(text: str, n: int) -> WeylElement:
    """Cycle notation such as "(123)" or "(1 2)(3 4)", or "id"."""
    text = text.strip()
    if text in ("", "id", "()"):
        return WeylElement.identity(n)
    cycles = []
    for chunk in text.replace(")", ")|").split("|"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if not (chunk.startswith("(") and chunk.endswith(")")):
            raise ParseError(f"bad cycle notation {text!r}")
        body = chunk[1:-1].replace(",", " ")
        items = body.split() if " " in body.strip() else list(body.strip())
        try:
            cycles.append(tuple(int(x) for x in items))
        except ValueError as err:
            raise ParseError(f"bad cycle notation {text!r}") from err
    try:
        return WeylElement.from_cycles(n, cycles)
    except ValueError as err:
        raise ParseError(str(err)) from err


# jobs -------------------------------------------------------------------------


@dataclass
class JobSpec:
    command: str
    n: int | None = None
    b: float | None = None
    inputs: dict = field(default_factory=dict)
    output: dict = field(default_factory=lambda: {"path": None, "format": "json"})

    def to_json(self) -> str:
        return json.dumps(
            {"command": self.command, "n": self.n, "b": self.b, "inputs": self.inputs, "output": self.output},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "JobSpec":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as err:
            raise ParseError(f"invalid job JSON: {err}") from err
        if not isinstance(d, dict) or d.get("command") not in COMMANDS:
            raise ParseError(f"job needs a command among {COMMANDS}")
        return cls(d["command"], d.get("n"), d.get("b"), d.get("inputs", {}) or {},
                   d.get("output") or {"path": None, "format": "json"})

    def params(self) -> TodaParams:
        if self.n is None or self.b is None:
            raise ParseError("this command needs both n and b")
        return TodaParams(int(self.n), float(self.b))


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        k = int(raw)
    except ValueError as err:
        raise ParseError(f"{THREADS_ENV} must be an integer") from err
    if k < 1:
        raise ParseError(f"{THREADS_ENV} must be positive")
    return k


def _field_arg(job: JobSpec, key: str) -> nonscalar.FieldLabel:
    return field_from_json(job.inputs[key])


def _charge_input(job: JobSpec, key: str) -> Charge:
    if key not in job.inputs:
        raise ParseError(f"missing input {key!r}")
    return charge_from_json(job.inputs[key])


def _do_upsilon(job: JobSpec):
    if job.b is None:
        raise ParseError("upsilon needs b")
    ev = evaluator(float(job.b))
    func = ev.gamma_b if job.inputs.get("function") == "gamma_b" else ev.upsilon
    rows = [dict(x=float(x), **special_to_json(func(float(x)))) for x in job.inputs.get("x", [])]
    return EXIT_OK, {"b": float(job.b), "function": job.inputs.get("function", "upsilon"), "values": rows}


def _do_weights(job: JobSpec):
    p = job.params()
    alpha = _charge_input(job, "alpha")
    values = job.inputs.get("values")
    out = {"n": p.n, "b": p.b, "c": p.c, "delta": kinematics.delta(alpha, p, values)}
    if p.n == 3:
        w = complex(kinematics.w3_charge(alpha, p, values))
        out["w3"] = {"re": w.real, "im": w.imag}
    out["degeneracy"] = kinematics.classify_charge(alpha).kind if not alpha.has_cont else "generic"
    return EXIT_OK, out


def _constant_json(res: structure.ThreePointResult) -> dict:
    z = complex(res)
    m = res.phased.magnitude
    return {
        "log_abs": m.log_abs, "order": m.order, "phase_eighths": res.phase_eighths,
        "re": z.real, "im": z.imag, "finite": res.is_finite,
        "value": z.real if res.phased.is_real else None,
    }


def _do_structure_constant(job: JobSpec):
    p = job.params()
    ev = evaluator(p.b)
    a1 = _charge_input(job, "alpha1")
    a2 = dual(a1) if job.inputs.get("alpha2") == "dual" else _charge_input(job, "alpha2")
    kappa = coeff_from_json(job.inputs.get("kappa", 0))
    direction = int(job.inputs.get("direction", p.n - 1))
    res = structure.scalar_C(a1, a2, kappa, direction, p, ev, job.inputs.get("values"))
    return EXIT_OK, {"alpha1": charge_to_json(a1), "alpha2": charge_to_json(a2),
                     "kappa": coeff_to_json(kappa), "direction": direction, "C": _constant_json(res)}


def _do_classify(job: JobSpec):
    n = int(job.n)
    if "charge" in job.inputs:
        alpha = _charge_input(job, "charge")
        tag = kinematics.classify_charge(alpha)
        out = {"kind": tag.kind, "generic": kinematics.is_generic(alpha)}
        if tag.direction is not None:
            out["direction"] = tag.direction
            out["kappa"] = coeff_to_json(tag.kappa)
        if tag.label is not None:
            out["label"] = tag.label
        return EXIT_OK, out
    sigma = parse_sigma(job.inputs.get("sigma", "id"), n)
    idx = [_parse_frac(x) for x in job.inputs.get("indices", [])]
    if n == 2:
        if len(idx) != 2:
            raise ParseError("n = 2 needs indices r,s")
        f = nonscalar.make_field_sl2(*idx)
    elif n == 3 and sigma.cycle_type() == (3,):
        if len(idx) != 4:
            raise ParseError("cyclic class needs indices n1,n2,m1,m2")
        f = nonscalar.make_field_sl3("cyclic", idx)
        if sigma != f.sigma:
            f = nonscalar.conjugated(f, _conjugator(f.sigma, sigma))
    else:
        r = [_parse_frac(x) for x in job.inputs.get("r", [0] * n)]
        s = [_parse_frac(x) for x in job.inputs.get("s", [0] * n)]
        base = {int(k): (v if isinstance(v, str) else coeff_from_json(v))
                for k, v in (job.inputs.get("base") or {}).items()}
        f = nonscalar.make_field_sln(sigma, r, s, base)
    ok = nonscalar.verify_constraints(f)
    out = {"field": field_to_json(f), "constraints": ok, "cycle_type": list(f.sigma.cycle_type())}
    if ok:
        mc = nonscalar.monodromy_charges(f)
        out["eta"] = _frac_str(mc.eta)
        out["etahat"] = None if mc.etahat is None else _frac_str(mc.etahat)
    return EXIT_OK, out


def _conjugator(src: WeylElement, dst: WeylElement) -> WeylElement:
    """mu with mu src mu^-1 = dst, for permutations of the same cycle type."""
    if src.cycle_type() != dst.cycle_type():
        raise ValueError("permutations are not conjugate")
    mapping = {}
    for a, c in zip(sorted(src.cycles(), key=len, reverse=True), sorted(dst.cycles(), key=len, reverse=True)):
        mapping.update(zip(a, c))
    rest_src = [k for k in range(1, src.n + 1) if k not in mapping]
    rest_dst = [k for k in range(1, src.n + 1) if k not in mapping.values()]
    mapping.update(zip(rest_src, rest_dst))
    return WeylElement(tuple(mapping[k] for k in range(1, src.n + 1)))


def _do_fuse(job: JobSpec):
    label = job.inputs.get("label")
    if label not in kinematics.DEGENERATE_LABELS:
        raise ParseError(f"label must be one of {kinematics.DEGENERATE_LABELS}")
    if "field" in job.inputs:
        f = _field_arg(job, "field")
        outs = nonscalar.fuse_nonscalar_degenerate(f, label)
        return EXIT_OK, {"label": label, "products": [field_to_json(g) for g in outs]}
    alpha = _charge_input(job, "charge")
    outs = kinematics.fuse_fully_degenerate(label, alpha)
    return EXIT_OK, {"label": label, "products": [charge_to_json(a) for a in outs]}


def _pmap(func, items):
    with ThreadPoolExecutor(max_workers=max(1, min(_threads(), len(items) or 1))) as pool:
        return list(pool.map(func, items))


def _do_verify_shift(job: JobSpec):
    p = job.params()
    ev = evaluator(p.b)
    ev.upsilon(p.b)  # warm the shared evaluator before threads use it
    rng = np.random.default_rng(int(job.inputs.get("seed", 0)))
    count = int(job.inputs.get("count", 20))
    tol = float(job.inputs.get("tol", 1e-7))
    families = ["b", "-1/b"] if job.inputs.get("family", "both") == "both" else [job.inputs["family"]]
    configs = []
    for _ in range(count):
        a1 = random_generic_charge(p.n, rng)
        a2, a2o = random_generic_charge(p.n, rng), random_generic_charge(p.n, rng)
        kappa = random_kappa(rng)
        direction = 1 if rng.integers(2) == 0 else p.n - 1
        i, j = (int(x) + 1 for x in rng.choice(p.n, size=2, replace=False))
        configs.append((a1, a2, a2o, kappa, direction, i, j))

    def check(cfg):
        a1, a2, a2o, kappa, direction, i, j = cfg
        return [structure.shift_residual_scalar(a1, a2, a2o, kappa, direction, i, j, p, ev, fam).residual
                for fam in families]

    results = _pmap(check, configs)
    worst = max((r for row in results for r in row), default=0.0)
    report = {"n": p.n, "b": p.b, "count": count, "families": families, "tol": tol,
              "max_residual": worst, "residuals": results}
    return (EXIT_OK if worst <= tol else EXIT_TOLERANCE), report


def _do_verify_crossing(job: JobSpec):
    p = job.params()
    rng = np.random.default_rng(int(job.inputs.get("seed", 0)))
    tol_off = float(job.inputs.get("tol_offdiag", 1e-8))
    tol_cross = float(job.inputs.get("tol_crossing", 1e-6))
    if job.inputs.get("nonscalar"):
        if p.n != 2:
            raise ValueError("the built-in non-scalar configuration is for n = 2")
        f1 = nonscalar.scalar_field(random_generic_charge(2, rng))
        f2 = nonscalar.make_field_sl2(Fraction(1, 2), Fraction(1, 2))
        f3 = nonscalar.make_field_sl2(Fraction(1, 2), Fraction(1, 2), semidegenerate=True)
    else:
        f1 = nonscalar.scalar_field(random_generic_charge(p.n, rng))
        f2 = nonscalar.scalar_field(random_generic_charge(p.n, rng))
        f3 = nonscalar.semidegenerate_field(p.n, p.n - 1, CoeffB(random_kappa(rng)))
    rep = bootstrap.crossing_residual(f1, f2, f3, p)
    ok = rep.offdiag_residual <= tol_off and rep.crossing_mismatch <= tol_cross and rep.x_spread <= 1e-8
    out = rep.to_dict()
    out.update({"n": p.n, "b": p.b, "fields": [field_to_json(f) for f in (f1, f2, f3)],
                "tol_offdiag": tol_off, "tol_crossing": tol_cross, "passed": ok})
    return (EXIT_OK if ok else EXIT_TOLERANCE), out


SWEEP_COLUMNS = ("kappa", "t", "log_abs", "sign", "zero_order", "phase_eighths", "finite")


def _do_sweep(job: JobSpec):
    p = job.params()
    ev = evaluator(p.b)
    ev.upsilon(p.b)
    a1 = _charge_input(job, "alpha1")
    a2 = _charge_input(job, "alpha2")
    direction = int(job.inputs.get("direction", p.n - 1))
    kmin, kmax = float(job.inputs.get("kappa_min", 0.05)), float(job.inputs.get("kappa_max", 0.95))
    kpts = int(job.inputs.get("kappa_points", 100))
    shift_dir = job.inputs.get("t_direction")
    ts = [0.0]
    if shift_dir is not None:
        ts = list(np.linspace(float(job.inputs["t_min"]), float(job.inputs["t_max"]), int(job.inputs["t_points"])))
    grid = [(float(k), float(t)) for t in ts for k in np.linspace(kmin, kmax, kpts)]
    x1 = a1.numeric(p.b)
    x2 = a2.numeric(p.b)

    def row(point):
        kappa, t = point
        x = x1.copy()
        if shift_dir is not None:
            x[int(shift_dir) - 1] += t
        res = structure.scalar_C(x, x2, kappa, direction, p, ev)
        m = res.phased.magnitude
        phase = res.phase_eighths
        sign = "" if phase not in (0, 4) else (1 if phase == 0 else -1)
        return (repr(float(kappa)), repr(float(t)), repr(float(m.log_abs)), str(sign), str(m.order), str(phase), str(res.is_finite).lower())

    rows = _pmap(row, grid)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    writer.writerows(rows)
    return EXIT_OK, buf.getvalue()


HANDLERS = {
    "upsilon": _do_upsilon,
    "weights": _do_weights,
    "structure-constant": _do_structure_constant,
    "classify": _do_classify,
    "fuse": _do_fuse,
    "verify-shift": _do_verify_shift,
    "verify-crossing": _do_verify_crossing,
    "sweep": _do_sweep,
}


def write_atomic(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=False)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(text.encode("utf-8"))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(job: JobSpec) -> tuple[int, str]:
    """Execute a job; returns the exit code and the rendered output."""
    if job.command not in HANDLERS:
        raise ParseError(f"unknown command {job.command!r}")
    code, payload = HANDLERS[job.command](job)
    text = payload if isinstance(payload, str) else json.dumps(payload, sort_keys=True, indent=2) + "\n"
    return code, text


# argument parsing ----------------------------------------------------------------


def _common(p: argparse.ArgumentParser, need_params: bool = True):
    if need_params:
        p.add_argument("--n", type=int, required=True, help="rank n of sl_n")
        p.add_argument("--b", type=float, required=True, help="coupling b > 0")
    p.add_argument("--output", "-o", default=None, help="write the result here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toda-bootstrap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a JSON job file")
    p.add_argument("job")
    p.add_argument("--output", "-o", default=None)

    p = sub.add_parser("upsilon", help="Upsilon_b or Gamma_b at given points")
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--x", type=float, nargs="+", required=True)
    p.add_argument("--gamma-b", action="store_true", help="evaluate the double Gamma function instead")
    p.add_argument("--output", "-o", default=None)

    p = sub.add_parser("weights", help="central charge, conformal weight and spin-3 charge")
    _common(p)
    p.add_argument("--alpha", required=True, help="JSON charge or comma-separated omega-coordinates")

    p = sub.add_parser("structure-constant", help="scalar three-point constant")
    _common(p)
    p.add_argument("--alpha1", required=True)
    p.add_argument("--alpha2", required=True, help="a charge, or 'dual' for the conjugate of alpha1")
    p.add_argument("--kappa", default="0")
    p.add_argument("--direction", type=int, default=None, help="1 or n-1 (default n-1)")

    p = sub.add_parser("classify", help="degeneracy of a charge, or a non-scalar field from lattice data")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--charge", default=None)
    p.add_argument("--sigma", default="id", help='cycle notation, e.g. "(123)"')
    p.add_argument("--indices", default=None, help="n=2: r,s; n=3 cyclic: n1,n2,m1,m2")
    p.add_argument("--r", default=None, help="comma-separated r_k for the general construction")
    p.add_argument("--s", default=None, help="comma-separated s_k for the general construction")
    p.add_argument("--output", "-o", default=None)

    p = sub.add_parser("fuse", help="fusion with a fully degenerate field")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--label", required=True, choices=kinematics.DEGENERATE_LABELS)
    p.add_argument("--charge", default=None)
    p.add_argument("--field", default=None, help="JSON field label")
    p.add_argument("--output", "-o", default=None)

    p = sub.add_parser("verify-shift", help="shift-equation residuals over random configurations")
    _common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--family", choices=("b", "-1/b", "both"), default="both")
    p.add_argument("--tol", type=float, default=1e-7)

    p = sub.add_parser("verify-crossing", help="glue blocks and compare both channels")
    _common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nonscalar", action="store_true", help="n = 2 half-integer configuration")
    p.add_argument("--tol-offdiag", type=float, default=1e-8)
    p.add_argument("--tol-crossing", type=float, default=1e-6)

    p = sub.add_parser("sweep", help="CSV grid of log|C| along kappa (and optionally alpha1)")
    _common(p)
    p.add_argument("--alpha1", required=True)
    p.add_argument("--alpha2", required=True)
    p.add_argument("--direction", type=int, default=None)
    p.add_argument("--kappa-min", type=float, default=0.05)
    p.add_argument("--kappa-max", type=float, default=0.95)
    p.add_argument("--kappa-points", type=int, default=100)
    p.add_argument("--t-direction", type=int, default=None, help="omega index along which alpha1 moves")
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--t-max", type=float, default=0.0)
    p.add_argument("--t-points", type=int, default=1)
    return parser


def _csv_list(text: str | None) -> list[str] | None:
    return None if text is None else [t.strip() for t in text.split(",")]


def job_from_args(args: argparse.Namespace) -> JobSpec:
    cmd = args.command
    out = {"path": args.output, "format": "csv" if cmd == "sweep" else "json"}
    n = getattr(args, "n", None)
    b = getattr(args, "b", None)
    inputs: dict[str, Any] = {}
    if cmd == "upsilon":
        inputs = {"x": list(args.x), "function": "gamma_b" if args.gamma_b else "upsilon"}
    elif cmd == "weights":
        inputs = {"alpha": charge_to_json(parse_charge_arg(args.alpha, n))}
    elif cmd == "structure-constant":
        inputs = {
            "alpha1": charge_to_json(parse_charge_arg(args.alpha1, n)),
            "alpha2": "dual" if args.alpha2 == "dual" else charge_to_json(parse_charge_arg(args.alpha2, n)),
            "kappa": coeff_to_json(CoeffB(_parse_frac(args.kappa))),
            "direction": args.direction if args.direction is not None else n - 1,
        }
    elif cmd == "classify":
        if args.charge is not None:
            inputs = {"charge": charge_to_json(parse_charge_arg(args.charge, n))}
        else:
            inputs = {"sigma": args.sigma}
            for key in ("indices", "r", "s"):
                vals = _csv_list(getattr(args, key))
                if vals is not None:
                    inputs[key] = vals
    elif cmd == "fuse":
        inputs = {"label": args.label}
        if args.field is not None:
            try:
                inputs["field"] = json.loads(args.field)
            except json.JSONDecodeError as err:
                raise ParseError(f"invalid JSON field: {err}") from err
        elif args.charge is not None:
            inputs["charge"] = charge_to_json(parse_charge_arg(args.charge, n))
        else:
            raise ParseError("fuse needs --charge or --field")
    elif cmd == "verify-shift":
        inputs = {"seed": args.seed, "count": args.count, "family": args.family, "tol": args.tol}
    elif cmd == "verify-crossing":
        inputs = {"seed": args.seed, "nonscalar": args.nonscalar,
                  "tol_offdiag": args.tol_offdiag, "tol_crossing": args.tol_crossing}
    elif cmd == "sweep":
        inputs = {
            "alpha1": charge_to_json(parse_charge_arg(args.alpha1, n)),
            "alpha2": charge_to_json(parse_charge_arg(args.alpha2, n)),
            "direction": args.direction if args.direction is not None else n - 1,
            "kappa_min": args.kappa_min, "kappa_max": args.kappa_max, "kappa_points": args.kappa_points,
        }
        if args.t_direction is not None:
            inputs.update(t_direction=args.t_direction, t_min=args.t_min, t_max=args.t_max, t_points=args.t_points)
    return JobSpec(cmd, n, b, inputs, out)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARSE
    try:
        if args.command == "run":
            with open(args.job, encoding="utf-8") as fh:
                job = JobSpec.from_json(fh.read())
            if args.output is not None:
                job.output = dict(job.output, path=args.output)
        else:
            job = job_from_args(args)
        code, text = run(job)
    except (ParseError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except (ValueError, ArithmeticError, KeyError) as err:
        print(f"domain error: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    path = job.output.get("path")
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
