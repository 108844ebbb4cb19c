"""Command dispatch and deterministic report rendering."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .branes import brane_report
from .lattice import (FanPolytope, StructureError, guillemin_hessian, interior_point, load_polytope,
                      normalize_basis, validate_smooth_fano)
from .laurent import render_monomial
from .loops import qh_presentation, quantum_relations, render_relation, verify_qh_jac_iso
from .mirror import DEFAULT_TOL, build_superpotential, find_critical_points, jacobian_ring
from .presets import PRESET_NAMES, load_preset
from .semiflat import SPDMatrix, check_theorem_3_1, semiflat_identities

COMMANDS = ("validate", "mirror", "jacobian", "qh", "verify-iso", "syz-check", "semiflat-check",
            "critical", "clifford")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
DIGITS = 12


class InputError(ValueError):
    """Bad request: unknown preset, malformed file, unparsable option."""


@dataclass
class CommandRequest:
    command: str
    preset: str | None = None
    file: str | None = None
    cutoff: int = 4
    q: dict[str, Fraction] = field(default_factory=dict)
    tol: float = DEFAULT_TOL
    z: list[complex] | None = None
    phi: str | None = None

    @property
    def source(self) -> str:
        return f"preset:{self.preset}" if self.preset else f"file:{self.file}"


@dataclass
class Report:
    command: str
    source: str
    status: str  # ok | warn | fail
    payload: dict[str, Any]

    @property
    def exit_code(self) -> int:
        return EXIT_FAIL if self.status == "fail" else EXIT_OK

    def to_json(self) -> str:
        doc = {"command": self.command, "input": self.source, "status": self.status, "payload": self.payload}
        return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = [f"command: {self.command}", f"input: {self.source}", f"status: {self.status}"]
        lines.extend(_text_lines(self.payload, 0))
        return "\n".join(lines) + "\n"


def _text_lines(value, depth: int) -> list[str]:
    pad = "  " * depth
    out = []
    if isinstance(value, dict):
        for k in sorted(value):
            v = value[k]
            if isinstance(v, dict) and v or isinstance(v, list) and v and not _flat(v):
                out.append(f"{pad}{k}:")
                out.extend(_text_lines(v, depth + 1))
            else:
                out.append(f"{pad}{k}: {_scalar_text(v)}")
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, dict) and v:
                out.append(f"{pad}-")
                out.extend(_text_lines(v, depth + 1))
            elif isinstance(v, list) and any(isinstance(t, (dict, list)) and t for t in v):
                out.append(f"{pad}-")
                out.extend(_text_lines(v, depth + 1))
            else:
                out.append(f"{pad}- {_scalar_text(v)}")
    else:
        out.append(f"{pad}{_scalar_text(value)}")
    return out


def _flat(v: list) -> bool:
    """Short list of numbers, rendered on one line."""
    return all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v)


def _scalar_text(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, dict):
        return "{}"
    if isinstance(v, list):
        return "[" + ", ".join(_scalar_text(t) for t in v) + "]"
    return str(v)


# option parsing

def parse_q(text: str | None) -> dict[str, Fraction]:
    """``"q1=1/2,q2=0.25"`` -> ``{"q1": Fraction(1, 2), "q2": Fraction(1, 4)}``."""
    out: dict[str, Fraction] = {}
    if not text:
        return out
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise InputError(f"expected NAME=VALUE in --q, got {part!r}")
        k, v = (s.strip() for s in part.split("=", 1))
        if k.isdigit():
            k = f"q{k}"
        if not (k.startswith("q") and k[1:].isdigit() and int(k[1:]) >= 1):
            raise InputError(f"unknown parameter name {k!r}")
        try:
            val = Fraction(v)
        except (ValueError, ZeroDivisionError):
            raise InputError(f"cannot parse value {v!r} for {k}") from None
        if val <= 0:
            raise InputError(f"{k} must be positive")
        out[k] = val
    return out


def parse_z(text: str | None) -> list[complex] | None:
    if not text:
        return None
    try:
        return [complex(s.strip().replace(" ", "").replace("i", "j")) for s in text.split(",")]
    except ValueError:
        raise InputError(f"cannot parse point {text!r}") from None


def _q_for(fp: FanPolytope, q: dict[str, Fraction]) -> dict[str, float]:
    extra = [k for k in q if int(k[1:]) > fp.kahler_params]
    if extra:
        raise InputError(f"{fp.name or 'input'} has {fp.kahler_params} Kähler parameter(s); got {extra}")
    return {f"q{a}": float(q.get(f"q{a}", 1)) for a in range(1, fp.kahler_params + 1)}


def load_input(req: CommandRequest) -> FanPolytope:
    if bool(req.preset) == bool(req.file):
        raise InputError("exactly one of --preset and --file is required")
    if req.preset:
        if req.preset not in PRESET_NAMES:
            raise InputError(f"unknown preset {req.preset!r}; available: {', '.join(PRESET_NAMES)}")
        return load_preset(req.preset)
    try:
        return load_polytope(req.file)
    except FileNotFoundError:
        raise InputError(f"no such file: {req.file}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {req.file}: {exc}") from None
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, StructureError):
            raise
        raise InputError(f"invalid polytope description in {req.file}: {exc}") from None


def _round(x: float) -> float:
    x = float(f"{x:.{DIGITS}g}")
    return 0.0 if x == 0 else x


def _cplx(v: complex) -> list[float]:
    return [_round(v.real), _round(v.imag)]


# command handlers; each returns (status, payload)

def _validated(fp: FanPolytope):
    report = validate_smooth_fano(fp)
    if not report.ok:
        return None, report
    return normalize_basis(fp), report


def cmd_validate(fp: FanPolytope, req: CommandRequest):
    report = validate_smooth_fano(fp)
    status = "fail" if not report.ok else ("warn" if report.warnings else "ok")
    return status, report.to_json()


def cmd_mirror(fp: FanPolytope, req: CommandRequest):
    W = build_superpotential(fp)
    terms = [{"exponent": list(v), "coefficient": c.render(), "monomial": render_monomial(v)}
             for v, c in W.poly.sorted_terms()]
    return "ok", {"superpotential": W.render(), "terms": terms, "dim": fp.dim,
                  "kahler_params": fp.kahler_params,
                  "log_derivatives": [g.render() for g in W.gradient]}


def cmd_jacobian(fp: FanPolytope, req: CommandRequest):
    W = build_superpotential(fp)
    jac = jacobian_ring(W)
    pres = jac.presentation
    payload = {
        "superpotential": W.render(),
        "relations": [g.render() for g in W.gradient],
        "order": pres.order,
        "groebner_basis": [str(g).replace("**", "^") for g in pres.groebner],
        "finite": jac.is_finite,
        "dimension": jac.dimension,
        "standard_monomials": ([render_monomial(v) for v in pres.standard_laurent_monomials()]
                               if jac.is_finite else []),
    }
    return ("ok" if jac.is_finite else "fail"), payload


def cmd_qh(fp: FanPolytope, req: CommandRequest):
    qh = qh_presentation(fp)
    payload = {
        "generators": [f"Psi{i + 1} = {g.render()}" for i, g in enumerate(qh.generators)],
        "linear_relations": [f"{render_relation(fp, j)} = {r.render()}"
                             for j, r in enumerate(qh.linear_relations)],
        "quantum_relations": [r.render() for r in quantum_relations(fp)],
        "dimension": qh.realization.dimension,
    }
    return "ok", payload


def cmd_verify_iso(fp: FanPolytope, req: CommandRequest):
    rep = verify_qh_jac_iso(fp)
    status = "fail" if not rep.ok else ("ok" if rep.within_hypothesis else "warn")
    return status, rep.to_json()


def cmd_syz_check(fp: FanPolytope, req: CommandRequest):
    if req.cutoff < 0:
        raise InputError("--cutoff must be non-negative")
    rep = check_theorem_3_1(fp, req.cutoff)
    return ("ok" if rep.ok else "fail"), rep.to_json()


def _load_phi(path: str) -> SPDMatrix:
    try:
        rows = json.loads(Path(path).read_text())
        return SPDMatrix.from_rows([[Fraction(str(x)) for x in r] for r in rows])
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except (json.JSONDecodeError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"invalid phi matrix in {path}: {exc}") from None


def cmd_semiflat_check(fp: FanPolytope, req: CommandRequest):
    if req.phi:
        phi = _load_phi(req.phi)
        if phi.n != fp.dim:
            raise InputError(f"phi is {phi.n}x{phi.n}, input has dimension {fp.dim}")
        origin = "file"
    elif fp.has_supports:
        phi = SPDMatrix.from_rows(guillemin_hessian(fp, interior_point(fp)))
        origin = "Guillemin Hessian at the vertex barycentre"
    else:
        raise InputError("input has no support numbers; supply --phi")
    rep = semiflat_identities(fp.dim, phi, round_trip=fp.dim <= 3)
    payload = rep.to_json()
    payload["phi_origin"] = origin
    return ("ok" if rep.ok else "fail"), payload


def _critical(fp: FanPolytope, req: CommandRequest):
    W = build_superpotential(fp)
    q = _q_for(fp, req.q)
    if req.tol <= 0:
        raise InputError("--tol must be positive")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        search = find_critical_points(W, q, req.tol)
    return W, q, search


def cmd_critical(fp: FanPolytope, req: CommandRequest):
    W, q, search = _critical(fp, req)
    pts = sorted(([_cplx(c) for c in z], _round(r)) for z, r in zip(search.points, search.residuals))
    payload = {
        "q": {k: _round(v) for k, v in q.items()},
        "tol": req.tol,
        "count": len(pts),
        "jacobian_dimension": search.expected,
        "points": [{"z": z, "residual": r} for z, r in pts],
        "warnings": list(search.warnings),
    }
    return ("warn" if search.warnings else "ok"), payload


def cmd_clifford(fp: FanPolytope, req: CommandRequest):
    if req.z is not None:
        W = build_superpotential(fp)
        q = _q_for(fp, req.q)
        if len(req.z) != fp.dim:
            raise InputError(f"--z needs {fp.dim} coordinates")
        if any(c == 0 for c in req.z):
            raise InputError("--z coordinates must be nonzero")
        points, warn = [np.array(req.z)], []
    else:
        W, q, search = _critical(fp, req)
        points, warn = search.points, list(search.warnings)
    reports = sorted((brane_report(W, z, q, req.tol).to_json(DIGITS) for z in points),
                     key=lambda r: r["z"])
    payload = {"q": {k: _round(v) for k, v in q.items()}, "tol": req.tol,
               "points": reports, "warnings": warn}
    singular = any(abs(complex(*r["clifford_det"])) <= 1e-8 for r in reports if r["nontrivial"])
    return ("warn" if warn or singular else "ok"), payload


HANDLERS: dict[str, Callable] = {
    "validate": cmd_validate,
    "mirror": cmd_mirror,
    "jacobian": cmd_jacobian,
    "qh": cmd_qh,
    "verify-iso": cmd_verify_iso,
    "syz-check": cmd_syz_check,
    "semiflat-check": cmd_semiflat_check,
    "critical": cmd_critical,
    "clifford": cmd_clifford,
}


def run(req: CommandRequest) -> Report:
    """Execute one command.  Input problems raise :class:`InputError` or StructureError."""
    if req.command not in HANDLERS:
        raise InputError(f"unknown command {req.command!r}")
    fp = load_input(req)
    if req.command == "validate":
        status, payload = cmd_validate(fp, req)
        return Report(req.command, req.source, status, payload)
    norm, validation = _validated(fp)
    if norm is None:
        return Report(req.command, req.source, "fail", {"validation": validation.to_json()})
    status, payload = HANDLERS[req.command](norm, req)
    if validation.warnings:
        payload = dict(payload, validation_warnings=list(validation.warnings))
        if status == "ok":
            status = "warn"
    return Report(req.command, req.source, status, payload)
