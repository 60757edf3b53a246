"""JSON schemas for measures, bodies, and subspaces, plus report rendering.

Schemas (minimal, hand-writable):

  measure   {"dim": n, "even": bool, "atoms": [{"u": [...], "c": w}, ...]}
  body      {"kind": "vpolytope", "dim": n, "vertices": [[...], ...]}
            {"kind": "hpolytope", "dim": n, "normals": [[...]], "offsets": [...]}
            {"kind": "ball"|"cube"|"cross"|"simplex"|"polar_simplex", "dim": k}
  subspace  {"ambient_dim": n, "basis": [[...], ...]}

All numeric output is printed with 17 significant digits so every value
round-trips losslessly through text.
"""

import json

import numpy as np

from .errors import ParseError
from .gauss import Estimate, ReferenceBody
from .geometry import HPolytope, Subspace, VPolytope
from .john import JohnResult
from .measures import DiscreteSphericalMeasure, IsotropyReport
from .verify import BallBartheResult, BoundReport, MomentBoundResult, TransportReport


def dumps(obj, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits."""
    return _render(obj, indent, 0)


def _render(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1)) if indent else ""
    end_pad = " " * (indent * level) if indent else ""
    sep = ",\n" if indent else ", "
    nl = "\n" if indent else ""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not np.isfinite(obj):
            raise ValueError(f"non-finite value {obj} cannot be serialized")
        return format(float(obj), ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = sep.join(
            f"{pad}{json.dumps(str(k))}: {_render(v, indent, level + 1)}"
            for k, v in obj.items()
        )
        return "{" + nl + items + nl + end_pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = sep.join(f"{pad}{_render(v, indent, level + 1)}" for v in seq)
        return "[" + nl + items + nl + end_pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# loading


def _parse_json(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _field(doc: dict, name: str, context: str):
    if not isinstance(doc, dict):
        raise ParseError(f"{context}: expected a JSON object")
    if name not in doc:
        raise ParseError(f"{context}: missing field {name!r}")
    return doc[name]


def _as_positive_int(value, context: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ParseError(f"{context}: expected a positive integer, got {value!r}")
    return value


def load_measure(text: str) -> DiscreteSphericalMeasure:
    doc = _parse_json(text)
    dim = _as_positive_int(_field(doc, "dim", "measure"), "measure.dim")
    even = bool(doc.get("even", False))
    atoms = _field(doc, "atoms", "measure")
    if not isinstance(atoms, list) or not atoms:
        raise ParseError("measure.atoms: expected a non-empty list")
    units, weights = [], []
    for i, atom in enumerate(atoms):
        u = _field(atom, "u", f"measure.atoms[{i}]")
        c = _field(atom, "c", f"measure.atoms[{i}]")
        if not isinstance(u, list) or len(u) != dim:
            raise ParseError(f"measure.atoms[{i}].u: expected a list of length {dim}")
        units.append([float(x) for x in u])
        weights.append(float(c))
    try:
        return DiscreteSphericalMeasure(dim, np.array(units), np.array(weights), even=even)
    except Exception as exc:  # noqa: BLE001 - surfaced as a parse diagnostic
        raise ParseError(f"measure: {exc}") from None


def load_body(text: str):
    doc = _parse_json(text)
    kind = _field(doc, "kind", "body")
    dim = _as_positive_int(_field(doc, "dim", "body"), "body.dim")
    if kind == "vpolytope":
        vertices = _field(doc, "vertices", "body")
        try:
            return VPolytope(dim, np.asarray(vertices, dtype=float))
        except Exception as exc:  # noqa: BLE001
            raise ParseError(f"body: {exc}") from None
    if kind == "hpolytope":
        normals = _field(doc, "normals", "body")
        offsets = _field(doc, "offsets", "body")
        try:
            return HPolytope(dim, np.asarray(normals, dtype=float), np.asarray(offsets, dtype=float))
        except Exception as exc:  # noqa: BLE001
            raise ParseError(f"body: {exc}") from None
    if kind in ("ball", "cube", "cross", "simplex", "polar_simplex"):
        return ReferenceBody(kind, dim)
    raise ParseError(f"body.kind: unknown kind {kind!r}")


def load_subspace(text: str) -> Subspace:
    doc = _parse_json(text)
    n = _as_positive_int(_field(doc, "ambient_dim", "subspace"), "subspace.ambient_dim")
    basis = _field(doc, "basis", "subspace")
    try:
        return Subspace(n, np.asarray(basis, dtype=float))
    except Exception as exc:  # noqa: BLE001
        raise ParseError(f"subspace: {exc}") from None


# ---------------------------------------------------------------------------
# dumping


def measure_to_dict(m: DiscreteSphericalMeasure) -> dict:
    return {
        "dim": m.dim,
        "even": m.even,
        "atoms": [{"u": list(u), "c": float(c)} for u, c in zip(m.units, m.weights)],
    }


def body_to_dict(body) -> dict:
    if isinstance(body, VPolytope):
        return {"kind": "vpolytope", "dim": body.dim, "vertices": body.vertices}
    if isinstance(body, HPolytope):
        return {
            "kind": "hpolytope",
            "dim": body.dim,
            "normals": body.normals,
            "offsets": body.offsets,
        }
    if isinstance(body, ReferenceBody):
        return {"kind": body.kind, "dim": body.k}
    raise TypeError(f"not a body: {type(body).__name__}")


def subspace_to_dict(H: Subspace) -> dict:
    return {"ambient_dim": H.ambient_dim, "basis": H.basis}


def estimate_to_dict(est: Estimate) -> dict:
    return {"value": est.value, "stderr": est.stderr, "samples": est.samples}


def isotropy_report_to_dict(report: IsotropyReport, tol: float) -> dict:
    return {
        "frobenius_defect": report.frobenius_defect,
        "centroid_norm": report.centroid_norm,
        "mass": report.mass,
        "tol": tol,
        "isotropic": report.is_isotropic(tol),
        "centered": report.is_centered(tol),
    }


def bound_report_to_dict(report: BoundReport) -> dict:
    return {
        "name": report.name,
        "direction": report.direction,
        "lhs": estimate_to_dict(report.lhs),
        "rhs": report.rhs,
        "margin": report.margin,
        "holds": report.holds,
        "equality": report.equality,
    }


def transport_report_to_dict(report: TransportReport) -> dict:
    return {
        "lambda": report.lam,
        "lhs": estimate_to_dict(report.lhs),
        "rhs": report.rhs,
        "beta": report.beta,
        "holds": report.holds,
    }


def ball_barthe_to_dict(result: BallBartheResult) -> dict:
    return {
        "lhs": result.lhs,
        "rhs": result.rhs,
        "holds": result.holds,
        "equality": result.equality,
    }


def moment_bound_to_dict(result: MomentBoundResult) -> dict:
    return {"lhs": result.lhs, "rhs": result.rhs, "holds": result.holds}


def john_result_to_dict(result: JohnResult) -> dict:
    return {
        "ellipsoid": {"center": result.ellipsoid.center, "shape": result.ellipsoid.shape},
        "transform": {"matrix": result.transform.matrix, "offset": result.transform.offset},
        "contacts": measure_to_dict(result.contacts),
    }


def error_to_dict(exc: Exception) -> dict:
    return {"error": {"type": type(exc).__name__, "message": str(exc)}}


def format_float(x: float) -> str:
    return format(float(x), ".17g")
