"""Command-line front end.

Reads measures, bodies, and subspaces as JSON files ("-" for stdin), runs
checks and sweeps, and emits JSON or CSV reports on stdout.

Exit codes: 0 = all checks hold, 1 = a mathematical violation or failure was
detected, 2 = usage or input error (with a machine-readable error object).
"""

import sys
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np

from . import serialize
from .errors import (
    DecompositionFailed,
    DimensionMismatch,
    Infeasible,
    NoConvergence,
    NonFinite,
    NotCentered,
    NotEven,
    NotIsotropic,
    OriginNotInterior,
    ParseError,
    RankDeficient,
    Unbounded,
)
from .gauss import Estimate, MCConfig, ReferenceBody, mean_width_complement, mean_width_mc, mean_width_reference
from .geometry import HPolytope, Subspace, VPolytope, orthonormalize_subspace
from .john import john_decomposition
from .measures import (
    DiscreteSphericalMeasure,
    canonical_measure,
    isotropy_check,
    random_even_isotropic,
)
from .verify import (
    ball_barthe_check,
    transport_bound_check,
    verify_projection_cross,
    verify_projection_simplex,
    verify_section_cube,
)

VERIFY_KINDS = ("projection-simplex", "projection-cross", "section-cube", "ball-barthe", "transport")
SWEEP_KINDS = VERIFY_KINDS

# input/validation problems -> exit 2; mathematical failures -> exit 1
USAGE_ERRORS = (
    ParseError,
    DimensionMismatch,
    RankDeficient,
    NotEven,
    NotIsotropic,
    NotCentered,
    OriginNotInterior,
    ValueError,
    OSError,
)
MATH_ERRORS = (Unbounded, Infeasible, NoConvergence, DecompositionFailed, NonFinite)


@dataclass
class RunManifest:
    """Echo of one invocation: command, input files, sampling config, tolerances."""

    command: str
    inputs: dict = field(default_factory=dict)
    cfg: MCConfig = field(default_factory=MCConfig)
    tolerances: dict = field(default_factory=dict)
    output_format: str = "json"

    def validate(self):
        for name, path in self.inputs.items():
            if path != "-" and not Path(path).exists():
                raise ParseError(f"{name} file not found: {path}")

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": dict(self.inputs),
            "cfg": {"samples": self.cfg.samples, "seed": self.cfg.seed, "batch": self.cfg.batch},
            "tolerances": dict(self.tolerances),
            "output_format": self.output_format,
        }


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _emit(doc, fmt: str):
    if fmt == "json":
        click.echo(serialize.dumps(doc, indent=2))
    else:
        click.echo(doc)  # pre-rendered CSV text


def _fail(exc: Exception) -> int:
    click.echo(serialize.dumps(serialize.error_to_dict(exc), indent=2))
    if isinstance(exc, MATH_ERRORS):
        return 1
    return 2


def _csv_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return serialize.format_float(value)
    return str(value)


def _csv(rows: list[dict], columns: list[str]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_csv_cell(row[c]) for c in columns))
    return "\n".join(lines)


def _mc_options(fn):
    for deco in (
        click.option("--samples", default=200_000, show_default=True, help="Monte Carlo samples"),
        click.option("--seed", default=0, show_default=True, help="RNG seed"),
        click.option("--batch", default=65_536, show_default=True, help="sample chunk size"),
    ):
        fn = deco(fn)
    return fn


@click.group()
@click.version_option()
def main():
    """Mean-width inequality checks for isotropic spherical measures."""


@main.command("check-isotropic")
@click.argument("measure_file")
@click.option("--tol", default=1e-8, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
def check_isotropic(measure_file, tol, fmt):
    """Isotropy and centering diagnostics of a measure file."""
    manifest = RunManifest("check-isotropic", {"measure": measure_file}, tolerances={"tol": tol}, output_format=fmt)
    try:
        manifest.validate()
        measure = serialize.load_measure(_read(measure_file))
        report = isotropy_check(measure)
    except USAGE_ERRORS as exc:
        sys.exit(_fail(exc))
    doc = serialize.isotropy_report_to_dict(report, tol)
    if fmt == "json":
        doc["manifest"] = manifest.to_dict()
        _emit(doc, fmt)
    else:
        cols = ["frobenius_defect", "centroid_norm", "mass", "tol", "isotropic", "centered"]
        _emit(_csv([doc], cols), fmt)
    sys.exit(0 if report.is_isotropic(tol) and report.is_centered(tol) else 1)


@main.command("verify")
@click.argument("kind", type=click.Choice(VERIFY_KINDS))
@click.argument("measure_file")
@click.argument("subspace_file", required=False)
@_mc_options
@click.option("--tol", default=1e-8, show_default=True, help="isotropy tolerance on inputs")
@click.option("--lambda", "lam", default=0.0, show_default=True, help="shift parameter (transport)")
@click.option("--rmax", default=None, type=float, help="integration range (transport)")
@click.option("--rsteps", default=2000, show_default=True, help="trapezoid nodes (transport)")
@click.option("--f-file", default=None, help="JSON list of positive atom values (ball-barthe)")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
def verify_cmd(kind, measure_file, subspace_file, samples, seed, batch, tol, lam, rmax, rsteps, f_file, fmt):
    """Check one inequality instance; exit 0 when the bound holds."""
    cfg = MCConfig(samples=samples, seed=seed, batch=batch)
    inputs = {"measure": measure_file}
    if subspace_file:
        inputs["subspace"] = subspace_file
    if f_file:
        inputs["f"] = f_file
    manifest = RunManifest(f"verify {kind}", inputs, cfg, {"tol": tol}, fmt)
    try:
        manifest.validate()
        measure = serialize.load_measure(_read(measure_file))
        if kind == "ball-barthe":
            doc, holds = _verify_ball_barthe(measure, f_file, seed)
        else:
            if subspace_file is None:
                raise ParseError(f"{kind} needs a subspace file")
            H = serialize.load_subspace(_read(subspace_file))
            if kind == "transport":
                report = transport_bound_check(
                    measure, H, lam, cfg, r_max=rmax, r_steps=rsteps, tol=tol
                )
                doc, holds = serialize.transport_report_to_dict(report), report.holds
            else:
                checker = {
                    "projection-simplex": verify_projection_simplex,
                    "projection-cross": verify_projection_cross,
                    "section-cube": verify_section_cube,
                }[kind]
                report = checker(measure, H, cfg, tol=tol)
                doc, holds = serialize.bound_report_to_dict(report), report.holds
    except USAGE_ERRORS as exc:
        sys.exit(_fail(exc))
    except MATH_ERRORS as exc:
        sys.exit(_fail(exc))
    if fmt == "json":
        doc["manifest"] = manifest.to_dict()
        _emit(doc, fmt)
    else:
        flat = _flatten_report(doc)
        _emit(_csv([flat], list(flat.keys())), fmt)
    sys.exit(0 if holds else 1)


def _verify_ball_barthe(measure: DiscreteSphericalMeasure, f_file, seed: int):
    if f_file is not None:
        values = serialize._parse_json(_read(f_file))
        if not isinstance(values, list) or len(values) != measure.num_atoms:
            raise ParseError(f"f: expected a list of {measure.num_atoms} positive numbers")
        f = np.asarray([float(v) for v in values])
    else:
        f = np.exp(np.random.default_rng(seed).normal(size=measure.num_atoms))
    result = ball_barthe_check(measure, f)
    doc = serialize.ball_barthe_to_dict(result)
    doc["f"] = f
    return doc, result.holds


def _flatten_report(doc: dict) -> dict:
    flat = {}
    for key, value in doc.items():
        if key == "manifest":
            continue
        if isinstance(value, dict):
            for sub, subval in value.items():
                flat[f"{key}_{sub}"] = subval
        elif isinstance(value, (list, np.ndarray)):
            continue
        else:
            flat[key] = value
    return flat


@main.command("sweep")
@click.argument("kind", type=click.Choice(SWEEP_KINDS))
@click.option("--n-range", default="2:4", show_default=True, help="ambient dimensions lo:hi inclusive")
@click.option("--count", default=10, show_default=True, help="measures per dimension")
@click.option("--k-policy", type=click.Choice(["random", "all"]), default="random", show_default=True)
@click.option("--subspaces", default=3, show_default=True, help="subspace draws per measure (random policy)")
@_mc_options
def sweep_cmd(kind, n_range, count, k_policy, subspaces, samples, seed, batch):
    """Randomized instance sweep; CSV rows on stdout, exit 0 iff every row holds."""
    cfg = MCConfig(samples=samples, seed=seed, batch=batch)
    try:
        lo, hi = _parse_range(n_range)
        if count < 1 or subspaces < 1:
            raise ValueError("count and subspaces must be >= 1")
        rows = _run_sweep(kind, lo, hi, count, k_policy, subspaces, seed, cfg)
    except USAGE_ERRORS as exc:
        sys.exit(_fail(exc))
    except MATH_ERRORS as exc:
        sys.exit(_fail(exc))
    rows.sort(key=lambda r: (r["n"], r["k"], r["seed"]))
    columns = ["seed", "n", "k", "m_atoms", "lhs", "stderr", "rhs", "margin", "holds", "equality"]
    click.echo(_csv(rows, columns))
    sys.exit(0 if all(r["holds"] for r in rows) else 1)


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo_s, hi_s = text.split(":")
        lo, hi = int(lo_s), int(hi_s)
    except Exception:
        raise ValueError(f"bad range {text!r}, expected lo:hi") from None
    if lo < 2 or hi < lo:
        raise ValueError(f"bad range {text!r}: need 2 <= lo <= hi")
    return lo, hi


def _instance_measure(kind: str, n: int, instance_seed: int) -> DiscreteSphericalMeasure:
    if kind == "projection-simplex":
        return canonical_measure("simplex", n)
    pairs = n + instance_seed % (n + 1)
    return random_even_isotropic(pairs, n, instance_seed)


def _run_sweep(kind, lo, hi, count, k_policy, subspaces, seed, cfg) -> list[dict]:
    rows = []
    for n in range(lo, hi + 1):
        for i in range(count):
            instance_seed = seed * 1_000_000 + n * 1_000 + i
            measure = _instance_measure(kind, n, instance_seed)
            if kind == "ball-barthe":
                rng = np.random.default_rng(instance_seed)
                f = np.exp(rng.normal(size=measure.num_atoms))
                res = ball_barthe_check(measure, f)
                rows.append(
                    dict(seed=instance_seed, n=n, k=n, m_atoms=measure.num_atoms,
                         lhs=res.lhs, stderr=0.0, rhs=res.rhs, margin=res.lhs - res.rhs,
                         holds=res.holds, equality=res.equality)
                )
                continue
            if k_policy == "all":
                plan = [(j, k) for j, k in enumerate(range(1, n + 1))]
            else:
                plan = [(j, None) for j in range(subspaces)]
            for j, k_fixed in plan:
                rng = np.random.default_rng(instance_seed * 100 + j)
                k = k_fixed if k_fixed is not None else int(rng.integers(1, n))
                if k == n:
                    H = Subspace.full(n)
                else:
                    H = orthonormalize_subspace(rng.normal(size=(k, n)), n)
                rows.append(_sweep_row(kind, measure, H, rng, cfg, instance_seed))
    return rows


def _sweep_row(kind, measure, H, rng, cfg, instance_seed) -> dict:
    n, k = measure.dim, H.dim
    if kind == "transport":
        lam = float(rng.uniform(-3.0, 3.0))
        rep = transport_bound_check(measure, H, lam, cfg)
        lhs, stderr, rhs, holds, equality = rep.lhs.value, rep.lhs.stderr, rep.rhs, rep.holds, False
    else:
        checker = {
            "projection-simplex": verify_projection_simplex,
            "projection-cross": verify_projection_cross,
            "section-cube": verify_section_cube,
        }[kind]
        rep = checker(measure, H, cfg)
        lhs, stderr, rhs, holds, equality = (
            rep.lhs.value, rep.lhs.stderr, rep.rhs, rep.holds, rep.equality,
        )
    return dict(seed=instance_seed, n=n, k=k, m_atoms=measure.num_atoms,
                lhs=lhs, stderr=stderr, rhs=rhs, margin=lhs - rhs,
                holds=holds, equality=equality)


@main.command("john")
@click.argument("body_file")
@click.option("--contacts-only", is_flag=True, help="emit just the contact measure (pipeable)")
def john_cmd(body_file, contacts_only):
    """John ellipsoid, repositioning map, and contact measure of an H-polytope."""
    manifest = RunManifest("john", {"body": body_file})
    try:
        manifest.validate()
        body = serialize.load_body(_read(body_file))
        if not isinstance(body, HPolytope):
            raise ParseError("john needs an hpolytope body file")
        result = john_decomposition(body)
    except USAGE_ERRORS as exc:
        sys.exit(_fail(exc))
    except MATH_ERRORS as exc:
        sys.exit(_fail(exc))
    if contacts_only:
        _emit(serialize.measure_to_dict(result.contacts), "json")
    else:
        doc = serialize.john_result_to_dict(result)
        doc["manifest"] = manifest.to_dict()
        _emit(doc, "json")
    sys.exit(0)


@main.command("mean-width")
@click.argument("body_file")
@click.option("--method", type=click.Choice(["mc", "complement", "reference"]), default="mc", show_default=True)
@_mc_options
@click.option("--rmax", default=12.0, show_default=True, help="integration range (complement)")
@click.option("--rsteps", default=256, show_default=True, help="trapezoid nodes (complement)")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
def mean_width_cmd(body_file, method, samples, seed, batch, rmax, rsteps, fmt):
    """Mean width of a body by Monte Carlo, the complement formula, or exact reference."""
    cfg = MCConfig(samples=samples, seed=seed, batch=batch)
    manifest = RunManifest(f"mean-width {method}", {"body": body_file}, cfg, output_format=fmt)
    try:
        manifest.validate()
        body = serialize.load_body(_read(body_file))
        est = _mean_width_dispatch(body, method, cfg, rmax, rsteps)
    except USAGE_ERRORS as exc:
        sys.exit(_fail(exc))
    except MATH_ERRORS as exc:
        sys.exit(_fail(exc))
    doc = {"method": method, **serialize.estimate_to_dict(est)}
    if fmt == "json":
        doc["manifest"] = manifest.to_dict()
        _emit(doc, fmt)
    else:
        _emit(_csv([doc], ["method", "value", "stderr", "samples"]), fmt)
    sys.exit(0)


def _mean_width_dispatch(body, method: str, cfg: MCConfig, rmax: float, rsteps: int) -> Estimate:
    if method == "reference":
        if not isinstance(body, ReferenceBody):
            raise ParseError("reference method accepts reference body kinds only")
        return Estimate(mean_width_reference(body), 0.0, 0)
    if method == "mc":
        if isinstance(body, (ReferenceBody, VPolytope)):
            return mean_width_mc(body.support, body.dim, cfg)
        # H-polytope: enumerate vertices once, then the support is a vertex max
        from .geometry import enumerate_vertices

        verts = enumerate_vertices(body, interior_point=_interior_point(body))
        return mean_width_mc(VPolytope(body.dim, verts).support, body.dim, cfg)
    # complement formula needs a membership oracle for the polar body
    if isinstance(body, ReferenceBody):
        polar = body.polar()
        return mean_width_complement(lambda x: polar.gauge(x) <= 1.0, body.dim, cfg, rmax, rsteps)
    if isinstance(body, VPolytope):
        verts = body.vertices
        return mean_width_complement(
            lambda x: (x @ verts.T).max(axis=-1) <= 1.0, body.dim, cfg, rmax, rsteps
        )
    raise ParseError("complement method needs a vpolytope or reference body")


def _interior_point(body: HPolytope) -> np.ndarray:
    """Chebyshev center via LP, a valid interior point for vertex enumeration."""
    from scipy.optimize import linprog

    norms = np.linalg.norm(body.normals, axis=1)
    res = linprog(
        c=np.append(np.zeros(body.dim), -1.0),
        A_ub=np.column_stack([body.normals, norms]),
        b_ub=body.offsets,
        bounds=[(None, None)] * body.dim + [(0, None)],
        method="highs",
    )
    if res.status == 3:
        raise Unbounded("body is unbounded")
    if res.status != 0 or res.x[-1] <= 0:
        raise Infeasible("body has empty interior")
    return res.x[: body.dim]


if __name__ == "__main__":
    main()
