"""Numerical checks of the mean-width bounds.

For an isotropic centered measure mu on S^{n-1} with C the convex hull of
its support, and any k-dimensional subspace H:

  * projection-simplex:  W(P_H C) >= sqrt(k/n) * W(simplex_k), equality
    exactly when P_H C is the scaled regular simplex;
  * projection-cross (mu even):  W(P_H C) >= sqrt(k/n) * W(cross_k);
  * section-cube (mu even):  W(C° cap H) <= sqrt(n/k) * W(cube_k).

Each check compares a Monte Carlo width estimate against the exact scaled
reference value at three standard errors — the bounds are exact, only the
estimator is noisy — and flags equality by geometric congruence of the
extremal body (a rotation-invariant Gram-multiset match), never by numeric
coincidence of widths.

Two deterministic inequalities feed the same machinery and are checked
directly on atoms: the Ball-Barthe determinant bound and the first-moment
norm bound for isotropic measures.  The per-lambda transport inequality
couples a Gaussian-mass integral of the polar section against a closed-form
product over the lifted measure.
"""

from dataclasses import dataclass
from math import exp, log, pi, sqrt
from typing import NamedTuple

import numpy as np
from scipy.special import erfcx

from .errors import NotEven, NotIsotropic
from .gauss import (
    Estimate,
    MCConfig,
    ReferenceBody,
    _evaluate_cloud,
    mean_width_mc,
    mean_width_reference,
)
from .geometry import (
    Subspace,
    VPolytope,
    enumerate_vertices,
    extreme_points,
    polar_v,
    project_polytope,
    section_polytope,
)
from .measures import DiscreteSphericalMeasure, _require_isotropic, lift_measure

VERIFY_PRE_TOL = 1e-8     # isotropy/centering required of inputs
EQUALITY_GRAM_TOL = 1e-6  # inner-product multiset agreement
BALL_BARTHE_REL_TOL = 1e-9

TRANSPORT_R_STEPS = 2000


@dataclass(frozen=True)
class BoundReport:
    """One verified inequality instance."""

    name: str
    lhs: Estimate
    rhs: float
    direction: str  # "lower_bound" | "upper_bound"
    margin: float   # lhs.value - rhs
    holds: bool     # at three standard errors
    equality: bool  # geometric equality-case detection (implies holds)

    def __post_init__(self):
        if self.direction not in ("lower_bound", "upper_bound"):
            raise ValueError(f"bad direction {self.direction!r}")


def _bound_report(name, lhs: Estimate, rhs: float, direction: str, equality_geom: bool):
    margin = lhs.value - rhs
    if direction == "lower_bound":
        holds = margin >= -3.0 * lhs.stderr
    else:
        holds = margin <= 3.0 * lhs.stderr
    return BoundReport(name, lhs, rhs, direction, margin, holds, equality_geom and holds)


@dataclass(frozen=True)
class TransportReport:
    lam: float
    lhs: Estimate
    rhs: float
    beta: float
    holds: bool


class BallBartheResult(NamedTuple):
    lhs: float
    rhs: float
    holds: bool
    equality: bool


class MomentBoundResult(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def _require_even(m: DiscreteSphericalMeasure):
    if not m.even:
        raise NotEven("this check applies to even measures only")


def _projection_cloud(mu: DiscreteSphericalMeasure, H: Subspace) -> VPolytope:
    hull = VPolytope(mu.dim, mu.units)
    return project_polytope(hull, H)


def verify_projection_simplex(
    mu: DiscreteSphericalMeasure, H: Subspace, cfg: MCConfig, tol: float = VERIFY_PRE_TOL
) -> BoundReport:
    """Lower bound W(P_H C) >= sqrt(k/n) W(simplex_k) for centered isotropic mu."""
    _require_isotropic(mu, centered=True, tol=tol)
    n, k = mu.dim, H.dim
    cloud = _projection_cloud(mu, H)
    lhs = _width_of_cloud(cloud, cfg)
    scale = sqrt(k / n)
    rhs = scale * mean_width_reference(ReferenceBody("simplex", k))
    eq = equality_case_detect(
        VPolytope(k, extreme_points(cloud)), ReferenceBody("simplex", k), scale
    )
    return _bound_report(f"projection-simplex[n={n},k={k}]", lhs, rhs, "lower_bound", eq)


def verify_projection_cross(
    mu: DiscreteSphericalMeasure, H: Subspace, cfg: MCConfig, tol: float = VERIFY_PRE_TOL
) -> BoundReport:
    """Lower bound W(P_H C) >= sqrt(k/n) W(cross_k) for even isotropic mu."""
    _require_even(mu)
    _require_isotropic(mu, centered=False, tol=tol)
    n, k = mu.dim, H.dim
    cloud = _projection_cloud(mu, H)
    lhs = _width_of_cloud(cloud, cfg)
    scale = sqrt(k / n)
    rhs = scale * mean_width_reference(ReferenceBody("cross", k))
    eq = equality_case_detect(
        VPolytope(k, extreme_points(cloud)), ReferenceBody("cross", k), scale
    )
    return _bound_report(f"projection-cross[n={n},k={k}]", lhs, rhs, "lower_bound", eq)


def verify_section_cube(
    mu: DiscreteSphericalMeasure, H: Subspace, cfg: MCConfig, tol: float = VERIFY_PRE_TOL
) -> BoundReport:
    """Upper bound W(C° cap H) <= sqrt(n/k) W(cube_k) for even isotropic mu."""
    _require_even(mu)
    _require_isotropic(mu, centered=False, tol=tol)
    n, k = mu.dim, H.dim
    section = _polar_section(mu, H)
    # isotropic support spans, so C contains a ball and the section is a
    # bounded polytope with the unit ball of H inside: enumerate once and
    # evaluate the support as a vertex max
    verts = enumerate_vertices(section)
    body = VPolytope(k, verts)
    lhs = _width_of_cloud(body, cfg)
    scale = sqrt(n / k)
    rhs = scale * mean_width_reference(ReferenceBody("cube", k))
    eq = equality_case_detect(body, ReferenceBody("cube", k), scale)
    return _bound_report(f"section-cube[n={n},k={k}]", lhs, rhs, "upper_bound", eq)


def _polar_section(mu: DiscreteSphericalMeasure, H: Subspace):
    hull = VPolytope(mu.dim, mu.units)
    # interiority of the origin follows from isotropy, already validated
    section = section_polytope(polar_v(hull, verify_interior=False), H)
    if section is None:  # unreachable for isotropic inputs
        raise NotIsotropic("polar section is empty")
    return section


def _width_of_cloud(body: VPolytope, cfg: MCConfig) -> Estimate:
    return mean_width_mc(body.support, body.dim, cfg)


def equality_case_detect(body: VPolytope, target: ReferenceBody, scale: float) -> bool:
    """Is the extreme-point set a rotation of the scaled target's vertices?

    Decided by cardinality plus agreement of the sorted multiset of pairwise
    inner products (the full Gram matrix, so norms are compared too).  The
    body must already be hull-reduced.
    """
    pts = body.vertices
    ref = scale * target.vertices()
    if pts.shape[0] != ref.shape[0]:
        return False
    gram_pts = np.sort((pts @ pts.T).ravel())
    gram_ref = np.sort((ref @ ref.T).ravel())
    return bool(np.abs(gram_pts - gram_ref).max() <= EQUALITY_GRAM_TOL)


def ball_barthe_check(nu: DiscreteSphericalMeasure, f: np.ndarray) -> BallBartheResult:
    """det sum c f u(x)u  >=  exp sum c log f, for isotropic nu and f > 0.

    Equality holds exactly when the product of f over every linearly
    independent atom k-tuple is the same constant; numerically it is flagged
    at relative tolerance 1e-9.
    """
    _require_isotropic(nu, centered=False)
    f = np.asarray(f, dtype=float)
    if f.shape != (nu.num_atoms,):
        raise ValueError(f"need one positive value per atom, got shape {f.shape}")
    if (f <= 0).any():
        raise ValueError("f must be strictly positive")
    weighted = (nu.weights * f)[:, None] * nu.units
    lhs = float(np.linalg.det(weighted.T @ nu.units))
    rhs = float(exp(np.sum(nu.weights * np.log(f))))
    holds = lhs >= rhs * (1.0 - BALL_BARTHE_REL_TOL)
    equality = abs(lhs - rhs) <= BALL_BARTHE_REL_TOL * rhs
    return BallBartheResult(lhs, rhs, holds, equality)


def moment_bound_check(nu: DiscreteSphericalMeasure, f: np.ndarray) -> MomentBoundResult:
    """||sum c f u|| <= (sum c f^2)^{1/2} for isotropic nu."""
    _require_isotropic(nu, centered=False)
    f = np.asarray(f, dtype=float)
    if f.shape != (nu.num_atoms,):
        raise ValueError(f"need one value per atom, got shape {f.shape}")
    lhs = float(np.linalg.norm((nu.weights * f) @ nu.units))
    rhs = float(sqrt(np.sum(nu.weights * f**2)))
    return MomentBoundResult(lhs, rhs, lhs <= rhs + 1e-12)


def transport_bound_check(
    mu: DiscreteSphericalMeasure,
    H: Subspace,
    lam: float,
    cfg: MCConfig,
    r_max: float | None = None,
    r_steps: int = TRANSPORT_R_STEPS,
    tol: float = VERIFY_PRE_TOL,
) -> TransportReport:
    """Per-shift Gaussian transport inequality on the polar section.

    Left side: Integral_0^inf exp(-r^2/2 + (lam - sqrt(n+1)) r)
    * gamma_k((r/sqrt(n)) (C° cap H)) dr by the trapezoid rule, with the
    Gaussian mass at every node estimated from one shared seeded point cloud
    (identical to a per-node mass estimate at the same seed).  Right side:
    (2 pi)^{-k/2} exp sum_w c_w log G(a_w) with a_w = (lam - sqrt(n+1)) w_last
    and G(a) = Integral_0^inf exp(-s^2/2 + a s) ds = sqrt(pi/2) erfcx(-a/sqrt 2).

    beta is the mass-normalized last-axis moment of the lifted measure scaled
    by sqrt(n+1)/sqrt(k+1); it never exceeds sqrt(n+1).
    """
    _require_isotropic(mu, centered=True, tol=tol)
    n, k = mu.dim, H.dim
    shift = lam - sqrt(n + 1.0)
    if r_max is None:
        r_max = sqrt(n) * (8.0 + abs(lam))

    section = _polar_section(mu, H)  # offsets are all 1
    nodes = np.linspace(0.0, r_max, r_steps)
    h = nodes[1] - nodes[0]
    weights = np.full(r_steps, h)
    weights[0] = weights[-1] = h / 2.0
    envelope = weights * np.exp(-0.5 * nodes**2 + shift * nodes)
    # suffix[j] = sum of envelope over nodes >= j; a sample whose section
    # gauge is m contributes exactly the nodes with t_j >= sqrt(n) * m
    suffix = np.concatenate([np.cumsum(envelope[::-1])[::-1], [0.0]])
    sqrt_n = sqrt(n)

    def per_sample(x: np.ndarray) -> np.ndarray:
        gauges = np.maximum((x @ section.normals.T).max(axis=-1), 0.0)
        idx = np.searchsorted(nodes, sqrt_n * gauges, side="left")
        return suffix[idx]

    values = _evaluate_cloud(per_sample, k, cfg)
    lhs_mean = float(values.mean())
    lhs_err = float(values.std(ddof=1) / sqrt(values.size)) if values.size > 1 else 0.0
    lhs = Estimate(lhs_mean, lhs_err, cfg.samples)

    lifted = lift_measure(mu, H, tol=tol)
    a = shift * lifted.units[:, -1]
    log_g = 0.5 * log(pi / 2.0) + np.log(erfcx(-a / sqrt(2.0)))
    rhs = float((2.0 * pi) ** (-k / 2.0) * exp(np.sum(lifted.weights * log_g)))
    beta = float(sqrt(n + 1.0) / sqrt(k + 1.0) * np.sum(lifted.weights * lifted.units[:, -1]))
    holds = lhs.value <= rhs + 3.0 * lhs.stderr
    return TransportReport(lam, lhs, rhs, beta, holds)
