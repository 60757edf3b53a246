"""Maximum-volume inscribed ellipsoids and contact-point measures.

A bounded H-polytope has a unique maximal-volume inscribed (John) ellipsoid.
When that ellipsoid is the unit ball, the facets tangent to it touch at unit
vectors u_i that admit nonnegative weights c_i with sum c_i u_i (x) u_i = I
and sum c_i u_i = 0 — an isotropic, centered measure on the sphere.  This
module computes the ellipsoid (log-det maximization over a second-order-cone
feasible set), repositions bodies so their John ellipsoid is the unit ball,
and recovers the contact measure by nonnegative least squares.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import sqrtm
from scipy.optimize import minimize, nnls

from .errors import DecompositionFailed, NoConvergence
from .geometry import HPolytope, _freeze, support_h
from .measures import DiscreteSphericalMeasure, _check_even_pairing

TANGENT_TOL = 1e-6       # facet distance from 1 to count as a contact
DECOMP_RESIDUAL_TOL = 1e-6
POSITION_TOL = 1e-8      # target deviation from the unit ball when repositioning
CONTAINMENT_TOL = 1e-8


@dataclass(frozen=True)
class Ellipsoid:
    """{x : (x - center)^T shape^{-1} (x - center) <= 1} with shape SPD."""

    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        a = np.atleast_2d(np.asarray(self.shape, dtype=float))
        if a.shape != (c.size, c.size):
            raise ValueError(f"shape {a.shape} does not match center length {c.size}")
        if np.abs(a - a.T).max() > 1e-12:
            raise ValueError("shape matrix must be symmetric within 1e-12")
        if np.linalg.eigvalsh(a).min() <= 0:
            raise ValueError("shape matrix must be positive definite")
        object.__setattr__(self, "center", _freeze(c))
        object.__setattr__(self, "shape", _freeze(a))

    @property
    def dim(self) -> int:
        return self.center.size

    def sym_factor(self) -> np.ndarray:
        """Symmetric PSD square root E with E @ E = shape."""
        e = np.real(sqrtm(self.shape))
        return (e + e.T) / 2.0


@dataclass(frozen=True)
class AffineMap:
    """y = matrix @ x + offset."""

    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _freeze(np.atleast_2d(self.matrix)))
        object.__setattr__(self, "offset", _freeze(np.atleast_1d(self.offset)))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.matrix.T + self.offset

    def inverse(self) -> "AffineMap":
        inv = np.linalg.inv(self.matrix)
        return AffineMap(inv, -inv @ self.offset)


@dataclass(frozen=True)
class JohnResult:
    ellipsoid: Ellipsoid
    transform: AffineMap  # sends the John ellipsoid to the unit ball
    contacts: DiscreteSphericalMeasure

    def __post_init__(self):
        from .measures import isotropy_check

        report = isotropy_check(self.contacts)
        if report.frobenius_defect > 1e-6 or report.centroid_norm > 1e-6:
            raise DecompositionFailed(
                f"contact measure misses the isotropy contract: defect "
                f"{report.frobenius_defect:.2e}, centroid {report.centroid_norm:.2e}"
            )


def _check_bounded_nonempty(body: HPolytope):
    for i in range(body.dim):
        e = np.zeros(body.dim)
        for sign in (1.0, -1.0):
            e[i] = sign
            support_h(body, e)  # raises Unbounded / Infeasible as appropriate
            e[i] = 0.0


def _mvie_once(normals: np.ndarray, offsets: np.ndarray):
    """One max-volume inscribed ellipsoid solve: maximize log det E over
    symmetric PSD E and center d with ||E a_i|| + <a_i, d> <= b_i."""
    import cvxpy as cp

    n = normals.shape[1]
    E = cp.Variable((n, n), PSD=True)
    d = cp.Variable(n)
    constraints = [
        cp.norm(E @ normals[i]) + normals[i] @ d <= offsets[i]
        for i in range(normals.shape[0])
    ]
    problem = cp.Problem(cp.Maximize(cp.log_det(E)), constraints)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # Clarabel near-tolerance chatter
        problem.solve(
            solver=cp.CLARABEL,
            tol_gap_abs=1e-11,
            tol_gap_rel=1e-11,
            tol_feas=1e-11,
        )
    if E.value is None or d.value is None:
        raise NoConvergence(f"ellipsoid solve failed with status {problem.status}")
    e = np.asarray(E.value)
    return (e + e.T) / 2.0, np.asarray(d.value)


def _polish_mvie(normals: np.ndarray, offsets: np.ndarray):
    """Sequential quadratic programming refinement of the inscribed ellipsoid.

    The problem is jointly convex in (E, d); warm-started at the unit ball of
    an already near-positioned body, SLSQP with analytic gradients converges
    to machine precision where the conic solver floors out around 1e-7.
    """
    n = normals.shape[1]
    iu = np.triu_indices(n)
    ntri = len(iu[0])

    def unpack(z):
        e = np.zeros((n, n))
        e[iu] = z[:ntri]
        e = e + e.T - np.diag(np.diag(e))
        return e, z[ntri:]

    def sym_to_tri(g):
        h = g + g.T
        h[np.diag_indices(n)] /= 2.0
        return h[iu]

    def fun(z):
        e, _ = unpack(z)
        sign, logdet = np.linalg.slogdet(e)
        return 1e50 if sign <= 0 else -logdet

    def jac(z):
        e, _ = unpack(z)
        return np.concatenate([sym_to_tri(-np.linalg.inv(e)), np.zeros(n)])

    def cons_f(z):
        e, d = unpack(z)
        return offsets - normals @ d - np.linalg.norm(normals @ e, axis=1)

    def cons_j(z):
        e, d = unpack(z)
        w = normals @ e
        nw = np.linalg.norm(w, axis=1)
        out = np.empty((len(offsets), ntri + n))
        for i in range(len(offsets)):
            out[i, :ntri] = -sym_to_tri(np.outer(normals[i], w[i] / nw[i]))
            out[i, ntri:] = -normals[i]
        return out

    # strictly feasible start; a boundary start can stall the line search
    z0 = np.concatenate([(0.99 * np.eye(n))[iu], np.zeros(n)])
    res = minimize(
        fun,
        z0,
        jac=jac,
        method="SLSQP",
        constraints=[{"type": "ineq", "fun": cons_f, "jac": cons_j}],
        options={"ftol": 1e-16, "maxiter": 500},
    )
    # judge the iterate, not the status: a "no further progress" exit at the
    # optimum is fine, any infeasible or indefinite iterate is not
    e, d = unpack(res.x)
    if not np.isfinite(res.x).all() or np.linalg.eigvalsh(e).min() <= 0:
        return None
    if cons_f(res.x).min() < -1e-10:
        return None
    return e, d


def john_ellipsoid(body: HPolytope, max_rounds: int = 6) -> Ellipsoid:
    """Maximal-volume inscribed ellipsoid of a bounded H-polytope.

    Conic solves are repeated on the repositioned body and composed until the
    increment is small, then an SQP polish removes the conic solver's noise
    floor; the result is accurate well beyond the 1e-6 tolerances used
    downstream.
    """
    _check_bounded_nonempty(body)
    n = body.dim
    a_cur, b_cur = body.normals.copy(), body.offsets.copy()
    s_total, c_total = np.eye(n), np.zeros(n)
    deviation = np.inf
    for _ in range(max_rounds):
        e, d = _mvie_once(a_cur, b_cur)
        c_total = s_total @ d + c_total
        s_total = s_total @ e
        b_cur = b_cur - a_cur @ d
        a_cur = a_cur @ e
        deviation = max(np.abs(e - np.eye(n)).max(), np.abs(d).max())
        if deviation <= 1e-5:
            break
    polished = _polish_mvie(a_cur, b_cur)
    if polished is not None:
        e, d = polished
        c_total = s_total @ d + c_total
        s_total = s_total @ e
    elif deviation > 1e-6:
        raise NoConvergence(f"ellipsoid refinement stalled at deviation {deviation:.2e}")
    shape = s_total @ s_total.T
    shape = (shape + shape.T) / 2.0
    center = c_total
    slack = body.offsets - body.normals @ center - np.linalg.norm(
        body.normals @ s_total, axis=1
    )
    if slack.min() < -CONTAINMENT_TOL:
        raise NoConvergence(f"containment violated by {-slack.min():.2e}")
    return Ellipsoid(center, shape)


def to_john_position(body: HPolytope) -> tuple[HPolytope, AffineMap]:
    """Reposition so the John ellipsoid becomes the unit ball.

    Returns the image body and the affine map that was applied, using the
    symmetric factor of the ellipsoid (a canonical, deterministic choice).
    """
    ell = john_ellipsoid(body)
    e = ell.sym_factor()
    transform = AffineMap(np.linalg.inv(e), -np.linalg.solve(e, ell.center))
    normals = body.normals @ e  # e symmetric: rows are E^T a_i
    offsets = body.offsets - body.normals @ ell.center
    return HPolytope(body.dim, normals, offsets), transform


def contact_decomposition(body: HPolytope) -> DiscreteSphericalMeasure:
    """Contact measure of a body whose John ellipsoid is the unit ball.

    Facets at unit distance from the origin give the candidate directions;
    their weights solve the stacked system
        sum c_i u_i (x) u_i = I,   sum c_i u_i = 0,   c >= 0
    by nonnegative least squares.  Atoms with zero weight are dropped.
    """
    n = body.dim
    norms = np.linalg.norm(body.normals, axis=1)
    distances = body.offsets / norms
    tangent = np.abs(distances - 1.0) <= TANGENT_TOL
    if not tangent.any():
        raise DecompositionFailed("no facet is tangent to the unit ball")
    units = body.normals[tangent] / norms[tangent, None]
    m = units.shape[0]
    stacked = np.empty((n * n + n, m))
    for i, u in enumerate(units):
        stacked[: n * n, i] = np.outer(u, u).ravel()
        stacked[n * n :, i] = u
    target = np.concatenate([np.eye(n).ravel(), np.zeros(n)])
    weights, residual = nnls(stacked, target)
    if residual > DECOMP_RESIDUAL_TOL:
        raise DecompositionFailed(
            f"contact weights leave residual {residual:.2e}; "
            "body is not in John position or tangency tolerance is too tight"
        )
    keep = weights > 1e-12
    units, weights = units[keep], weights[keep]
    try:
        _check_even_pairing(units, weights)
        even = True
    except ValueError:
        even = False
    return DiscreteSphericalMeasure(n, units, weights, even=even)


def john_decomposition(body: HPolytope) -> JohnResult:
    """Full pipeline: ellipsoid, repositioning map, contact measure."""
    ell = john_ellipsoid(body)
    positioned, transform = to_john_position(body)
    contacts = contact_decomposition(positioned)
    return JohnResult(ell, transform, contacts)
