"""Discrete isotropic measures on the unit sphere.

A measure is a finite list of atoms (unit vector, positive weight).  It is
isotropic when the weighted sum of rank-one projectors u (x) u equals the
identity, which forces total mass n; it is centered when the weighted vector
sum vanishes.  This module validates those properties, builds the canonical
extremal measures (coordinate cross and regular simplex), synthesizes random
even isotropic measures, pushes measures forward onto subspaces, and lifts
them one dimension up onto an open hemisphere in a way that preserves
isotropy.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotCentered, NotIsotropic
from .geometry import Subspace, _freeze

UNIT_TOL = 1e-12
PAIR_TOL = 1e-12
MERGE_TOL = 1e-10
DROP_TOL = 1e-12       # atoms projecting below this norm carry no weight
ISOTROPY_PRE_TOL = 1e-9  # required of inputs to project/lift


@dataclass(frozen=True)
class IsotropyReport:
    """Diagnostics of how far a measure is from isotropic and centered."""

    frobenius_defect: float  # ||sum c u(x)u - I||_F
    centroid_norm: float     # ||sum c u|| / mass
    mass: float

    def is_isotropic(self, tol: float) -> bool:
        return self.frobenius_defect <= tol

    def is_centered(self, tol: float) -> bool:
        return self.centroid_norm <= tol


@dataclass(frozen=True)
class DiscreteSphericalMeasure:
    dim: int
    units: np.ndarray    # (m, dim) unit vectors
    weights: np.ndarray  # (m,) positive
    even: bool = False   # claimed +- symmetry, verified on construction

    def __post_init__(self):
        u = np.atleast_2d(np.asarray(self.units, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if u.shape[1] != self.dim or u.shape[0] != w.shape[0] or u.shape[0] < 1:
            raise DimensionMismatch(
                f"atoms {u.shape} / weights {w.shape} invalid for dimension {self.dim}"
            )
        if np.abs(np.linalg.norm(u, axis=1) - 1.0).max() > UNIT_TOL:
            raise ValueError("atom directions must be unit vectors within 1e-12")
        if (w <= 0).any():
            raise ValueError("atom weights must be strictly positive")
        object.__setattr__(self, "units", _freeze(u))
        object.__setattr__(self, "weights", _freeze(w))
        if self.even:
            _check_even_pairing(u, w)

    @property
    def num_atoms(self) -> int:
        return self.units.shape[0]

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def moment_matrix(self) -> np.ndarray:
        return (self.weights[:, None] * self.units).T @ self.units

    def centroid_vector(self) -> np.ndarray:
        return self.weights @ self.units


def _check_even_pairing(u: np.ndarray, w: np.ndarray):
    m = u.shape[0]
    used = np.zeros(m, dtype=bool)
    for i in range(m):
        if used[i]:
            continue
        partner = -1
        for j in range(m):
            if j == i or used[j]:
                continue
            if np.linalg.norm(u[i] + u[j]) <= PAIR_TOL and abs(w[i] - w[j]) <= PAIR_TOL:
                partner = j
                break
        if partner < 0:
            raise ValueError("measure flagged even but atoms do not pair as +-u")
        used[i] = used[partner] = True


def isotropy_check(m: DiscreteSphericalMeasure) -> IsotropyReport:
    """Frobenius distance of the second moment from the identity, centroid, mass."""
    moment = m.moment_matrix()
    defect = float(np.linalg.norm(moment - np.eye(m.dim)))
    centroid = float(np.linalg.norm(m.centroid_vector())) / m.mass
    return IsotropyReport(defect, centroid, m.mass)


def canonical_measure(kind: str, n: int) -> DiscreteSphericalMeasure:
    """The extremal measures: coordinate cross or inscribed regular simplex.

    cross: atoms +-e_i with weight 1/2 each (even).
    simplex: the n+1 vertices of the regular simplex inscribed in the unit
    sphere, each with weight n/(n+1); centroid is zero.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if kind == "cross":
        eye = np.eye(n)
        units = np.vstack([np.stack([eye[i], -eye[i]]) for i in range(n)])
        return DiscreteSphericalMeasure(n, units, np.full(2 * n, 0.5), even=True)
    if kind == "simplex":
        units = simplex_vertices(n)
        return DiscreteSphericalMeasure(n, units, np.full(n + 1, n / (n + 1)), even=False)
    raise ValueError(f"unknown canonical measure kind {kind!r}")


def simplex_vertices(n: int) -> np.ndarray:
    """Vertices of the regular n-simplex inscribed in S^{n-1}.

    Built recursively: the first vertex sits at e_n, the remaining n are a
    scaled copy of the (n-1)-simplex placed at height -1/n.  All pairwise
    inner products equal -1/n.
    """
    if n == 1:
        return np.array([[1.0], [-1.0]])
    lower = simplex_vertices(n - 1)
    scale = np.sqrt(1.0 - 1.0 / n**2)
    out = np.zeros((n + 1, n))
    out[0, n - 1] = 1.0
    out[1:, : n - 1] = scale * lower
    out[1:, n - 1] = -1.0 / n
    return out


def random_even_isotropic(m_atoms: int, n: int, seed: int) -> DiscreteSphericalMeasure:
    """Random even isotropic measure with m_atoms +- pairs (2*m_atoms atoms).

    Starts from seeded uniform directions and runs the fixed-point iteration
      u <- M^{-1/2} u / ||M^{-1/2} u||,   c <- c ||M^{-1/2} u||^2,
    with M the current second moment, which preserves mass n and drives the
    moment to the identity.  Deterministic in the seed.
    """
    if m_atoms < n:
        raise ValueError("need at least n direction pairs")
    rng = np.random.default_rng(seed)
    u = rng.normal(size=(m_atoms, n))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    c = np.full(m_atoms, n / m_atoms)  # pair weights; each +- atom gets half

    for _ in range(500):
        moment = (c[:, None] * u).T @ u
        defect = np.linalg.norm(moment - np.eye(n))
        if defect <= 1e-10:
            break
        vals, vecs = np.linalg.eigh(moment)
        if vals.min() <= 1e-13:
            raise NoConvergence("degenerate draw: moment matrix lost rank; reseed")
        inv_sqrt = (vecs / np.sqrt(vals)) @ vecs.T
        v = u @ inv_sqrt.T
        norms = np.linalg.norm(v, axis=1)
        u = v / norms[:, None]
        c = c * norms**2
    else:
        raise NoConvergence("isotropy iteration did not reach 1e-10 in 500 steps")

    units = np.vstack([u, -u])
    weights = np.concatenate([c, c]) / 2.0
    out = DiscreteSphericalMeasure(n, units, weights, even=True)
    if isotropy_check(out).frobenius_defect > 1e-9:
        raise NoConvergence("result misses the 1e-9 isotropy contract")
    return out


def project_measure(
    m: DiscreteSphericalMeasure, H: Subspace, tol: float = ISOTROPY_PRE_TOL
) -> DiscreteSphericalMeasure:
    """Pushforward onto the sphere of H: u -> P_H u / ||P_H u|| with weight c ||P_H u||^2.

    Atoms orthogonal to H are dropped (they carry no weight in the limit);
    coincident images are merged.  The output is isotropic on S^{k-1} with
    mass k whenever the input is isotropic.
    """
    _require_isotropic(m, centered=False, tol=tol)
    if m.dim != H.ambient_dim:
        raise DimensionMismatch(f"measure dim {m.dim} != ambient {H.ambient_dim}")
    proj = m.units @ H.basis.T
    norms = np.linalg.norm(proj, axis=1)
    keep = norms > DROP_TOL
    units = proj[keep] / norms[keep, None]
    weights = m.weights[keep] * norms[keep] ** 2
    units, weights = _merge_atoms(units, weights)
    return DiscreteSphericalMeasure(H.dim, units, weights, even=m.even)


@dataclass(frozen=True)
class LiftedMeasure:
    """Measure on the sphere of a (k+1)-dimensional frame.

    The last coordinate is the distinguished axis appended to the subspace
    frame; every atom has strictly positive last coordinate, so the support
    sits in an open hemisphere.  Total weight is k+1.
    """

    k: int
    units: np.ndarray    # (m, k+1)
    weights: np.ndarray  # (m,)

    def __post_init__(self):
        u = np.atleast_2d(np.asarray(self.units, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if u.shape[1] != self.k + 1 or u.shape[0] != w.shape[0]:
            raise DimensionMismatch(
                f"lifted atoms {u.shape} / weights {w.shape} invalid for k={self.k}"
            )
        if np.abs(np.linalg.norm(u, axis=1) - 1.0).max() > UNIT_TOL:
            raise ValueError("lifted atoms must be unit vectors within 1e-12")
        if (u[:, -1] <= 0).any():
            raise ValueError("lifted atoms must have strictly positive last coordinate")
        if (w <= 0).any():
            raise ValueError("lifted weights must be positive")
        if abs(w.sum() - (self.k + 1)) > 1e-10:
            raise ValueError(f"lifted mass {w.sum()} differs from k+1={self.k + 1}")
        object.__setattr__(self, "units", _freeze(u))
        object.__setattr__(self, "weights", _freeze(w))

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def moment_matrix(self) -> np.ndarray:
        return (self.weights[:, None] * self.units).T @ self.units

    def axis_moment_residual(self) -> float:
        """||sum_i c_i w_i <w_i, e_last>  -  e_last||."""
        moment = (self.weights * self.units[:, -1]) @ self.units
        target = np.zeros(self.k + 1)
        target[-1] = 1.0
        return float(np.linalg.norm(moment - target))

    def as_spherical(self) -> DiscreteSphericalMeasure:
        return DiscreteSphericalMeasure(self.k + 1, self.units, self.weights)


def lift_measure(
    m: DiscreteSphericalMeasure, H: Subspace, tol: float = ISOTROPY_PRE_TOL
) -> LiftedMeasure:
    """Hemisphere embedding of an isotropic centered measure.

    Each atom u maps to the unit vector along
        ( -sqrt(n/(n+1)) P_H u ,  1/sqrt(n+1) )
    in the frame of H extended by a distinguished last axis, with weight
    (n+1)/n * c * (squared norm of that vector before normalizing).  The
    output is isotropic in dimension k+1, has mass k+1, and its weighted
    first moment against the last axis is exactly that axis.
    """
    _require_isotropic(m, centered=True, tol=tol)
    if m.dim != H.ambient_dim:
        raise DimensionMismatch(f"measure dim {m.dim} != ambient {H.ambient_dim}")
    n, k = m.dim, H.dim
    raw = np.column_stack(
        [
            -np.sqrt(n / (n + 1.0)) * (m.units @ H.basis.T),
            np.full(m.num_atoms, 1.0 / np.sqrt(n + 1.0)),
        ]
    )
    norms = np.linalg.norm(raw, axis=1)  # >= 1/sqrt(n+1) always
    units = raw / norms[:, None]
    weights = (n + 1.0) / n * m.weights * norms**2
    units, weights = _merge_atoms(units, weights)
    return LiftedMeasure(k, units, weights)


def _merge_atoms(units: np.ndarray, weights: np.ndarray):
    """Sum weights of directions that coincide within MERGE_TOL (stable order)."""
    out_u: list[np.ndarray] = []
    out_w: list[float] = []
    for u, w in zip(units, weights):
        for j, v in enumerate(out_u):
            if np.linalg.norm(u - v) <= MERGE_TOL:
                out_w[j] += w
                break
        else:
            out_u.append(u)
            out_w.append(w)
    return np.array(out_u), np.array(out_w)


def _require_isotropic(m: DiscreteSphericalMeasure, centered: bool, tol: float = ISOTROPY_PRE_TOL):
    report = isotropy_check(m)
    if not report.is_isotropic(tol):
        raise NotIsotropic(f"isotropy defect {report.frobenius_defect:.2e} exceeds {tol:.0e}")
    if centered and not report.is_centered(tol):
        raise NotCentered(f"centroid norm {report.centroid_norm:.2e} exceeds {tol:.0e}")
