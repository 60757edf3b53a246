"""Polytope and subspace algebra.

Convex bodies appear in two dual forms: ``VPolytope`` (convex hull of a
vertex list) and ``HPolytope`` (intersection of halfspaces
``{x : <normal_i, x> <= offset_i}``).  ``Subspace`` carries an orthonormal
row basis; projected and sectioned bodies always live in the basis frame of
the subspace (k coordinates), never as embedded n-vectors.

All types are immutable after construction and every operation is a pure
function, so everything here is safe to share across threads.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection

from .errors import (
    DimensionMismatch,
    Infeasible,
    OriginNotInterior,
    RankDeficient,
    Unbounded,
)

ORTHO_TOL = 1e-12   # Gram-matrix deviation allowed in a Subspace basis
DEDUP_TOL = 1e-10   # two points closer than this are one vertex
PIVOT_TOL = 1e-10   # rank decisions in Gram-Schmidt
SUPPORT_TOL = 1e-8  # agreement tolerance between dual support evaluations


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Subspace:
    """A k-dimensional linear subspace of R^n given by an orthonormal row basis."""

    ambient_dim: int
    basis: np.ndarray  # shape (k, n), rows orthonormal

    def __post_init__(self):
        b = np.atleast_2d(np.asarray(self.basis, dtype=float))
        object.__setattr__(self, "basis", _freeze(b))
        k, n = b.shape
        if n != self.ambient_dim or not 1 <= k <= n:
            raise DimensionMismatch(
                f"basis shape {b.shape} invalid for ambient dimension {self.ambient_dim}"
            )
        gram = b @ b.T
        if np.abs(gram - np.eye(k)).max() > ORTHO_TOL:
            raise RankDeficient("basis rows are not orthonormal within 1e-12")

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def project(self, x: np.ndarray) -> np.ndarray:
        """Coordinates of the orthogonal projection, in the basis frame."""
        return np.asarray(x, dtype=float) @ self.basis.T

    def embed(self, y: np.ndarray) -> np.ndarray:
        """Map basis-frame coordinates back to ambient n-vectors."""
        return np.asarray(y, dtype=float) @ self.basis

    @staticmethod
    def full(n: int) -> "Subspace":
        return Subspace(n, np.eye(n))


def random_subspace(n: int, k: int, seed: int) -> Subspace:
    """Seeded uniform-ish random k-subspace of R^n (Gaussian rows, Gram-Schmidt)."""
    rng = np.random.default_rng(seed)
    return orthonormalize_subspace(rng.normal(size=(k, n)), n)


def orthonormalize_subspace(rows, ambient_dim: int | None = None) -> Subspace:
    """Gram-Schmidt in input order; raises RankDeficient below the pivot threshold."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    n = ambient_dim if ambient_dim is not None else rows.shape[1]
    if rows.shape[1] != n:
        raise DimensionMismatch(f"rows have length {rows.shape[1]}, expected {n}")
    if rows.shape[0] > n:
        raise RankDeficient("more rows than the ambient dimension")
    basis = []
    for r in rows:
        v = r.copy()
        for b in basis:
            v -= (v @ b) * b
        # second pass for numerical orthogonality
        for b in basis:
            v -= (v @ b) * b
        norm = np.linalg.norm(v)
        if norm < PIVOT_TOL:
            raise RankDeficient("rows are numerically rank deficient")
        basis.append(v / norm)
    return Subspace(n, np.array(basis))


@dataclass(frozen=True)
class VPolytope:
    """Convex hull of a finite vertex list (redundant points are allowed)."""

    dim: int
    vertices: np.ndarray  # shape (m, dim)

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.shape[0] < 1 or v.shape[1] != self.dim:
            raise DimensionMismatch(
                f"vertex array shape {v.shape} invalid for dimension {self.dim}"
            )
        object.__setattr__(self, "vertices", _freeze(dedup_points(v)))

    def support(self, x: np.ndarray) -> np.ndarray:
        """max_v <x, v>, vectorized over rows of x."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise DimensionMismatch(f"direction has length {x.shape[-1]}, body dim {self.dim}")
        return (x @ self.vertices.T).max(axis=-1)

    def scale(self, t: float) -> "VPolytope":
        return VPolytope(self.dim, t * self.vertices)


@dataclass(frozen=True)
class HPolytope:
    """Intersection of halfspaces {x : <normal_i, x> <= offset_i}."""

    dim: int
    normals: np.ndarray  # shape (m, dim)
    offsets: np.ndarray  # shape (m,)

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.normals, dtype=float))
        b = np.atleast_1d(np.asarray(self.offsets, dtype=float))
        if a.shape[0] != b.shape[0] or a.shape[0] < 1 or a.shape[1] != self.dim:
            raise DimensionMismatch(
                f"normals {a.shape} / offsets {b.shape} invalid for dimension {self.dim}"
            )
        if (np.linalg.norm(a, axis=1) == 0).any():
            raise DimensionMismatch("zero normal row")
        object.__setattr__(self, "normals", _freeze(a))
        object.__setattr__(self, "offsets", _freeze(b))

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """Vectorized membership test over rows of x."""
        x = np.asarray(x, dtype=float)
        return ((x @ self.normals.T) <= self.offsets + tol).all(axis=-1)

    def gauge(self, x: np.ndarray) -> np.ndarray:
        """Minkowski functional max_i <a_i, x> / b_i; needs all offsets > 0."""
        if (self.offsets <= 0).any():
            raise OriginNotInterior("gauge needs strictly positive offsets")
        x = np.asarray(x, dtype=float)
        vals = (x @ self.normals.T) / self.offsets
        return np.maximum(vals.max(axis=-1), 0.0)

    def scale(self, t: float) -> "HPolytope":
        if t <= 0:
            raise ValueError("scale must be positive")
        return HPolytope(self.dim, self.normals, t * self.offsets)


def dedup_points(pts: np.ndarray, tol: float = DEDUP_TOL) -> np.ndarray:
    """Drop points within tol of an earlier point (stable order).

    Quadratic scan; point counts stay small everywhere in this package.
    """
    kept: list[np.ndarray] = []
    for p in pts:
        if all(np.linalg.norm(p - q) > tol for q in kept):
            kept.append(p)
    return np.array(kept)


def support_v(body: VPolytope, x) -> float:
    """Support function of a V-polytope: max over vertices of <x, v>."""
    return float(body.support(np.asarray(x, dtype=float)))


def support_h(body: HPolytope, x) -> float:
    """Support function of an H-polytope by linear programming."""
    x = np.asarray(x, dtype=float)
    if x.shape != (body.dim,):
        raise DimensionMismatch(f"direction shape {x.shape}, body dim {body.dim}")
    res = linprog(
        c=-x,
        A_ub=body.normals,
        b_ub=body.offsets,
        bounds=(None, None),
        method="highs",
    )
    if res.status == 3:
        raise Unbounded("support LP unbounded in this direction")
    if res.status == 2:
        raise Infeasible("halfspace system is empty")
    if res.status != 0:
        raise Infeasible(f"support LP failed with status {res.status}")
    return float(-res.fun)


def minkowski_v(body: VPolytope, x) -> float:
    """Gauge of a V-polytope: min{t > 0 : x in t*conv(vertices)}.

    Solved as min sum(lam) subject to V^T lam = x, lam >= 0; requires the
    origin in the interior for finiteness in every direction.
    """
    x = np.asarray(x, dtype=float)
    m = body.vertices.shape[0]
    res = linprog(
        c=np.ones(m),
        A_eq=body.vertices.T,
        b_eq=x,
        bounds=(0, None),
        method="highs",
    )
    if res.status != 0:
        raise Infeasible("gauge LP infeasible: point not in the hull's cone")
    return float(res.fun)


def project_polytope(body: VPolytope, H: Subspace, reduce: bool = False) -> VPolytope:
    """Orthogonal projection onto H, returned in H's basis coordinates.

    By default this is the projected vertex cloud with duplicates merged;
    interior points may remain since all downstream consumers (support
    evaluation, mean width) are hull-insensitive.  ``reduce=True`` keeps
    extreme points only.
    """
    if body.dim != H.ambient_dim:
        raise DimensionMismatch(f"body dim {body.dim} != ambient {H.ambient_dim}")
    cloud = VPolytope(H.dim, body.vertices @ H.basis.T)
    return VPolytope(H.dim, extreme_points(cloud)) if reduce else cloud


def section_polytope(body: HPolytope, H: Subspace) -> HPolytope | None:
    """Intersection with the subspace H, in H's basis coordinates.

    Constraint rows whose normal is orthogonal to H degenerate: they are
    dropped when satisfied at the origin (offset >= 0) and make the section
    empty otherwise, in which case None is returned.
    """
    if body.dim != H.ambient_dim:
        raise DimensionMismatch(f"body dim {body.dim} != ambient {H.ambient_dim}")
    a = body.normals @ H.basis.T
    norms = np.linalg.norm(a, axis=1)
    degenerate = norms < 1e-12
    if (body.offsets[degenerate] < 0).any():
        return None
    keep = ~degenerate
    if not keep.any():
        # section is all of H, an unbounded "polytope"; callers here always
        # section bounded bodies, so treat this as a contract violation
        raise Unbounded("section has no active constraints")
    return HPolytope(H.dim, a[keep], body.offsets[keep])


def polar_v(body: VPolytope, verify_interior: bool = True) -> HPolytope:
    """Polar body {x : <x, v> <= 1 for all vertices v}, as an H-polytope."""
    polar = HPolytope(body.dim, body.vertices, np.ones(body.vertices.shape[0]))
    if verify_interior:
        # the polar of a body with interior origin is bounded: finite support
        # along +-e_i certifies it
        for i in range(body.dim):
            e = np.zeros(body.dim)
            for sign in (1.0, -1.0):
                e[i] = sign
                try:
                    support_h(polar, e)
                except Unbounded:
                    raise OriginNotInterior(
                        "origin is not interior to the hull; polar is unbounded"
                    ) from None
            e[i] = 0.0
    return polar


def extreme_points(body: VPolytope, tol: float = 1e-9) -> np.ndarray:
    """Extreme points of conv(vertices).

    Dimension 1 reads off min/max; otherwise each stored vertex is tested by
    a small feasibility LP (is it a convex combination of the others?), which
    works in any dimension at the sizes used here.
    """
    pts = body.vertices
    if body.dim == 1:
        return np.unique([pts.min(), pts.max()]).reshape(-1, 1)
    m = pts.shape[0]
    if m == 1:
        return pts.copy()
    keep = []
    for i in range(m):
        others = np.delete(pts, i, axis=0)
        res = linprog(
            c=np.zeros(m - 1),
            A_eq=np.vstack([others.T, np.ones(m - 1)]),
            b_eq=np.append(pts[i], 1.0),
            bounds=(0, None),
            method="highs",
        )
        feasible = res.status == 0 and np.linalg.norm(
            others.T @ res.x - pts[i]
        ) <= tol and abs(res.x.sum() - 1.0) <= tol
        if not feasible:
            keep.append(i)
    return pts[keep]


def enumerate_vertices(body: HPolytope, interior_point=None) -> np.ndarray:
    """Vertices of a bounded H-polytope.

    Dimension 1 solves the two-sided interval directly; higher dimensions go
    through qhull's halfspace intersection, which needs a strictly interior
    point (defaults to the origin).
    """
    if body.dim == 1:
        a = body.normals[:, 0]
        b = body.offsets
        pos, neg = a > 0, a < 0
        if not pos.any() or not neg.any():
            raise Unbounded("1-D halfspace system is a ray")
        hi = (b[pos] / a[pos]).min()
        lo = (b[neg] / a[neg]).max()
        if lo > hi:
            raise Infeasible("empty interval")
        return np.array([[lo], [hi]])
    if interior_point is None:
        interior_point = np.zeros(body.dim)
    slack = body.offsets - body.normals @ interior_point
    if (slack <= 0).any():
        raise OriginNotInterior("interior point violates a constraint")
    halfspaces = np.column_stack([body.normals, -body.offsets])
    hs = HalfspaceIntersection(halfspaces, np.asarray(interior_point, dtype=float))
    return dedup_points(hs.intersections, tol=1e-9)


def hull_vertices_lowdim(pts: np.ndarray) -> np.ndarray:
    """Exact extreme points via qhull, a cross-check oracle for dim <= 3."""
    pts = np.atleast_2d(pts)
    d = pts.shape[1]
    if d == 1:
        return np.unique([pts.min(), pts.max()]).reshape(-1, 1)
    if d > 3:
        raise DimensionMismatch("qhull oracle is kept for dim <= 3 only")
    hull = ConvexHull(pts)
    return pts[np.sort(hull.vertices)]
