"""Gaussian-integral mean widths and related estimators.

The mean width of a convex body K in R^k satisfies

    W(K) = (1/c_k) * E[ h_K(g) ],      g standard Gaussian,

with c_k = Gamma((k+1)/2) / (sqrt(2) * Gamma(k/2)); the value of c_k is
pinned by W of the unit ball being 2, i.e. 2*c_k = E||g||.  The same measure
gives the complement formula

    W(K) = (1/c_k) * Integral_0^inf [1 - gamma_k(t K°)] dt

and the Gaussian norm average ell(K) = E[ ||g||_K ] = c_k * W(K°).

Monte Carlo estimators here are bit-reproducible functions of
(seed, samples): points come from counter-based per-sample substreams
(see rng.py), chunking never changes a value, and reductions run over the
full sample vector in index order.
"""

import warnings
from dataclasses import dataclass
from functools import lru_cache
from math import gamma, lgamma, pi, sqrt

import numpy as np
from scipy.integrate import quad
from scipy.special import ndtr

from .errors import NonFinite, TruncationWarning
from .measures import simplex_vertices
from .rng import gaussian_samples, shared_gaussian_samples

QUAD_TAIL = 12.0      # Phi tails are below 1e-33 past 12 sigma
QUAD_ABS_TOL = 1e-12
_CACHE_POINT_LIMIT = 2_000_000  # floats; larger clouds are generated in chunks

REFERENCE_KINDS = ("ball", "cube", "cross", "simplex", "polar_simplex")


def c_const(k: int) -> float:
    """The Gaussian mean-width constant c_k = Gamma((k+1)/2)/(sqrt(2) Gamma(k/2))."""
    if k < 1:
        raise ValueError("dimension must be >= 1")
    return np.exp(lgamma((k + 1) / 2.0) - lgamma(k / 2.0)) / sqrt(2.0)


def ball_volume(n: int) -> float:
    return pi ** (n / 2.0) / gamma(n / 2.0 + 1.0)


@dataclass(frozen=True)
class GaussianConstants:
    n: int
    c_n: float
    omega_n: float


def gaussian_constants(n: int) -> GaussianConstants:
    return GaussianConstants(n, c_const(n), ball_volume(n))


@dataclass(frozen=True)
class MCConfig:
    samples: int = 200_000
    seed: int = 0
    batch: int = 65_536

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.batch < 1:
            raise ValueError("batch must be >= 1")


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    samples: int

    def within(self, target: float, nsigma: float = 3.0) -> bool:
        return abs(self.value - target) <= nsigma * self.stderr

    def agrees(self, other: "Estimate", nsigma: float = 3.0) -> bool:
        combined = sqrt(self.stderr**2 + other.stderr**2)
        return abs(self.value - other.value) <= nsigma * combined


def _sample_stats(values: np.ndarray) -> tuple[float, float]:
    if not np.isfinite(values).all():
        raise NonFinite("oracle returned a non-finite value")
    mean = float(values.mean())
    if values.size < 2:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / sqrt(values.size))


def _evaluate_cloud(fn, dim: int, cfg: MCConfig) -> np.ndarray:
    """fn over the (seed, dim) point cloud, in batches of cfg.batch samples.

    Counter-based draws and per-sample oracles make the values independent of
    the chunk layout; small clouds are drawn once through a shared cache and
    sliced, which also bounds the oracle's transient memory.
    """
    n = cfg.samples
    cached = shared_gaussian_samples(cfg.seed, dim, n) if n * dim <= _CACHE_POINT_LIMIT else None
    out = np.empty(n)
    for lo in range(0, n, cfg.batch):
        hi = min(lo + cfg.batch, n)
        x = cached[lo:hi] if cached is not None else gaussian_samples(cfg.seed, dim, lo, hi - lo)
        out[lo:hi] = fn(x)
    return out


def mean_width_mc(support, dim: int, cfg: MCConfig) -> Estimate:
    """Monte Carlo mean width from a vectorized support-function oracle.

    ``support`` maps an (N, dim) array of directions to N support values and
    must be positively homogeneous and finite.
    """
    values = _evaluate_cloud(support, dim, cfg)
    mean, err = _sample_stats(values)
    c = c_const(dim)
    return Estimate(mean / c, err / c, cfg.samples)


def ell_norm(gauge, dim: int, cfg: MCConfig) -> Estimate:
    """Gaussian average of a Minkowski-functional oracle: E[ ||g||_K ]."""
    values = _evaluate_cloud(gauge, dim, cfg)
    mean, err = _sample_stats(values)
    return Estimate(mean, err, cfg.samples)


def gaussian_mass(membership, dim: int, t: float, cfg: MCConfig) -> Estimate:
    """Monte Carlo estimate of gamma_dim(t * body) from a membership oracle.

    ``membership`` maps an (N, dim) array to booleans deciding x in body
    (the unscaled body); scaling is applied to the sample points.
    """
    if t < 0:
        raise ValueError("scale must be >= 0")
    if t == 0.0:
        return Estimate(0.0, 0.0, cfg.samples)
    values = _evaluate_cloud(lambda x: np.asarray(membership(x / t), dtype=float), dim, cfg)
    mean, err = _sample_stats(values)
    return Estimate(mean, err, cfg.samples)


def mean_width_complement(
    polar_membership,
    dim: int,
    cfg: MCConfig,
    r_max: float,
    r_steps: int = 256,
) -> Estimate:
    """Mean width through the complement formula.

    Trapezoid rule for (1/c_k) * Integral_0^rmax [1 - gamma_k(t K°)] dt with
    the Gaussian mass at every node estimated from one shared point cloud
    (identical to calling gaussian_mass per node with the same seed).  The
    standard error accounts for the correlation between nodes by reducing
    the quadrature per sample before averaging.
    """
    if r_steps < 2:
        raise ValueError("need at least 2 trapezoid nodes")
    nodes = np.linspace(0.0, r_max, r_steps)
    h = nodes[1] - nodes[0]
    weights = np.full(r_steps, h)
    weights[0] = weights[-1] = h / 2.0

    def per_sample(x: np.ndarray) -> np.ndarray:
        # node 0 contributes weights[0] * (1 - gamma(0*K°)) = weights[0] exactly
        acc = np.full(x.shape[0], weights[0])
        for t, w in zip(nodes[1:], weights[1:]):
            acc += w * (1.0 - np.asarray(polar_membership(x / t), dtype=float))
        return acc

    values = _evaluate_cloud(per_sample, dim, cfg)
    # tail check: the integrand at the last node should be negligible
    last_inside = _evaluate_cloud(
        lambda x: np.asarray(polar_membership(x / nodes[-1]), dtype=float), dim, cfg
    )
    tail = 1.0 - float(last_inside.mean())
    if tail > 1e-4:
        warnings.warn(
            f"integrand at r_max={r_max} is {tail:.2e} > 1e-4; increase r_max",
            TruncationWarning,
        )
    mean, err = _sample_stats(values)
    c = c_const(dim)
    return Estimate(mean / c, err / c, cfg.samples)


# ---------------------------------------------------------------------------
# reference bodies with exact mean widths


@dataclass(frozen=True)
class ReferenceBody:
    """The extremizer bodies: unit ball, cube [-1,1]^k, cross-polytope,
    regular simplex inscribed in the unit sphere, and its polar."""

    kind: str
    k: int

    def __post_init__(self):
        if self.kind not in REFERENCE_KINDS:
            raise ValueError(f"unknown reference body kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("dimension must be >= 1")

    @property
    def dim(self) -> int:
        return self.k

    def support(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "ball":
            return np.linalg.norm(x, axis=-1)
        if self.kind == "cube":
            return np.abs(x).sum(axis=-1)
        if self.kind == "cross":
            return np.abs(x).max(axis=-1)
        if self.kind == "simplex":
            return (x @ simplex_vertices(self.k).T).max(axis=-1)
        return (x @ (-self.k * simplex_vertices(self.k)).T).max(axis=-1)

    def gauge(self, x: np.ndarray) -> np.ndarray:
        return self.polar().support(x)

    def polar(self) -> "ReferenceBody":
        dual = {
            "ball": "ball",
            "cube": "cross",
            "cross": "cube",
            "simplex": "polar_simplex",
            "polar_simplex": "simplex",
        }
        return ReferenceBody(dual[self.kind], self.k)

    def vertices(self) -> np.ndarray:
        if self.kind == "ball":
            raise ValueError("the ball has no vertex representation")
        if self.kind == "cube":
            corners = np.array(
                np.meshgrid(*([[-1.0, 1.0]] * self.k), indexing="ij")
            ).reshape(self.k, -1).T
            return corners
        if self.kind == "cross":
            eye = np.eye(self.k)
            return np.vstack([eye, -eye])
        if self.kind == "simplex":
            return simplex_vertices(self.k)
        return -self.k * simplex_vertices(self.k)

    def mean_width(self) -> float:
        return mean_width_reference(self)


@lru_cache(maxsize=None)
def _mean_width_reference(kind: str, k: int) -> float:
    c = c_const(k)
    if kind == "ball":
        return 2.0
    if kind == "cube":
        # E||g||_1 = k * E|g_1| = k * sqrt(2/pi)
        return 2.0 * k * np.exp(lgamma(k / 2.0) - lgamma((k + 1) / 2.0)) / sqrt(pi)
    if kind == "cross":
        # E||g||_inf via the tail integral of the max of |g_i|
        val, _ = quad(
            lambda t: 1.0 - (2.0 * ndtr(t) - 1.0) ** k,
            0.0,
            QUAD_TAIL,
            epsabs=QUAD_ABS_TOL,
            limit=200,
        )
        return val / c
    if kind == "simplex":
        # support values at the k+1 vertices are exchangeable unit-variance
        # Gaussians with pairwise covariance -1/k; their max is
        # sqrt((k+1)/k) * (max of k+1 iid normals minus their mean)
        m = k + 1
        emax, _ = quad(
            lambda t: t * m * np.exp(-t * t / 2.0) / sqrt(2.0 * pi) * ndtr(t) ** (m - 1),
            -QUAD_TAIL,
            QUAD_TAIL,
            epsabs=QUAD_ABS_TOL,
            limit=200,
        )
        return sqrt(m / k) * emax / c
    if kind == "polar_simplex":
        # the polar of the inscribed regular simplex is its reflected k-dilate
        return k * _mean_width_reference("simplex", k)
    raise ValueError(f"unknown reference body kind {kind!r}")


def mean_width_reference(body: ReferenceBody) -> float:
    """Exact mean width of a reference body (quadrature where needed)."""
    return _mean_width_reference(body.kind, body.k)
