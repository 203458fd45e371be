"""Free-space Green's functions of the Laplacian with point traces.

Supplies the closed-form kernels in dimensions 1, 2, 3:

    g0   fundamental solution of -Lap           (zero-energy kernel)
    gz   fundamental solution of -Lap + z       (decaying for z off (-inf, 0])

with the principal square root (Re sqrt(z) > 0); the negative real axis
is the essential spectrum and is excluded.  The renormalized trace
matrix of a point set has off-diagonal entries ``(g0 - gz)(distance)``
and the finite diagonal limit ``lim_{r->0} (g0 - gz)(r)``, which removes
the kernel singularity once and for all at the zero-energy anchor (no
arbitrary spectral shift enters).

Dimension 2 uses the in-package K0 evaluation, which also accepts the
complex arguments arising for z off the positive real axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .bessel import k0_right_half_plane
from .errors import (
    BranchCut,
    EvaluationAtSingularity,
    GridTooCoarse,
    InvariantError,
    NonpositiveRadius,
    UnsupportedAction,
)
from .krein import GammaEvaluator

EULER_GAMMA = float(np.euler_gamma)


def off_branch_cut(z: complex) -> bool:
    z = complex(z)
    return not (z.imag == 0.0 and z.real <= 0.0)


def _sqrt_principal(z: complex) -> complex:
    if not off_branch_cut(z):
        raise BranchCut(f"z={z!r} lies on the branch cut (-inf, 0]")
    return complex(np.sqrt(complex(z)))


@dataclass(frozen=True)
class LaplacianKernel:
    """Closed-form kernel family for one spatial dimension (1, 2 or 3)."""

    dim: int

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise InvariantError(f"dim must be 1, 2, or 3, got {self.dim!r}")

    @property
    def sphere_area(self) -> float:
        """Measure of the unit sphere: 2, 2*pi, 4*pi."""
        return {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}[self.dim]

    def g0(self, r: float) -> float:
        r = float(r)
        if not r > 0.0 or math.isnan(r):
            raise NonpositiveRadius(f"g0 requires r > 0, got {r!r}")
        if self.dim == 1:
            return -r / 2.0
        if self.dim == 2:
            return -math.log(r) / (2.0 * math.pi)
        return 1.0 / (self.sphere_area * r)

    def gz(self, r: float, z: complex) -> complex:
        kappa = _sqrt_principal(z)
        r = float(r)
        if self.dim == 1:
            if r < 0.0 or math.isnan(r):
                raise NonpositiveRadius(f"gz requires r >= 0 in dim 1, got {r!r}")
            return np.exp(-kappa * r) / (2.0 * kappa)
        if not r > 0.0 or math.isnan(r):
            raise NonpositiveRadius(f"gz requires r > 0 in dim {self.dim}, got {r!r}")
        if self.dim == 2:
            return k0_right_half_plane(kappa * r) / (2.0 * math.pi)
        return np.exp(-kappa * r) / (4.0 * math.pi * r)

    def renormalized_diagonal(self, z: complex) -> complex:
        """lim_{r -> 0} (g0 - gz)(r); finite in every dimension."""
        kappa = _sqrt_principal(z)
        if self.dim == 1:
            return -1.0 / (2.0 * kappa)
        if self.dim == 2:
            return (np.log(kappa / 2.0) + EULER_GAMMA) / (2.0 * math.pi)
        return kappa / (4.0 * math.pi)


def g0(dim: int, r: float) -> float:
    return LaplacianKernel(dim).g0(r)


def gz(dim: int, r: float, z: complex) -> complex:
    return LaplacianKernel(dim).gz(r, z)


def renormalized_diagonal(dim: int, z: complex) -> complex:
    return LaplacianKernel(dim).renormalized_diagonal(z)


class PointSet:
    """Finitely many pairwise-distinct interaction points in dim 1, 2 or 3.

    One-dimensional points may be given as plain floats.
    """

    __slots__ = ("dim", "points")

    def __init__(self, dim: int, points):
        if dim not in (1, 2, 3):
            raise InvariantError(f"dim must be 1, 2, or 3, got {dim!r}")
        pts = np.array(points, dtype=float)
        if pts.ndim == 1:
            if dim != 1:
                raise InvariantError(
                    f"flat coordinate list requires dim=1, got dim={dim}"
                )
            pts = pts.reshape(-1, 1)
        problems = []
        if pts.ndim != 2 or pts.shape[1] != dim:
            problems.append(
                f"points must have shape (N, {dim}), got {pts.shape}"
            )
        elif pts.shape[0] < 1:
            problems.append("need at least one point")
        elif not np.all(np.isfinite(pts)):
            problems.append("point coordinates must be finite")
        else:
            d = pts[:, None, :] - pts[None, :, :]
            dist = np.sqrt((d * d).sum(-1))
            np.fill_diagonal(dist, np.inf)
            if pts.shape[0] > 1 and float(dist.min()) <= 0.0:
                problems.append("coincident points are not allowed")
        if problems:
            raise InvariantError(problems)
        pts.flags.writeable = False
        self.dim = dim
        self.points = pts

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    def distance_matrix(self) -> np.ndarray:
        d = self.points[:, None, :] - self.points[None, :, :]
        return np.sqrt((d * d).sum(-1))

    def displacements_1d(self) -> np.ndarray:
        """Signed pairwise displacements y_j - y_k (dim 1 only)."""
        if self.dim != 1:
            raise InvariantError("signed displacements only exist in dim 1")
        y = self.points[:, 0]
        return y[:, None] - y[None, :]

    def __repr__(self):
        return f"PointSet(dim={self.dim}, n={self.n_points})"


def gamma_matrix(ps: PointSet, z: complex) -> np.ndarray:
    """Renormalized trace matrix of the point set at z.

    Entry (j, k) is ``(g0 - gz)(|y_j - y_k|)`` for j != k; the diagonal
    carries the renormalized limit.  Hermitian for real z > 0.
    """
    kernel = LaplacianKernel(ps.dim)
    n = ps.n_points
    out = np.full((n, n), kernel.renormalized_diagonal(z), dtype=complex)
    dist = ps.distance_matrix()
    for j in range(n):
        for k in range(n):
            if j != k:
                r = dist[j, k]
                out[j, k] = kernel.g0(r) - kernel.gz(r, z)
    return out


def _uniform_step(xs: np.ndarray) -> float:
    steps = np.diff(xs)
    h = float(steps[0])
    if h <= 0.0 or np.max(np.abs(steps - h)) > 1e-9 * abs(h):
        raise InvariantError("grid must be uniform and increasing")
    return h


def gbreve_apply_1d(ps: PointSet, z: complex, xs, fs) -> np.ndarray:
    """Traces of the resolvent image of grid samples, dim 1.

    Trapezoid quadrature of ``integral gz(|y_j - x|) f(x) dx`` on the
    uniform grid ``xs`` (which must cover the support of ``f``); accuracy
    is O(h^2).  Raises GridTooCoarse when the step exceeds a quarter of
    the kernel decay length 1 / Re sqrt(z).
    """
    if ps.dim != 1:
        raise InvariantError("gbreve_apply_1d requires a dim-1 point set")
    xs = np.asarray(xs, dtype=float)
    fs = np.asarray(fs, dtype=complex)
    if xs.ndim != 1 or xs.shape != fs.shape or xs.size < 2:
        raise InvariantError("xs and fs must be equal-length 1-d arrays")
    h = _uniform_step(xs)
    kappa = _sqrt_principal(z)
    if h > 1.0 / (4.0 * kappa.real):
        raise GridTooCoarse(
            f"step {h:.3e} exceeds 1/(4 Re sqrt(z)) = {1.0 / (4.0 * kappa.real):.3e}"
        )
    w = np.full(xs.size, h)
    w[0] = w[-1] = h / 2.0
    r = np.abs(ps.points[:, 0][:, None] - xs[None, :])
    kernel = np.exp(-kappa * r) / (2.0 * kappa)
    return kernel @ (w * fs)


def point_source_sum(ps: PointSet, z: complex, coeffs, xs) -> np.ndarray:
    """Superposition ``sum_j coeffs_j gz(|x - y_j|)`` at the points ``xs``.

    Linear in ``coeffs`` (callers that hold charge vectors in the
    conjugate-linear convention conjugate them first).  In dims 2 and 3,
    evaluation at an interaction point raises EvaluationAtSingularity.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape != (ps.n_points,):
        raise InvariantError(
            f"expected {ps.n_points} coefficients, got shape {coeffs.shape}"
        )
    xs = np.array(xs, dtype=float)
    scalar = xs.ndim == 0 if ps.dim == 1 else xs.ndim == 1
    pts = np.atleast_2d(xs.reshape(-1, ps.dim) if ps.dim > 1 else xs.reshape(-1, 1))
    d = pts[:, None, :] - ps.points[None, :, :]
    r = np.sqrt((d * d).sum(-1))
    kappa = _sqrt_principal(z)
    if ps.dim == 1:
        kernel = np.exp(-kappa * r) / (2.0 * kappa)
    else:
        if np.any(r == 0.0):
            raise EvaluationAtSingularity(
                "evaluation point coincides with an interaction point"
            )
        if ps.dim == 2:
            kernel = np.vectorize(k0_right_half_plane)(kappa * r) / (2.0 * math.pi)
        else:
            kernel = np.exp(-kappa * r) / (4.0 * math.pi * r)
    out = kernel @ coeffs
    return complex(out[0]) if scalar else out


def _quad_complex(f, a, b, **kw):
    re, re_err = quad(lambda t: f(t).real, a, b, **kw)
    im, im_err = quad(lambda t: f(t).imag, a, b, **kw)
    return complex(re, im), re_err + im_err


def gbreve_g_radial_3d(ps: PointSet, w: complex, z: complex) -> np.ndarray:
    """Product matrix in dim 3 by radial quadrature (independent of the
    closed-form difference identity it is used to test).

    Entry (k, j) is the two-center integral of ``gz(.; w)`` about y_k
    against ``gz(.; z)`` about y_j; the angular integral is done
    analytically, leaving one radial integral per distinct distance.
    """
    if ps.dim != 3:
        raise InvariantError("radial product matrix requires dim 3")
    kw_ = _sqrt_principal(w)
    kz = _sqrt_principal(z)
    dist = ps.distance_matrix()
    out = np.zeros((ps.n_points, ps.n_points), dtype=complex)
    cache: dict[float, complex] = {}
    for k in range(ps.n_points):
        for j in range(ps.n_points):
            d = float(dist[k, j])
            if d not in cache:
                if d == 0.0:
                    val, _ = _quad_complex(
                        lambda r: np.exp(-(kw_ + kz) * r) / (4.0 * math.pi),
                        0.0,
                        np.inf,
                    )
                else:
                    # the |r - d| kink splits the radial integral at r = d
                    def integrand(r):
                        return np.exp(-kw_ * r) * (
                            np.exp(-kz * abs(r - d)) - np.exp(-kz * (r + d))
                        )

                    inner, _ = _quad_complex(integrand, 0.0, d)
                    outer, _ = _quad_complex(integrand, d, np.inf)
                    val = (inner + outer) / (8.0 * math.pi * d * kz)
                cache[d] = val
            out[k, j] = cache[d]
    return out


def quadrature_grid_1d(ps: PointSet, w: complex, z: complex, *, step=2.5e-4, pad=None):
    """Uniform grid wide enough for trace/source quadrature at w and z.

    Interaction points land on grid nodes so the kernel kinks sit at
    nodes and the trapezoid rule keeps its O(h^2) behavior.
    """
    decay = min(_sqrt_principal(w).real, _sqrt_principal(z).real)
    if pad is None:
        pad = 45.0 / decay
    y = ps.points[:, 0]
    lo = float(y.min()) - pad
    n_left = int(math.ceil((y.min() - lo) / step))
    lo = float(y.min()) - n_left * step
    hi = float(y.max()) + pad
    n_total = int(math.ceil((hi - lo) / step)) + 1
    return lo + step * np.arange(n_total)


def gbreve_g_quadrature_1d(
    ps: PointSet, w: complex, z: complex, *, step=2.5e-4, pad=None
) -> np.ndarray:
    """Product matrix in dim 1 via the grid-native trace action.

    Column j is the trace vector (at w) of the sampled source function
    of unit charge j (at z), so the result is built purely from
    quadrature actions on test functions.
    """
    if ps.dim != 1:
        raise InvariantError("grid product matrix requires dim 1")
    xs = quadrature_grid_1d(ps, w, z, step=step, pad=pad)
    n = ps.n_points
    out = np.zeros((n, n), dtype=complex)
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        column_samples = point_source_sum(ps, z, e, xs)
        out[:, j] = gbreve_apply_1d(ps, w, xs, column_samples)
    return out


class LaplacianPointEvaluator(GammaEvaluator):
    """Pencil backend for point interactions of the Laplacian.

    Supplies the renormalized trace matrix in dims 1, 2, 3, source
    superposition as a callable, and the product matrix by quadrature in
    dims 1 and 3.  Arbitrary-input resolvent and trace actions need a
    grid; see LaplacianGrid1DEvaluator.
    """

    def __init__(self, ps: PointSet):
        self.ps = ps

    @property
    def n_charges(self) -> int:
        return self.ps.n_points

    def in_resolvent_set(self, z: complex) -> bool:
        return off_branch_cut(z)

    def interval_in_resolvent_set(self, a: float, b: float) -> bool:
        return a <= b and a > 0.0

    def gamma(self, z: complex) -> np.ndarray:
        return gamma_matrix(self.ps, z)

    def g_apply(self, z: complex, ell):
        ell = np.asarray(ell, dtype=complex)
        return lambda xs: point_source_sum(self.ps, z, ell, xs)

    def gbreve_g(self, w: complex, z: complex) -> np.ndarray:
        if self.ps.dim == 3:
            return gbreve_g_radial_3d(self.ps, w, z)
        if self.ps.dim == 1:
            return gbreve_g_quadrature_1d(self.ps, w, z)
        raise UnsupportedAction("no product-matrix quadrature in dim 2")


class LaplacianGrid1DEvaluator(LaplacianPointEvaluator):
    """Dim-1 point backend with a fixed sample grid for function actions.

    Functions are represented by their samples on the grid; the base
    resolvent action is trapezoid convolution with the decaying kernel,
    so all actions (and hence the assembled perturbed resolvent) carry
    O(h^2) quadrature error.
    """

    def __init__(self, ps: PointSet, xs):
        super().__init__(ps)
        xs = np.asarray(xs, dtype=float)
        _uniform_step(xs)
        self.xs = xs

    def r_apply(self, z: complex, f):
        f = np.asarray(f, dtype=complex)
        if f.shape != self.xs.shape:
            raise InvariantError("sample vector does not match the grid")
        xs = self.xs
        h = float(xs[1] - xs[0])
        kappa = _sqrt_principal(z)
        if h > 1.0 / (4.0 * kappa.real):
            raise GridTooCoarse(
                f"step {h:.3e} exceeds 1/(4 Re sqrt(z)) "
                f"= {1.0 / (4.0 * kappa.real):.3e}"
            )
        w = np.full(xs.size, h)
        w[0] = w[-1] = h / 2.0
        r = np.abs(xs[:, None] - xs[None, :])
        return (np.exp(-kappa * r) / (2.0 * kappa)) @ (w * f)

    def gbreve_apply(self, z: complex, f):
        return gbreve_apply_1d(self.ps, z, self.xs, f)

    def g_apply(self, z: complex, ell):
        return point_source_sum(self.ps, z, np.asarray(ell, dtype=complex), self.xs)
