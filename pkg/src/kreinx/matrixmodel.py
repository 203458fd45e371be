"""Exact finite-dimensional model: the ground-truth oracle backend.

Everything here is dense linear algebra on a hermitian injective matrix
``a`` (n x n) and a surjective trace matrix ``tau`` (N x n).  The same
construction that the other backends realize with Green's functions is
available twice over:

* through the pencil machinery (``MatrixEvaluator`` + ``krein_apply``),
  built from ``gamma(z) = tau (R(0) - R(z)) tau^H`` with
  ``R(z) = (z I - a)^{-1}``;
* as the directly assembled hermitian matrix
  ``b = a + tau^H (theta + tau R(0) tau^H)^{-1} tau``
  whose ordinary resolvent ``(z I - b)^{-1}`` must agree with the first
  route wherever both are defined (a low-rank-update identity).

Disagreement between the two routes is a bug by definition, which is
what makes this backend the oracle.

Note on scope: in finite dimension the trace map can never have the
"purely singular dual range" property the unbounded theory assumes, so
the formulas are exercised here as exact algebraic identities rather
than as statements about unbounded extensions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvariantError, OracleDegenerate, SpectrumHit
from .krein import GammaEvaluator

# Relative spectral-distance floor for resolvent evaluations.
SPECTRUM_RTOL = 1e-12
# Relative smallest-singular-value floor for the oracle anchor pencil.
DEGENERACY_RTOL = 1e-12


class MatrixModel:
    """Hermitian injective ``a`` with a full-row-rank trace matrix ``tau``.

    Construction symmetrizes ``a`` exactly after checking its hermiticity
    defect, verifies injectivity (no eigenvalue at 0 within tolerance)
    and surjectivity of ``tau`` (smallest singular value bounded away
    from zero), and records the trace-domination constant
    ``|tau a^{-1}|_2`` (finite automatically in finite dimension).
    """

    __slots__ = ("a", "tau", "eigs", "trace_bound_constant")

    def __init__(self, a, tau):
        a = np.array(a, dtype=complex)
        tau = np.atleast_2d(np.array(tau, dtype=complex))
        problems = []
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvariantError(f"base matrix must be square, got {a.shape}")
        n = a.shape[0]
        if tau.shape[1] != n:
            problems.append(
                f"trace matrix has {tau.shape[1]} columns, base matrix is {n}x{n}"
            )
        if tau.shape[0] > n:
            problems.append("trace matrix cannot have more rows than columns")
        scale = max(1.0, float(np.max(np.abs(a))))
        if float(np.max(np.abs(a - a.conj().T))) > 1e-12 * scale:
            problems.append("base matrix is not hermitian")
        if problems:
            raise InvariantError(problems)

        a = (a + a.conj().T) / 2.0
        eigs = np.linalg.eigvalsh(a)
        if np.min(np.abs(eigs)) <= SPECTRUM_RTOL * scale:
            raise InvariantError("base matrix must be injective (no eigenvalue at 0)")
        svals = np.linalg.svd(tau, compute_uv=False)
        if svals[-1] <= 1e-10 * svals[0]:
            raise InvariantError("trace matrix must have full row rank")

        a.flags.writeable = False
        tau.flags.writeable = False
        self.a = a
        self.tau = tau
        self.eigs = eigs
        self.trace_bound_constant = float(
            np.linalg.norm(tau @ np.linalg.inv(a), ord=2)
        )

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def n_charges(self) -> int:
        return self.tau.shape[0]

    def spectrum_distance(self, z: complex) -> float:
        return float(np.min(np.abs(complex(z) - self.eigs)))

    def __repr__(self):
        return f"MatrixModel(n={self.n}, N={self.n_charges})"


def _check_off_spectrum(model: MatrixModel, z: complex) -> None:
    scale = max(1.0, float(np.max(np.abs(model.eigs))))
    if model.spectrum_distance(z) <= SPECTRUM_RTOL * scale:
        raise SpectrumHit(f"z={z!r} hits the spectrum of the base matrix")


def base_resolvent(model: MatrixModel, z: complex) -> np.ndarray:
    """(z I - a)^{-1}."""
    _check_off_spectrum(model, z)
    return np.linalg.inv(complex(z) * np.eye(model.n) - model.a)


@dataclass(frozen=True)
class GMaps:
    """The three derived maps at a point z: trace-of-resolvent ``gbreve``
    (N x n), resolvent image ``g`` (n x N), and the zero-anchored
    difference ``k = z R(0) g = g at 0 minus g at z`` (n x N)."""

    gbreve: np.ndarray
    g: np.ndarray
    k: np.ndarray


def g_maps(model: MatrixModel, z: complex) -> GMaps:
    _check_off_spectrum(model, z)
    rz = base_resolvent(model, z)
    r0 = base_resolvent(model, 0.0)
    tau_h = model.tau.conj().T
    g = rz @ tau_h
    return GMaps(gbreve=model.tau @ rz, g=g, k=complex(z) * (r0 @ g))


def gamma(model: MatrixModel, z: complex) -> np.ndarray:
    """Renormalized trace matrix ``tau (R(0) - R(z)) tau^H``."""
    _check_off_spectrum(model, z)
    r0 = base_resolvent(model, 0.0)
    rz = base_resolvent(model, z)
    return model.tau @ (r0 - rz) @ model.tau.conj().T


def anchor_pencil(model: MatrixModel, theta) -> np.ndarray:
    """theta + tau R(0) tau^H, the pencil at the renormalization anchor."""
    entries = theta.entries if hasattr(theta, "entries") else np.asarray(theta)
    return entries + model.tau @ base_resolvent(model, 0.0) @ model.tau.conj().T


def woodbury_extension(model: MatrixModel, theta) -> np.ndarray:
    """Directly built perturbed matrix b = a + tau^H M^{-1} tau.

    M is the anchor pencil; its inverse feeds a rank-N hermitian update
    of the base matrix, and ``(z I - b)^{-1}`` reproduces the resolvent
    formula for every z off both spectra.  Raises OracleDegenerate when
    M is numerically singular (the perturbed operator still exists via
    the resolvent formula, just not in this additive form).
    """
    m = anchor_pencil(model, theta)
    svals = np.linalg.svd(m, compute_uv=False)
    if svals[-1] <= DEGENERACY_RTOL * max(svals[0], 1.0):
        raise OracleDegenerate("anchor pencil is singular; no additive form")
    b = model.a + model.tau.conj().T @ np.linalg.solve(m, model.tau)
    return (b + b.conj().T) / 2.0


def direct_eigs(model: MatrixModel, theta) -> np.ndarray:
    """All n eigenvalues of the directly built matrix, ascending."""
    return np.linalg.eigvalsh(woodbury_extension(model, theta))


class MatrixEvaluator(GammaEvaluator):
    """Pencil backend over a MatrixModel; all actions are exact."""

    def __init__(self, model: MatrixModel):
        self.model = model

    @property
    def n_charges(self) -> int:
        return self.model.n_charges

    def in_resolvent_set(self, z: complex) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.model.eigs))))
        return self.model.spectrum_distance(z) > SPECTRUM_RTOL * scale

    def interval_in_resolvent_set(self, a: float, b: float) -> bool:
        if not a <= b:
            return False
        scale = max(1.0, float(np.max(np.abs(self.model.eigs))))
        pad = SPECTRUM_RTOL * scale
        return not np.any(
            (self.model.eigs >= a - pad) & (self.model.eigs <= b + pad)
        )

    def gamma(self, z: complex) -> np.ndarray:
        return gamma(self.model, z)

    def r_apply(self, z: complex, f):
        return base_resolvent(self.model, z) @ np.asarray(f, dtype=complex)

    def gbreve_apply(self, z: complex, f):
        return self.model.tau @ self.r_apply(z, f)

    def g_apply(self, z: complex, ell):
        return base_resolvent(self.model, z) @ (
            self.model.tau.conj().T @ np.asarray(ell, dtype=complex)
        )

    def gbreve_g(self, w: complex, z: complex) -> np.ndarray:
        rw = base_resolvent(self.model, w)
        rz = base_resolvent(self.model, z)
        return self.model.tau @ rw @ rz @ self.model.tau.conj().T


# ----------------------------------------------------------------------
# Seeded random generation.  The recipe is fixed so that a 64-bit seed
# reproduces the model bit for bit: unitary from QR of a complex Gaussian
# matrix, spectrum with magnitudes uniform in [0.1, 10] and random signs
# (injective with bounded condition number), Gaussian trace matrix with a
# row-rank guard, hermitian coupling built as an exact symmetrization.
# ----------------------------------------------------------------------


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_model(
    seed_or_rng, n: int, n_charges: int, *, magnitude_range=(0.1, 10.0)
) -> MatrixModel:
    rng = np.random.default_rng(seed_or_rng) if not isinstance(
        seed_or_rng, np.random.Generator
    ) else seed_or_rng
    if not 1 <= n_charges <= n:
        raise InvariantError("need 1 <= n_charges <= n")
    q, r = np.linalg.qr(_complex_gaussian(rng, (n, n)))
    # fix the QR phase convention so the unitary is seed-determined
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    lo, hi = magnitude_range
    spectrum = rng.uniform(lo, hi, size=n) * rng.choice([-1.0, 1.0], size=n)
    a = (q * spectrum) @ q.conj().T
    a = (a + a.conj().T) / 2.0
    for _ in range(64):
        tau = _complex_gaussian(rng, (n_charges, n))
        svals = np.linalg.svd(tau, compute_uv=False)
        if svals[-1] > 0.05 * svals[0]:
            break
    return MatrixModel(a, tau)


def random_theta(seed_or_rng, n_charges: int, *, scale: float = 1.0):
    from .krein import ThetaMatrix

    rng = np.random.default_rng(seed_or_rng) if not isinstance(
        seed_or_rng, np.random.Generator
    ) else seed_or_rng
    m = scale * _complex_gaussian(rng, (n_charges, n_charges))
    return ThetaMatrix((m + m.conj().T) / 2.0)


def random_offaxis_z(rng: np.random.Generator, count: int, *, min_imag=0.1) -> np.ndarray:
    """z samples with |Im z| >= min_imag, safely off every real spectrum."""
    re = rng.uniform(-10.0, 10.0, size=count)
    im = rng.uniform(min_imag, 5.0, size=count) * rng.choice([-1.0, 1.0], size=count)
    return re + 1j * im


def random_problem_suite(seed: int, count: int, *, n_max=12, n_charges_max=4):
    """Deterministic stream of (model, theta, z-list) triples for checks.

    Couplings whose anchor pencil is nearly singular are redrawn (up to a
    bounded number of attempts) so the additive oracle route exists; a
    model is yielded with the last draw regardless, and downstream code
    that needs the oracle handles OracleDegenerate explicitly.
    """
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(2, n_max + 1))
        nc = int(rng.integers(1, min(n_charges_max, n) + 1))
        model = random_model(rng, n, nc)
        theta = random_theta(rng, nc)
        for _ in range(16):
            m = anchor_pencil(model, theta)
            svals = np.linalg.svd(m, compute_uv=False)
            if svals[-1] > 1e-6 * max(svals[0], 1.0):
                break
            theta = random_theta(rng, nc)
        zs = random_offaxis_z(rng, 20)
        yield model, theta, zs
