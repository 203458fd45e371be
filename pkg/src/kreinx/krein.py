"""Backend-independent machinery for rank-N self-adjoint perturbations.

A perturbation is described by two ingredients: a backend evaluator,
which knows the base operator's resolvent set and produces the
renormalized trace matrix ``gamma(z)`` (plus optional function-space
actions), and a hermitian N x N coupling matrix.  The perturbed
resolvent acts as

    base resolvent + (image map) (theta + gamma(z))^{-1} (trace map),

so every spectral question reduces to the N x N pencil
``theta + gamma(z)``: it is inverted off the spectrum, and its kernel at
a singular point carries the charge vector of the corresponding
eigenfunction.

All types are immutable after construction and all operations are pure
functions of their inputs; concurrent use is safe.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvariantError,
    NotHermitian,
    OutsideResolventSet,
    SingularPencil,
    UnsupportedAction,
)

# Tolerance for accepting a computed matrix as hermitian, relative to its
# max-entry norm.  Quadrature-backed gammas carry noise at this level.
HERMITICITY_RTOL = 1e-10

ADMISSIBLE_PLUS = "plus"
ADMISSIBLE_MINUS = "minus"
ADMISSIBLE_BOTH = "both"
ADMISSIBLE_NONE = "none"


def _maxabs(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def hermitian_part(m: np.ndarray, rtol: float = HERMITICITY_RTOL) -> np.ndarray:
    """Check ``m`` is hermitian within ``rtol`` and return (m + m^H)/2.

    Raises NotHermitian when the defect exceeds ``rtol * (1 + |m|)``.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {m.shape}")
    defect = _maxabs(m - m.conj().T)
    if defect > rtol * (1.0 + _maxabs(m)):
        raise NotHermitian(
            f"hermiticity defect {defect:.3e} exceeds {rtol:.1e} * (1 + |m|)"
        )
    return (m + m.conj().T) / 2.0


class ThetaMatrix:
    """Hermitian N x N coupling matrix.

    Construction demands exact hermiticity (entries must equal their
    conjugate transpose bit for bit); build inputs as (m + m^H)/2 if
    needed, which is exact in IEEE arithmetic.
    """

    __slots__ = ("entries",)

    def __init__(self, entries):
        m = np.array(entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise InvariantError(
                f"coupling matrix must be square and nonempty, got shape {m.shape}"
            )
        if not np.array_equal(m, m.conj().T):
            raise NotHermitian("coupling matrix must be exactly hermitian")
        if not np.all(np.isfinite(m.view(float))):
            raise InvariantError("coupling matrix entries must be finite")
        m.flags.writeable = False
        self.entries = m

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def shifted(self, c: float) -> "ThetaMatrix":
        """Theta + c * I (hermitian for real c)."""
        return ThetaMatrix(self.entries + float(c) * np.eye(self.n))

    def __repr__(self):
        return f"ThetaMatrix(n={self.n})"


class GammaEvaluator(ABC):
    """Backend contract consumed by the pencil machinery.

    Required: the resolvent-set predicate and the renormalized trace
    matrix ``gamma(z)``.  Function-space actions (base resolvent, trace
    of the resolvent image, source superposition, and the trace/image
    product matrix) are optional; backends that cannot integrate
    arbitrary inputs raise UnsupportedAction.
    """

    @property
    @abstractmethod
    def n_charges(self) -> int:
        """Dimension N of the charge space."""

    @abstractmethod
    def in_resolvent_set(self, z: complex) -> bool:
        """Whether z is admissible for gamma and the resolvent actions."""

    @abstractmethod
    def gamma(self, z: complex) -> np.ndarray:
        """Renormalized trace matrix at z, complex N x N."""

    def interval_in_resolvent_set(self, a: float, b: float) -> bool:
        """Whether the real interval [a, b] avoids the base spectrum.

        Default: sample-based; backends override with exact logic.
        """
        return all(
            self.in_resolvent_set(complex(x)) for x in np.linspace(a, b, 257)
        )

    # optional actions -------------------------------------------------

    def r_apply(self, z: complex, f):
        raise UnsupportedAction(f"{type(self).__name__} has no resolvent action")

    def gbreve_apply(self, z: complex, f):
        raise UnsupportedAction(f"{type(self).__name__} has no trace action")

    def g_apply(self, z: complex, ell):
        raise UnsupportedAction(f"{type(self).__name__} has no source action")

    def gbreve_g(self, w: complex, z: complex) -> np.ndarray:
        """Product matrix (trace map at w) o (source map at z), N x N."""
        raise UnsupportedAction(f"{type(self).__name__} has no product matrix")


@dataclass(frozen=True)
class ExtensionProblem:
    """A backend evaluator, a coupling matrix, and the numeric tolerances.

    ``tol_linear`` is the relative smallest-singular-value cutoff below
    which the pencil counts as singular; ``tol_root`` is the pencil
    eigenvalue magnitude below which a scan point counts as a pole.
    """

    evaluator: GammaEvaluator
    theta: ThetaMatrix
    tol_linear: float = 1e-12
    tol_root: float = 1e-10

    def __post_init__(self):
        if self.theta.n != self.evaluator.n_charges:
            raise InvariantError(
                f"coupling matrix is {self.theta.n}x{self.theta.n} but the "
                f"backend has {self.evaluator.n_charges} charges"
            )
        if not (self.tol_linear > 0.0 and self.tol_root > 0.0):
            raise InvariantError("tolerances must be positive")


def gamma_theta(problem: ExtensionProblem, z: complex) -> np.ndarray:
    """The pencil theta + gamma(z); hermitian at admissible real z."""
    if not problem.evaluator.in_resolvent_set(z):
        raise OutsideResolventSet(f"z={z!r} is outside the resolvent set")
    return problem.theta.entries + problem.evaluator.gamma(z)


def krein_apply(problem: ExtensionProblem, z: complex, f):
    """Apply the perturbed resolvent at z to ``f``.

    Assembled from backend actions as
    ``r_apply(z, f) + g_apply(z, (theta + gamma(z))^{-1} gbreve_apply(z, f))``.

    Raises SingularPencil when the smallest singular value of the pencil
    falls at or below ``tol_linear`` times its largest one (z is then,
    numerically, an eigenvalue of the perturbed operator).
    """
    pencil = gamma_theta(problem, z)
    svals = np.linalg.svd(pencil, compute_uv=False)
    if svals[-1] <= problem.tol_linear * svals[0]:
        raise SingularPencil(
            f"pencil at z={z!r} has relative smallest singular value "
            f"{0.0 if svals[0] == 0.0 else svals[-1] / svals[0]:.3e}"
        )
    ev = problem.evaluator
    traces = np.asarray(ev.gbreve_apply(z, f), dtype=complex)
    charges = np.linalg.solve(pencil, traces)
    return ev.r_apply(z, f) + ev.g_apply(z, charges)


def min_eig_hermitian(m, rtol: float = HERMITICITY_RTOL) -> float:
    """Smallest eigenvalue of a hermitian matrix.

    The finite-dimensional lower-bound functional used by the
    admissibility test; exact to linear-algebra precision.  Raises
    NotHermitian when the input fails the hermiticity check.
    """
    return float(np.linalg.eigvalsh(hermitian_part(m, rtol))[0])


def admissible_real(problem: ExtensionProblem, lam: float) -> str:
    """Classify a real point by the sign windows of the pencil.

    Returns one of ``"plus"``, ``"minus"``, ``"both"``, ``"none"``:
    membership in the window where ``min_eig(+gamma) > -min_eig(+theta)``
    (plus), the mirrored window with both signs flipped (minus), or both
    or neither.  The inequalities are strict; exact equality reports
    non-membership.  Inside either window the pencil is provably
    invertible, so the resolvent formula applies.
    """
    lam = float(lam)
    if not problem.evaluator.in_resolvent_set(complex(lam)):
        raise OutsideResolventSet(f"lambda={lam!r} is outside the resolvent set")
    g = hermitian_part(problem.evaluator.gamma(complex(lam)))
    th = problem.theta.entries
    plus = min_eig_hermitian(g) > -min_eig_hermitian(th)
    minus = min_eig_hermitian(-g) > -min_eig_hermitian(-th)
    if plus and minus:
        return ADMISSIBLE_BOTH
    if plus:
        return ADMISSIBLE_PLUS
    if minus:
        return ADMISSIBLE_MINUS
    return ADMISSIBLE_NONE


def boundary_residual(problem: ExtensionProblem, trace_of_regular_part, q) -> np.ndarray:
    """Residual of the coupling condition: trace(regular part) - theta q.

    For a computed bound state (z0, q) the caller's trace equals
    ``-gamma(z0) q``, so the residual is ``-(theta + gamma(z0)) q`` and
    vanishes exactly when q spans the pencil kernel.
    """
    t = np.asarray(trace_of_regular_part, dtype=complex)
    q = np.asarray(q, dtype=complex)
    return t - problem.theta.entries @ q
