"""The Siegel upper half-space: validated period matrices and truncation policy.

A point of the space is a symmetric g x g complex matrix whose imaginary
part is positive definite.  Validation is by factorization: a Cholesky
decomposition of Im(omega) doubles as the proof of positive definiteness
and as the change of variables used by the theta truncation.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ImagNotPositiveDefinite, NotSymmetric

SYMMETRY_RTOL = 1e-12


@dataclass(frozen=True)
class TruncationPolicy:
    """Evaluation tolerance contract for theta sums.

    epsilon      target absolute bound on the discarded series tail,
    max_radius   cap on the ellipsoidal truncation radius; exceeding it
                 raises RadiusCapExceeded instead of silently degrading.
    """

    epsilon: float = 1e-12
    max_radius: int = 60

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_radius < 1:
            raise ValueError("max_radius must be >= 1")


DEFAULT_POLICY = TruncationPolicy()


class SiegelPoint:
    """A validated period matrix, with cached factorization data.

    Construct through :func:`validate_siegel`; the constructor itself
    performs the checks so stray instances cannot be invalid.
    """

    def __init__(self, omega):
        omega = np.atleast_2d(np.asarray(omega, dtype=complex))
        if omega.ndim != 2 or omega.shape[0] != omega.shape[1]:
            raise NotSymmetric(f"expected a square matrix, got shape {omega.shape}")
        scale = 1.0 + np.abs(omega)
        asym = np.abs(omega - omega.T)
        if np.any(asym > SYMMETRY_RTOL * scale):
            raise NotSymmetric(
                f"max relative asymmetry {np.max(asym / scale):.3e} exceeds "
                f"{SYMMETRY_RTOL:g}"
            )
        omega = 0.5 * (omega + omega.T)
        y = omega.imag.copy()
        try:
            chol_lower = np.linalg.cholesky(y)
        except np.linalg.LinAlgError:
            raise ImagNotPositiveDefinite(float(np.linalg.eigvalsh(y)[0])) from None
        self.omega = omega
        self.g = omega.shape[0]
        self.Y = y
        # upper-triangular T with Y = T^T T; v = T m is the lattice coordinate
        self.T = chol_lower.T.copy()
        self.Yinv = np.linalg.inv(y)
        self.Tinv = np.linalg.inv(self.T)
        # per-axis box bounds: |m_j| <= R * row_norm_j(T^{-1}) covers ||T m|| <= R
        self.box_norms = np.linalg.norm(self.Tinv, axis=1)
        sv = np.linalg.svd(self.T, compute_uv=False)
        self.sigma_min = float(sv[-1])
        self.sigma_max = float(sv[0])
        self._radius_cache = {}

    def __repr__(self):
        return f"SiegelPoint(g={self.g})"

    def scaled(self, factor):
        """The point factor*omega (factor real positive or i-free complex
        keeping Siegel membership, e.g. 2*omega or omega/2)."""
        return SiegelPoint(factor * self.omega)


def validate_siegel(omega) -> SiegelPoint:
    """Validate a candidate period matrix.

    Raises NotSymmetric or ImagNotPositiveDefinite (reporting the smallest
    eigenvalue) with a diagnostic naming the violated invariant.
    """
    if isinstance(omega, SiegelPoint):
        return omega
    return SiegelPoint(omega)
