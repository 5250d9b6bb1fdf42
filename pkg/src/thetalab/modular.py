"""The modular action of Sp(2g, Z) on period matrices and on theta functions.

omega -> (A omega + B)(C omega + D)^{-1} together with the induced argument
and characteristic transformation.  The scalar constant relating the two
sides of the theta transformation law is not computed; instead the ratio

    theta[a',b'](z', omega') / (exp(pi i <z, T z>) theta[a,b](z, omega))

is sampled at several z and its spread reported, which verifies the law
without knowing the constant.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NearZeroDenominator, NotSymplectic, SingularDenominator
from .lattice import is_symplectic_member
from .siegel import DEFAULT_POLICY, SiegelPoint, validate_siegel
from .theta import ThetaCharacteristic, scaled_abs_theta, theta_char

DIVISOR_CUTOFF = 1e-8


def _blocks(g_elem, g):
    m = np.asarray(g_elem)
    if m.shape != (2 * g, 2 * g):
        raise NotSymplectic(f"expected a {2*g}x{2*g} integer matrix, got {m.shape}")
    a = m[:g, :g].astype(float)
    b = m[:g, g:].astype(float)
    c = m[g:, :g].astype(float)
    d = m[g:, g:].astype(float)
    return a, b, c, d


def modular_transform(omega, g_elem) -> SiegelPoint:
    """(A omega + B)(C omega + D)^{-1} for a principally polarised element."""
    point = validate_siegel(omega)
    g = point.g
    int_rows = [[int(round(x)) for x in row] for row in np.asarray(g_elem)]
    if not is_symplectic_member(int_rows, [1] * g):
        raise NotSymplectic("matrix does not satisfy g J g^T = J")
    a, b, c, d = _blocks(np.asarray(int_rows), g)
    denom = c @ point.omega + d
    if np.linalg.cond(denom) > 1e12:
        raise SingularDenominator("C*omega + D is numerically singular")
    new_omega = (a @ point.omega + b) @ np.linalg.inv(denom)
    return validate_siegel(new_omega)


@dataclass(frozen=True)
class ConstancyReport:
    spread: float
    mean_ratio: complex
    samples_used: int
    samples_skipped: int


def modular_constancy_check(
    omega,
    g_elem,
    sample_count=20,
    char: ThetaCharacteristic = None,
    policy=DEFAULT_POLICY,
    seed=0,
    t_matrix_override=None,
) -> ConstancyReport:
    """Max relative spread of the transformation ratio over random z.

    A small spread confirms the transformation law; the constant itself is
    never computed.  ``t_matrix_override`` replaces the quadratic-form
    matrix (used as a negative control).  Samples landing near the theta
    divisor are skipped and counted.
    """
    point = validate_siegel(omega)
    g = point.g
    if char is None:
        char = ThetaCharacteristic(np.zeros(g), np.zeros(g))
    int_rows = [[int(round(x)) for x in row] for row in np.asarray(g_elem)]
    if not is_symplectic_member(int_rows, [1] * g):
        raise NotSymplectic("matrix does not satisfy g J g^T = J")
    a, b, c, d = _blocks(np.asarray(int_rows), g)
    denom = c @ point.omega + d
    if np.linalg.cond(denom) > 1e12:
        raise SingularDenominator("C*omega + D is numerically singular")
    denom_inv = np.linalg.inv(denom)
    new_point = validate_siegel((a @ point.omega + b) @ denom_inv)
    t_matrix = denom_inv @ c if t_matrix_override is None else np.asarray(t_matrix_override)
    new_a = d @ char.a - c @ char.b + 0.5 * np.diag(c @ d.T)
    new_b = -b @ char.a + a @ char.b + 0.5 * np.diag(a @ b.T)
    new_char = ThetaCharacteristic(new_a, new_b)

    rng = np.random.default_rng(seed)
    ratios = []
    skipped = 0
    attempts = 0
    while len(ratios) < sample_count and attempts < 20 * sample_count:
        attempts += 1
        z = rng.normal(size=g) * 0.4 + 1j * rng.normal(size=g) * 0.25
        if scaled_abs_theta(z, point, policy) < DIVISOR_CUTOFF:
            skipped += 1
            continue
        zp = denom_inv.T @ z
        numerator = theta_char(new_char, zp, new_point, policy)
        quad = math.pi * 1j * complex(z @ (t_matrix @ z))
        denominator = np.exp(quad) * theta_char(char, z, point, policy)
        if abs(denominator) == 0.0:
            skipped += 1
            continue
        ratios.append(numerator / denominator)
    if len(ratios) < 2:
        raise NearZeroDenominator(
            f"only {len(ratios)} usable samples; theta divisor too close"
        )
    ratios = np.asarray(ratios)
    mean = ratios.mean()
    spread = float(np.max(np.abs(ratios - mean)) / abs(mean))
    return ConstancyReport(spread, complex(mean), len(ratios), skipped)
