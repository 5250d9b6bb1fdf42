"""Numerical verification of the theta-function identities.

Addition theorems (binary, dual binary, ternary), the Jacobi/Prym
decomposition identities of ramified and unramified double coverings, a
generic N-secant fitter realising the trisecant/quadrisecant identities,
and the sine-Gordon three-term identity.

Identities are verified as residuals: each routine returns the relative
defect |LHS - RHS| / (|LHS| + |RHS| + 1) or, for the fitters, a singular
value consistency score sigma_min / sigma_{min+1} of the sample matrix.
The linear-dependence constants of the secant identities are never taken
from a formula; they are recovered as the near-null singular vector.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSamples, InvalidBlockData, NotHalfPeriod
from .siegel import DEFAULT_POLICY, SiegelPoint, validate_siegel
from .theta import (
    ThetaCharacteristic,
    half_characteristics,
    scaled_abs_theta,
    theta,
    theta_char,
    theta_jet,
)

DIVISOR_CUTOFF = 1e-8

_T4 = 0.5 * np.array(
    [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]], dtype=float
)


def _rel(lhs, rhs):
    return abs(lhs - rhs) / (abs(lhs) + abs(rhs) + 1.0)


# ---------------------------------------------------------------------------
# addition theorems


def addition_binary_residual(z1, z2, omega, policy=DEFAULT_POLICY) -> float:
    """Defect of theta(z1+z2) theta(z1-z2) against the sum of products of
    second-order thetas over all half-characteristics."""
    point = validate_siegel(omega)
    z1 = np.atleast_1d(np.asarray(z1, dtype=complex))
    z2 = np.atleast_1d(np.asarray(z2, dtype=complex))
    lhs = theta(z1 + z2, point, policy) * theta(z1 - z2, point, policy)
    point2 = SiegelPoint(2.0 * point.omega)
    zero = np.zeros(point.g)
    rhs = 0.0 + 0.0j
    for e in half_characteristics(point.g):
        ch = ThetaCharacteristic(e, zero)
        rhs += theta_char(ch, 2 * z1, point2, policy) * theta_char(ch, 2 * z2, point2, policy)
    return _rel(lhs, rhs)


def addition_binary_dual_residual(z1, z2, omega, policy=DEFAULT_POLICY) -> float:
    """Dual form: characteristics in the second slot, matrix omega/2.

    The expansion carries a 2^{-g} normalisation (fixed by re-deriving the
    identity from the direct form and the section-basis relation).
    """
    point = validate_siegel(omega)
    z1 = np.atleast_1d(np.asarray(z1, dtype=complex))
    z2 = np.atleast_1d(np.asarray(z2, dtype=complex))
    lhs = theta(z1 + z2, point, policy) * theta(z1 - z2, point, policy)
    point_h = SiegelPoint(0.5 * point.omega)
    zero = np.zeros(point.g)
    rhs = 0.0 + 0.0j
    for e in half_characteristics(point.g):
        ch = ThetaCharacteristic(zero, e)
        rhs += theta_char(ch, z1, point_h, policy) * theta_char(ch, z2, point_h, policy)
    rhs /= 2.0 ** point.g
    return _rel(lhs, rhs)


def addition_ternary_residual(zs, chars, omega, policy=DEFAULT_POLICY) -> float:
    """Four-term addition theorem.

    ``zs`` is a list of four g-vectors and ``chars`` four characteristics;
    the transformed quadruple uses the involutive half-matrix mixing all
    four slots.  The index pair (c, d) runs over the printed 4^g-element
    set {0, 1/2, 1, 3/2}^g; since shifting c or d by a whole integer
    reproduces the same term, the sum carries the normalisation 2^{-3g}
    (the printed 2^{-g} divided by the 4-fold index redundancy).
    """
    point = validate_siegel(omega)
    g = point.g
    zs = np.array([np.atleast_1d(np.asarray(z, dtype=complex)) for z in zs])
    if zs.shape != (4, g):
        raise ValueError("need exactly four argument vectors")
    if len(chars) != 4:
        raise ValueError("need exactly four characteristics")
    aa = np.array([c.a for c in chars], dtype=float)
    bb = np.array([c.b for c in chars], dtype=float)
    zt = _T4 @ zs
    at = _T4 @ aa
    bt = _T4 @ bb
    lhs = np.prod(
        [theta_char(ThetaCharacteristic(at[k], bt[k]), zt[k], point, policy) for k in range(4)]
    )
    quarter = [0.0, 0.5, 1.0, 1.5]
    rhs = 0.0 + 0.0j
    for c in itertools.product(quarter, repeat=g):
        cv = np.array(c)
        for d in itertools.product(quarter, repeat=g):
            dv = np.array(d)
            phase = np.exp(-4j * np.pi * np.dot(dv, at[0]))
            rhs += phase * np.prod(
                [
                    theta_char(ThetaCharacteristic(aa[k] + cv, bb[k] + dv), zs[k], point, policy)
                    for k in range(4)
                ]
            )
    rhs /= 2.0 ** (3 * g)
    return _rel(lhs, rhs)


# ---------------------------------------------------------------------------
# Prym decompositions


def prym_decomposition_ramified_residual(
    pi_mat, b0, z, chars=None, policy=DEFAULT_POLICY
) -> float:
    """Decomposition of the theta function of a ramified double covering.

    The 2g x 2g period matrix is assembled from the Prym block Pi and the
    base block B0; the identity splits theta on the big torus into a sum
    over 2^g half-characteristic shifts of products of the Prym theta at
    pi_1(z) = u + v (matrix 2 Pi) and the base theta at pi_2(z) = u - v
    (matrix 2 B0).
    """
    prym = validate_siegel(pi_mat)
    base = validate_siegel(b0)
    g = prym.g
    if base.g != g:
        raise InvalidBlockData("Pi and B0 must have equal size")
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (2 * g,):
        raise ValueError(f"z must be a {2*g}-vector")
    if chars is None:
        zeros = np.zeros(g)
        a = b = c = d = zeros
    else:
        a, b, c, d = (np.asarray(x, dtype=float) for x in chars)
    big = prym_block_assemble_ramified(prym, base)
    u, v = z[:g], z[g:]
    lhs = theta_char(
        ThetaCharacteristic(np.concatenate([a, b]), np.concatenate([c, d])), z, big, policy
    )
    p2 = SiegelPoint(2.0 * prym.omega)
    b2 = SiegelPoint(2.0 * base.omega)
    rhs = 0.0 + 0.0j
    for e in half_characteristics(g):
        rhs += theta_char(
            ThetaCharacteristic((a + b) / 2 + e, c + d), u + v, p2, policy
        ) * theta_char(ThetaCharacteristic((a - b) / 2 + e, c - d), u - v, b2, policy)
    return _rel(lhs, rhs)


def prym_decomposition_unramified_residual(
    pi_mat, t0, t1, t2, z, chars=None, policy=DEFAULT_POLICY
) -> float:
    """Decomposition for an unramified double covering.

    Blocks: Pi is the (g-1) x (g-1) Prym matrix, (T0, T1, T2) assemble the
    base period matrix B0 = [[T0/2, T1], [T1^T, T2]].  The identity splits
    theta on the (2g-1)-torus into base theta at pi_2(z) = (u, v+w)
    (matrix 2 B0) times Prym theta at pi_1(z) = v - w (matrix 2 Pi).
    """
    prym = validate_siegel(pi_mat)
    gm1 = prym.g
    t1 = np.atleast_1d(np.asarray(t1, dtype=complex))
    t2 = np.atleast_2d(np.asarray(t2, dtype=complex))
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (2 * gm1 + 1,):
        raise ValueError(f"z must be a {2*gm1+1}-vector")
    if chars is None:
        a0 = c0 = 0.0
        a = b = c = d = np.zeros(gm1)
    else:
        a0, a, b, c0, c, d = chars
        a, b, c, d = (np.asarray(x, dtype=float) for x in (a, b, c, d))
    base = _assemble_unramified_base(t0, t1, t2)
    big = prym_block_assemble_unramified(prym, t0, t1, t2)
    u, v, w = z[0], z[1 : 1 + gm1], z[1 + gm1 :]
    lhs = theta_char(
        ThetaCharacteristic(
            np.concatenate([[a0], a, b]), np.concatenate([[c0], c, d])
        ),
        z,
        big,
        policy,
    )
    base2 = SiegelPoint(2.0 * base.omega)
    prym2 = SiegelPoint(2.0 * prym.omega)
    rhs = 0.0 + 0.0j
    for e in half_characteristics(gm1):
        f_base = theta_char(
            ThetaCharacteristic(
                np.concatenate([[a0], (a + b) / 2 + e]), np.concatenate([[c0], c + d])
            ),
            np.concatenate([[u], v + w]),
            base2,
            policy,
        )
        f_prym = theta_char(
            ThetaCharacteristic((a - b) / 2 + e, c - d), v - w, prym2, policy
        )
        rhs += f_base * f_prym
    return _rel(lhs, rhs)


def _assemble_unramified_base(t0, t1, t2):
    t1 = np.atleast_1d(np.asarray(t1, dtype=complex)).reshape(1, -1)
    t2 = np.atleast_2d(np.asarray(t2, dtype=complex))
    top = np.concatenate([[[complex(t0) / 2.0]], t1], axis=1)
    bottom = np.concatenate([t1.T, t2], axis=1)
    try:
        return validate_siegel(np.concatenate([top, bottom], axis=0))
    except Exception as exc:
        raise InvalidBlockData(f"base blocks leave the Siegel domain: {exc}") from exc


def prym_block_assemble_ramified(pi_mat, b0) -> SiegelPoint:
    """B = 1/2 [[Pi+B0, Pi-B0], [Pi-B0, Pi+B0]]."""
    prym = validate_siegel(pi_mat)
    base = validate_siegel(b0)
    if base.g != prym.g:
        raise InvalidBlockData("Pi and B0 must have equal size")
    p, b = prym.omega, base.omega
    big = 0.5 * np.block([[p + b, p - b], [p - b, p + b]])
    try:
        return validate_siegel(big)
    except Exception as exc:
        raise InvalidBlockData(f"assembled matrix leaves the Siegel domain: {exc}") from exc


def prym_block_assemble_unramified(pi_mat, t0, t1, t2) -> SiegelPoint:
    """B = [[T0, T1, T1], [T1^T, (T2+Pi)/2, (T2-Pi)/2], [T1^T, (T2-Pi)/2, (T2+Pi)/2]].

    The off-diagonal block is (T2 - Pi)/2: with this sign the invariant
    combination v + w couples to the base matrix and the anti-invariant
    v - w to the Prym matrix, which is what the decomposition identity
    requires (the printed relation transposes the roles).
    """
    prym = validate_siegel(pi_mat)
    base = _assemble_unramified_base(t0, t1, t2)
    p = prym.omega
    t2m = np.atleast_2d(np.asarray(t2, dtype=complex))
    t1r = np.atleast_1d(np.asarray(t1, dtype=complex)).reshape(1, -1)
    diag = 0.5 * (t2m + p)
    off = 0.5 * (t2m - p)
    big = np.block(
        [
            [np.array([[complex(t0)]]), t1r, t1r],
            [t1r.T, diag, off],
            [t1r.T, off, diag],
        ]
    )
    try:
        return validate_siegel(big)
    except Exception as exc:
        raise InvalidBlockData(f"assembled matrix leaves the Siegel domain: {exc}") from exc


def prym_block_assemble(kind, blocks) -> SiegelPoint:
    """Assemble a covering period matrix from Prym/base block data.

    kind='ramified': blocks = (pi_mat, b0);
    kind='unramified': blocks = (pi_mat, t0, t1, t2).
    """
    if kind == "ramified":
        return prym_block_assemble_ramified(*blocks)
    if kind == "unramified":
        return prym_block_assemble_unramified(*blocks)
    raise ValueError(f"unknown assembly kind {kind!r}")


# ---------------------------------------------------------------------------
# secant fitting


@dataclass(frozen=True)
class SecantSystem:
    """Shift pairs (alpha_j, beta_j) and sample points z_k for an N-secant fit."""

    shifts: tuple
    samples: tuple

    def __init__(self, shifts, samples):
        shifts = tuple(
            (
                np.atleast_1d(np.asarray(a, dtype=complex)),
                np.atleast_1d(np.asarray(b, dtype=complex)),
            )
            for a, b in shifts
        )
        samples = tuple(np.atleast_1d(np.asarray(z, dtype=complex)) for z in samples)
        if len(shifts) < 2:
            raise ValueError("need at least two shift pairs")
        if len(samples) < 4 * len(shifts):
            raise ValueError("need at least 4*N sample points")
        object.__setattr__(self, "shifts", shifts)
        object.__setattr__(self, "samples", samples)

    @property
    def order(self):
        return len(self.shifts)


@dataclass(frozen=True)
class SecantFit:
    """Unit-norm coefficient vector and rank-deficiency consistency score."""

    coefficients: np.ndarray
    consistency: float
    singular_values: np.ndarray = field(repr=False, default=None)


def secant_fit(system: SecantSystem, omega, policy=DEFAULT_POLICY) -> SecantFit:
    """Fit the linear dependency sum_j c_j theta(z+alpha_j) theta(z+beta_j) = 0.

    The sample matrix M[k][j] = theta(z_k + alpha_j) theta(z_k + beta_j) is
    decomposed by SVD; the returned coefficients are the right-singular
    vector of the smallest singular value and consistency is
    sigma_min / sigma_{min+1}.  A genuine N-secant gives consistency << 1,
    generic shifts give order 1.
    """
    point = validate_siegel(omega)
    n = system.order
    rows = []
    for z in system.samples:
        rows.append(
            [
                theta(z + a, point, policy) * theta(z + b, point, policy)
                for a, b in system.shifts
            ]
        )
    m = np.asarray(rows)
    scale = np.max(np.abs(m))
    if scale == 0.0:
        raise DegenerateSamples("all samples lie on the theta divisor")
    _, s, vh = np.linalg.svd(m / scale)
    if s[n - 2] < 1e-12 * s[0]:
        raise DegenerateSamples(
            "sample matrix rank collapsed below N-1; shifts are degenerate "
            "or all samples are near the theta divisor"
        )
    coeff = np.conj(vh[-1])
    return SecantFit(coeff, float(s[-1] / s[-2]), s)


def secant_points_from_quadruple(p, kind) -> list:
    """Shift pairs of the secant identity attached to four Abel(-Prym) images.

    For a trisecant the three combination vectors
    (p1+p2-p3-p4)/2, (p1+p3-p2-p4)/2, (p1+p4-p2-p3)/2 become
    theta(z + w) theta(z - w) pairs; the quadrisecant adds
    (p1+p2+p3+p4)/2.
    """
    p = [np.atleast_1d(np.asarray(x, dtype=complex)) for x in p]
    if len(p) != 4:
        raise ValueError("need exactly four points")
    w = [
        (p[0] + p[1] - p[2] - p[3]) / 2,
        (p[0] + p[2] - p[1] - p[3]) / 2,
        (p[0] + p[3] - p[1] - p[2]) / 2,
    ]
    if kind == "quadrisecant":
        w.append((p[0] + p[1] + p[2] + p[3]) / 2)
    elif kind != "trisecant":
        raise ValueError(f"unknown secant kind {kind!r}")
    return [(wj, -wj) for wj in w]


def sample_cell_points(omega, count, seed, policy=DEFAULT_POLICY, scale=1.0):
    """Uniform draws from the fundamental cell [0,1)^g + omega [0,1)^g,
    discarding points too close to the theta divisor."""
    point = validate_siegel(omega)
    rng = np.random.default_rng(seed)
    out = []
    attempts = 0
    while len(out) < count and attempts < 50 * count:
        attempts += 1
        x = rng.random(point.g)
        y = rng.random(point.g)
        z = scale * (x + point.omega @ y)
        if scaled_abs_theta(z, point, policy) < DIVISOR_CUTOFF:
            continue
        out.append(z)
    if len(out) < count:
        raise DegenerateSamples("could not find enough samples off the theta divisor")
    return out


# ---------------------------------------------------------------------------
# sine-Gordon identity


def half_period_decompose(delta, omega, tol=1e-9):
    """Integer vectors (m1, m2) with delta = (m1 + omega m2)/2, or raise."""
    point = validate_siegel(omega)
    delta = np.atleast_1d(np.asarray(delta, dtype=complex))
    m2 = 2.0 * (point.Yinv @ delta.imag)
    m1 = 2.0 * delta.real - point.omega.real @ np.rint(m2)
    if np.max(np.abs(m2 - np.rint(m2))) > tol or np.max(np.abs(m1 - np.rint(m1))) > tol:
        raise NotHalfPeriod(f"{delta} is not (m1 + omega m2)/2 with integer m1, m2")
    return np.rint(m1).astype(int), np.rint(m2).astype(int)


@dataclass(frozen=True)
class SineGordonFit:
    c1: complex
    c2: complex
    c3: complex
    consistency: float
    samples_used: int


def sine_gordon_identity_fit(
    delta,
    d1,
    d2,
    omega,
    policy=DEFAULT_POLICY,
    sample_count=24,
    seed=0,
    enforce_half_period=True,
) -> SineGordonFit:
    """Fit constants in  c1 + c2 theta(z-d)theta(z+d)/theta(z)^2
    + (c3/2) D1 D2 log theta(z) = 0  over sampled z off the divisor.

    The coefficient vector is the smallest right-singular vector of the
    three-column sample matrix (unit norm), consistency the ratio of its
    two smallest singular values.  ``enforce_half_period=False`` allows
    negative controls with non-half-period shifts.
    """
    point = validate_siegel(omega)
    delta = np.atleast_1d(np.asarray(delta, dtype=complex))
    if enforce_half_period:
        half_period_decompose(delta, point)
    d1 = np.atleast_1d(np.asarray(d1, dtype=complex))
    d2 = np.atleast_1d(np.asarray(d2, dtype=complex))
    samples = sample_cell_points(point, sample_count, seed, policy)
    rows = []
    for z in samples:
        jet = theta_jet(z, point, (d1, d2), 2, policy)
        t0 = jet[(0, 0)]
        ratio = (
            theta(z - delta, point, policy) * theta(z + delta, point, policy) / t0 ** 2
        )
        dd_log = (jet[(1, 1)] * t0 - jet[(1, 0)] * jet[(0, 1)]) / t0 ** 2
        rows.append([1.0, ratio, 0.5 * dd_log])
    m = np.asarray(rows)
    if np.std(np.abs(m[:, 1])) < 1e-10 * (1.0 + np.mean(np.abs(m[:, 1]))):
        raise DegenerateSamples(
            "ratio column is constant (delta on the period lattice); system is rank 2"
        )
    _, s, vh = np.linalg.svd(m)
    coeff = np.conj(vh[-1])
    return SineGordonFit(
        complex(coeff[0]),
        complex(coeff[1]),
        complex(coeff[2]),
        float(s[-1] / s[-2]),
        len(samples),
    )
