"""Riemann theta functions with rigorous series truncation.

The series

    theta(z, omega) = sum_{m in Z^g} exp(pi*i*<omega m, m> + 2*pi*i*<m, z>)

is summed over the integer points of an ellipsoid ||T(m + s)|| <= R where
Im(omega) = T^T T (Cholesky) and s is the real displacement of the summation
center induced by Im(z) and by the characteristic shift.  The radius R is
chosen so that a closed-form bound on the discarded tail stays below the
policy tolerance.  The bound compares the tail with a Gaussian integral over
a sphere packing of the lattice T Z^g:

    |tail| <= g r^{-g} K int_{R-r}^inf  s^{g-1} Q(s + r) exp(-pi (s-r)^2) ds

with r = sigma_min(T)/2 a packing radius, K = (2 pi)^p for a derivative of
total order p, and Q(u) = (u/sigma_min + ||c||)^p absorbing the polynomial
weight of differentiated terms.  The integral reduces to upper incomplete
gamma functions and is evaluated in log space so that the exponential
prefactor exp(pi <Y c, c>) of off-lattice arguments never under- or
overflows the comparison.

Characteristics are handled through the shifted series

    theta[a,b](z, omega) = sum_m exp(pi*i*<omega(m+a), m+a> + 2*pi*i*<m+a, z+b>)

which is the numerically stable form (no huge explicit prefactor).
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as _gamma_fn
from scipy.special import gammaincc, logsumexp

from .errors import OrderCapExceeded, RadiusCapExceeded
from .siegel import DEFAULT_POLICY, SiegelPoint, TruncationPolicy, validate_siegel

ORDER_CAP = 8
_LOG_GRID = math.log(10.0)
_MAX_LATTICE_POINTS = 20_000_000


# ---------------------------------------------------------------------------
# half-characteristic bookkeeping


def half_characteristics(g):
    """All 2^g half-characteristics n with 2n in {0,1}^g.

    Fixed ordering used by every 2^g-indexed object in the library:
    lexicographic with coordinate 0 the fastest (little-endian bit order),
    i.e. row j has coordinate k equal to ((j >> k) & 1) / 2.
    """
    out = np.zeros((2 ** g, g))
    for j in range(2 ** g):
        for k in range(g):
            out[j, k] = 0.5 * ((j >> k) & 1)
    return out


@dataclass(frozen=True)
class ThetaCharacteristic:
    """A pair (a, b) of real g-vectors indexing theta[a,b]."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("characteristic halves must be equal-length vectors")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("characteristic entries must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def g(self):
        return self.a.shape[0]


@dataclass(frozen=True)
class DirectionalRequest:
    """Directional derivative spec: apply prod_j D_{dir_j}^{order_j}."""

    directions: tuple
    orders: tuple

    def __post_init__(self):
        dirs = tuple(np.atleast_1d(np.asarray(d, dtype=complex)) for d in self.directions)
        orders = tuple(int(o) for o in self.orders)
        if len(dirs) != len(orders):
            raise ValueError("directions and orders must have matching length")
        if any(o < 0 for o in orders):
            raise ValueError("orders must be non-negative")
        if sum(orders) > ORDER_CAP:
            raise OrderCapExceeded(
                f"total derivative order {sum(orders)} exceeds cap {ORDER_CAP}"
            )
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "orders", orders)

    @property
    def total_order(self):
        return sum(self.orders)


# ---------------------------------------------------------------------------
# tail bound


def _log_upper_gamma(s, x):
    """log of an upper bound for the upper incomplete gamma Gamma(s, x)."""
    if x < 2.0 * s + 40.0:
        return math.log(float(gammaincc(s, x)) * float(_gamma_fn(s)))
    # u^{s-1} e^{-u/2} is decreasing for u >= 2(s-1), hence
    # Gamma(s,x) <= x^{s-1} e^{-x/2} * 2 e^{-x/2}
    return math.log(2.0) + (s - 1.0) * math.log(x) - x


def _log_tail_bound(g, r, sigma, cnorm, p, radius):
    """log of the tail bound for the weighted theta series outside ``radius``."""
    a_low = radius - 2.0 * r
    if a_low <= 0.0:
        return math.inf
    # polynomial (t + r)^{g-1} * ((t + 2r)/sigma + cnorm)^p in t = s - r >= a_low
    poly = np.array([1.0])
    poly = np.polynomial.polynomial.polypow(np.array([r, 1.0]), g - 1)
    if p > 0:
        poly2 = np.polynomial.polynomial.polypow(
            np.array([2.0 * r / sigma + cnorm, 1.0 / sigma]), p
        )
        poly = np.polynomial.polynomial.polymul(poly, poly2)
    logs = []
    x = math.pi * a_low * a_low
    for k, ck in enumerate(poly):
        if ck <= 0.0:
            continue
        s_par = 0.5 * (k + 1)
        logs.append(
            math.log(ck)
            + _log_upper_gamma(s_par, x)
            - math.log(2.0)
            - s_par * math.log(math.pi)
        )
    total = float(logsumexp(logs))
    return math.log(g) - g * math.log(r) + p * math.log(2.0 * math.pi) + total


def _choose_radius(point: SiegelPoint, log_target, p, cnorm, policy: TruncationPolicy):
    """Smallest cached radius whose tail bound is below exp(log_target)."""
    r = 0.5 * point.sigma_min
    key = (p, math.floor(log_target / _LOG_GRID), math.ceil(2.0 * cnorm))
    cached = point._radius_cache.get(key)
    if cached is not None:
        if cached > policy.max_radius:
            raise RadiusCapExceeded(
                f"required radius {cached:.2f} exceeds cap {policy.max_radius}"
            )
        return cached
    eff_target = key[1] * _LOG_GRID          # <= log_target: conservative
    eff_cnorm = 0.5 * key[2]                 # >= cnorm: conservative
    guess = 2.0 * r + math.sqrt(max(0.0, -eff_target) / math.pi)
    radius = max(2.0 * r + 0.25, guess)
    while _log_tail_bound(point.g, r, point.sigma_min, eff_cnorm, p, radius) > eff_target:
        radius += 0.25
        if radius > policy.max_radius:
            raise RadiusCapExceeded(
                f"required radius exceeds cap {policy.max_radius} "
                "(nearly degenerate Im(omega) or very large |Im z|)"
            )
    point._radius_cache[key] = radius
    if radius > policy.max_radius:
        raise RadiusCapExceeded(
            f"required radius {radius:.2f} exceeds cap {policy.max_radius}"
        )
    return radius


def _enumerate_lattice(point: SiegelPoint, center, radius):
    """Integer points m with ||T (m + center)|| <= radius, in deterministic
    lexicographic order."""
    lo = np.ceil(-center - radius * point.box_norms).astype(np.int64)
    hi = np.floor(-center + radius * point.box_norms).astype(np.int64)
    counts = np.maximum(hi - lo + 1, 0)
    total = int(np.prod(counts.astype(float)))
    if total > _MAX_LATTICE_POINTS:
        raise RadiusCapExceeded(
            f"lattice enumeration would need {total} points; "
            "Im(omega) is too close to degenerate"
        )
    if total == 0:
        return np.zeros((0, point.g), dtype=np.int64)
    axes = [np.arange(l, h + 1, dtype=np.int64) for l, h in zip(lo, hi)]
    grid = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([a.reshape(-1) for a in grid], axis=-1)
    v = (pts + center) @ point.T.T
    mask = np.einsum("ni,ni->n", v, v) <= radius * radius + 1e-12
    return pts[mask]


# ---------------------------------------------------------------------------
# core evaluation


def _terms(point, z, a, b, p_order, policy, pad=0.0):
    """Lattice offsets n = m + a and the phase factors of the shifted series.

    Returns (n_eff, phases) with the full series value equal to
    sum(weight(n_eff) * phases) for any polynomial weight of degree
    <= p_order.  ``pad`` enlarges the radius (used to share one point set
    across several nearby centers).
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (point.g,):
        raise ValueError(f"argument must be a {point.g}-vector")
    w = z + b
    c = point.Yinv @ w.imag
    s_full = a + c
    n0 = np.rint(s_full)
    s = s_full - n0
    q0 = math.pi * float(c @ point.Y @ c)
    log_target = math.log(policy.epsilon) - q0
    cnorm = float(np.linalg.norm(c))
    radius = _choose_radius(point, log_target, p_order, cnorm, policy)
    pts = _enumerate_lattice(point, s, radius + pad)
    n_eff = pts + (a - n0)
    expo = (
        1j * math.pi * np.einsum("ni,ij,nj->n", n_eff, point.omega, n_eff)
        + 2j * math.pi * (n_eff @ w)
    )
    return n_eff, np.exp(expo)


def theta(z, omega, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """theta(z, omega) with absolute tail below policy.epsilon."""
    point = validate_siegel(omega)
    zero = np.zeros(point.g)
    _, phases = _terms(point, z, zero, zero, 0, policy)
    return complex(np.sum(phases))


def theta_char(
    char: ThetaCharacteristic, z, omega, policy: TruncationPolicy = DEFAULT_POLICY
) -> complex:
    """theta[a,b](z, omega) via the shifted series."""
    point = validate_siegel(omega)
    if char.g != point.g:
        raise ValueError("characteristic dimension does not match omega")
    _, phases = _terms(point, z, char.a, char.b, 0, policy)
    return complex(np.sum(phases))


def theta_deriv(
    req: DirectionalRequest,
    char,
    z,
    omega,
    policy: TruncationPolicy = DEFAULT_POLICY,
) -> complex:
    """Directional derivative prod_j D_{dir_j}^{order_j} of theta[a,b] at z.

    Term-wise differentiation: each lattice term is multiplied by
    prod_j (2 pi i <m + a, dir_j>)^{order_j}; the truncation radius is
    enlarged through the polynomial-weighted tail bound.
    """
    point = validate_siegel(omega)
    if char is None:
        char = ThetaCharacteristic(np.zeros(point.g), np.zeros(point.g))
    p = req.total_order
    n_eff, phases = _terms(point, z, char.a, char.b, p, policy)
    weight = np.ones(len(phases), dtype=complex)
    for d, o in zip(req.directions, req.orders):
        if o == 0:
            continue
        norm = np.linalg.norm(d)
        if norm == 0.0:
            return 0.0 + 0.0j
        dhat = np.asarray(d, dtype=complex) / norm
        weight = weight * (2j * math.pi * (n_eff @ dhat)) ** o * norm ** o
    return complex(np.sum(weight * phases))


def theta_jet(
    z,
    omega,
    directions,
    order,
    policy: TruncationPolicy = DEFAULT_POLICY,
    a=None,
    b=None,
):
    """All mixed directional derivatives D^alpha theta[a,b](z) with
    |alpha| <= order, alpha over the given direction list.

    Returns a dict mapping exponent tuples to derivative values; one lattice
    enumeration is shared across the whole jet.
    """
    point = validate_siegel(omega)
    if order > ORDER_CAP:
        raise OrderCapExceeded(f"jet order {order} exceeds cap {ORDER_CAP}")
    zero = np.zeros(point.g)
    a = zero if a is None else np.asarray(a, dtype=float)
    b = zero if b is None else np.asarray(b, dtype=float)
    n_eff, phases = _terms(point, z, a, b, order, policy)
    dirs = [np.atleast_1d(np.asarray(d, dtype=complex)) for d in directions]
    lin = []
    for d in dirs:
        norm = np.linalg.norm(d)
        if norm == 0.0:
            lin.append((np.zeros(len(phases), dtype=complex), 0.0))
        else:
            lin.append((2j * math.pi * (n_eff @ (d / norm)), norm))
    out = {}
    for alpha in _exponents(len(dirs), order):
        weight = phases
        scale = 1.0
        degenerate = False
        for (pvec, norm), e in zip(lin, alpha):
            if e == 0:
                continue
            if norm == 0.0:
                degenerate = True
                break
            weight = weight * pvec ** e
            scale *= norm ** e
        out[alpha] = 0.0 + 0.0j if degenerate else complex(np.sum(weight) * scale)
    return out


def _exponents(nvars, order):
    """Exponent tuples of total degree <= order, graded lexicographic."""
    if nvars == 0:
        return [()]
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining + 1):
            rec(prefix + (e,), remaining - e, slots - 1)

    for total in range(order + 1):
        rec((), total, nvars)
    return out


# ---------------------------------------------------------------------------
# theta constants: the hat table theta[n,0](., 2*omega) at z = 0


@dataclass
class ThetaHatTable:
    """Values and derivative tensors at 0 of theta[n,0](., 2*omega).

    ``chars`` lists the half-characteristics in the fixed ordering;
    ``tensors[j][k]`` is the order-k derivative tensor (shape g^k) of the
    j-th characteristic.  Odd orders vanish up to rounding since these
    series are even in z.
    """

    omega: SiegelPoint
    max_order: int
    chars: np.ndarray
    tensors: list = field(repr=False)

    def value(self, j):
        return self.tensors[j][0]

    def tensor(self, j, k):
        return self.tensors[j][k]


def theta_hat_table(
    omega, max_order, policy: TruncationPolicy = DEFAULT_POLICY
) -> ThetaHatTable:
    """Tabulate theta[n,0](0, 2*omega) and its z-derivatives up to max_order."""
    if max_order > ORDER_CAP:
        raise OrderCapExceeded(f"max_order {max_order} exceeds cap {ORDER_CAP}")
    point = validate_siegel(omega)
    point2 = SiegelPoint(2.0 * point.omega)
    g = point.g
    chars = half_characteristics(g)
    zero = np.zeros(g)
    letters = "abcdefgh"
    tensors = []
    for n in chars:
        n_eff, phases = _terms(point2, zero, n, zero, max_order, policy)
        factors = 2j * math.pi * n_eff
        per_char = [complex(np.sum(phases))]
        for k in range(1, max_order + 1):
            sub = "n," + ",".join("n" + letters[i] for i in range(k))
            sub += "->" + letters[:k]
            per_char.append(np.einsum(sub, phases, *([factors] * k)))
        tensors.append(per_char)
    return ThetaHatTable(point, max_order, chars, tensors)


# ---------------------------------------------------------------------------
# Kummer map


@dataclass(frozen=True)
class KummerVector:
    """Second-order theta coordinates theta[n,0](2z, 2*omega), fixed ordering."""

    components: np.ndarray

    def __post_init__(self):
        comp = np.asarray(self.components, dtype=complex)
        if comp.ndim != 1 or (comp.shape[0] & (comp.shape[0] - 1)) != 0:
            raise ValueError("component count must be a power of two")
        object.__setattr__(self, "components", comp)


def kummer_vector(z, omega, policy: TruncationPolicy = DEFAULT_POLICY) -> KummerVector:
    """The Kummer image of z: all theta[n,0](2z, 2*omega)."""
    point = validate_siegel(omega)
    point2 = SiegelPoint(2.0 * point.omega)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    zero = np.zeros(point.g)
    comps = []
    for n in half_characteristics(point.g):
        _, phases = _terms(point2, 2.0 * z, n, zero, 0, policy)
        comps.append(complex(np.sum(phases)))
    return KummerVector(np.asarray(comps))


def scaled_abs_theta(z, omega, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """|theta(z)| * exp(-pi <Y c, c>), a scale-free divisor-proximity gauge.

    The factor removes the quasi-periodic exponential growth, so values are
    O(1) away from the theta divisor and ~0 on it.
    """
    point = validate_siegel(omega)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    c = point.Yinv @ z.imag
    q0 = math.pi * float(c @ point.Y @ c)
    val = theta(z, point, policy)
    return abs(val) * math.exp(-q0)
