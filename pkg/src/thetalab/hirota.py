"""Exact Hirota bilinear calculus on finite exponential sums and theta tau
functions, with the catalog of hierarchy polynomials.

For exponential terms the bilinear derivative is exact algebra: if
f = sum_s c_s exp(<p_s, x> + phi_s) and g likewise, then

    P(D) f.g (x) = sum_{s,t} c_s c_t P(p_s - p_t) exp(<p_s + p_t, x> + ...)

with no numerical differentiation anywhere.  When both operands are the
same sum, terms are grouped into (s,t)/(t,s) pairs so that odd-degree
polynomials cancel exactly in floating point.

Theta-backed tau functions expand Hirota monomials through the binomial
formula into products of directional theta derivatives.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import SpecMismatch, VariableMismatch
from .siegel import DEFAULT_POLICY, validate_siegel
from .theta import theta_jet

MONOMIAL_DEGREE_CAP = 8


@dataclass(frozen=True)
class ExpSum:
    """A finite sum  sum_t coeff * exp(<wavevector, x> + phase)  over x in C^k."""

    nvars: int
    terms: tuple

    def __init__(self, nvars, terms):
        nvars = int(nvars)
        norm = []
        for coeff, wave, phase in terms:
            wave = tuple(complex(w) for w in wave)
            if len(wave) != nvars:
                raise VariableMismatch(
                    f"wavevector length {len(wave)} != variable count {nvars}"
                )
            norm.append((complex(coeff), wave, complex(phase)))
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", tuple(norm))

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        return sum(
            c * np.exp(np.dot(np.asarray(w), x) + ph) for c, w, ph in self.terms
        )

    def scaled(self, factor):
        return ExpSum(self.nvars, [(factor * c, w, ph) for c, w, ph in self.terms])

    def gauge(self, shift):
        """Multiply by exp(<shift, x>): add shift to every wavevector."""
        shift = tuple(complex(s) for s in shift)
        if len(shift) != self.nvars:
            raise VariableMismatch("gauge shift has wrong length")
        return ExpSum(
            self.nvars,
            [(c, tuple(wi + si for wi, si in zip(w, shift)), ph) for c, w, ph in self.terms],
        )


@dataclass(frozen=True)
class HirotaPolynomial:
    """P(D_1, ..., D_k) as a list of (coefficient, exponent tuple) monomials."""

    nvars: int
    monomials: tuple

    def __init__(self, nvars, monomials):
        nvars = int(nvars)
        norm = []
        for coeff, expo in monomials:
            expo = tuple(int(e) for e in expo)
            if len(expo) != nvars:
                raise VariableMismatch("monomial exponent length mismatch")
            if any(e < 0 for e in expo):
                raise ValueError("exponents must be non-negative")
            if sum(expo) > MONOMIAL_DEGREE_CAP:
                raise ValueError(
                    f"monomial degree {sum(expo)} exceeds cap {MONOMIAL_DEGREE_CAP}"
                )
            norm.append((complex(coeff), expo))
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "monomials", tuple(norm))

    def __call__(self, v):
        v = list(v)
        total = 0.0 + 0.0j
        for coeff, expo in self.monomials:
            term = coeff
            for vi, e in zip(v, expo):
                if e:
                    term = term * vi ** e
            total += term
        return total

    def abs_eval(self, v):
        """P with |coefficients| at |v|: a cancellation-free magnitude."""
        v = [abs(x) for x in v]
        total = 0.0
        for coeff, expo in self.monomials:
            term = abs(coeff)
            for vi, e in zip(v, expo):
                if e:
                    term = term * vi ** e
            total += term
        return total

    @property
    def max_degree(self):
        return max((sum(e) for _, e in self.monomials), default=0)

    def plus_constant(self, c):
        return HirotaPolynomial(
            self.nvars, list(self.monomials) + [(c, (0,) * self.nvars)]
        )


def _mono(nvars, coeff, **powers):
    expo = [0] * nvars
    for key, val in powers.items():
        expo[int(key[1:]) - 1] = val
    return (coeff, tuple(expo))


def _poly(nvars, *monos):
    return HirotaPolynomial(nvars, monos)


# the hierarchy catalog; coefficients exactly as in the source equations.
# Variable slots are positional; `vars` names the physical variable each
# slot represents.
HIERARCHY_CATALOG = {
    # (D1^4 - 4 D1 D3 + 3 D2^2) tau.tau = 0
    "kp": {
        "vars": ("x1", "x2", "x3"),
        "equations": [
            _poly(3, _mono(3, 1, d1=4), _mono(3, -4, d1=1, d3=1), _mono(3, 3, d2=2))
        ],
    },
    # (D1^6 - 5 D1^3 D3 - 5 D3^2 + 9 D1 D5) tau.tau = 0
    "bkp1": {
        "vars": ("x1", "x3", "x5"),
        "equations": [
            _poly(
                3,
                _mono(3, 1, d1=6),
                _mono(3, -5, d1=3, d2=1),
                _mono(3, -5, d2=2),
                _mono(3, 9, d1=1, d3=1),
            )
        ],
    },
    # (D1^8 + 7 D1^5 D3 - 35 D1^2 D3^2 - 21 D1^3 D5 - 42 D3 D5 + 90 D1 D7)
    "bkp2": {
        "vars": ("x1", "x3", "x5", "x7"),
        "equations": [
            _poly(
                4,
                _mono(4, 1, d1=8),
                _mono(4, 7, d1=5, d2=1),
                _mono(4, -35, d1=2, d2=2),
                _mono(4, -21, d1=3, d3=1),
                _mono(4, -42, d2=1, d3=1),
                _mono(4, 90, d1=1, d4=1),
            )
        ],
    },
    # Dhat (D1^3 - D3) tau.tau = 0, slot 4 is the second-component xhat1
    "dkp1": {
        "vars": ("x1", "x3", "x5", "xhat1"),
        "equations": [
            _poly(4, _mono(4, 1, d1=3, d4=1), _mono(4, -1, d2=1, d4=1))
        ],
    },
    # Dhat (D1^5 + 5 D3 D1^2 - 6 D5) tau.tau = 0
    "dkp2": {
        "vars": ("x1", "x3", "x5", "xhat1"),
        "equations": [
            _poly(
                4,
                _mono(4, 1, d1=5, d4=1),
                _mono(4, 5, d1=2, d2=1, d4=1),
                _mono(4, -6, d3=1, d4=1),
            )
        ],
    },
}


def ll_equations(lam, mu):
    """The Landau-Lifschitz bilinear system over tau functions (f, f*, g, g*).

    Returns a list of (description, [(polynomial, left, right)]) where each
    equation is the sum of the listed bilinear applications; the pair names
    refer to keys in the tau dictionary.  Coefficients exactly as printed
    in the source system (including the first-order D1 in the last
    equation).
    """
    n = 2
    d1 = _poly(n, _mono(n, 1, d1=1))
    d2_minus_d1sq = _poly(n, _mono(n, 1, d2=1), _mono(n, -1, d1=2))
    neg = _poly(n, _mono(n, -1, d2=1), _mono(n, 1, d1=2))
    with_lam = d2_minus_d1sq.plus_constant(lam)
    mu_const = _poly(n, (_mono(n, mu, )))
    d2_d1_lam = _poly(n, _mono(n, 1, d2=1), _mono(n, -1, d1=1)).plus_constant(lam)
    return [
        ("D1(f.f* + g.g*)", [(d1, "f", "f_star"), (d1, "g", "g_star")]),
        (
            "(D2-D1^2)(f.f* - g.g*)",
            [(d2_minus_d1sq, "f", "f_star"), (neg, "g", "g_star")],
        ),
        (
            "(D2-D1^2+lam) f.g* + mu g.f*",
            [(with_lam, "f", "g_star"), (mu_const, "g", "f_star")],
        ),
        (
            "(D2-D1+lam) g.f* + mu f.g*",
            [(d2_d1_lam, "g", "f_star"), (mu_const, "f", "g_star")],
        ),
    ]


# ---------------------------------------------------------------------------
# bilinear application


def hirota_apply(p: HirotaPolynomial, f: ExpSum, g: ExpSum, x):
    """Exact evaluation of P(d_y) f(x+y) g(x-y) at y = 0."""
    if f.nvars != g.nvars or p.nvars != f.nvars:
        raise VariableMismatch("operands must share one variable set")
    x = np.asarray(x, dtype=complex)
    if f == g:
        total = 0.0 + 0.0j
        terms = f.terms
        for s, (cs, ws, ps) in enumerate(terms):
            wsv = np.asarray(ws)
            # diagonal: P(0) picks out the constant term
            total += cs * cs * p([0.0] * p.nvars) * np.exp(2 * (wsv @ x) + 2 * ps)
            for ct, wt, pt in terms[s + 1:]:
                wtv = np.asarray(wt)
                diff = wsv - wtv
                bracket = p(diff) + p(-diff)  # exact 0 for odd polynomials
                total += cs * ct * bracket * np.exp((wsv + wtv) @ x + ps + pt)
        return complex(total)
    total = 0.0 + 0.0j
    for cs, ws, ps in f.terms:
        wsv = np.asarray(ws)
        for ct, wt, pt in g.terms:
            wtv = np.asarray(wt)
            total += cs * ct * p(wsv - wtv) * np.exp((wsv + wtv) @ x + ps + pt)
    return complex(total)


def hirota_abs_scale(p: HirotaPolynomial, f: ExpSum, g: ExpSum, x):
    """Cancellation-free magnitude of the bilinear sum, for relative residuals."""
    x = np.asarray(x, dtype=complex)
    total = 0.0
    for cs, ws, ps in f.terms:
        wsv = np.asarray(ws)
        for ct, wt, pt in g.terms:
            wtv = np.asarray(wt)
            total += (
                abs(cs)
                * abs(ct)
                * p.abs_eval(wsv - wtv)
                * abs(np.exp((wsv + wtv) @ x + ps + pt))
            )
    return float(total)


def hirota_apply_theta(
    p: HirotaPolynomial, directions, z1, z2, omega, policy=DEFAULT_POLICY
):
    """P(D) f.g at the point where f = theta(. + z1), g = theta(. + z2).

    ``directions`` maps each variable slot (1-based) to a g-vector; the
    Hirota monomials expand binomially into products of mixed directional
    theta derivatives, exact up to the theta truncation error.
    """
    point = validate_siegel(omega)
    nv = p.nvars
    dirs = [np.asarray(directions[i + 1], dtype=complex) for i in range(nv)]
    order = p.max_degree
    jet1 = theta_jet(z1, point, dirs, order, policy)
    jet2 = (
        jet1
        if np.array_equal(np.asarray(z1, complex), np.asarray(z2, complex))
        else theta_jet(z2, point, dirs, order, policy)
    )
    total = 0.0 + 0.0j
    for coeff, alpha in p.monomials:
        acc = 0.0 + 0.0j
        ranges = [range(a + 1) for a in alpha]
        for beta in itertools.product(*ranges):
            sign = (-1) ** (sum(alpha) - sum(beta))
            binom = 1
            for a, b in zip(alpha, beta):
                binom *= math.comb(a, b)
            gamma = tuple(a - b for a, b in zip(alpha, beta))
            acc += sign * binom * jet1[beta] * jet2[gamma]
        total += coeff * acc
    return complex(total)


# ---------------------------------------------------------------------------
# hierarchy residuals


def theta_tau_spec(omega, z, directions, const=0.0):
    """A theta-backed tau: tau(x) = theta(sum_i x_i dir_i + z, omega), with an
    additive bilinear constant (P + const) tau.tau tested in residuals."""
    return {
        "omega": validate_siegel(omega),
        "z": np.atleast_1d(np.asarray(z, dtype=complex)),
        "directions": {k: np.asarray(v, dtype=complex) for k, v in directions.items()},
        "const": complex(const),
    }


def kp_theta_tau(wave, omega):
    """The KP tau spec of an effectivization solution.

    Variable renormalisation x2 -> (2/sqrt(3)) V and bilinear constant 16 d
    translate the four-term effectivization relations into the KP Hirota
    polynomial.
    """
    return theta_tau_spec(
        omega,
        wave.Z,
        {1: wave.U, 2: 2.0 / math.sqrt(3.0) * wave.V, 3: wave.W},
        const=16.0 * wave.d,
    )


def _residual_expsum(poly, f, g, x):
    value = hirota_apply(poly, f, g, x)
    scale = hirota_abs_scale(poly, f, g, x)
    return abs(value) / (scale + 1e-300)


def _residual_theta(poly, spec, x):
    x = np.asarray(x, dtype=complex)
    dirs = spec["directions"]
    nv = poly.nvars
    arg = spec["z"].astype(complex).copy()
    for i in range(nv):
        arg = arg + x[i] * dirs[i + 1]
    omega = spec["omega"]
    value = hirota_apply_theta(poly, dirs, arg, arg, omega)
    from .theta import theta as _theta

    tau2 = _theta(arg, omega) ** 2
    value = value + spec["const"] * tau2
    scale = 0.0
    for coeff, alpha in poly.monomials:
        mono = HirotaPolynomial(nv, [(coeff, alpha)])
        scale += abs(hirota_apply_theta(mono, dirs, arg, arg, omega))
    scale += abs(spec["const"] * tau2)
    return abs(value) / (scale + 1e-300)


def hierarchy_residual(name, tau_spec, points, params=None):
    """Relative residuals of the named hierarchy equations at the given points.

    name in {'kp', 'bkp1', 'bkp2', 'bkp', 'dkp1', 'dkp2', 'dkp', 'll'};
    'bkp'/'dkp' run both members of the pair.  tau_spec is an ExpSum, a
    theta-backed spec from :func:`theta_tau_spec`, or for 'll' a dict of
    four ExpSums keyed f, f_star, g, g_star.  params supplies (lambda, mu)
    for 'll'.  Returns {equation_label: [residual per point]}.
    """
    name = name.lower()
    if name == "ll":
        if not isinstance(tau_spec, dict) or set(tau_spec) < {"f", "f_star", "g", "g_star"}:
            raise SpecMismatch("ll needs tau functions f, f_star, g, g_star")
        lam = complex((params or {}).get("lambda", 0.0))
        mu = complex((params or {}).get("mu", 0.0))
        taus = tau_spec
        nv = taus["f"].nvars
        if nv != 2 or any(taus[k].nvars != 2 for k in ("f_star", "g", "g_star")):
            raise SpecMismatch("ll tau functions live on variables x1, x2")
        out = {}
        for label, pieces in ll_equations(lam, mu):
            res = []
            for x in points:
                value = 0.0 + 0.0j
                scale = 0.0
                for poly, left, right in pieces:
                    value += hirota_apply(poly, taus[left], taus[right], x)
                    scale += hirota_abs_scale(poly, taus[left], taus[right], x)
                res.append(abs(value) / (scale + 1e-300))
            out[label] = res
        return out

    if name in ("bkp", "dkp"):
        names = (name + "1", name + "2")
    elif name in HIERARCHY_CATALOG:
        names = (name,)
    else:
        raise SpecMismatch(f"unknown hierarchy {name!r}")
    out = {}
    for nm in names:
        entry = HIERARCHY_CATALOG[nm]
        poly = entry["equations"][0]
        if isinstance(tau_spec, ExpSum):
            if tau_spec.nvars != poly.nvars:
                raise SpecMismatch(
                    f"{nm} expects {poly.nvars} variables "
                    f"({', '.join(entry['vars'])}), tau has {tau_spec.nvars}"
                )
            out[nm] = [_residual_expsum(poly, tau_spec, tau_spec, x) for x in points]
        elif isinstance(tau_spec, dict) and "omega" in tau_spec:
            missing = [i + 1 for i in range(poly.nvars) if i + 1 not in tau_spec["directions"]]
            if missing:
                raise SpecMismatch(f"theta tau missing directions for slots {missing}")
            out[nm] = [_residual_theta(poly, tau_spec, x) for x in points]
        else:
            raise SpecMismatch("tau_spec must be an ExpSum or a theta tau spec")
    return out


def one_soliton(nvars, exponents, p, extra=None):
    """tau = 1 + exp(sum_k p^{e_k} x_k): the standard single-soliton tau.

    ``exponents`` lists the power of p carried by each variable slot;
    ``extra`` optionally overrides individual wavevector entries.
    """
    wave = [p ** e for e in exponents]
    if extra:
        for idx, val in extra.items():
            wave[idx - 1] = val
    zero = [0.0] * nvars
    return ExpSum(nvars, [(1.0, zero, 0.0), (1.0, wave, 0.0)])
