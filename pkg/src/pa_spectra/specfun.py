"""Special functions for the trapped-pair model.

Real log-Gamma with an explicit sign, signed Gamma ratios, Kummer's M,
Tricomi's U for the b = 3/2 case used by the trap wavefunctions, and the
half-integer binomial coefficient of the small-scattering-length energy
expansion.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_genlaguerre

KUMMER_X_MAX = 400.0
# below this U comes from the two-M connection formula, above from a
# Laguerre rule for the Laplace integral plus downward recurrence in a
U_SWITCH_X = 2.0
U_LAGUERRE_NODES = 96


@dataclass(frozen=True)
class SignedLog:
    log_magnitude: float
    sign: int

    @property
    def value(self):
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    def __mul__(self, other):
        return SignedLog(self.log_magnitude + other.log_magnitude, self.sign * other.sign)

    def __truediv__(self, other):
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero SignedLog")
        return SignedLog(self.log_magnitude - other.log_magnitude, self.sign * other.sign)


def _is_pole(x):
    return x <= 0.0 and x == math.floor(x)


def ln_gamma_signed(x):
    """log|Gamma(x)| and sign(Gamma(x)) for real x off the poles."""
    x = float(x)
    if _is_pole(x):
        raise ValueError(f"Gamma has a pole at x = {x!r}")
    if x > 0.0:
        return SignedLog(math.lgamma(x), 1)
    sign = -1 if math.floor(x) % 2 else 1
    return SignedLog(math.lgamma(x), sign)


def gamma_ratio(a, b):
    """Gamma(a) / Gamma(b), evaluated in log space."""
    return (ln_gamma_signed(a) / ln_gamma_signed(b)).value


def rgamma(x):
    """1/Gamma(x), zero at the poles."""
    if _is_pole(float(x)):
        return 0.0
    g = ln_gamma_signed(x)
    return g.sign * math.exp(-g.log_magnitude)


def kummer_m(a, b, x):
    """Kummer's confluent hypergeometric M(a, b, x) for 0 <= x <= 400.

    Power series with compensated summation; accepts scalar or array x.
    """
    if _is_pole(float(b)):
        raise ValueError(f"M(a, b, x) undefined for b = {b!r}")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr < 0.0) or np.any(x_arr > KUMMER_X_MAX):
        raise ValueError(f"kummer_m domain is 0 <= x <= {KUMMER_X_MAX}")
    total = np.ones_like(x_arr)
    comp = np.zeros_like(x_arr)
    term = np.ones_like(x_arr)
    quiet = np.zeros(x_arr.shape, dtype=int)
    k = 0
    while True:
        term = term * ((a + k) / (b + k)) * x_arr / (k + 1)
        k += 1
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        small = np.abs(term) <= 1e-17 * np.abs(total)
        quiet = np.where(small, quiet + 1, 0)
        if np.all(quiet >= 3) or np.all(term == 0.0):
            break
        if k > 5000:
            raise RuntimeError("Kummer series failed to converge")
    return float(total[0]) if np.ndim(x) == 0 else total


def _u_polynomial(n, b, x):
    # U(-n, b, x) = sum_k C(n,k) (b+k)_{n-k} (-1)^k ... written via M
    poch = 1.0
    for j in range(n):
        poch *= b + j
    return (-1) ** n * poch * kummer_m(-n, b, x)


def _u_connection(a, b, x):
    x = np.asarray(x, dtype=float)
    t1 = gamma_ratio(1.0 - b, 1.0) * rgamma(a - b + 1.0)
    t2 = gamma_ratio(b - 1.0, 1.0) * rgamma(a)
    out = t1 * kummer_m(a, b, x)
    if t2 != 0.0:
        out = out + t2 * x ** (1.0 - b) * kummer_m(a - b + 1.0, 2.0 - b, x)
    return out


@lru_cache(maxsize=64)
def _laguerre_rule(alpha_minus_one):
    return roots_genlaguerre(U_LAGUERRE_NODES, alpha_minus_one)


def _u_laplace(a, b, x):
    """U via its Laplace integral at a+m, a+m+1 >= 1, then recurrence down to a."""
    x = np.asarray(x, dtype=float)
    m = max(0, math.ceil(1.0 - a))
    alpha = a + m
    s, w = _laguerre_rule(alpha - 1.0)
    ratio = 1.0 + s[None, :] / x[:, None]
    # U(alpha) = x^-alpha / Gamma(alpha) * sum w (1 + s/x)^(b-alpha-1)
    u0 = (ratio ** (b - alpha - 1.0)) @ w * x**-alpha * rgamma(alpha)
    # U(alpha+1) uses the same nodes with one more power of s
    u1 = (ratio ** (b - alpha - 2.0) * s[None, :]) @ w * x ** (-alpha - 1.0) * rgamma(alpha + 1.0)
    # U(c-1) = (2c - b + x) U(c) - c (c - b + 1) U(c+1)
    c = alpha
    for _ in range(m):
        u0, u1 = (2.0 * c - b + x) * u0 - c * (c - b + 1.0) * u1, u0
        c -= 1.0
    return u0


def tricomi_u(a, b=1.5, x=1.0):
    """Tricomi's U(a, b, x) for x > 0 and non-integer b (here b = 3/2)."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr <= 0.0):
        raise ValueError("tricomi_u needs x > 0")
    if float(b) == math.floor(b):
        raise ValueError("tricomi_u supports non-integer b only")
    if _is_pole(float(a)):
        out = _u_polynomial(int(round(-a)), b, x_arr)
    else:
        out = np.empty_like(x_arr)
        low = x_arr < U_SWITCH_X
        if np.any(low):
            out[low] = _u_connection(a, b, x_arr[low])
        if np.any(~low):
            out[~low] = _u_laplace(a, b, x_arr[~low])
    return float(out[0]) if np.ndim(x) == 0 else out


def gen_binom_half(n):
    """Gamma(n + 3/2) / (Gamma(3/2) n!), i.e. (2n+1)!! / (2^n n!)."""
    n = int(n)
    if n < 0:
        raise ValueError("n must be >= 0")
    return math.exp(math.lgamma(n + 1.5) - math.lgamma(1.5) - math.lgamma(n + 1.0))
