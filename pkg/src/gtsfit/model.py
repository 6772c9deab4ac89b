"""Bilateral tempered stable law: parameters and every closed-form quantity.

The law is parameterized by the 7-vector (mu, beta+, beta-, alpha+, alpha-,
lambda+, lambda-), fixed in that order everywhere (gradients, Hessians,
traces, serialized vectors). Each tail carries an exponentially tempered
power-law jump measure; beta < 0 on a side makes that side's total jump
mass finite (compound Poisson regime), beta in (0, 1) makes it infinite.

The characteristic exponent is

    Psi(xi) = i mu xi
            + alpha+ Gamma(-beta+) ((lambda+ - i xi)^beta+ - lambda+^beta+)
            + alpha- Gamma(-beta-) ((lambda- + i xi)^beta- - lambda-^beta-)

with the understanding that a side with |beta| < BETA_LIMIT switches to its
beta -> 0 limit, -alpha (Log(lambda -+ i xi) - log lambda), where the
Gamma(-beta) pole and the power-difference zero cancel. The gradient and
Hessian of Psi in the parameters are implemented analytically, including
the series values of the beta-derivatives at the limit point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .special import digamma, gamma_real, trigamma

PARAM_NAMES = (
    "mu",
    "beta_plus",
    "beta_minus",
    "alpha_plus",
    "alpha_minus",
    "lambda_plus",
    "lambda_minus",
)

# width of the beta -> 0 switching window
BETA_LIMIT = 1e-7

_EULER_GAMMA = 0.5772156649015329
# second-order Taylor coefficient of Gamma(z) about z = 0: gamma^2/2 + pi^2/12
_C2 = 0.5 * _EULER_GAMMA**2 + math.pi**2 / 12.0


class MomentStats(NamedTuple):
    mean: float
    variance: float
    skewness: float
    kurtosis: float


@dataclass(frozen=True)
class GtsParams:
    """Immutable parameter vector with domain validation at construction."""

    mu: float
    beta_plus: float
    beta_minus: float
    alpha_plus: float
    alpha_minus: float
    lambda_plus: float
    lambda_minus: float

    def __post_init__(self):
        vec = self.to_vector()
        if not np.all(np.isfinite(vec)):
            raise DomainError("parameters must be finite")
        for name in ("beta_plus", "beta_minus"):
            b = getattr(self, name)
            if b >= 1.0:
                raise DomainError(f"{name} = {b} must be < 1")
            # exact negative integers are a measure-zero nuisance set where
            # the beta-derivative algebra hits digamma poles; reject outright
            if b <= -1.0 and b == math.floor(b):
                raise DomainError(f"{name} = {b} is an excluded negative integer")
        for name in ("alpha_plus", "alpha_minus"):
            if getattr(self, name) < 0.0:
                raise DomainError(f"{name} must be >= 0")
        for name in ("lambda_plus", "lambda_minus"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be > 0")

    @classmethod
    def from_vector(cls, v) -> "GtsParams":
        v = np.asarray(v, dtype=float)
        if v.shape != (7,):
            raise DomainError(f"expected a 7-vector, got shape {v.shape}")
        return cls(*(float(x) for x in v))

    def to_vector(self) -> np.ndarray:
        return np.array(
            [
                self.mu,
                self.beta_plus,
                self.beta_minus,
                self.alpha_plus,
                self.alpha_minus,
                self.lambda_plus,
                self.lambda_minus,
            ]
        )


@dataclass(frozen=True)
class GbmParams:
    """Gaussian (drift, volatility) baseline for daily returns."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma)):
            raise DomainError("parameters must be finite")
        if self.sigma <= 0.0:
            raise DomainError("sigma must be > 0")


def _as_xi_array(xi):
    arr = np.atleast_1d(np.asarray(xi, dtype=float))
    scalar = np.isscalar(xi) or getattr(xi, "ndim", 1) == 0
    return arr, scalar


def levy_density(p: GtsParams, x):
    """Jump measure density alpha e^{-lambda |x|} / |x|^{1+beta}, per tail."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(arr == 0.0):
        raise DomainError("levy_density is undefined at x = 0")
    out = np.empty_like(arr)
    pos = arr > 0.0
    out[pos] = (
        p.alpha_plus
        * np.exp(-p.lambda_plus * arr[pos])
        / arr[pos] ** (1.0 + p.beta_plus)
    )
    neg = ~pos
    ax = -arr[neg]
    out[neg] = (
        p.alpha_minus * np.exp(-p.lambda_minus * ax) / ax ** (1.0 + p.beta_minus)
    )
    if np.isscalar(x) or getattr(x, "ndim", 1) == 0:
        return float(out[0])
    return out


def total_levy_mass(p: GtsParams) -> float:
    """Total jump intensity; math.inf when either active side has beta >= 0."""
    total = 0.0
    for alpha, beta, lam in (
        (p.alpha_plus, p.beta_plus, p.lambda_plus),
        (p.alpha_minus, p.beta_minus, p.lambda_minus),
    ):
        if alpha == 0.0:
            continue
        if beta >= 0.0:
            return math.inf
        total += alpha * lam**beta * gamma_real(-beta)
    return total


def _side_value(alpha, beta, lam, w):
    """One tail's contribution to Psi; w = lambda -+ i xi."""
    if alpha == 0.0:
        return np.zeros_like(w)
    if abs(beta) < BETA_LIMIT:
        return -alpha * (np.log(w) - math.log(lam))
    g = gamma_real(-beta)
    return alpha * g * (w**beta - lam**beta)


def characteristic_exponent(p: GtsParams, xi):
    """Psi(xi) = log of the characteristic function; Psi(0) = 0."""
    arr, scalar = _as_xi_array(xi)
    val = 1j * p.mu * arr
    val = val + _side_value(
        p.alpha_plus, p.beta_plus, p.lambda_plus, p.lambda_plus - 1j * arr
    )
    val = val + _side_value(
        p.alpha_minus, p.beta_minus, p.lambda_minus, p.lambda_minus + 1j * arr
    )
    return complex(val[0]) if scalar else val


def characteristic_function(p: GtsParams, xi):
    arr, scalar = _as_xi_array(xi)
    out = np.exp(characteristic_exponent(p, arr))
    return complex(out[0]) if scalar else out


def _side_derivs(alpha, beta, lam, w):
    """First and second partials of one tail term in (alpha, beta, lambda).

    Keys: a, b, l (first order) and ab, al, bb, bl, ll. The mu row and the
    cross-tail blocks of the Hessian are identically zero and handled by
    the callers.
    """
    L = np.log(w)
    ln_lam = math.log(lam)
    if abs(beta) < BETA_LIMIT:
        # series values at the limit point beta = 0: with D_k = L^k - log^k(lambda),
        # Gamma(-beta)(w^beta - lam^beta) = -D1 - beta(g D1 + D2/2) - ...
        d1 = L - ln_lam
        d2 = L * L - ln_lam**2
        d3 = L * L * L - ln_lam**3
        g0 = -d1
        g1 = -(_EULER_GAMMA * d1 + 0.5 * d2)
        g2 = -(2.0 * _C2 * d1 + _EULER_GAMMA * d2 + d3 / 3.0)
        iw = 1.0 / w
        il = 1.0 / lam
        e0 = il - iw
        return {
            "a": g0,
            "b": alpha * g1,
            "l": alpha * e0,
            "ab": g1,
            "al": e0,
            "bb": alpha * g2,
            "bl": -alpha * (_EULER_GAMMA * (iw - il) + L * iw - ln_lam * il),
            "ll": alpha * (iw * iw - il * il),
        }
    g = gamma_real(-beta)
    p0 = digamma(-beta)
    p1 = trigamma(-beta)
    wb = w**beta
    lb = lam**beta
    d0 = wb - lb
    d1 = wb * L - lb * ln_lam
    d2 = wb * L * L - lb * ln_lam**2
    e0 = w ** (beta - 1.0) - lam ** (beta - 1.0)
    e1 = w ** (beta - 1.0) * L - lam ** (beta - 1.0) * ln_lam
    return {
        "a": g * d0,
        "b": alpha * g * (d1 - p0 * d0),
        "l": alpha * g * beta * e0,
        "ab": g * (d1 - p0 * d0),
        "al": g * beta * e0,
        "bb": alpha * g * ((p0 * p0 + p1) * d0 - 2.0 * p0 * d1 + d2),
        "bl": alpha * g * ((1.0 - beta * p0) * e0 + beta * e1),
        "ll": alpha * g * beta * (beta - 1.0) * (w ** (beta - 2.0) - lam ** (beta - 2.0)),
    }


def grad_psi(p: GtsParams, xi):
    """dPsi/dV as a (7,) or (7, n) complex array, V ordered as PARAM_NAMES."""
    arr, scalar = _as_xi_array(xi)
    sp = _side_derivs(p.alpha_plus, p.beta_plus, p.lambda_plus, p.lambda_plus - 1j * arr)
    sm = _side_derivs(
        p.alpha_minus, p.beta_minus, p.lambda_minus, p.lambda_minus + 1j * arr
    )
    g = np.zeros((7, arr.size), dtype=complex)
    g[0] = 1j * arr
    g[1] = sp["b"]
    g[2] = sm["b"]
    g[3] = sp["a"]
    g[4] = sm["a"]
    g[5] = sp["l"]
    g[6] = sm["l"]
    return g[:, 0] if scalar else g


def hess_psi(p: GtsParams, xi):
    """d2Psi/dV2 as a (7, 7) or (7, 7, n) complex array; mu row/column zero,
    cross-tail blocks zero, alpha-alpha entries zero (Psi is linear in alpha)."""
    arr, scalar = _as_xi_array(xi)
    sp = _side_derivs(p.alpha_plus, p.beta_plus, p.lambda_plus, p.lambda_plus - 1j * arr)
    sm = _side_derivs(
        p.alpha_minus, p.beta_minus, p.lambda_minus, p.lambda_minus + 1j * arr
    )
    h = np.zeros((7, 7, arr.size), dtype=complex)
    entries = (
        (1, 1, sp["bb"]),
        (1, 3, sp["ab"]),
        (1, 5, sp["bl"]),
        (3, 5, sp["al"]),
        (5, 5, sp["ll"]),
        (2, 2, sm["bb"]),
        (2, 4, sm["ab"]),
        (2, 6, sm["bl"]),
        (4, 6, sm["al"]),
        (6, 6, sm["ll"]),
    )
    for i, j, v in entries:
        h[i, j] = v
        if i != j:
            h[j, i] = v
    return h[:, :, 0] if scalar else h


def cumulant(p: GtsParams, k: int) -> float:
    """k-th cumulant. Continuous through beta = 0 (Gamma(k - beta) is regular
    there for k >= 1), so no limit branch is needed."""
    if k < 1:
        raise DomainError("cumulant order must be >= 1")
    plus = p.alpha_plus * gamma_real(k - p.beta_plus) / p.lambda_plus ** (
        k - p.beta_plus
    )
    minus = p.alpha_minus * gamma_real(k - p.beta_minus) / p.lambda_minus ** (
        k - p.beta_minus
    )
    if k == 1:
        return p.mu + plus - minus
    return plus + (-1.0) ** k * minus


def moment_stats(p: GtsParams) -> MomentStats:
    """(mean, variance, skewness, full kurtosis) from the first four cumulants."""
    k1 = cumulant(p, 1)
    k2 = cumulant(p, 2)
    if k2 <= 0.0:
        raise DomainError("degenerate law: variance is not positive")
    k3 = cumulant(p, 3)
    k4 = cumulant(p, 4)
    return MomentStats(k1, k2, k3 / k2**1.5, 3.0 + k4 / k2**2)


def scale_time(p: GtsParams, t: float) -> GtsParams:
    """Law of the running sum at horizon t: mu and alpha scale, the rest fixed."""
    if not (t > 0.0 and math.isfinite(t)):
        raise DomainError("time scale must be positive and finite")
    return GtsParams(
        t * p.mu,
        p.beta_plus,
        p.beta_minus,
        t * p.alpha_plus,
        t * p.alpha_minus,
        p.lambda_plus,
        p.lambda_minus,
    )


def vg_exponent(mu: float, alpha: float, lambda_plus: float, lambda_minus: float, xi):
    """Characteristic exponent of the variance-gamma law, the beta+ = beta- = 0,
    alpha+ = alpha- = alpha reduction of the bilateral tempered stable family."""
    if alpha <= 0.0 or lambda_plus <= 0.0 or lambda_minus <= 0.0:
        raise DomainError("vg_exponent needs alpha > 0 and lambdas > 0")
    arr, scalar = _as_xi_array(xi)
    prod = lambda_plus * lambda_minus
    val = 1j * mu * arr - alpha * np.log(
        1.0 - 1j * (lambda_minus - lambda_plus) * arr / prod + arr * arr / prod
    )
    return complex(val[0]) if scalar else val
