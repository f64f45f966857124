"""Kink profiles, potentials, weights, and coordinate maps.

The cubic-quintic case (powers p=2, q=4) has a closed-form kink; the
general competing-power case is built by integrating the first-order
profile equation and tabulating the result.  Everything here is pure and
immutable after construction, so profiles can be shared freely across
workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "NonlinearityParams",
    "KinkProfile",
    "PotentialSet",
    "CUBIC_QUINTIC",
    "cubic_quintic_profile",
    "build_general_profile",
    "threshold_R0",
    "z_of_x",
    "x_of_z",
]


@dataclass(frozen=True)
class NonlinearityParams:
    """Powers (p, q) of the competing nonlinearity and derived coefficients.

    The focusing term has coefficient ``a = q (p + 2) / (2 (q - p))`` and the
    defocusing term ``b = p (q + 2) / (2 (q - p))``; the frequency
    normalization forces ``a - b = 1``.
    """

    p: float
    q: float

    def __post_init__(self):
        if not (2.0 <= self.p < self.q):
            raise ValueError(f"powers must satisfy 2 <= p < q, got p={self.p}, q={self.q}")

    @property
    def a(self) -> float:
        return self.q * (self.p + 2.0) / (2.0 * (self.q - self.p))

    @property
    def b(self) -> float:
        return self.p * (self.q + 2.0) / (2.0 * (self.q - self.p))

    @property
    def is_cubic_quintic(self) -> bool:
        return self.p == 2.0 and self.q == 4.0

    def g(self, phi):
        """Squared slope factor: phi'^2 = phi^2 * g(phi) on the kink."""
        phi = np.asarray(phi, dtype=float)
        return (self.q * (1.0 - phi**self.p) - self.p * (1.0 - phi**self.q)) / (self.q - self.p)

    def v_minus(self, phi):
        """Potential of the imaginary-part linearization, 1 - a phi^p + b phi^q."""
        phi = np.asarray(phi, dtype=float)
        return 1.0 - self.a * phi**self.p + self.b * phi**self.q

    def v_plus(self, phi):
        """Potential of the real-part linearization, 1 - a(p+1) phi^p + b(q+1) phi^q."""
        phi = np.asarray(phi, dtype=float)
        return 1.0 - self.a * (self.p + 1.0) * phi**self.p + self.b * (self.q + 1.0) * phi**self.q

    def decay_rate_right(self) -> float:
        """Linearized decay rate kappa of 1 - phi ~ C exp(-kappa x) as x -> +inf."""
        return math.sqrt(self.p * self.q / 2.0)


CUBIC_QUINTIC = NonlinearityParams(2.0, 4.0)

# Tail thresholds below which the ODE table hands off to the linearized
# exponential asymptotes (sqrt(g) loses accuracy at the equilibria).
_TAIL_EPS = 1e-12


def _phi_sq_cq(x):
    """phi^2 = (1 + tanh x)/2 for the cubic-quintic kink, cancellation-free."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    neg = x < 0.0
    e = np.exp(2.0 * x[neg])
    out[neg] = e / (1.0 + e)
    out[~neg] = 1.0 / (1.0 + np.exp(-2.0 * x[~neg]))
    return out


def _one_minus_phi_sq_cq(x):
    """1 - phi^2 = (1 - tanh x)/2, stable for large positive x."""
    return _phi_sq_cq(-np.asarray(x, dtype=float))


@dataclass(frozen=True)
class KinkProfile:
    """Monotone kink profile connecting 0 (x -> -inf) to 1 (x -> +inf).

    For (p, q) = (2, 4) all evaluations use the closed form
    phi(x) = sqrt((1 + tanh(x - x0))/2).  Otherwise `table_x`/`table_phi`
    hold a uniformly sampled integration of phi' = phi sqrt(g(phi)) and
    evaluation interpolates with a local cubic; beyond the table the
    linearized exponential asymptotes take over.
    """

    params: NonlinearityParams
    x0: float = 0.0
    table_x: np.ndarray | None = field(default=None, repr=False)
    table_phi: np.ndarray | None = field(default=None, repr=False)
    table_h: float | None = None

    @property
    def closed_form(self) -> bool:
        return self.params.is_cubic_quintic

    def phi(self, x):
        """Profile value phi(x) in (0, 1)."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x) - self.x0
        if self.closed_form:
            out = np.sqrt(_phi_sq_cq(x))
        else:
            out = self._phi_table(x)
        return float(out[0]) if scalar else out

    def phi_sq(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x) - self.x0
        if self.closed_form:
            out = _phi_sq_cq(x)
        else:
            out = self._phi_table(x) ** 2
        return float(out[0]) if scalar else out

    def one_minus_phi_sq(self, x):
        """1 - phi(x)^2 without cancellation in the right tail."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x) - self.x0
        if self.closed_form:
            out = _one_minus_phi_sq_cq(x)
        else:
            phi = self._phi_table(x)
            out = np.where(phi > 0.9, (1.0 - phi) * (1.0 + phi), 1.0 - phi**2)
        return float(out[0]) if scalar else out

    def phi_prime(self, x):
        """Slope phi'(x) = phi sqrt(g(phi)) > 0; equals phi (1 - phi^2) at (2, 4)."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xs = np.atleast_1d(x) - self.x0
        if self.closed_form:
            out = np.sqrt(_phi_sq_cq(xs)) * _one_minus_phi_sq_cq(xs)
        else:
            phi = self._phi_table(xs)
            out = phi * np.sqrt(np.maximum(self.params.g(phi), 0.0))
        return float(out[0]) if scalar else out

    def _phi_table(self, x):
        """Tabulated evaluation: 4-point local cubic inside, asymptotes outside."""
        if self.table_x is None:
            raise ValueError("general profile evaluated before construction; use build_general_profile")
        tx, tp = self.table_x, self.table_phi
        h = self.table_h if self.table_h is not None else tx[1] - tx[0]
        out = np.empty_like(x)
        left = x < tx[0]
        right = x > tx[-1]
        mid = ~(left | right)
        # linearized tails: phi ~ C e^x on the left, 1 - phi ~ C' e^{-kappa x} on the right
        if left.any():
            out[left] = tp[0] * np.exp(x[left] - tx[0])
        if right.any():
            kappa = self.params.decay_rate_right()
            out[right] = 1.0 - (1.0 - tp[-1]) * np.exp(-kappa * (x[right] - tx[-1]))
        if mid.any():
            out[mid] = _cubic_interp_uniform(tx, tp, x[mid], h)
        return out


def _cubic_interp_uniform(tx, ty, xq, h):
    """4-point Lagrange cubic on a uniform table, clamped stencil at the ends."""
    s = (xq - tx[0]) / h
    j = np.floor(s).astype(np.int64)
    j = np.clip(j, 1, len(tx) - 3)
    t = s - j
    ym1, y0, y1, y2 = ty[j - 1], ty[j], ty[j + 1], ty[j + 2]
    w_m1 = -t * (t - 1.0) * (t - 2.0) / 6.0
    w_0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0
    w_1 = -(t + 1.0) * t * (t - 2.0) / 2.0
    w_2 = (t + 1.0) * t * (t - 1.0) / 6.0
    return w_m1 * ym1 + w_0 * y0 + w_1 * y1 + w_2 * y2


def cubic_quintic_profile(x0: float = 0.0) -> KinkProfile:
    """Closed-form (2, 4) kink."""
    return KinkProfile(CUBIC_QUINTIC, x0=x0)


def build_general_profile(params: NonlinearityParams, x_span=(-30.0, 30.0), h: float = 1e-3) -> KinkProfile:
    """Integrate the first-order profile equation and tabulate the kink.

    Classical RK4 on dphi/dx = phi sqrt(g(phi)) from the normalization
    phi(0)^p = 1/2, marching both directions on step ``h``.  Once phi (left)
    or 1 - phi (right) drops below 1e-12 the exponential asymptote is used
    to fill the remaining span.  The stored table satisfies the first-order
    invariant exactly by construction (phi' is re-derived from phi).

    Parameters
    ----------
    params : NonlinearityParams
        Powers of the nonlinearity; rejects p < 2 or q <= p.
    x_span : (float, float)
        Range the table must cover, containing 0.
    h : float
        Table spacing (> 0).
    """
    if h <= 0.0:
        raise ValueError("h must be positive")
    if not (x_span[0] < 0.0 < x_span[1]):
        raise ValueError("x_span must contain the anchor point 0")

    phi0 = 0.5 ** (1.0 / params.p)

    def slope(phi):
        g = params.g(phi)
        return phi * math.sqrt(g if g > 0.0 else 0.0)

    def rk4(phi, step):
        k1 = slope(phi)
        k2 = slope(phi + 0.5 * step * k1)
        k3 = slope(phi + 0.5 * step * k2)
        k4 = slope(phi + step * k3)
        return phi + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    n_left = int(math.ceil(-x_span[0] / h))
    n_right = int(math.ceil(x_span[1] / h))

    right = np.empty(n_right + 1)
    right[0] = phi0
    kappa = params.decay_rate_right()
    for i in range(n_right):
        p_cur = right[i]
        if 1.0 - p_cur < _TAIL_EPS:
            right[i + 1 :] = 1.0 - (1.0 - p_cur) * np.exp(-kappa * h * np.arange(1, n_right - i + 1))
            break
        right[i + 1] = min(rk4(p_cur, h), 1.0)

    left = np.empty(n_left + 1)
    left[0] = phi0
    for i in range(n_left):
        p_cur = left[i]
        if p_cur < _TAIL_EPS:
            left[i + 1 :] = p_cur * np.exp(-h * np.arange(1, n_left - i + 1))
            break
        left[i + 1] = max(rk4(p_cur, -h), 0.0)

    table_x = np.arange(-n_left, n_right + 1) * h
    table_phi = np.concatenate([left[::-1], right[1:]])
    table_x.setflags(write=False)
    table_phi.setflags(write=False)
    return KinkProfile(params, x0=0.0, table_x=table_x, table_phi=table_phi, table_h=h)


def threshold_R0(params: NonlinearityParams, profile: KinkProfile | None = None) -> float:
    """Smallest R with phi(R)^(q-p) = (p+2)/(q+2); valid transition points lie above it."""
    target = ((params.p + 2.0) / (params.q + 2.0)) ** (1.0 / (params.q - params.p))
    if params.is_cubic_quintic and (profile is None or profile.closed_form):
        # phi^2 = (1 + tanh R)/2 = target^2 solved in closed form
        return math.atanh(2.0 * target * target - 1.0)
    if profile is None:
        profile = build_general_profile(params)
    lo, hi = profile.table_x[0], profile.table_x[-1]
    f = lambda x: profile.phi(x) - target
    if f(lo) > 0.0 or f(hi) < 0.0:
        raise ValueError("profile table does not bracket the threshold")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15 * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


def z_of_x(x):
    """Coordinate map z = (x - ln(2 cosh x))/2, a bijection of R onto (-inf, 0).

    Evaluated as z = -log1p(exp(-2|x|))/2 + min(x, 0) to stay accurate in
    both tails (z ~ x as x -> -inf, z ~ -e^{-2x}/2 as x -> +inf).
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = -0.5 * np.log1p(np.exp(-2.0 * np.abs(x))) + np.minimum(x, 0.0)
    return float(out[0]) if scalar else out


def x_of_z(z):
    """Inverse of `z_of_x`; defined for z < 0 only.

    Safeguarded Newton using dz/dx = 1 - phi^2 in (0, 1), seeded from the
    tail asymptotics; round-trips to better than 1e-10 over |x| <= 20.
    """
    z_arr = np.asarray(z, dtype=float)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    if np.any(z_arr >= 0.0):
        raise ValueError("x_of_z requires z < 0 (the map's range is (-inf, 0))")
    out = np.empty_like(z_arr)
    for i, zv in enumerate(z_arr):
        out[i] = _x_of_z_scalar(zv)
    return float(out[0]) if scalar else out


def _x_of_z_scalar(z: float) -> float:
    if z > -0.05:
        x = -0.5 * math.log(-2.0 * z)  # right-tail asymptote
    elif z < -3.0:
        x = z  # left-tail asymptote
    else:
        x = 0.0
    lo, hi = -math.inf, math.inf
    for _ in range(80):
        fx = float(z_of_x(x)) - z
        if fx > 0.0:
            hi = min(hi, x)
        else:
            lo = max(lo, x)
        if x >= 0.0:
            t = math.exp(-2.0 * x)
            deriv = t / (1.0 + t)
        else:
            deriv = 1.0 / (1.0 + math.exp(2.0 * x))
        if deriv <= 0.0:
            break
        step = fx / deriv
        x_new = x - step
        if not (lo < x_new < hi):  # bisect when Newton leaves the bracket
            if math.isinf(lo) or math.isinf(hi):
                x_new = x - math.copysign(min(abs(step), 1.0), step)
            else:
                x_new = 0.5 * (lo + hi)
        if abs(x_new - x) < 1e-14 * max(1.0, abs(x_new)):
            x = x_new
            break
        x = x_new
    return x


@dataclass(frozen=True)
class PotentialSet:
    """Potentials and weights of the linearized operators for one transition point R.

    Bundles the x-line quantities (V-, V+, piecewise V_R, weight W_R) and,
    for the cubic-quintic case, their z-line transforms (tilde V_R, tilde
    W_R, diffusion coefficient a(z) = 1 - phi^2).
    """

    profile: KinkProfile
    R: float

    @property
    def z_R(self) -> float:
        return float(z_of_x(self.R))

    @property
    def one_minus_phi_sq_at_R(self) -> float:
        return float(self.profile.one_minus_phi_sq(self.R))

    def v_minus(self, x):
        return self.profile.params.v_minus(self.profile.phi(x))

    def v_plus(self, x):
        return self.profile.params.v_plus(self.profile.phi(x))

    def v_R(self, x):
        """V+ left of R, V- right of R (jump at x = R; left value on the node)."""
        x = np.asarray(x, dtype=float)
        return np.where(x <= self.R, self.v_plus(x), self.v_minus(x))

    def w_R(self, x):
        """Weight of H_R: 1 left of R, (1 - phi^2(x))/(1 - phi^2(R)) right of R."""
        x = np.asarray(x, dtype=float)
        return np.where(
            x <= self.R,
            1.0,
            self.profile.one_minus_phi_sq(x) / self.one_minus_phi_sq_at_R,
        )

    # z-line quantities, cubic-quintic only (phi(z) = e^z there)
    def _require_cq(self):
        if not self.profile.closed_form:
            raise ValueError("z-line machinery is defined for the cubic-quintic case only")

    def a_of_z(self, z):
        """Diffusion coefficient 1 - phi^2(z) = 1 - e^{2z}."""
        self._require_cq()
        return -np.expm1(2.0 * np.asarray(z, dtype=float))

    def tilde_v_R(self, z):
        self._require_cq()
        z = np.asarray(z, dtype=float)
        return np.where(z <= self.z_R, _tilde_v_left(z), _tilde_v_right(z))

    def tilde_w_R(self, z):
        self._require_cq()
        z = np.asarray(z, dtype=float)
        return np.where(z <= self.z_R, 1.0 / -np.expm1(2.0 * z), 1.0 / self.one_minus_phi_sq_at_R)


def _tilde_v_left(z):
    """(1 - 12 phi^2 + 15 phi^4)/(1 - phi^2) with phi^2 = e^{2z}."""
    s = np.exp(2.0 * np.asarray(z, dtype=float))
    return (1.0 - 12.0 * s + 15.0 * s * s) / -np.expm1(2.0 * np.asarray(z, dtype=float))


def _tilde_v_right(z):
    """1 - 3 phi^2 with phi^2 = e^{2z}."""
    return 1.0 - 3.0 * np.exp(2.0 * np.asarray(z, dtype=float))
