import logging

import numpy as np

from frictionfolio.exceptions.common.exceptions import DomainViolationError, InvalidArgumentError
from frictionfolio.exceptions.model.exceptions import CorrelationMatrixError
from frictionfolio.util.common.type import StringRepresentationMixin
from frictionfolio.util.numerics.tape import value_of


log = logging.getLogger(__name__)

# Brownian drivers, in matrix order
DRIVERS = ["S", "gamma", "v", "theta", "L"]

# (driver, driver, correlation field)
CORRELATION_PAIRS = [
    ("S", "v", "rho1"),
    ("S", "theta", "rho2"),
    ("v", "theta", "rho3"),
    ("S", "gamma", "rho4"),
    ("S", "L", "rho5"),
    ("gamma", "L", "rho6"),
]

PSD_TOLERANCE = 1e-12
HIGHAM_MAX_ITER = 200
HIGHAM_TOLERANCE = 1e-12


def _check_nonnegative(name, x):
    if np.any(np.asarray(x) < 0):
        raise DomainViolationError("{} must be nonnegative".format(name))


def _check_omega(omega):
    w = value_of(omega)
    if np.any(w < 0) or np.any(w > 1):
        raise DomainViolationError("Portfolio fraction omega must lie in [0, 1]")


def liquidity_mean_level(L, p):
    """theta_L(L) = theta_hat_L + lambda_TC * kappa_TC * L**xi."""
    _check_nonnegative("Illiquidity level L", L)
    return p.theta_hat_L + p.lambda_TC * p.kappa_TC * np.power(L, p.xi)


def _mixed_scale(beta, L, v, rho4):
    sqrt_v = np.sqrt(v)
    return np.sqrt((beta * L + rho4 * sqrt_v) ** 2 + (1.0 - rho4 ** 2) * v)


def expected_abs_mixed_brownian(beta, L, v, rho4, dt):
    """E|beta*L*dB_gamma + sqrt(v)*dB_S| over a step of length dt, where the two increments have correlation rho4."""
    if abs(rho4) > 1:
        raise InvalidArgumentError("Correlation rho4 must lie in [-1, 1], got {}".format(rho4))
    _check_nonnegative("Variance v", v)
    _check_nonnegative("Illiquidity level L", L)
    if not dt > 0:
        raise InvalidArgumentError("Time step must be positive, got {}".format(dt))
    return np.sqrt(2.0 / np.pi) * _mixed_scale(beta, L, v, rho4) * np.sqrt(dt)


def tc_factor(v, L, p):
    """sqrt(2/(pi*delta_t)) * kappa_TC * sqrt((beta*L + rho4*sqrt(v))**2 + (1-rho4**2)*v); the expected cost per unit
    time is this factor times (1-omega)*omega*W."""
    return np.sqrt(2.0 / (np.pi * p.delta_t)) * p.kappa_TC * _mixed_scale(p.beta, L, v, p.rho4)


def expected_tc_drift(omega, W, v, L, p):
    _check_omega(omega)
    _check_nonnegative("Variance v", v)
    _check_nonnegative("Illiquidity level L", L)
    return tc_factor(v, L, p) * (1.0 - omega) * omega * W


class StateDerivatives(object):
    """Partial derivatives of a value function at a batch of states. Missing derivatives are 0."""

    FIELDS = ["Q_t", "Q_W", "Q_v", "Q_theta", "Q_L",
              "Q_WW", "Q_vv", "Q_thetatheta", "Q_LL",
              "Q_Wv", "Q_Wtheta", "Q_WL", "Q_vtheta"]

    def __init__(self, **kwargs):
        for name in self.FIELDS:
            setattr(self, name, kwargs.pop(name, 0.0))
        if kwargs:
            raise InvalidArgumentError("Unknown derivative field(s): {}".format(", ".join(sorted(kwargs))))


class CoefficientBundle(StringRepresentationMixin):
    """Coefficients of the generator applied to a value function, diffusion terms already halved."""

    def __init__(self, w_drift, w_diffusion, v_drift, v_diffusion, theta_drift, theta_diffusion, l_drift,
                 l_diffusion, w_v_cross, w_theta_cross, w_l_cross, v_theta_cross):
        self.w_drift = w_drift
        self.w_diffusion = w_diffusion
        self.v_drift = v_drift
        self.v_diffusion = v_diffusion
        self.theta_drift = theta_drift
        self.theta_diffusion = theta_diffusion
        self.l_drift = l_drift
        self.l_diffusion = l_diffusion
        self.w_v_cross = w_v_cross
        self.w_theta_cross = w_theta_cross
        self.w_l_cross = w_l_cross
        self.v_theta_cross = v_theta_cross

    def apply(self, d):
        """Everything in the generator except the time derivative."""
        return (self.w_drift * d.Q_W + self.w_diffusion * d.Q_WW
                + self.v_drift * d.Q_v + self.v_diffusion * d.Q_vv
                + self.theta_drift * d.Q_theta + self.theta_diffusion * d.Q_thetatheta
                + self.l_drift * d.Q_L + self.l_diffusion * d.Q_LL
                + self.w_v_cross * d.Q_Wv + self.w_theta_cross * d.Q_Wtheta
                + self.w_l_cross * d.Q_WL + self.v_theta_cross * d.Q_vtheta)


def hjb_coefficients(s, omega, p):
    """Coefficients of the HJB generator at state ``s`` under portfolio fraction ``omega``.

    ``s`` fields may be scalars or arrays. ``omega`` may also be a tape variable; the bundle is then built on the tape
    and differentiable in the policy parameters. Negative illiquidity is clipped to 0."""
    _check_omega(omega)
    _check_nonnegative("Variance v", s.v)
    _check_nonnegative("Mean-reversion level theta", s.theta)
    W = np.asarray(s.W, dtype=float)
    v = np.asarray(s.v, dtype=float)
    theta = np.asarray(s.theta, dtype=float)
    L = np.maximum(np.asarray(s.L, dtype=float), 0.0)
    sqrt_v = np.sqrt(v)
    sqrt_v_theta = np.sqrt(v * theta)
    omega_W = omega * W

    w_drift = (p.r + (p.mu - p.r) * omega - tc_factor(v, L, p) * (1.0 - omega) * omega) * W
    w_variance = p.beta ** 2 * L ** 2 + v + 2.0 * p.rho4 * p.beta * sqrt_v * L
    return CoefficientBundle(
        w_drift=w_drift,
        w_diffusion=0.5 * w_variance * (omega_W * omega_W),
        v_drift=p.kappa * (theta - v),
        v_diffusion=0.5 * p.sigma1 ** 2 * v,
        theta_drift=p.lam * (p.eta - theta),
        theta_diffusion=0.5 * p.sigma2 ** 2 * theta,
        l_drift=p.alpha * (liquidity_mean_level(L, p) - L),
        l_diffusion=0.5 * p.sigma_L ** 2 * np.ones_like(W),
        w_v_cross=p.rho1 * p.sigma1 * v * omega_W,
        w_theta_cross=p.rho2 * p.sigma2 * sqrt_v_theta * omega_W,
        w_l_cross=(p.rho6 * p.beta * L + p.rho5 * sqrt_v) * p.sigma_L * omega_W,
        v_theta_cross=p.rho3 * p.sigma1 * p.sigma2 * sqrt_v_theta,
    )


def generator(s, omega, derivs, p):
    """The full generator applied to a value function: Q_t plus every drift, diffusion and cross term."""
    return derivs.Q_t + hjb_coefficients(s, omega, p).apply(derivs)


def quadratic_in_omega(s, derivs, p):
    """Returns ``(A0, A1, A2)`` with generator(omega) = A0 + A1*omega + A2*omega**2 at every state."""
    g0 = generator(s, 0.0, derivs, p)
    g_half = generator(s, 0.5, derivs, p)
    g1 = generator(s, 1.0, derivs, p)
    a2 = 2.0 * (g1 - 2.0 * g_half + g0)
    a1 = g1 - g0 - a2
    return g0, a1, a2


def greedy_omega(a1, a2):
    """Per-state maximiser of a1*omega + a2*omega**2 over [0, 1]."""
    a1 = np.asarray(a1, dtype=float)
    a2 = np.asarray(a2, dtype=float)
    concave = a2 < 0
    safe_a2 = np.where(concave, a2, -1.0)
    vertex = np.where(concave, np.clip(-a1 / (2.0 * safe_a2), 0.0, 1.0), 0.0)
    candidates = np.stack([np.zeros_like(a1), np.ones_like(a1), vertex])
    values = a1 * candidates + a2 * candidates ** 2
    return np.take_along_axis(candidates, np.argmax(values, axis=0)[np.newaxis], axis=0)[0]


class CorrelationSpec(StringRepresentationMixin):
    def __init__(self, matrix, factor, projected):
        self.matrix = matrix
        self.factor = factor
        self.projected = projected


def correlation_matrix(p):
    m = np.eye(len(DRIVERS))
    for a, b, field in CORRELATION_PAIRS:
        i, j = DRIVERS.index(a), DRIVERS.index(b)
        m[i, j] = m[j, i] = p.get(field)
    return m


def _project_psd(a):
    eigenvalues, eigenvectors = np.linalg.eigh(a)
    return (eigenvectors * np.maximum(eigenvalues, 0.0)) @ eigenvectors.T


def nearest_correlation(a):
    """Higham's alternating projections with Dykstra's correction onto unit-diagonal PSD matrices."""
    y = a.copy()
    correction = np.zeros_like(a)
    for _ in range(HIGHAM_MAX_ITER):
        r = y - correction
        x = _project_psd(r)
        correction = x - r
        y_new = x.copy()
        np.fill_diagonal(y_new, 1.0)
        if np.max(np.abs(y_new - y)) < HIGHAM_TOLERANCE:
            y = y_new
            break
        y = y_new
    return (y + y.T) / 2.0


def correlation_spec(p, project=False):
    m = correlation_matrix(p)
    eigenvalues = np.linalg.eigvalsh(m)
    projected = False
    if eigenvalues[0] < -PSD_TOLERANCE:
        if not project:
            raise CorrelationMatrixError(
                "The correlation matrix assembled from rho1..rho6 is not positive semidefinite (smallest eigenvalue "
                "{:.3e}). Adjust the correlations or enable projection onto the nearest correlation matrix."
                .format(eigenvalues[0]))
        m = nearest_correlation(m)
        projected = True
        log.warning("Correlation matrix projected onto the nearest positive semidefinite correlation matrix")
    eigenvalues, eigenvectors = np.linalg.eigh(m)
    factor = eigenvectors * np.sqrt(np.maximum(eigenvalues, 0.0))
    return CorrelationSpec(m, factor, projected)
