"""Characteristic functions of the supported log-price models.

All functions return phi(z) = E[exp(i <z, X_T>)] for the T-forward log-price
increment X_T (spot excluded; pricers add the spot factor). Drifts are always
derived from the martingale condition phi(-i e_j) = e^{rT}, never stored.

Every cf_* accepts scalar z or an ndarray of z values (trailing axis of
length d for the multivariate ones) and broadcasts.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma


@dataclass(frozen=True, eq=False)
class BsMultiParams:
    """d-asset Black-Scholes: covariance matrix sigma, rate r, maturity T."""

    T: float
    r: float
    sigma: np.ndarray
    S0: np.ndarray = None

    def __post_init__(self):
        sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        sigma.setflags(write=False)
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "sigma", sigma)
        if self.S0 is not None:
            S0 = np.atleast_1d(np.asarray(self.S0, dtype=float))
            S0.setflags(write=False)
            object.__setattr__(self, "S0", S0)

    @property
    def d(self):
        return self.sigma.shape[0]


@dataclass(frozen=True)
class MertonParams:
    """Jump diffusion: diffusive vol sigma, Normal(alpha, beta^2) jumps with
    intensity lam."""

    T: float
    r: float
    sigma: float
    alpha: float
    beta: float
    lam: float

    def __post_init__(self):
        for name in ("T", "r", "sigma", "alpha", "beta", "lam"):
            object.__setattr__(self, name, float(getattr(self, name)))


@dataclass(frozen=True)
class CgmyParams:
    """Tempered-stable (CGMY) pure-jump model."""

    T: float
    r: float
    C: float
    G: float
    M: float
    Y: float

    def __post_init__(self):
        for name in ("T", "r", "C", "G", "M", "Y"):
            object.__setattr__(self, name, float(getattr(self, name)))


@dataclass(frozen=True)
class Heston2Params:
    """Two assets driven by one square-root variance factor.

    sigma1, sigma2 scale the assets' exposure to the common variance,
    sigma3 is the vol-of-vol; rho12 couples the asset Brownian motions,
    rho13/rho23 couple each asset to the variance driver.
    """

    T: float
    r: float
    v0: float
    kappa: float
    theta: float
    sigma1: float
    sigma2: float
    sigma3: float
    rho12: float
    rho13: float
    rho23: float

    def __post_init__(self):
        for name in ("T", "r", "v0", "kappa", "theta", "sigma1", "sigma2",
                     "sigma3", "rho12", "rho13", "rho23"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def correlation_matrix(self):
        return np.array([
            [1.0, self.rho12, self.rho13],
            [self.rho12, 1.0, self.rho23],
            [self.rho13, self.rho23, 1.0],
        ])


@dataclass(frozen=True)
class Heston1Params:
    """One-asset Heston, as the sigma1=1, sigma2=0 reduction of the
    two-asset parametrization."""

    T: float
    r: float
    v0: float
    kappa: float
    theta: float
    vol_of_vol: float
    rho: float

    def __post_init__(self):
        for name in ("T", "r", "v0", "kappa", "theta", "vol_of_vol", "rho"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def to_heston2(self):
        return Heston2Params(
            T=self.T, r=self.r, v0=self.v0, kappa=self.kappa,
            theta=self.theta, sigma1=1.0, sigma2=0.0,
            sigma3=self.vol_of_vol, rho12=0.0, rho13=self.rho, rho23=0.0,
        )


def validate(model, eta=None):
    """List of violated constraints; empty means the model is usable.

    For CGMY an optional dampening eta is checked against the strip of
    analyticity: eta must lie in (-min(G, M), G).
    """
    v = []
    if isinstance(model, Heston1Params):
        return validate(model.to_heston2())
    if isinstance(model, BsMultiParams):
        if model.T <= 0.0:
            v.append(f"T must be positive, got {model.T}")
        s = model.sigma
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            v.append(f"sigma must be square, got shape {s.shape}")
        else:
            if not np.allclose(s, s.T, rtol=1e-12, atol=1e-14):
                v.append("sigma must be symmetric")
            elif np.min(np.linalg.eigvalsh(s)) <= 0.0:
                v.append("sigma must be positive definite")
        if model.S0 is not None and np.any(model.S0 <= 0.0):
            v.append("S0 components must be positive")
    elif isinstance(model, MertonParams):
        if model.T <= 0.0:
            v.append(f"T must be positive, got {model.T}")
        if model.sigma <= 0.0:
            v.append(f"sigma must be positive, got {model.sigma}")
        if model.beta < 0.0:
            v.append(f"beta must be nonnegative, got {model.beta}")
        if model.lam <= 0.0:
            v.append(f"lam must be positive, got {model.lam}")
    elif isinstance(model, CgmyParams):
        if model.T <= 0.0:
            v.append(f"T must be positive, got {model.T}")
        for name in ("C", "G", "M"):
            if getattr(model, name) <= 0.0:
                v.append(f"{name} must be positive, got {getattr(model, name)}")
        if not (0.0 < model.Y < 2.0) or model.Y == 1.0:
            v.append(f"Y must lie in (0, 2) excluding 1, got {model.Y}")
        if model.M <= 1.0:
            v.append(f"M must exceed 1 for the martingale drift, got {model.M}")
        if eta is not None:
            lo, hi = -min(model.G, model.M), model.G
            for e in np.atleast_1d(eta):
                if not lo < float(e) < hi:
                    v.append(
                        f"eta {e} outside the admissible strip ({lo}, {hi})"
                    )
    elif isinstance(model, Heston2Params):
        if model.T <= 0.0:
            v.append(f"T must be positive, got {model.T}")
        for name in ("v0", "kappa", "theta", "sigma3"):
            if getattr(model, name) <= 0.0:
                v.append(f"{name} must be positive, got {getattr(model, name)}")
        for name in ("sigma1", "sigma2"):
            if getattr(model, name) < 0.0:
                v.append(
                    f"{name} must be nonnegative, got {getattr(model, name)}"
                )
        rho_ok = True
        for name in ("rho12", "rho13", "rho23"):
            rho = getattr(model, name)
            if not -1.0 <= rho <= 1.0:
                v.append(f"{name} must lie in [-1, 1], got {rho}")
                rho_ok = False
        if rho_ok:
            corr = model.correlation_matrix()
            if np.min(np.linalg.eigvalsh(corr)) < -1e-12:
                v.append("(rho12, rho13, rho23) is not a valid correlation "
                         "structure (matrix not positive semidefinite)")
        if model.sigma3 ** 2 > 2.0 * model.kappa * model.theta:
            v.append(
                f"Feller condition violated: sigma3^2 = {model.sigma3**2} > "
                f"2*kappa*theta = {2*model.kappa*model.theta}"
            )
    else:
        v.append(f"unknown model type {type(model).__name__}")
    return v


def _require_valid(model, eta=None):
    violations = validate(model, eta)
    if violations:
        raise ValueError("; ".join(violations))


def cf_bs(params, z):
    """exp(T (i <b, z> - <z, sigma z>/2)) with b_i = r - sigma_ii / 2.

    The bilinear form uses unconjugated products, so the analytic
    continuation to complex z is the plain formula.
    """
    _require_valid(params)
    z = np.asarray(z, dtype=complex)
    if z.shape == () and params.d == 1:
        z = z.reshape(1)
    if z.shape[-1] != params.d:
        raise ValueError(
            f"z has trailing length {z.shape[-1]}, model has d={params.d}"
        )
    b = params.r - 0.5 * np.diag(params.sigma)
    quad_form = np.einsum("...i,ij,...j->...", z, params.sigma, z)
    psi = 1j * np.einsum("...i,i->...", z, b.astype(complex)) - 0.5 * quad_form
    out = np.exp(params.T * psi)
    return complex(out) if out.shape == () else out


def cf_merton(params, z):
    """Jump-diffusion characteristic function, entire in z."""
    _require_valid(params)
    z = np.asarray(z, dtype=complex)
    jump_mean = np.exp(params.alpha + 0.5 * params.beta ** 2) - 1.0
    b = params.r - 0.5 * params.sigma ** 2 - params.lam * jump_mean
    psi = (
        1j * b * z
        - 0.5 * params.sigma ** 2 * z ** 2
        + params.lam
        * (np.exp(1j * params.alpha * z - 0.5 * params.beta ** 2 * z ** 2) - 1.0)
    )
    out = np.exp(params.T * psi)
    return complex(out) if out.shape == () else out


def cf_cgmy(params, z):
    """Tempered-stable characteristic function on the strip Im(z) in (-M, G).

    Principal-branch powers are safe: M - iz and G + iz stay in the right
    half-plane on the strip.
    """
    _require_valid(params)
    z = np.asarray(z, dtype=complex)
    G, M, Y = params.G, params.M, params.Y
    im = np.imag(z)
    if np.any(im <= -M) or np.any(im >= G):
        bad = np.atleast_1d(z).ravel()[
            int(np.argmax((np.atleast_1d(im) <= -M) | (np.atleast_1d(im) >= G)))
        ]
        raise ValueError(
            f"Im(z) = {bad.imag} outside the analyticity strip ({-M}, {G})"
        )
    g = _gamma(-Y)
    b = params.r - params.C * g * (
        (M - 1.0) ** Y - M ** Y + (G + 1.0) ** Y - G ** Y
    )
    levy = params.C * g * (
        (M - 1j * z) ** Y - M ** Y + (G + 1j * z) ** Y - G ** Y
    )
    out = np.exp(params.T * (1j * b * z + levy))
    return complex(out) if out.shape == () else out


def cf_heston2(params, z):
    """Two-asset Heston characteristic function.

    With zeta(z) = -(s1^2 z1^2 + s2^2 z2^2 + 2 rho12 s1 s2 z1 z2
    + i s1^2 z1 + i s2^2 z2), a = kappa - i rho13 s1 s3 z1 - i rho23 s2 s3 z2
    and c = sqrt(a^2 - s3^2 zeta) (root with Re >= 0, which keeps
    exp(-cT) bounded), the exponent is affine in v0:

        phi(z) = exp(i T r (z1 + z2))
                 * exp(v0/s3^2 * (a-c)(1-e^{-cT}) / (1-g e^{-cT})
                       + kappa theta / s3^2
                         * ((a-c) T - 2 log((1-g e^{-cT}) / (1-g))))

    with g = (a-c)/(a+c). This g-form stays on the principal log branch for
    the parameter ranges admitted by validate().
    """
    _require_valid(params)
    z = np.asarray(z, dtype=complex)
    if z.shape == ():
        raise ValueError("z must have a trailing axis of length 2")
    if z.shape[-1] != 2:
        raise ValueError(f"z has trailing length {z.shape[-1]}, expected 2")
    z1, z2 = z[..., 0], z[..., 1]
    s1, s2, s3 = params.sigma1, params.sigma2, params.sigma3
    T = params.T
    zeta = -(
        s1 ** 2 * z1 ** 2
        + s2 ** 2 * z2 ** 2
        + 2.0 * params.rho12 * s1 * s2 * z1 * z2
        + 1j * s1 ** 2 * z1
        + 1j * s2 ** 2 * z2
    )
    a = params.kappa - 1j * params.rho13 * s1 * s3 * z1 \
        - 1j * params.rho23 * s2 * s3 * z2
    c = np.sqrt(a * a - s3 ** 2 * zeta)
    g = (a - c) / (a + c)
    ect = np.exp(-c * T)
    denom = 1.0 - g * ect
    if np.any(np.abs(denom) < 1e-300) or np.any(np.abs(1.0 - g) < 1e-300):
        raise ValueError("degenerate denominator 1 - g exp(-cT) in cf_heston2")
    term_v = params.v0 / s3 ** 2 * (a - c) * (1.0 - ect) / denom
    term_t = params.kappa * params.theta / s3 ** 2 * (
        (a - c) * T - 2.0 * np.log(denom / (1.0 - g))
    )
    out = np.exp(1j * T * params.r * (z1 + z2)) * np.exp(term_v + term_t)
    return complex(out) if out.shape == () else out


def cf_heston1(T, r, v0, kappa, theta, vol_of_vol, rho, z):
    """Univariate Heston characteristic function.

    Reduction of cf_heston2 with z = (z, 0), unit asset-vol scaling
    (sigma1 = 1, sigma2 = 0), sigma3 = vol_of_vol and rho13 = rho.
    """
    params = Heston2Params(
        T=T, r=r, v0=v0, kappa=kappa, theta=theta,
        sigma1=1.0, sigma2=0.0, sigma3=vol_of_vol,
        rho12=0.0, rho13=rho, rho23=0.0,
    )
    z = np.asarray(z, dtype=complex)
    zz = np.stack([z, np.zeros_like(z)], axis=-1)
    return cf_heston2(params, zz)
