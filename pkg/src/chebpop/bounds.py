"""Bernstein-ellipse geometry and a-priori interpolation error bounds.

The bounds need two inputs per axis: an ellipse radius rho_i > 1 on which the
price is analytic, and a sup-norm bound V of the price on that ellipse. For
ratio-type parameters (moneyness, maturity) the admissible radius follows
from the interval bounds alone via zeta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def check_rho(rho):
    """Validate ellipse radii (each > 1); returns a tuple of floats."""
    r = tuple(float(x) for x in np.atleast_1d(rho))
    if len(r) == 0:
        raise ValueError("rho must have at least one component")
    for x in r:
        if not (x > 1.0):
            raise ValueError(f"ellipse radius must exceed 1, got {x}")
    return r


@dataclass(frozen=True)
class BoundInput:
    """Inputs of the multivariate bound: sup V, radii rho, degrees."""

    V: float
    rho: tuple
    degrees: tuple

    def __post_init__(self):
        V = float(self.V)
        if not (V >= 0.0):
            raise ValueError(f"V must be nonnegative, got {V}")
        rho = check_rho(self.rho)
        deg = tuple(int(n) for n in np.atleast_1d(self.degrees))
        if any(n < 0 for n in deg):
            raise ValueError(f"degrees must be nonnegative, got {deg}")
        if len(rho) != len(deg):
            raise ValueError(
                f"rho has {len(rho)} components, degrees has {len(deg)}"
            )
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "degrees", deg)


def rho_upper_from_interval(zeta):
    """Supremum zeta + sqrt(zeta^2 - 1) of admissible ellipse radii."""
    zeta = float(zeta)
    if not zeta > 1.0:
        raise ValueError(f"zeta must exceed 1, got {zeta}")
    return zeta + math.sqrt(zeta * zeta - 1.0)


def zeta_from_bounds(lo, hi):
    """(hi + lo) / (hi - lo) for a parameter ranging over [lo, hi], lo > 0."""
    lo, hi = float(lo), float(hi)
    if not 0.0 < lo < hi:
        raise ValueError(f"need 0 < lo < hi, got lo={lo}, hi={hi}")
    return (hi + lo) / (hi - lo)


def bound_1d(V, rho, N):
    """Univariate a-priori bound 4 V rho^(-N) / (rho - 1)."""
    V = float(V)
    if not V >= 0.0:
        raise ValueError(f"V must be nonnegative, got {V}")
    (rho,) = check_rho(rho)
    N = int(N)
    if N < 0:
        raise ValueError(f"N must be nonnegative, got {N}")
    return 4.0 * V * rho ** (-N) / (rho - 1.0)


def bound_multi(inp):
    """Multivariate bound 2^(D/2+1) V sqrt(sum_i rho_i^-2N_i prod_j ...)."""
    rho = np.asarray(inp.rho)
    deg = np.asarray(inp.degrees)
    D = rho.size
    inner = np.sum(rho ** (-2.0 * deg)) * np.prod(1.0 / (1.0 - rho ** -2.0))
    return 2.0 ** (D / 2.0 + 1.0) * inp.V * math.sqrt(inner)


def noisy_bound(inp, eps_bar):
    """bound_multi plus the node-noise term 2^D eps_bar prod(N_i + 1)."""
    eps_bar = float(eps_bar)
    if not eps_bar >= 0.0:
        raise ValueError(f"eps_bar must be nonnegative, got {eps_bar}")
    D = len(inp.rho)
    count = 1
    for n in inp.degrees:
        count *= n + 1
    return bound_multi(inp) + (2.0 ** D) * eps_bar * count


def plan_degrees(V, rho, target, max_per_axis=200):
    """Smallest equal-degree vector (n, ..., n) with bound_multi <= target.

    Raises if the target is unreachable within max_per_axis; a looser target
    never yields a larger n.
    """
    target = float(target)
    if not target > 0.0:
        raise ValueError(f"target must be positive, got {target}")
    rho = check_rho(rho)
    D = len(rho)
    for n in range(int(max_per_axis) + 1):
        b = bound_multi(BoundInput(V, rho, (n,) * D))
        if b <= target:
            return (n,) * D
    raise ValueError(
        f"target {target} not reachable with degrees up to {max_per_axis} "
        f"(bound at cap: {b})"
    )


def ellipse_boundary(rho, n_samples=360):
    """Boundary points (rho e^{i theta} + rho^-1 e^{-i theta}) / 2."""
    (rho,) = check_rho(rho)
    theta = np.linspace(0.0, 2.0 * np.pi, int(n_samples), endpoint=False)
    return (rho * np.exp(1j * theta) + np.exp(-1j * theta) / rho) / 2.0


def estimate_V(f, rho, n_samples=360):
    """Sample-based sup of |f| on the (generalized) ellipse boundary.

    f maps an (m, D) complex array of reference-domain points to complex
    values. The maximum-modulus principle puts the true sup on this
    boundary; with finitely many samples the estimate is a slight
    undershoot, so callers should pad it if used inside a bound.
    """
    rho = check_rho(rho)
    axes = [ellipse_boundary(r, n_samples) for r in rho]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    return float(np.max(np.abs(f(pts))))
