"""Payoff specifications, their damped Fourier transforms, and path payoffs.

payoff_ft returns f_hat(z - i eta) for the payoff's own dampening eta, so
pricing code works with a plain integral over real z and never handles the
contour shift itself. Path-dependent payoffs have no transform and are
evaluated on simulated path summaries instead.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class PayoffKind(str, Enum):
    CALL = "call"
    PUT = "put"
    DIGITAL_DOWN_OUT = "digital_down_out"
    ASSET_OR_NOTHING_DOWN_OUT = "asset_or_nothing_down_out"
    MIN_CALL2 = "min_call2"
    BASKET = "basket"
    LOOKBACK = "lookback"
    BARRIER = "barrier"
    AMERICAN_PUT = "american_put"


# kinds with a closed-form damped transform (Fourier-priceable)
FOURIER_KINDS = frozenset({
    PayoffKind.CALL,
    PayoffKind.PUT,
    PayoffKind.DIGITAL_DOWN_OUT,
    PayoffKind.ASSET_OR_NOTHING_DOWN_OUT,
    PayoffKind.MIN_CALL2,
})

# kinds priced by simulation on path summaries
PATH_KINDS = frozenset({
    PayoffKind.BASKET,
    PayoffKind.LOOKBACK,
    PayoffKind.BARRIER,
    PayoffKind.AMERICAN_PUT,
    PayoffKind.MIN_CALL2,
})

_DEFAULT_ETA = {
    PayoffKind.CALL: (-2.0,),
    PayoffKind.PUT: (1.0,),
    PayoffKind.DIGITAL_DOWN_OUT: (-1.0,),
    PayoffKind.ASSET_OR_NOTHING_DOWN_OUT: (-2.0,),
    PayoffKind.MIN_CALL2: (-2.0, -2.0),
}


def default_eta(kind):
    """A fixed dampening strictly inside the kind's admissible range."""
    kind = PayoffKind(kind)
    if kind not in _DEFAULT_ETA:
        raise ValueError(f"{kind.value} carries no dampening")
    return _DEFAULT_ETA[kind]


def _check_eta(kind, eta):
    if kind is PayoffKind.MIN_CALL2:
        if len(eta) != 2 or not all(e < -1.0 for e in eta):
            raise ValueError(
                f"min_call2 needs two components each < -1, got {eta}"
            )
        return
    if len(eta) != 1:
        raise ValueError(f"{kind.value} takes a single eta, got {eta}")
    e = eta[0]
    if kind in (PayoffKind.CALL, PayoffKind.ASSET_OR_NOTHING_DOWN_OUT):
        ok, rng = e < -1.0, "< -1"
    elif kind is PayoffKind.PUT:
        ok, rng = e > 0.0, "> 0"
    else:  # digital
        ok, rng = e < 0.0, "< 0"
    if not ok:
        raise ValueError(f"{kind.value} needs eta {rng}, got {e}")


@dataclass(frozen=True)
class PayoffSpec:
    """Payoff kind, strike, optional barrier level, optional dampening.

    eta defaults per kind for transform-priced payoffs; path-dependent
    kinds must not carry one.
    """

    kind: PayoffKind
    K: float
    barrier: float = None
    eta: tuple = None

    def __post_init__(self):
        kind = PayoffKind(self.kind)
        object.__setattr__(self, "kind", kind)
        K = float(self.K)
        if not K > 0.0:
            raise ValueError(f"strike must be positive, got {K}")
        object.__setattr__(self, "K", K)
        if kind is PayoffKind.BARRIER:
            if self.barrier is None:
                raise ValueError("barrier kind needs a barrier level")
            object.__setattr__(self, "barrier", float(self.barrier))
        elif self.barrier is not None:
            raise ValueError(f"{kind.value} takes no barrier level")
        if kind in FOURIER_KINDS:
            eta = self.eta
            if eta is None:
                eta = default_eta(kind)
            eta = tuple(float(e) for e in np.atleast_1d(eta))
            _check_eta(kind, eta)
            object.__setattr__(self, "eta", eta)
        elif self.eta is not None:
            raise ValueError(f"{kind.value} carries no dampening")


def _strike_power(K, w):
    # K^w as exp(w ln K), stable for complex w
    return np.exp(w * np.log(K))


def payoff_ft(spec, z):
    """Damped transform f_hat(z - i eta) of a univariate payoff, real z.

    Closed forms (w = iz + eta):
        call / put:        K^(w+1) / (w (w+1))
        digital:          -K^w / w
        asset-or-nothing: -K^(w+1) / (w+1)
    The sign constraints on eta keep every denominator away from zero
    for real z.
    """
    kind = spec.kind
    if kind not in FOURIER_KINDS or kind is PayoffKind.MIN_CALL2:
        raise ValueError(f"{kind.value} has no univariate transform")
    z = np.asarray(z, dtype=complex)
    w = 1j * z + spec.eta[0]
    if kind in (PayoffKind.CALL, PayoffKind.PUT):
        denom = w * (w + 1.0)
    elif kind is PayoffKind.DIGITAL_DOWN_OUT:
        denom = w
    else:
        denom = w + 1.0
    if np.any(denom == 0):
        raise ValueError(f"transform pole hit at z={z}, eta={spec.eta[0]}")
    if kind in (PayoffKind.CALL, PayoffKind.PUT):
        out = _strike_power(spec.K, w + 1.0) / denom
    elif kind is PayoffKind.DIGITAL_DOWN_OUT:
        out = -_strike_power(spec.K, w) / denom
    else:
        out = -_strike_power(spec.K, w + 1.0) / denom
    return complex(out) if out.shape == () else out


def min_call_ft(K, eta, z):
    """Damped transform of (min(e^x1, e^x2) - K)^+, each eta_j < -1.

    Splitting {x1, x2 > ln K} at x1 = x2 and integrating each wedge in
    closed form gives, with w_j = i z_j + eta_j,

        f_hat(z - i eta) = -K^(1 + w1 + w2) / (w1 w2 (1 + w1 + w2)).

    Symmetric in the two assets; strike enters only through the power.
    """
    K = float(K)
    if not K > 0.0:
        raise ValueError(f"strike must be positive, got {K}")
    eta = tuple(float(e) for e in np.atleast_1d(eta))
    if len(eta) != 2 or not all(e < -1.0 for e in eta):
        raise ValueError(f"need two dampening components each < -1, got {eta}")
    z = np.asarray(z, dtype=complex)
    if z.shape == () or z.shape[-1] != 2:
        raise ValueError("z must have a trailing axis of length 2")
    w1 = 1j * z[..., 0] + eta[0]
    w2 = 1j * z[..., 1] + eta[1]
    s = 1.0 + w1 + w2
    out = -_strike_power(K, 1.0 + w1 + w2) / (w1 * w2 * s)
    return complex(out) if out.shape == () else out


def path_payoff(spec, summary):
    """Payoff of a path-dependent (or terminal) claim on a path summary.

    summary carries arrays of shape (n_paths, d): terminal values,
    per-asset running maxima and minima. Returns shape (n_paths,).
    """
    kind = spec.kind
    terminal = np.atleast_2d(np.asarray(summary.terminal, dtype=float))
    if kind is PayoffKind.BASKET:
        return np.maximum(terminal.mean(axis=1) - spec.K, 0.0)
    if kind is PayoffKind.LOOKBACK:
        rmax = np.atleast_2d(np.asarray(summary.running_max, dtype=float))
        return np.maximum(rmax.mean(axis=1) - spec.K, 0.0)
    if kind is PayoffKind.BARRIER:
        rmin = np.atleast_2d(np.asarray(summary.running_min, dtype=float))
        alive = np.all(rmin >= spec.barrier, axis=1)
        basket = np.maximum(terminal.mean(axis=1) - spec.K, 0.0)
        return basket * alive
    if kind is PayoffKind.AMERICAN_PUT:
        # intrinsic value; early exercise is the FD pricer's job
        return np.maximum(spec.K - terminal[:, 0], 0.0)
    if kind is PayoffKind.MIN_CALL2:
        return np.maximum(terminal.min(axis=1) - spec.K, 0.0)
    raise ValueError(f"{kind.value} is not a path payoff")
