"""Monte-Carlo pricing of basket and path-dependent payoffs.

Paths are simulated in fixed-size blocks, each with its own counter-based
RNG stream keyed by (seed, block index). Accumulators merge in block order,
so prices are bit-identical for a given seed regardless of how many worker
threads run the blocks.

Schemes: multivariate Black-Scholes takes exact log-normal steps (and
samples the terminal law in one step when the payoff only looks at terminal
values); the jump diffusion takes exact diffusion steps plus a compound
Poisson jump whose sum, given the count, is drawn exactly; Heston uses
full-truncation Euler on the variance, one independent variance process
per asset.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import models, payoffs
from .base import PriceResult

_PAIRS_PER_BLOCK = 1 << 15


@dataclass(frozen=True)
class McConfig:
    n_paths: int = 1_000_000
    steps_per_year: int = 400
    antithetic: bool = True
    seed: int = 42
    n_threads: int = 1

    def __post_init__(self):
        if self.n_paths < 2:
            raise ValueError("n_paths must be at least 2")
        if self.antithetic and self.n_paths % 2:
            raise ValueError("n_paths must be even with antithetic variates")
        if self.steps_per_year < 1:
            raise ValueError("steps_per_year must be >= 1")
        if self.n_threads < 1:
            raise ValueError("n_threads must be >= 1")


@dataclass(frozen=True)
class PathSummary:
    """Per-path, per-asset terminal value and running extrema.

    running_max / running_min are None when the simulation only sampled
    terminal values; payoffs that need extrema then fail loudly instead of
    silently using wrong numbers.
    """

    terminal: np.ndarray
    running_max: np.ndarray = None
    running_min: np.ndarray = None


class StreamingMoments:
    """One-pass mean/variance accumulation with stable block merging."""

    def __init__(self):
        self.n = 0
        self.mean = 0.0
        self.M2 = 0.0

    def push(self, values):
        values = np.asarray(values, dtype=float)
        nb = values.size
        if nb == 0:
            return
        mb = float(values.mean())
        m2b = float(((values - mb) ** 2).sum())
        n_tot = self.n + nb
        delta = mb - self.mean
        self.mean += delta * nb / n_tot
        self.M2 += m2b + delta * delta * self.n * nb / n_tot
        self.n = n_tot

    @property
    def variance(self):
        if self.n < 2:
            return 0.0
        return self.M2 / (self.n - 1)


def confidence_bound(moments):
    """95% half-width 1.96 * sqrt(sample variance / n)."""
    if moments.n == 0:
        return float("inf")
    return 1.96 * float(np.sqrt(moments.variance / moments.n))


def bs_log_step(x, dt, z, drift, chol):
    """Exact log step: x + drift dt + sqrt(dt) (chol z)."""
    return x + drift * dt + np.sqrt(dt) * (z @ chol.T)


def merton_log_step(x, dt, z, n_jumps, z_jump, params):
    """Exact diffusion step plus compound-Poisson jump sum.

    Given the Poisson count N, the sum of Normal(alpha, beta^2) jump sizes
    is Normal(alpha N, beta^2 N), drawn through z_jump.
    """
    b = (
        params.r
        - 0.5 * params.sigma ** 2
        - params.lam * (np.exp(params.alpha + 0.5 * params.beta ** 2) - 1.0)
    )
    diffusion = b * dt + params.sigma * np.sqrt(dt) * z
    jumps = params.alpha * n_jumps + params.beta * np.sqrt(n_jumps) * z_jump
    return x + diffusion + jumps


def heston_step(x, v, dt, z_asset, z_vol, params):
    """Full-truncation Euler: v+ = max(v, 0) in drift and diffusion.

    z_asset and z_vol must already carry the asset-variance correlation.
    """
    v_plus = np.maximum(v, 0.0)
    sq = np.sqrt(v_plus * dt)
    x_new = x + (params.r - 0.5 * v_plus) * dt + sq * z_asset
    v_new = v + params.kappa * (params.theta - v_plus) * dt \
        + params.vol_of_vol * sq * z_vol
    return x_new, v_new


def _needs_path(kind):
    return kind in (payoffs.PayoffKind.LOOKBACK, payoffs.PayoffKind.BARRIER)


def _psd_factor(sigma):
    """Covariance factor F with F F^T = sigma, tolerating semidefiniteness.

    Degenerate covariances (zero-volatility assets) simulate fine even
    though the transform pricers reject them, so fall back to an
    eigenvalue factor when the Cholesky fails.
    """
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        w, q = np.linalg.eigh(sigma)
        return q * np.sqrt(np.maximum(w, 0.0))


def _block_rng(seed, index):
    return np.random.Generator(np.random.Philox(key=[int(seed), int(index)]))


def _extrema_update(track, x_list):
    for rmax, rmin, x in zip(track["max"], track["min"], x_list):
        np.maximum(rmax, x, out=rmax)
        np.minimum(rmin, x, out=rmin)


def _summaries(x_list, track=None):
    if track is None:
        return [PathSummary(np.exp(x)) for x in x_list]
    return [
        PathSummary(np.exp(x), np.exp(rmax), np.exp(rmin))
        for x, rmax, rmin in zip(x_list, track["max"], track["min"])
    ]


def _walk(step_fn, log_s0, n, antithetic, n_steps, monitor):
    """Shared walking loop; step_fn advances all branches one step."""
    x_list = [np.tile(log_s0, (n, 1))]
    if antithetic:
        x_list.append(np.tile(log_s0, (n, 1)))
    track = None
    if monitor:
        track = {
            "max": [x.copy() for x in x_list],
            "min": [x.copy() for x in x_list],
        }
    for _ in range(n_steps):
        x_list = step_fn(x_list)
        if track is not None:
            _extrema_update(track, x_list)
    return _summaries(x_list, track)


def _simulate_block(payoff, model, log_s0, T, n, antithetic, n_steps, rng):
    """Payoff samples for one block of n pairs (or n paths)."""
    d = log_s0.size
    monitor = _needs_path(payoff.kind)

    if isinstance(model, models.BsMultiParams):
        chol = _psd_factor(model.sigma)
        drift = model.r - 0.5 * np.diag(model.sigma)
        if not monitor:
            z = rng.standard_normal((n, d))
            x_list = [bs_log_step(log_s0, T, z, drift, chol)]
            if antithetic:
                x_list.append(bs_log_step(log_s0, T, -z, drift, chol))
            summaries = _summaries(x_list)
        else:
            dt = T / n_steps

            def step(x_list):
                z = rng.standard_normal((n, d))
                out = [bs_log_step(x_list[0], dt, z, drift, chol)]
                if antithetic:
                    out.append(bs_log_step(x_list[1], dt, -z, drift, chol))
                return out

            summaries = _walk(step, log_s0, n, antithetic, n_steps, monitor)
    elif isinstance(model, models.MertonParams):
        if not monitor:
            z = rng.standard_normal((n, d))
            nj = rng.poisson(model.lam * T, size=(n, d)).astype(float)
            zj = rng.standard_normal((n, d))
            x_list = [merton_log_step(log_s0, T, z, nj, zj, model)]
            if antithetic:
                x_list.append(merton_log_step(log_s0, T, -z, nj, -zj, model))
            summaries = _summaries(x_list)
        else:
            dt = T / n_steps
            lam_dt = model.lam * dt

            def step(x_list):
                z = rng.standard_normal((n, d))
                nj = rng.poisson(lam_dt, size=(n, d)).astype(float)
                zj = rng.standard_normal((n, d))
                out = [merton_log_step(x_list[0], dt, z, nj, zj, model)]
                if antithetic:
                    out.append(
                        merton_log_step(x_list[1], dt, -z, nj, -zj, model)
                    )
                return out

            summaries = _walk(step, log_s0, n, antithetic, n_steps, monitor)
    elif isinstance(model, models.Heston1Params):
        # always stepped; each asset has its own variance process
        dt = T / n_steps
        rho = model.rho
        rho_perp = np.sqrt(1.0 - rho * rho)
        v_list = [np.full((n, d), model.v0)]
        if antithetic:
            v_list.append(np.full((n, d), model.v0))

        def step(x_list):
            z_vol = rng.standard_normal((n, d))
            z_perp = rng.standard_normal((n, d))
            z_asset = rho * z_vol + rho_perp * z_perp
            out = []
            for i, sign in enumerate([1.0, -1.0][: len(x_list)]):
                x_new, v_new = heston_step(
                    x_list[i], v_list[i], dt,
                    sign * z_asset, sign * z_vol, model,
                )
                v_list[i] = v_new
                out.append(x_new)
            return out

        summaries = _walk(step, log_s0, n, antithetic, n_steps, monitor)
    else:
        raise ValueError(
            f"Monte-Carlo does not support {type(model).__name__}"
        )

    samples = [payoffs.path_payoff(payoff, s) for s in summaries]
    if antithetic:
        return 0.5 * (samples[0] + samples[1])
    return samples[0]


_MC_KINDS = (
    payoffs.PayoffKind.BASKET,
    payoffs.PayoffKind.LOOKBACK,
    payoffs.PayoffKind.BARRIER,
    payoffs.PayoffKind.MIN_CALL2,
)


def price_mc(payoff, model, S0, T=None, cfg=None):
    """Discounted mean payoff with a 95% confidence half-width.

    With antithetic variates, mean and variance are taken over pair
    averages. T defaults to the model's maturity. Blocks run on
    cfg.n_threads workers; the result does not depend on the thread count.
    """
    if cfg is None:
        cfg = McConfig()
    if payoff.kind not in _MC_KINDS:
        raise ValueError(
            f"Monte-Carlo does not price {payoff.kind.value}"
        )
    S0 = np.atleast_1d(np.asarray(S0, dtype=float))
    if np.any(S0 <= 0.0):
        raise ValueError("S0 components must be positive")
    if isinstance(model, models.BsMultiParams) and S0.size != model.d:
        raise ValueError(
            f"S0 has {S0.size} components, model has d={model.d}"
        )
    if payoff.kind is payoffs.PayoffKind.MIN_CALL2 and S0.size != 2:
        raise ValueError("min_call2 needs exactly two assets")
    T = model.T if T is None else float(T)
    if T <= 0.0:
        raise ValueError(f"T must be positive, got {T}")
    log_s0 = np.log(S0)
    n_steps = max(1, int(round(cfg.steps_per_year * T)))

    n_units = cfg.n_paths // 2 if cfg.antithetic else cfg.n_paths
    block_sizes = []
    left = n_units
    while left > 0:
        take = min(_PAIRS_PER_BLOCK, left)
        block_sizes.append(take)
        left -= take

    def run_block(index):
        rng = _block_rng(cfg.seed, index)
        return _simulate_block(
            payoff, model, log_s0, T, block_sizes[index],
            cfg.antithetic, n_steps, rng,
        )

    moments = StreamingMoments()
    if cfg.n_threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.n_threads) as pool:
            for samples in pool.map(run_block, range(len(block_sizes))):
                moments.push(samples)
    else:
        for index in range(len(block_sizes)):
            moments.push(run_block(index))

    disc = float(np.exp(-model.r * T))
    return PriceResult(
        price=disc * moments.mean,
        conf_half_width=disc * confidence_bound(moments),
        n_evals=cfg.n_paths,
    )
