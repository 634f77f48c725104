"""Lattice American put: grid resolution, projection, convergence."""
import math

import numpy as np
import pytest

import frozen_values as fv
from chebpop import fd
from chebpop.fd import FdConfig, price_american_put_fd, _solve_put_grid


def test_fdconfig_validation_and_defaults():
    cfg = FdConfig()
    assert cfg.density == 50 and cfg.n_time is None and cfg.n_space is None
    assert FdConfig.refined().density == 1000
    with pytest.raises(ValueError, match="density"):
        FdConfig(density=9)
    with pytest.raises(ValueError, match="n_time must be >= 10"):
        FdConfig(n_time=5)
    with pytest.raises(ValueError, match="n_space must be >= 10"):
        FdConfig(n_space=5)
    with pytest.raises(ValueError, match="half_width"):
        FdConfig(half_width=0.0)


def test_resolve_grid_sizes():
    nt, ns, hw = FdConfig().resolve(1.0, 0.2, 0.0)
    assert (nt, ns) == (50, 200)
    assert hw == pytest.approx(2.0)
    nt, ns, hw = FdConfig().resolve(2.0, 0.2, 0.005)
    assert nt == 200
    assert hw == pytest.approx(5.0 * 0.2 * math.sqrt(2.0) + 0.01 + 1.0)
    assert ns % 2 == 0 and ns == pytest.approx(2.0 * hw * 100, abs=2.0)
    nt, ns, hw = FdConfig(n_time=77, n_space=33, half_width=1.5).resolve(
        1.0, 0.2, 0.0)
    assert (nt, ns, hw) == (77, 34, 1.5)  # n_space rounded up to even


def test_input_validation():
    for bad in ({"S0": 0.0}, {"K": -1.0}, {"T": 0.0}, {"sigma": 0.0}):
        kwargs = dict(S0=100.0, K=100.0, T=1.0, sigma=0.2, r=0.0)
        kwargs.update(bad)
        name = next(iter(bad))
        with pytest.raises(ValueError, match=f"{name} must be positive"):
            price_american_put_fd(**kwargs, cfg=None)


def test_zero_rate_masks_early_exercise():
    # with r = 0 exercising a put early is never optimal, so the American
    # price equals the European closed form
    res = price_american_put_fd(100.0, 100.0, 1.0, 0.2, 0.0)
    assert res.price == pytest.approx(fv.BS_PUT_ATM_100, abs=5e-3)
    refined = price_american_put_fd(100.0, 100.0, 1.0, 0.2, 0.0,
                                    cfg=FdConfig.refined())
    assert refined.price == pytest.approx(fv.BS_PUT_ATM_100, abs=1e-5)


def test_deep_itm_put_sits_on_intrinsic():
    res = price_american_put_fd(100.0, 200.0, 0.5, 0.2, 0.005)
    assert 100.0 <= res.price <= 100.0 + 5e-3


def test_coarse_and_refined_grids_agree_on_benchmark_corners():
    for K in (250.0 / 3.0, 125.0):
        for T in (0.5, 2.0):
            coarse = price_american_put_fd(100.0, K, T, 0.2, 0.005)
            fine = price_american_put_fd(100.0, K, T, 0.2, 0.005,
                                         cfg=FdConfig.refined())
            assert abs(coarse.price - fine.price) < 5e-3, (K, T)


def test_value_dominates_intrinsic_and_european():
    K, T, sigma, r = 110.0, 1.0, 0.2, 0.04
    nt, ns, hw = FdConfig().resolve(T, sigma, r)
    x0 = math.log(100.0 / K)
    x, v_am = _solve_put_grid(K, T, sigma, r, nt, ns, hw, x0, american=True)
    _, v_eu = _solve_put_grid(K, T, sigma, r, nt, ns, hw, x0, american=False)
    psi = K * np.maximum(1.0 - np.exp(x), 0.0)
    assert np.all(v_am >= psi - 1e-12 * K)
    assert np.all(v_am >= v_eu - 1e-12 * K)
    assert np.max(v_am - v_eu) > 0.01  # early exercise is worth something


def test_monotone_in_strike_and_maturity():
    prices_k = [
        price_american_put_fd(100.0, K, 1.0, 0.2, 0.005).price
        for K in np.linspace(80.0, 120.0, 9)
    ]
    assert np.all(np.diff(prices_k) > 0.0)
    prices_t = [
        price_american_put_fd(100.0, 100.0, T, 0.2, 0.005).price
        for T in np.linspace(0.25, 3.0, 9)
    ]
    assert np.all(np.diff(prices_t) > 0.0)


def test_filter_fast_path_matches_sequential_sweep(monkeypatch):
    fast = price_american_put_fd(100.0, 105.0, 1.5, 0.25, 0.03)
    monkeypatch.setattr(fd, "_FILTER_MIN_SIZE", 10 ** 9)
    slow = price_american_put_fd(100.0, 105.0, 1.5, 0.25, 0.03)
    assert fast.price == pytest.approx(slow.price, rel=1e-12)
    assert fast.n_evals == slow.n_evals


def test_result_metadata():
    res = price_american_put_fd(100.0, 100.0, 1.0, 0.2, 0.005)
    nt, ns, hw = FdConfig().resolve(1.0, 0.2, 0.005)
    assert res.n_evals == nt * (ns + 1)
    meta = res.meta
    assert meta["n_time"] == nt and meta["n_space"] == ns
    assert meta["projection"] == "brennan-schwartz"
    assert meta["grid_center"] == 0.0
