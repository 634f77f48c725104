"""Offline/online orchestration over parameter hyperrectangles.

Offline: bind interpolation axes to pricing inputs, price every Chebyshev
node with a reference pricer, and assemble the interpolant. Online: evaluate
the surrogate on dense grids and measure accuracy (sup and weighted l2
errors), empirical convergence in the degree, and wall-clock speedup against
the reference.

Node pricing and grid sweeps parallelize over threads; results are gathered
by index, so every output is deterministic for any worker count.
"""
from __future__ import annotations

import dataclasses
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import chebyshev, fd, fourier, models, montecarlo, payoffs
from .base import ConfigError, PriceResult, PricingError

THREADS_ENV_VAR = "CHEBPOP_THREADS"

CONVERGENCE_CSV_HEADER = "N,eps_linf,eps_l2,offline_ms,online_ms"
TIMING_CSV_HEADER = "M,online_ms,offline_plus_online_ms,reference_ms"

# axis slots with fixed meaning; anything else names a scalar model field
SLOT_MONEYNESS = "moneyness"
SLOT_STRIKE = "strike"
SLOT_MATURITY = "maturity"
SLOT_SPOT = "spot"
SPECIAL_SLOTS = (SLOT_MONEYNESS, SLOT_STRIKE, SLOT_MATURITY, SLOT_SPOT)


def default_workers():
    """Worker-thread count from the environment, default 1."""
    raw = os.environ.get(THREADS_ENV_VAR, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class ParamBinding:
    """Assignment of interpolation axes to pricing inputs.

    slots holds one entry per axis: a special name ("moneyness", "strike",
    "maturity", "spot") or the name of a scalar field of the model record
    (e.g. "v0", "vol_of_vol", "rho", "sigma", "alpha"). The stored model,
    payoff, and S0 fix every input the slots leave untouched.

    "moneyness" sets S0 = value * K and is applied after any "strike" slot.
    """

    slots: tuple
    model: object
    payoff: payoffs.PayoffSpec
    S0: object = None

    def __post_init__(self):
        slots = tuple(str(s) for s in np.atleast_1d(np.asarray(
            self.slots, dtype=object)))
        if not slots:
            raise ConfigError("binding needs at least one axis slot")
        if len(set(slots)) != len(slots):
            raise ConfigError(f"axis slots must be distinct, got {slots}")
        if SLOT_MONEYNESS in slots and SLOT_SPOT in slots:
            raise ConfigError("moneyness and spot slots both set S0; "
                              "bind at most one")
        if not dataclasses.is_dataclass(self.model):
            raise ConfigError("model must be a parameter record")
        known = {f.name for f in dataclasses.fields(self.model)}
        for slot in slots:
            if slot in SPECIAL_SLOTS:
                continue
            if slot not in known:
                raise ConfigError(
                    f"slot '{slot}' is not a field of "
                    f"{type(self.model).__name__}; known fields: "
                    f"{sorted(known)}"
                )
            if not isinstance(getattr(self.model, slot), float):
                raise ConfigError(f"slot '{slot}' must target a scalar "
                                  "model field")
        object.__setattr__(self, "slots", slots)
        if self.S0 is not None and not np.isscalar(self.S0):
            S0 = np.atleast_1d(np.asarray(self.S0, dtype=float))
            S0.setflags(write=False)
            object.__setattr__(self, "S0", S0)

    @property
    def ndim(self):
        return len(self.slots)

    def resolve(self, point):
        """Pricing inputs (payoff, model, S0) for one parameter point."""
        vals = np.atleast_1d(np.asarray(point, dtype=float))
        if vals.size != len(self.slots):
            raise ValueError(
                f"point has {vals.size} components, binding has "
                f"{len(self.slots)} axes"
            )
        payoff, model, S0 = self.payoff, self.model, self.S0
        updates = {}
        moneyness = None
        for slot, value in zip(self.slots, vals):
            value = float(value)
            if slot == SLOT_MONEYNESS:
                moneyness = value
            elif slot == SLOT_STRIKE:
                payoff = dataclasses.replace(payoff, K=value)
            elif slot == SLOT_MATURITY:
                updates["T"] = value
            elif slot == SLOT_SPOT:
                S0 = value
            else:
                updates[slot] = value
        if updates:
            model = dataclasses.replace(model, **updates)
        if moneyness is not None:
            S0 = moneyness * payoff.K
        return payoff, model, S0


@dataclass(frozen=True)
class ReferencePricer:
    """Single-method pricing interface: (payoff, model, S0) -> PriceResult.

    tolerance is the pricer's own accuracy scale; convergence studies treat
    values within 10x of it as saturated when fitting slopes.
    """

    name: str
    fn: object
    tolerance: float = 0.0
    settings: dict = field(default_factory=dict)

    def __call__(self, payoff, model, S0):
        return self.fn(payoff, model, S0)


@dataclass(frozen=True)
class BoundReference:
    """A reference pricer composed with a binding: parameter point -> price."""

    binding: ParamBinding
    pricer: ReferencePricer

    @property
    def name(self):
        return self.pricer.name

    @property
    def tolerance(self):
        return self.pricer.tolerance

    def __call__(self, point):
        payoff, model, S0 = self.binding.resolve(point)
        return self.pricer.fn(payoff, model, S0)


def _require_univariate_bs(model, context):
    if not isinstance(model, models.BsMultiParams) or model.d != 1:
        raise PricingError(f"{context} needs a one-asset lognormal model, "
                           f"got {type(model).__name__}")
    return math.sqrt(float(model.sigma[0, 0]))


def closed_form_reference():
    """Exact lognormal call pricer (calls only)."""

    def fn(payoff, model, S0):
        if payoff.kind is not payoffs.PayoffKind.CALL:
            raise PricingError("closed form covers calls only, got "
                               f"{payoff.kind.value}")
        sigma = _require_univariate_bs(model, "closed form")
        price = fourier.bs_call_closed_form(
            float(S0), payoff.K, model.T, sigma, model.r)
        return PriceResult(price=float(price), n_evals=1)

    return ReferencePricer("closed_form", fn, tolerance=1e-15)


def fourier_reference(quad=None, quad2=None):
    """Transform pricer; dispatches min_call2 to the two-asset integrator.

    The 2-D default keeps the benchmark window and tolerances but lifts the
    evaluation cap: a reference pricer should spend whatever the tolerance
    takes.
    """
    q1 = quad if quad is not None else fourier.QuadConfig.default_1d()
    q2 = quad2 if quad2 is not None else dataclasses.replace(
        fourier.QuadConfig.default_2d(), max_evals=200_000)

    def fn(payoff, model, S0):
        if payoff.kind is payoffs.PayoffKind.MIN_CALL2:
            log_spots = np.log(np.atleast_1d(np.asarray(S0, dtype=float)))
            return fourier.price_fourier_2d(payoff, model, log_spots, quad=q2)
        return fourier.price_fourier_1d(
            payoff, model, math.log(float(S0)), quad=q1)

    tol = max(q1.abs_tol, q1.rel_tol)
    settings = {"abs_tol": q1.abs_tol, "rel_tol": q1.rel_tol,
                "max_evals": q1.max_evals}
    return ReferencePricer("fourier", fn, tolerance=tol, settings=settings)


def mc_reference(cfg=None, tolerance=0.0):
    """Monte-Carlo pricer; tolerance, if known, should reflect the typical
    confidence half-width at the configured path budget."""
    cfg = cfg if cfg is not None else montecarlo.McConfig()

    def fn(payoff, model, S0):
        return montecarlo.price_mc(payoff, model, S0, cfg=cfg)

    return ReferencePricer("mc", fn, tolerance=tolerance,
                           settings=dataclasses.asdict(cfg))


def fd_reference(cfg=None, tolerance=0.0):
    """American-put lattice pricer for one-asset lognormal models."""
    cfg = cfg if cfg is not None else fd.FdConfig()

    def fn(payoff, model, S0):
        if payoff.kind is not payoffs.PayoffKind.AMERICAN_PUT:
            raise PricingError("lattice reference covers american_put only, "
                               f"got {payoff.kind.value}")
        sigma = _require_univariate_bs(model, "lattice reference")
        return fd.price_american_put_fd(
            float(S0), payoff.K, model.T, sigma, model.r, cfg=cfg)

    return ReferencePricer("fd", fn, tolerance=tolerance,
                           settings=dataclasses.asdict(cfg))


def _point_pricer(binding, reference):
    """Normalize (binding, reference) into a callable point -> price."""
    if isinstance(reference, BoundReference):
        return reference
    if isinstance(reference, ReferencePricer):
        if binding is None:
            raise ConfigError(f"pricer '{reference.name}' needs a binding "
                              "to interpret parameter points")
        return BoundReference(binding, reference)
    if callable(reference):
        return reference
    raise ConfigError("reference must be a pricer handle or a callable "
                      f"point -> price, got {type(reference).__name__}")


def _result_parts(result):
    if isinstance(result, PriceResult):
        return result.price, result.conf_half_width
    return float(result), None


def _price_points(point_fn, pts, workers, what):
    """Price each row of pts; returns (values, max_half_width).

    Failures abort with the coordinates of the offending point.
    """

    def one(k):
        try:
            return _result_parts(point_fn(pts[k]))
        except Exception as exc:
            where = tuple(float(x) for x in np.round(pts[k], 12))
            raise PricingError(f"{what} {k} at {where}: {exc}") from exc

    n = len(pts)
    if workers > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(n)))
    else:
        results = [one(k) for k in range(n)]
    values = np.array([r[0] for r in results])
    widths = [r[1] for r in results if r[1] is not None]
    return values, (max(widths) if widths else None)


def build_surrogate(binding, dom, deg, reference, parallelism=None):
    """Price every Chebyshev node with the reference and interpolate.

    parallelism: worker threads for node pricing; None reads the
    CHEBPOP_THREADS environment variable (default 1). The returned
    interpolant's meta records the pricer, its settings, and the offline
    wall-clock time in ms.
    """
    deg = chebyshev.check_degrees(deg, dom.ndim)
    if binding is not None and binding.ndim != dom.ndim:
        raise ConfigError(f"binding has {binding.ndim} axes, domain has "
                          f"{dom.ndim}")
    point_fn = _point_pricer(binding, reference)
    workers = default_workers() if parallelism is None else max(
        1, int(parallelism))
    nodes = chebyshev.tensor_nodes(deg, dom)
    t0 = time.perf_counter()
    values, max_hw = _price_points(point_fn, nodes, workers, "node")
    offline_ms = (time.perf_counter() - t0) * 1e3
    meta = {
        "pricer": getattr(point_fn, "name", getattr(
            point_fn, "__name__", "reference")),
        "offline_ms": offline_ms,
        "workers": workers,
    }
    pricer = getattr(point_fn, "pricer", None)
    if pricer is not None and pricer.settings:
        meta["settings"] = dict(pricer.settings)
    if max_hw is not None:
        meta["max_conf_half_width"] = max_hw
    return chebyshev.build_interpolant(dom, deg, values, meta)


def price_call_via_moneyness(surrogate, T, S0, K, r=None):
    """Call price from a unit-strike surface interpolated over (T, S0/K).

    Lognormal-family call prices are homogeneous of degree one in (S0, K),
    so the surface at K=1 carries every strike: price = K * C(T, S0/K).
    Discounting follows whatever rate the node prices baked in; r is
    accepted for signature symmetry with the direct pricers and unused.
    """
    del r
    K = float(K)
    S0 = float(S0)
    if K <= 0.0 or S0 <= 0.0:
        raise ValueError(f"spot and strike must be positive, got S0={S0}, "
                         f"K={K}")
    return K * chebyshev.evaluate(surrogate, (float(T), S0 / K))


@dataclass(frozen=True)
class GridSpec:
    """Uniform tensor evaluation grid: per-axis point counts on a domain."""

    domain: chebyshev.Hyperrectangle
    points: object = 101

    def __post_init__(self):
        pts = tuple(int(p) for p in np.atleast_1d(self.points))
        if len(pts) == 1:
            pts = pts * self.domain.ndim
        if len(pts) != self.domain.ndim:
            raise ValueError(f"expected {self.domain.ndim} point counts, "
                             f"got {len(pts)}")
        if any(p < 2 for p in pts):
            raise ValueError(f"need at least 2 points per axis, got {pts}")
        object.__setattr__(self, "points", pts)

    @property
    def n_total(self):
        return int(np.prod(self.points))

    def cell_measure(self):
        """Quadrature weight per grid point, prod(range_i / (points_i - 1))."""
        d = 1.0
        for lo, hi, p in zip(self.domain.lo, self.domain.hi, self.points):
            d *= (hi - lo) / (p - 1)
        return d

    def discrete_measure(self):
        """Total weight cell_measure * n_total; sup-vs-l2 comparisons use
        its square root."""
        return self.cell_measure() * self.n_total


def grid_points(grid):
    """All grid points, shape (n_total, D), row-major with last axis
    fastest; endpoints hit the domain corners exactly."""
    axes = [np.linspace(lo, hi, p) for lo, hi, p in
            zip(grid.domain.lo, grid.domain.hi, grid.points)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


@dataclass(frozen=True)
class ErrorReport:
    """Dense-grid accuracy summary for one surrogate."""

    eps_linf: float
    eps_l2: float
    argmax_point: tuple
    reference_at_argmax: float
    surrogate_at_argmax: float
    grid: GridSpec
    online_ms: float
    reference_ms: float = None
    offline_ms: float = None
    max_conf_half_width: float = None


def _meta_float(meta, key):
    try:
        return float(meta[key])
    except (KeyError, TypeError, ValueError):
        return None


def error_study(surrogate, reference, grid, parallelism=1):
    """Compare surrogate and reference on the grid.

    reference: a BoundReference, a callable point -> price, or an ndarray
    of precomputed reference values aligned with grid_points(grid).
    """
    pts = grid_points(grid)
    max_hw = None
    if isinstance(reference, np.ndarray):
        ref_vals = np.asarray(reference, dtype=float).ravel()
        if ref_vals.size != len(pts):
            raise ValueError(f"got {ref_vals.size} reference values for a "
                             f"{len(pts)}-point grid")
        reference_ms = None
    else:
        point_fn = _point_pricer(None, reference)
        t0 = time.perf_counter()
        ref_vals, max_hw = _price_points(
            point_fn, pts, max(1, int(parallelism)), "grid point")
        reference_ms = (time.perf_counter() - t0) * 1e3

    t1 = time.perf_counter()
    sur_vals = chebyshev.evaluate_batch(surrogate, pts)
    online_ms = (time.perf_counter() - t1) * 1e3

    diff = sur_vals - ref_vals
    k = int(np.argmax(np.abs(diff)))
    eps_linf = float(np.abs(diff[k]))
    eps_l2 = float(np.sqrt(grid.cell_measure() * np.sum(diff * diff)))
    return ErrorReport(
        eps_linf=eps_linf,
        eps_l2=eps_l2,
        argmax_point=tuple(pts[k]),
        reference_at_argmax=float(ref_vals[k]),
        surrogate_at_argmax=float(sur_vals[k]),
        grid=grid,
        online_ms=online_ms,
        reference_ms=reference_ms,
        offline_ms=_meta_float(surrogate.meta, "offline_ms"),
        max_conf_half_width=max_hw,
    )


def fit_slope(N_values, eps_values, tolerance=0.0):
    """Least-squares slope of log10(eps) vs N over the decaying range.

    Values at or below 10x the reference tolerance (or exactly zero) sit on
    the noise floor and are excluded. With fewer than two live points the
    slope is undefined: returns (None, True).
    """
    N = np.asarray(N_values, dtype=float)
    eps = np.asarray(eps_values, dtype=float)
    if N.shape != eps.shape:
        raise ValueError("N_values and eps_values must align")
    live = eps > max(10.0 * tolerance, 0.0)
    if int(live.sum()) < 2:
        return None, True
    slope = np.polyfit(N[live], np.log10(eps[live]), 1)[0]
    return float(slope), False


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    eps_linf: float
    eps_l2: float
    offline_ms: float
    online_ms: float


@dataclass(frozen=True)
class ConvergenceStudy:
    """Error-vs-degree table with the fitted pre-saturation slope."""

    rows: tuple
    slope: float
    saturated: bool
    tolerance: float

    def to_csv(self):
        lines = [CONVERGENCE_CSV_HEADER]
        for row in self.rows:
            lines.append(
                f"{row.N},{row.eps_linf:.12g},{row.eps_l2:.12g},"
                f"{row.offline_ms:.3f},{row.online_ms:.3f}"
            )
        return "\n".join(lines) + "\n"


def convergence_study(binding, dom, reference, N_list, grid,
                      parallelism=None):
    """Build deg=(N,...,N) surrogates for each N and measure their errors.

    Reference values on the grid are computed once and shared across all N.
    """
    N_list = [int(n) for n in N_list]
    if not N_list:
        raise ConfigError("N_list must not be empty")
    if any(n < 0 for n in N_list):
        raise ConfigError(f"degrees must be nonnegative, got {N_list}")
    point_fn = _point_pricer(binding, reference)
    workers = default_workers() if parallelism is None else max(
        1, int(parallelism))
    pts = grid_points(grid)
    ref_vals, _ = _price_points(point_fn, pts, workers, "grid point")

    rows = []
    for N in N_list:
        sur = build_surrogate(binding, dom, (N,) * dom.ndim, point_fn,
                              parallelism=workers)
        rep = error_study(sur, ref_vals, grid)
        rows.append(ConvergenceRow(
            N=N,
            eps_linf=rep.eps_linf,
            eps_l2=rep.eps_l2,
            offline_ms=rep.offline_ms,
            online_ms=rep.online_ms,
        ))
    tolerance = float(getattr(point_fn, "tolerance", 0.0) or 0.0)
    slope, saturated = fit_slope(
        [r.N for r in rows], [r.eps_linf for r in rows], tolerance)
    return ConvergenceStudy(rows=tuple(rows), slope=slope,
                            saturated=saturated, tolerance=tolerance)


@dataclass(frozen=True)
class TimingRow:
    M: int
    online_ms: float
    offline_plus_online_ms: float
    reference_ms: float


@dataclass(frozen=True)
class TimingStudy:
    """Wall-clock comparison on uniform M^D grids spanning the domain.

    break_even_M: smallest M where offline + online beats the reference,
    None if the reference wins everywhere measured.
    """

    rows: tuple
    break_even_M: int
    offline_ms: float

    def to_csv(self):
        lines = [TIMING_CSV_HEADER]
        for row in self.rows:
            lines.append(
                f"{row.M},{row.online_ms:.3f},"
                f"{row.offline_plus_online_ms:.3f},{row.reference_ms:.3f}"
            )
        return "\n".join(lines) + "\n"


def timing_study(surrogate, reference, M_list, parallelism=1):
    """Time surrogate evaluation against the reference on M^D grids."""
    M_list = [int(m) for m in M_list]
    if not M_list:
        raise ConfigError("M_list must not be empty")
    if any(m < 2 for m in M_list):
        raise ConfigError(f"grid needs at least 2 points per axis, got "
                          f"{M_list}")
    point_fn = _point_pricer(None, reference)
    offline_ms = _meta_float(surrogate.meta, "offline_ms") or 0.0
    workers = max(1, int(parallelism))

    rows = []
    break_even = None
    for M in M_list:
        pts = grid_points(GridSpec(surrogate.domain, M))
        t0 = time.perf_counter()
        chebyshev.evaluate_batch(surrogate, pts)
        online_ms = (time.perf_counter() - t0) * 1e3
        t1 = time.perf_counter()
        _price_points(point_fn, pts, workers, "grid point")
        reference_ms = (time.perf_counter() - t1) * 1e3
        rows.append(TimingRow(
            M=M,
            online_ms=online_ms,
            offline_plus_online_ms=offline_ms + online_ms,
            reference_ms=reference_ms,
        ))
        if break_even is None and offline_ms + online_ms < reference_ms:
            break_even = M
    return TimingStudy(rows=tuple(rows), break_even_M=break_even,
                       offline_ms=offline_ms)
