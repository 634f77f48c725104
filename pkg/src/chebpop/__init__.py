"""chebpop: parametric option pricing via tensorized Chebyshev surrogates.

Offline, option prices are computed at Chebyshev nodes of a parameter
hyperrectangle with a reference engine (Fourier transform, Monte Carlo,
lattice, or closed form); online, the resulting polynomial surrogate prices
in microseconds. Error-bound, convergence-study, and timing-study harnesses
quantify when the trade pays off.
"""
from .base import (
    ChebpopError,
    ConfigError,
    DomainError,
    PriceResult,
    PricingError,
)
from .bounds import (
    BoundInput,
    bound_1d,
    bound_multi,
    ellipse_boundary,
    estimate_V,
    noisy_bound,
    plan_degrees,
    rho_upper_from_interval,
    zeta_from_bounds,
)
from .chebyshev import (
    Hyperrectangle,
    Interpolant,
    build_interpolant,
    cheb_nodes,
    deserialize,
    differentiate,
    evaluate,
    evaluate_batch,
    from_domain,
    serialize,
    tensor_nodes,
    to_domain,
)
from .engine import (
    BoundReference,
    ErrorReport,
    GridSpec,
    ParamBinding,
    ReferencePricer,
    build_surrogate,
    closed_form_reference,
    convergence_study,
    error_study,
    fd_reference,
    fit_slope,
    fourier_reference,
    grid_points,
    mc_reference,
    price_call_via_moneyness,
    timing_study,
)
from .fd import FdConfig, price_american_put_fd
from .fourier import (
    QuadConfig,
    bs_call_closed_form,
    price_fourier_1d,
    price_fourier_2d,
)
from .models import (
    BsMultiParams,
    CgmyParams,
    Heston1Params,
    Heston2Params,
    MertonParams,
    cf_bs,
    cf_cgmy,
    cf_heston1,
    cf_heston2,
    cf_merton,
)
from .montecarlo import McConfig, price_mc
from .payoffs import PayoffKind, PayoffSpec, default_eta, path_payoff, payoff_ft

__version__ = "0.1.0"

__all__ = [
    "BoundInput",
    "BoundReference",
    "BsMultiParams",
    "CgmyParams",
    "ChebpopError",
    "ChebyshevSurrogate",
    "ConfigError",
    "DomainError",
    "ErrorReport",
    "FdConfig",
    "GridSpec",
    "Heston1Params",
    "Heston2Params",
    "Hyperrectangle",
    "Interpolant",
    "McConfig",
    "MertonParams",
    "ParamBinding",
    "PayoffKind",
    "PayoffSpec",
    "PriceResult",
    "PricingError",
    "QuadConfig",
    "ReferencePricer",
    "bound_1d",
    "bound_multi",
    "bs_call_closed_form",
    "build_interpolant",
    "build_surrogate",
    "cf_bs",
    "cf_cgmy",
    "cf_heston1",
    "cf_heston2",
    "cf_merton",
    "cheb_nodes",
    "closed_form_reference",
    "convergence_study",
    "default_eta",
    "deserialize",
    "differentiate",
    "ellipse_boundary",
    "error_study",
    "estimate_V",
    "evaluate",
    "evaluate_batch",
    "fd_reference",
    "fit_slope",
    "fourier_reference",
    "from_domain",
    "grid_points",
    "mc_reference",
    "noisy_bound",
    "path_payoff",
    "payoff_ft",
    "plan_degrees",
    "price_american_put_fd",
    "price_call_via_moneyness",
    "price_fourier_1d",
    "price_fourier_2d",
    "price_mc",
    "rho_upper_from_interval",
    "serialize",
    "tensor_nodes",
    "timing_study",
    "to_domain",
    "zeta_from_bounds",
]


def __getattr__(name):
    # estimator pulls in scikit-learn; keep that import off the hot path
    if name == "ChebyshevSurrogate":
        from .estimator import ChebyshevSurrogate
        return ChebyshevSurrogate
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
