"""Command-line front end: build surrogates, price, and run studies.

Experiments are JSON configs; flags carry only paths, seeds, and point
overrides. Parameter records (model, payoff, domain, binding, pricer,
degrees, study grids) live in the config so a run is reproducible from one
file. stdout carries data only; diagnostics go to stderr. Exit codes:
2 config/schema problem, 3 pricing failure, 4 evaluation point outside the
surrogate domain.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bounds, chebyshev, engine, fd, fourier, models, montecarlo, \
    payoffs
from .base import ChebpopError, ConfigError, PricingError

DEFAULT_SEED = 42

_TOP_KEYS = ("model", "payoff", "domain", "binding", "pricer", "cheb",
             "study", "plan", "seed")

_MODEL_FIELDS = {
    "merton": ("T", "r", "sigma", "alpha", "beta", "lam"),
    "cgmy": ("T", "r", "C", "G", "M", "Y"),
    "heston": ("T", "r", "v0", "kappa", "theta", "vol_of_vol", "rho"),
    "heston2": ("T", "r", "v0", "kappa", "theta", "sigma1", "sigma2",
                "sigma3", "rho12", "rho13", "rho23"),
}


# ---------------------------------------------------------------- config ---

def _load_json(path, what="config"):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {what} {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what} {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{what} {path} must hold a JSON object")
    return doc


def _check_keys(block, where, allowed, required=()):
    if not isinstance(block, dict):
        raise ConfigError(f"'{where}' must be a JSON object")
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown} in '{where}'; "
                          f"allowed: {sorted(allowed)}")
    missing = sorted(set(required) - set(block))
    if missing:
        raise ConfigError(f"missing key(s) {missing} in '{where}'")


def _require_block(cfg, name):
    if name not in cfg:
        raise ConfigError(f"config needs a '{name}' block")
    return cfg[name]


def _as_float(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{where}' must be a number, got {value!r}")
    return float(value)


def _as_int(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"'{where}' must be an integer, got {value!r}")
    return int(value)


def _as_bool(value, where):
    if not isinstance(value, bool):
        raise ConfigError(f"'{where}' must be true or false, got {value!r}")
    return value


def _as_float_list(value, where):
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"'{where}' must be a non-empty array")
    return [_as_float(v, f"{where}[{i}]") for i, v in enumerate(value)]


def _as_int_list(value, where):
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"'{where}' must be a non-empty array")
    return [_as_int(v, f"{where}[{i}]") for i, v in enumerate(value)]


def _wrap_value_error(fn, where, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def parse_model(block):
    every_key = sorted({k for keys in _MODEL_FIELDS.values() for k in keys}
                       | {"family", "sigma", "cov"})
    _check_keys(block, "model", every_key, required=("family",))
    family = block["family"]
    if family == "bs":
        allowed = ("family", "T", "r", "sigma", "cov")
        _check_keys(block, "model (bs)", allowed, required=("T", "r"))
        if ("sigma" in block) == ("cov" in block):
            raise ConfigError("bs model needs exactly one of 'sigma' "
                              "(scalar vol) or 'cov' (covariance matrix)")
        if "sigma" in block:
            vol = _as_float(block["sigma"], "model.sigma")
            if vol <= 0.0:
                raise ConfigError(f"'model.sigma' must be positive, "
                                  f"got {vol}")
            cov = [[vol * vol]]
        else:
            cov = block["cov"]
            if not isinstance(cov, list) or not all(
                    isinstance(row, list) for row in cov):
                raise ConfigError("'model.cov' must be a matrix "
                                  "(array of arrays)")
        return _wrap_value_error(
            models.BsMultiParams, "model",
            T=_as_float(block["T"], "model.T"),
            r=_as_float(block["r"], "model.r"),
            sigma=np.asarray(cov, dtype=float),
        )
    if family not in _MODEL_FIELDS:
        raise ConfigError(f"unknown model family {family!r}; choose one of "
                          f"{['bs'] + sorted(_MODEL_FIELDS)}")
    fields = _MODEL_FIELDS[family]
    _check_keys(block, f"model ({family})", ("family",) + fields,
                required=fields)
    kwargs = {k: _as_float(block[k], f"model.{k}") for k in fields}
    cls = {"merton": models.MertonParams, "cgmy": models.CgmyParams,
           "heston": models.Heston1Params,
           "heston2": models.Heston2Params}[family]
    return _wrap_value_error(cls, "model", **kwargs)


def parse_payoff(block):
    _check_keys(block, "payoff", ("kind", "K", "barrier", "eta"),
                required=("kind", "K"))
    kind = block["kind"]
    known = [k.value for k in payoffs.PayoffKind]
    if kind not in known:
        raise ConfigError(f"unknown payoff kind {kind!r}; choose one of "
                          f"{known}")
    eta = block.get("eta")
    if eta is not None:
        eta = tuple(_as_float_list(eta, "payoff.eta"))
    barrier = block.get("barrier")
    if barrier is not None:
        barrier = _as_float(barrier, "payoff.barrier")
    return _wrap_value_error(
        payoffs.PayoffSpec, "payoff",
        kind=kind, K=_as_float(block["K"], "payoff.K"),
        barrier=barrier, eta=eta,
    )


def parse_domain(block):
    _check_keys(block, "domain", ("names", "lo", "hi"),
                required=("names", "lo", "hi"))
    names = block["names"]
    if not isinstance(names, list) or not all(
            isinstance(n, str) for n in names):
        raise ConfigError("'domain.names' must be an array of strings")
    return _wrap_value_error(
        chebyshev.Hyperrectangle, "domain",
        tuple(_as_float_list(block["lo"], "domain.lo")),
        tuple(_as_float_list(block["hi"], "domain.hi")),
        tuple(names),
    )


def parse_binding(block, model, payoff, domain=None):
    _check_keys(block, "binding", ("slots", "S0"), required=("slots",))
    slots = block["slots"]
    if not isinstance(slots, list) or not all(
            isinstance(s, str) for s in slots):
        raise ConfigError("'binding.slots' must be an array of strings")
    if domain is not None and len(slots) != domain.ndim:
        raise ConfigError(f"binding has {len(slots)} slots, domain has "
                          f"{domain.ndim} axes")
    S0 = block.get("S0")
    if isinstance(S0, (list, tuple)):
        S0 = np.asarray(_as_float_list(S0, "binding.S0"))
    elif S0 is not None:
        S0 = _as_float(S0, "binding.S0")
    return engine.ParamBinding(tuple(slots), model, payoff, S0)


def _parse_quad(block, where):
    allowed = ("abs_tol", "rel_tol", "max_evals", "trunc_start",
               "max_doublings", "domain_2d")
    _check_keys(block, where, allowed)
    kwargs = {}
    for key in ("abs_tol", "rel_tol", "trunc_start"):
        if key in block:
            kwargs[key] = _as_float(block[key], f"{where}.{key}")
    for key in ("max_evals", "max_doublings"):
        if key in block:
            kwargs[key] = _as_int(block[key], f"{where}.{key}")
    if "domain_2d" in block:
        box = block["domain_2d"]
        if (not isinstance(box, list) or len(box) != 2
                or not all(isinstance(p, list) and len(p) == 2 for p in box)):
            raise ConfigError(f"'{where}.domain_2d' must be two [lo, hi] "
                              "pairs")
        kwargs["domain_2d"] = tuple(
            (float(a), float(b)) for a, b in box)
    return _wrap_value_error(fourier.QuadConfig, where, **kwargs)


def parse_pricer(block, seed):
    _check_keys(block, "pricer",
                ("engine", "quad", "quad2", "n_paths", "steps_per_year",
                 "antithetic", "n_threads", "density", "n_time", "n_space",
                 "half_width", "tolerance"),
                required=("engine",))
    name = block["engine"]
    tol = block.get("tolerance")
    if tol is not None:
        tol = _as_float(tol, "pricer.tolerance")
    if name == "fourier":
        _check_keys(block, "pricer (fourier)",
                    ("engine", "quad", "quad2", "tolerance"))
        quad = _parse_quad(block["quad"], "pricer.quad") \
            if "quad" in block else None
        quad2 = _parse_quad(block["quad2"], "pricer.quad2") \
            if "quad2" in block else None
        pricer = engine.fourier_reference(quad=quad, quad2=quad2)
        if tol is not None:
            pricer = engine.ReferencePricer(pricer.name, pricer.fn, tol,
                                            pricer.settings)
        return pricer
    if name == "mc":
        allowed = ("engine", "n_paths", "steps_per_year", "antithetic",
                   "n_threads", "tolerance")
        _check_keys(block, "pricer (mc)", allowed)
        kwargs = {"seed": seed}
        for key in ("n_paths", "steps_per_year", "n_threads"):
            if key in block:
                kwargs[key] = _as_int(block[key], f"pricer.{key}")
        if "antithetic" in block:
            kwargs["antithetic"] = _as_bool(block["antithetic"],
                                            "pricer.antithetic")
        cfg = _wrap_value_error(montecarlo.McConfig, "pricer", **kwargs)
        return engine.mc_reference(cfg, tolerance=tol or 0.0)
    if name == "fd":
        allowed = ("engine", "density", "n_time", "n_space", "half_width",
                   "tolerance")
        _check_keys(block, "pricer (fd)", allowed)
        kwargs = {}
        for key in ("density", "n_time", "n_space"):
            if key in block:
                kwargs[key] = _as_int(block[key], f"pricer.{key}")
        if "half_width" in block:
            kwargs["half_width"] = _as_float(block["half_width"],
                                             "pricer.half_width")
        cfg = _wrap_value_error(fd.FdConfig, "pricer", **kwargs)
        return engine.fd_reference(cfg, tolerance=tol or 0.0)
    if name == "closed_form":
        _check_keys(block, "pricer (closed_form)", ("engine", "tolerance"))
        pricer = engine.closed_form_reference()
        if tol is not None:
            pricer = engine.ReferencePricer(pricer.name, pricer.fn, tol,
                                            pricer.settings)
        return pricer
    raise ConfigError(f"unknown pricer engine {name!r}; choose one of "
                      "['closed_form', 'fd', 'fourier', 'mc']")


def parse_degrees(block, ndim):
    _check_keys(block, "cheb", ("degrees",), required=("degrees",))
    deg = block["degrees"]
    if isinstance(deg, list):
        deg = _as_int_list(deg, "cheb.degrees")
    else:
        deg = [_as_int(deg, "cheb.degrees")] * ndim
    return _wrap_value_error(chebyshev.check_degrees, "cheb.degrees",
                             deg, ndim)


def parse_seed(cfg):
    if "seed" not in cfg:
        return DEFAULT_SEED
    return _as_int(cfg["seed"], "seed")


def _study_block(cfg):
    block = cfg.get("study", {})
    _check_keys(block, "study", ("grid_points", "N_list", "M_list"))
    return block


def _grid_points_setting(block):
    pts = block.get("grid_points", 101)
    if isinstance(pts, list):
        return tuple(_as_int_list(pts, "study.grid_points"))
    return _as_int(pts, "study.grid_points")


def parse_point(text, names):
    """Parse "name=value,name=value" into domain-axis order."""
    values = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, sep, raw = part.partition("=")
        name = name.strip()
        if not sep or not name:
            raise ConfigError(f"bad point component {part!r}, expected "
                              "name=value")
        try:
            value = float(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for '{name}': {raw!r}") from exc
        if name in values:
            raise ConfigError(f"duplicate point component '{name}'")
        values[name] = value
    missing = sorted(set(names) - set(values))
    extra = sorted(set(values) - set(names))
    if missing or extra:
        raise ConfigError(
            f"point {text!r} must set exactly the axes {list(names)}"
            + (f"; missing {missing}" if missing else "")
            + (f"; unexpected {extra}" if extra else "")
        )
    return np.array([values[n] for n in names])


def _read_point_lines(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read batch file {path}: {exc}") from exc
    out = [ln.strip() for ln in lines]
    return [ln for ln in out if ln and not ln.startswith("#")]


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


def _load_surrogate(path):
    try:
        with open(path, "rb") as fh:
            payload = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read surrogate {path}: {exc}") from exc
    return _wrap_value_error(chebyshev.deserialize, f"surrogate {path}",
                             payload)


def _check_surrogate_domain(surrogate, domain, path):
    if (tuple(surrogate.domain.lo) != tuple(domain.lo)
            or tuple(surrogate.domain.hi) != tuple(domain.hi)):
        raise ConfigError(
            f"surrogate {path} was built on lo={list(surrogate.domain.lo)} "
            f"hi={list(surrogate.domain.hi)}, which differs from the "
            f"config domain lo={list(domain.lo)} hi={list(domain.hi)}"
        )


def _build_inputs(cfg):
    """Common parse for commands that construct a surrogate."""
    _check_keys(cfg, "config", _TOP_KEYS)
    model = parse_model(_require_block(cfg, "model"))
    violations = models.validate(model)
    if violations:
        raise ConfigError("model parameters invalid: "
                          + "; ".join(violations))
    payoff = parse_payoff(_require_block(cfg, "payoff"))
    domain = parse_domain(_require_block(cfg, "domain"))
    binding = parse_binding(_require_block(cfg, "binding"), model, payoff,
                            domain)
    pricer = parse_pricer(_require_block(cfg, "pricer"), parse_seed(cfg))
    return model, payoff, domain, binding, pricer


# -------------------------------------------------------------- commands ---

def cmd_build(args):
    cfg = _load_json(args.config)
    _, _, domain, binding, pricer = _build_inputs(cfg)
    deg = parse_degrees(_require_block(cfg, "cheb"), domain.ndim)
    surrogate = engine.build_surrogate(binding, domain, deg, pricer,
                                       parallelism=args.jobs)
    try:
        with open(args.output, "wb") as fh:
            fh.write(chebyshev.serialize(surrogate))
    except OSError as exc:
        raise ConfigError(f"cannot write {args.output}: {exc}") from exc
    if args.nodes_out:
        nodes = chebyshev.tensor_nodes(surrogate.degrees, domain)
        prices = chebyshev.evaluate_batch(surrogate, nodes)
        lines = [",".join(domain.names) + ",price"]
        for point, price in zip(nodes, prices):
            lines.append(",".join(f"{x:.17g}" for x in point)
                         + f",{price:.17g}")
        _emit("\n".join(lines) + "\n", args.nodes_out)
    offline = float(surrogate.meta["offline_ms"])
    print(f"offline_ms={offline:.3f}")
    print(f"wrote {args.output}: degrees {tuple(surrogate.degrees)}, "
          f"{surrogate.coeffs.size} coefficients", file=sys.stderr)
    return 0


def cmd_price(args):
    surrogate = _load_surrogate(args.surrogate)
    names = surrogate.domain.names
    texts = [args.point] if args.point else _read_point_lines(args.batch)
    out = []
    for text in texts:
        if args.moneyness:
            p = parse_point(text, ("T", "S0", "K"))
            price = engine.price_call_via_moneyness(
                surrogate, p[0], p[1], p[2])
        else:
            price = chebyshev.evaluate(surrogate, parse_point(text, names))
        out.append(f"{price:.12g}")
    print("\n".join(out))
    return 0


def cmd_study(args):
    cfg = _load_json(args.config)
    _, _, domain, binding, pricer = _build_inputs(cfg)
    grid = engine.GridSpec(domain, _grid_points_setting(_study_block(cfg)))
    if args.surrogate:
        surrogate = _load_surrogate(args.surrogate)
        _check_surrogate_domain(surrogate, domain, args.surrogate)
    else:
        deg = parse_degrees(_require_block(cfg, "cheb"), domain.ndim)
        surrogate = engine.build_surrogate(binding, domain, deg, pricer,
                                           parallelism=args.jobs)
    report = engine.error_study(
        surrogate, engine.BoundReference(binding, pricer), grid,
        parallelism=args.jobs or engine.default_workers())

    def ms(x):
        return "" if x is None else f"{x:.3f}"

    header = ["eps_linf", "eps_l2"]
    header += [f"argmax_{n}" for n in domain.names]
    header += ["reference_at_argmax", "surrogate_at_argmax",
               "offline_ms", "online_ms", "reference_ms"]
    row = [f"{report.eps_linf:.12g}", f"{report.eps_l2:.12g}"]
    row += [f"{x:.12g}" for x in report.argmax_point]
    row += [f"{report.reference_at_argmax:.12g}",
            f"{report.surrogate_at_argmax:.12g}",
            ms(report.offline_ms), ms(report.online_ms),
            ms(report.reference_ms)]
    _emit(",".join(header) + "\n" + ",".join(row) + "\n", args.output)
    return 0


def cmd_converge(args):
    cfg = _load_json(args.config)
    _, _, domain, binding, pricer = _build_inputs(cfg)
    study = _study_block(cfg)
    if "N_list" not in study:
        raise ConfigError("converge needs 'study.N_list'")
    N_list = _as_int_list(study["N_list"], "study.N_list")
    grid = engine.GridSpec(domain, _grid_points_setting(study))
    result = engine.convergence_study(binding, domain, pricer, N_list, grid,
                                      parallelism=args.jobs)
    _emit(result.to_csv(), args.output)
    slope = "undefined" if result.slope is None else f"{result.slope:.6g}"
    print(f"slope={slope} saturated={result.saturated} "
          f"noise_floor={result.tolerance:g}", file=sys.stderr)
    return 0


def cmd_timing(args):
    cfg = _load_json(args.config)
    _, _, domain, binding, pricer = _build_inputs(cfg)
    study = _study_block(cfg)
    if "M_list" not in study:
        raise ConfigError("timing needs 'study.M_list'")
    M_list = _as_int_list(study["M_list"], "study.M_list")
    if args.surrogate:
        surrogate = _load_surrogate(args.surrogate)
        _check_surrogate_domain(surrogate, domain, args.surrogate)
    else:
        deg = parse_degrees(_require_block(cfg, "cheb"), domain.ndim)
        surrogate = engine.build_surrogate(binding, domain, deg, pricer,
                                           parallelism=args.jobs)
    result = engine.timing_study(
        surrogate, engine.BoundReference(binding, pricer), M_list,
        parallelism=args.jobs or engine.default_workers())
    _emit(result.to_csv(), args.output)
    be = "none" if result.break_even_M is None else str(result.break_even_M)
    print(f"break_even_M={be} offline_ms={result.offline_ms:.3f}",
          file=sys.stderr)
    return 0


def cmd_plan(args):
    cfg = _load_json(args.config)
    _check_keys(cfg, "config", _TOP_KEYS)
    block = _require_block(cfg, "plan")
    _check_keys(block, "plan", ("target", "V", "rho", "max_per_axis"),
                required=("target", "V", "rho"))
    target = _as_float(block["target"], "plan.target")
    V = _as_float(block["V"], "plan.V")
    rho = block["rho"]
    rho = tuple(_as_float_list(rho, "plan.rho")) if isinstance(rho, list) \
        else (_as_float(rho, "plan.rho"),)
    cap = _as_int(block.get("max_per_axis", 200), "plan.max_per_axis")
    deg = _wrap_value_error(bounds.plan_degrees, "plan", V, rho, target,
                            max_per_axis=cap)
    bound = bounds.bound_multi(bounds.BoundInput(V, rho, deg))
    lines = ["axis,rho,N"]
    lines += [f"{i},{r:.12g},{n}" for i, (r, n) in enumerate(zip(rho, deg))]
    _emit("\n".join(lines) + "\n", args.output)
    print(f"bound={bound:.6g} target={target:.6g} "
          f"nodes={int(np.prod([n + 1 for n in deg]))}", file=sys.stderr)
    return 0


def cmd_reference_price(args):
    cfg = _load_json(args.config)
    _check_keys(cfg, "config", _TOP_KEYS)
    model = parse_model(_require_block(cfg, "model"))
    violations = models.validate(model)
    if violations:
        raise ConfigError("model parameters invalid: "
                          + "; ".join(violations))
    payoff = parse_payoff(_require_block(cfg, "payoff"))
    domain = parse_domain(cfg["domain"]) if "domain" in cfg else None
    binding = parse_binding(_require_block(cfg, "binding"), model, payoff,
                            domain)
    names = domain.names if domain is not None else binding.slots
    pricer = parse_pricer(_require_block(cfg, "pricer"), parse_seed(cfg))
    bound = engine.BoundReference(binding, pricer)
    texts = [args.point] if args.point else _read_point_lines(args.batch)
    out = []
    for text in texts:
        point = parse_point(text, names)
        try:
            result = bound(point)
        except ChebpopError:
            raise
        except Exception as exc:
            raise PricingError(f"point {text!r}: {exc}") from exc
        out.append(f"{result.price:.12g}")
        if result.conf_half_width is not None:
            print(f"conf_half_width={result.conf_half_width:.6g}",
                  file=sys.stderr)
    print("\n".join(out))
    return 0


# ------------------------------------------------------------------ main ---

def _add_config(p):
    p.add_argument("-c", "--config", required=True,
                   help="path to the JSON run config")


def _add_jobs(p):
    p.add_argument("-j", "--jobs", type=int, default=None,
                   help="worker threads for node pricing and grid sweeps "
                        "(default: CHEBPOP_THREADS or 1)")


def _add_output(p, what):
    p.add_argument("-o", "--output", default=None, help=what)


def _add_points(p):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("-p", "--point",
                       help='evaluation point as "name=value,name=value"')
    group.add_argument("--batch",
                       help="file with one point string per line; prices "
                            "print one per line in the same order")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="chebpop",
        description="Chebyshev surrogates for parametric option pricing: "
                    "build once offline, price in microseconds online.",
        epilog="The CHEBPOP_THREADS environment variable hints the worker-"
               "thread count when --jobs is not given.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="price Chebyshev nodes with the "
                       "configured reference and write the surrogate JSON")
    _add_config(p)
    p.add_argument("-o", "--output", required=True,
                   help="surrogate JSON output path")
    p.add_argument("--nodes-out", default=None,
                   help="also write a CSV of node coordinates and prices")
    _add_jobs(p)
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("price", help="evaluate a surrogate file at points")
    p.add_argument("-s", "--surrogate", required=True,
                   help="surrogate JSON path")
    _add_points(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--moneyness", action="store_true",
                      help="treat the surrogate as a unit-strike call "
                           "surface over (T, S0/K); point sets T, S0, K "
                           "and the price is K * surface(T, S0/K)")
    mode.add_argument("--american", action="store_true",
                      help="evaluate stored early-exercise prices directly "
                           "(no strike scaling); point axes follow the "
                           "surrogate's domain names")
    p.set_defaults(fn=cmd_price)

    p = sub.add_parser("study", help="dense-grid error report for a "
                       "surrogate vs the configured reference")
    _add_config(p)
    p.add_argument("-s", "--surrogate", default=None,
                   help="reuse a surrogate file instead of rebuilding")
    _add_output(p, "CSV output path (default stdout)")
    _add_jobs(p)
    p.set_defaults(fn=cmd_study)

    p = sub.add_parser("converge", help="error vs degree table with the "
                       "fitted slope on stderr")
    _add_config(p)
    _add_output(p, "CSV output path (default stdout)")
    _add_jobs(p)
    p.set_defaults(fn=cmd_converge)

    p = sub.add_parser("timing", help="surrogate vs reference wall-clock "
                       "on M^D grids")
    _add_config(p)
    p.add_argument("-s", "--surrogate", default=None,
                   help="reuse a surrogate file instead of rebuilding")
    _add_output(p, "CSV output path (default stdout)")
    _add_jobs(p)
    p.set_defaults(fn=cmd_timing)

    p = sub.add_parser("plan", help="smallest equal degrees meeting a "
                       "target error bound")
    _add_config(p)
    _add_output(p, "CSV output path (default stdout)")
    p.set_defaults(fn=cmd_plan)

    p = sub.add_parser("reference-price", help="price points directly with "
                       "the configured reference engine")
    _add_config(p)
    _add_points(p)
    _add_jobs(p)
    p.set_defaults(fn=cmd_reference_price)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ChebpopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
