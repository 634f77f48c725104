"""Tensorized Chebyshev interpolation on hyperrectangles.

Offline phase: price a function on the tensor grid of Chebyshev extrema and
turn the node values into coefficients of the tensor Chebyshev basis. Online
phase: evaluate the coefficient tensor at arbitrary points of the domain via
the three-term recurrence.

Ordering contract: multi-indices are enumerated row-major with the last axis
fastest, everywhere (nodes, node values, flat coefficients).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .base import DomainError

SERIAL_VERSION = 1

# Guard against accidentally huge tensor grids (~16M nodes).
MAX_NODES = 1 << 24


def _as_axis_names(names, ndim):
    if names is None:
        return tuple(f"p{i}" for i in range(ndim))
    names = tuple(str(n) for n in names)
    if len(names) != ndim:
        raise ValueError(f"expected {ndim} axis names, got {len(names)}")
    return names


@dataclass(frozen=True)
class Hyperrectangle:
    """Cartesian product of closed intervals [lo_i, hi_i], with axis names."""

    lo: tuple
    hi: tuple
    names: tuple = None

    def __post_init__(self):
        lo = tuple(float(x) for x in np.atleast_1d(self.lo))
        hi = tuple(float(x) for x in np.atleast_1d(self.hi))
        if len(lo) != len(hi):
            raise ValueError("lo and hi must have equal length")
        if len(lo) == 0:
            raise ValueError("domain needs at least one axis")
        for a, b in zip(lo, hi):
            if not (np.isfinite(a) and np.isfinite(b)):
                raise ValueError("domain bounds must be finite")
            if a >= b:
                raise ValueError(f"degenerate or inverted axis [{a}, {b}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "names", _as_axis_names(self.names, len(lo)))

    @property
    def ndim(self):
        return len(self.lo)

    def contains(self, points):
        """Componentwise closed-interval membership, per point."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.all((pts >= lo) & (pts <= hi), axis=1)


def check_degrees(degrees, ndim=None):
    """Validate a per-axis degree vector; returns it as a tuple of ints."""
    deg = tuple(int(n) for n in np.atleast_1d(degrees))
    if any(n < 0 for n in deg):
        raise ValueError(f"degrees must be nonnegative, got {deg}")
    if ndim is not None and len(deg) != ndim:
        raise ValueError(f"expected {ndim} degrees, got {len(deg)}")
    count = 1
    for n in deg:
        count *= n + 1
        if count > MAX_NODES:
            raise ValueError(f"node count {count}+ exceeds cap {MAX_NODES}")
    return deg


def cheb_nodes(N):
    """Chebyshev extrema cos(pi*k/N), k = 0..N, descending from 1 to -1.

    N = 0 yields the single node [1]. Endpoints are exact; so is the
    midpoint 0 for even N.
    """
    N = int(N)
    if N < 0:
        raise ValueError("N must be nonnegative")
    if N == 0:
        return np.array([1.0])
    x = np.cos(np.pi * np.arange(N + 1) / N)
    x[0] = 1.0
    x[N] = -1.0
    if N % 2 == 0:
        x[N // 2] = 0.0
    return x


def to_domain(p_ref, dom):
    """Affine map from [-1, 1]^D onto dom; +1 -> hi, -1 -> lo exactly.

    Accepts a single point of shape (D,) or a batch of shape (n, D).
    """
    p = np.asarray(p_ref, dtype=float)
    single = p.ndim == 1
    pts = np.atleast_2d(p)
    if pts.shape[-1] != dom.ndim:
        raise ValueError(f"expected {dom.ndim} components, got {pts.shape[-1]}")
    if np.any(np.abs(pts) > 1.0):
        raise DomainError("reference coordinates must lie in [-1, 1]")
    lo = np.asarray(dom.lo)
    hi = np.asarray(dom.hi)
    mid = (lo + hi) / 2.0
    half = (hi - lo) / 2.0
    out = mid + half * pts
    # exact endpoints regardless of rounding in mid/half
    out = np.where(pts == 1.0, hi, out)
    out = np.where(pts == -1.0, lo, out)
    return out[0] if single else out


def from_domain(x, dom, allow_extrapolation=False):
    """Inverse of to_domain; hi -> +1, lo -> -1 exactly.

    Raises DomainError for points outside the closed domain unless
    allow_extrapolation is set.
    """
    xx = np.asarray(x, dtype=float)
    single = xx.ndim == 1
    pts = np.atleast_2d(xx)
    if pts.shape[-1] != dom.ndim:
        raise ValueError(f"expected {dom.ndim} components, got {pts.shape[-1]}")
    if not allow_extrapolation:
        inside = dom.contains(pts)
        if not np.all(inside):
            idx = int(np.argmin(inside))
            p = pts[idx]
            for ax in range(dom.ndim):
                if not dom.lo[ax] <= p[ax] <= dom.hi[ax]:
                    raise DomainError(
                        f"axis '{dom.names[ax]}': value {p[ax]:g} outside "
                        f"[{dom.lo[ax]:g}, {dom.hi[ax]:g}] "
                        f"at point {p.tolist()}"
                    )
            raise DomainError(f"point {p.tolist()} outside domain")
    lo = np.asarray(dom.lo)
    hi = np.asarray(dom.hi)
    mid = (lo + hi) / 2.0
    half = (hi - lo) / 2.0
    out = (pts - mid) / half
    out = np.where(pts == hi, 1.0, out)
    out = np.where(pts == lo, -1.0, out)
    if not allow_extrapolation:
        # interior points can overshoot by one ulp; the recurrence is fine
        # with that, but keep the advertised invariant |p| <= 1
        out = np.clip(out, -1.0, 1.0)
    return out[0] if single else out


def tensor_nodes(degrees, dom):
    """Full tensor grid of mapped Chebyshev nodes, shape (prod(N_i+1), D).

    Row-major enumeration, last axis fastest; this is the node-value order
    build_interpolant expects.
    """
    deg = check_degrees(degrees, dom.ndim)
    axes = []
    for i, n in enumerate(deg):
        ax_dom = Hyperrectangle((dom.lo[i],), (dom.hi[i],))
        axes.append(to_domain(cheb_nodes(n)[:, None], ax_dom)[:, 0])
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _coeff_matrix(N):
    """Matrix A with (A @ values) the 1-D Chebyshev coefficients.

    A[j, k] = w_j * cos(j*pi*k/N) * s_k, where s_k halves the first and last
    node values and w_j is 2/N for interior j, 1/N for j in {0, N}.
    """
    if N == 0:
        return np.ones((1, 1))
    j = np.arange(N + 1)
    A = np.cos(np.pi * np.outer(j, j) / N)
    A[:, 0] *= 0.5
    A[:, N] *= 0.5
    w = np.full(N + 1, 2.0 / N)
    w[0] = w[N] = 1.0 / N
    return A * w[:, None]


@dataclass(frozen=True)
class Interpolant:
    """A tensor Chebyshev interpolant: domain, degrees, flat coefficients."""

    domain: Hyperrectangle
    degrees: tuple
    coeffs: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        deg = check_degrees(self.degrees, self.domain.ndim)
        coeffs = np.ascontiguousarray(self.coeffs, dtype=float).ravel()
        expected = int(np.prod([n + 1 for n in deg]))
        if coeffs.size != expected:
            raise ValueError(
                f"coefficient length {coeffs.size} != prod(N_i+1) = {expected}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "degrees", deg)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def shape(self):
        return tuple(n + 1 for n in self.degrees)

    def coeff_tensor(self):
        return self.coeffs.reshape(self.shape)


def build_interpolant(dom, degrees, node_values, meta=None):
    """Interpolant through the given values on the tensor_nodes grid.

    Coefficients follow the double-prime sum: first and last summand halved
    along every axis, interior coefficients doubled. Degree-0 axes carry the
    single value with weight 1.
    """
    deg = check_degrees(degrees, dom.ndim)
    shape = tuple(n + 1 for n in deg)
    vals = np.asarray(node_values, dtype=float).ravel()
    if vals.size != int(np.prod(shape)):
        raise ValueError(
            f"got {vals.size} node values, expected {int(np.prod(shape))}"
        )
    if not np.all(np.isfinite(vals)):
        bad = int(np.argmin(np.isfinite(vals)))
        raise ValueError(f"non-finite node value at flat index {bad}")
    tensor = vals.reshape(shape)
    for axis, n in enumerate(deg):
        A = _coeff_matrix(n)
        tensor = np.moveaxis(np.tensordot(A, tensor, axes=(1, axis)), 0, axis)
    return Interpolant(dom, deg, tensor.ravel(), dict(meta or {}))


def _cheb_vandermonde(q, N):
    """V[m, j] = T_j(q_m) for j = 0..N via the three-term recurrence."""
    q = np.asarray(q, dtype=float)
    V = np.empty((q.size, N + 1))
    V[:, 0] = 1.0
    if N >= 1:
        V[:, 1] = q
    for j in range(2, N + 1):
        V[:, j] = 2.0 * q * V[:, j - 1] - V[:, j - 2]
    return V


def evaluate_batch(interp, points, allow_extrapolation=False):
    """Evaluate at each row of points; returns a vector, order preserved."""
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return np.zeros(0)
    pts = np.atleast_2d(pts)
    if pts.shape[-1] != interp.domain.ndim:
        raise ValueError(
            f"points have {pts.shape[-1]} components, domain has "
            f"{interp.domain.ndim}"
        )
    q = from_domain(pts, interp.domain, allow_extrapolation=allow_extrapolation)
    q = np.atleast_2d(q)
    m = q.shape[0]
    # contract one axis at a time, keeping a per-point slab
    slab = np.broadcast_to(interp.coeff_tensor(), (m,) + interp.shape)
    slab = slab.reshape(m, interp.shape[0], -1)
    for axis, n in enumerate(interp.degrees):
        V = _cheb_vandermonde(q[:, axis], n)
        slab = np.einsum("mjr,mj->mr", slab, V)
        if axis + 1 < len(interp.degrees):
            slab = slab.reshape(m, interp.shape[axis + 1], -1)
    return slab[:, 0]


def evaluate(interp, p, allow_extrapolation=False):
    """Evaluate at a single point (scalar for D=1 or vector of length D)."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    return float(
        evaluate_batch(interp, p[None, :], allow_extrapolation)[0]
    )


def _diff_matrix(N):
    """Maps degree-N Chebyshev coefficients to degree-(N-1) derivative ones.

    b_k = b_{k+2} + 2(k+1) a_{k+1} descending from b_{N-1} = 2N a_N,
    then b_0 halved.
    """
    D = np.zeros((N, N + 1))
    for col in range(N + 1):
        a = np.zeros(N + 1)
        a[col] = 1.0
        b = np.zeros(N + 2)
        for k in range(N - 1, -1, -1):
            b[k] = b[k + 2] + 2.0 * (k + 1) * a[k + 1]
        b[0] *= 0.5
        D[:, col] = b[:N]
    return D


def differentiate(interp, axis):
    """Exact partial derivative along an axis, as a new Interpolant.

    The coefficient recurrence runs on [-1, 1]; the chain-rule factor
    2/(hi-lo) rescales to the actual axis.
    """
    axis = int(axis)
    if not 0 <= axis < interp.domain.ndim:
        raise ValueError(f"axis {axis} out of range")
    n = interp.degrees[axis]
    if n < 1:
        raise ValueError(f"cannot differentiate degree-0 axis {axis}")
    scale = 2.0 / (interp.domain.hi[axis] - interp.domain.lo[axis])
    D = _diff_matrix(n) * scale
    tensor = np.moveaxis(
        np.tensordot(D, interp.coeff_tensor(), axes=(1, axis)), 0, axis
    )
    deg = list(interp.degrees)
    deg[axis] = n - 1
    return Interpolant(interp.domain, tuple(deg), tensor.ravel(),
                       dict(interp.meta))


def serialize(interp):
    """UTF-8 JSON byte string; floats keep full round-trip precision."""
    doc = {
        "version": SERIAL_VERSION,
        "domain": {
            "lo": list(interp.domain.lo),
            "hi": list(interp.domain.hi),
            "names": list(interp.domain.names),
        },
        "degrees": list(interp.degrees),
        "coeffs": interp.coeffs.tolist(),
        "meta": {str(k): str(v) for k, v in interp.meta.items()},
    }
    return json.dumps(doc).encode("utf-8")


def deserialize(data):
    """Inverse of serialize; validates version and coefficient length."""
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed interpolant payload: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError("malformed interpolant payload: not an object")
    version = doc.get("version")
    if version != SERIAL_VERSION:
        raise ValueError(
            f"unsupported interpolant version {version!r}, "
            f"expected {SERIAL_VERSION}"
        )
    try:
        dom = Hyperrectangle(
            tuple(doc["domain"]["lo"]),
            tuple(doc["domain"]["hi"]),
            tuple(doc["domain"]["names"]),
        )
        degrees = tuple(int(n) for n in doc["degrees"])
        coeffs = np.asarray(doc["coeffs"], dtype=float)
        meta = dict(doc.get("meta", {}))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed interpolant payload: {exc}") from exc
    return Interpolant(dom, degrees, coeffs, meta)
