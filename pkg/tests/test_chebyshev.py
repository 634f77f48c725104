"""Chebyshev core: nodes, domain mapping, interpolation, calculus, serial."""
import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chebpop.base import DomainError
from chebpop.chebyshev import (
    MAX_NODES,
    SERIAL_VERSION,
    Hyperrectangle,
    Interpolant,
    build_interpolant,
    cheb_nodes,
    check_degrees,
    deserialize,
    differentiate,
    evaluate,
    evaluate_batch,
    from_domain,
    serialize,
    tensor_nodes,
    to_domain,
)


def _dom2():
    return Hyperrectangle((0.5, 0.8), (2.0, 1.2), names=("T", "m"))


# ---------------------------------------------------------------------------
# nodes


def test_nodes_small_degrees_exact():
    assert cheb_nodes(0).tolist() == [1.0]
    assert cheb_nodes(1).tolist() == [1.0, -1.0]
    assert cheb_nodes(2).tolist() == [1.0, 0.0, -1.0]
    x4 = cheb_nodes(4)
    assert x4[0] == 1.0 and x4[2] == 0.0 and x4[4] == -1.0
    assert x4[1] == pytest.approx(math.sqrt(0.5), abs=1e-15)
    assert x4[3] == pytest.approx(-math.sqrt(0.5), abs=1e-15)


def test_nodes_descending_and_symmetric():
    for N in (1, 3, 8, 13):
        x = cheb_nodes(N)
        assert x.shape == (N + 1,)
        assert np.all(np.diff(x) < 0)
        assert x[0] == 1.0 and x[-1] == -1.0
        np.testing.assert_allclose(x, -x[::-1], atol=2e-16)


def test_nodes_negative_degree_rejected():
    with pytest.raises(ValueError):
        cheb_nodes(-1)


# ---------------------------------------------------------------------------
# affine domain maps


def test_domain_map_endpoints_exact():
    dom = _dom2()
    hi = np.array(dom.hi)
    lo = np.array(dom.lo)
    assert np.all(to_domain(np.array([1.0, 1.0]), dom) == hi)
    assert np.all(to_domain(np.array([-1.0, -1.0]), dom) == lo)
    assert np.all(from_domain(hi, dom) == 1.0)
    assert np.all(from_domain(lo, dom) == -1.0)


def test_domain_map_roundtrip():
    dom = _dom2()
    rng = np.random.default_rng(3)
    pts = rng.uniform(dom.lo, dom.hi, size=(64, 2))
    back = to_domain(from_domain(pts, dom), dom)
    np.testing.assert_allclose(back, pts, rtol=1e-14, atol=0)
    assert np.all(np.abs(from_domain(pts, dom)) <= 1.0)


def test_out_of_domain_error_names_axis():
    dom = _dom2()
    with pytest.raises(DomainError, match=r"axis 'T': value 2.5 outside "
                       r"\[0.5, 2\]"):
        from_domain(np.array([2.5, 1.0]), dom)
    with pytest.raises(DomainError, match="axis 'm'"):
        from_domain(np.array([1.0, 0.7]), dom)


def test_extrapolation_opt_in():
    dom = _dom2()
    q = from_domain(np.array([2.75, 1.0]), dom, allow_extrapolation=True)
    assert q[0] == pytest.approx(2.0, rel=1e-14)  # reference coordinate > 1
    with pytest.raises(DomainError):
        to_domain(np.array([1.5, 0.0]), dom)


def test_domain_map_shape_checks():
    dom = _dom2()
    with pytest.raises(ValueError, match="expected 2 components"):
        to_domain(np.zeros((4, 3)), dom)
    with pytest.raises(ValueError, match="expected 2 components"):
        from_domain(np.zeros((4, 3)), dom)


# ---------------------------------------------------------------------------
# tensor grids


def test_tensor_nodes_order_last_axis_fastest():
    dom = _dom2()
    ax0 = [to_domain(np.array([v, 1.0]), dom)[0] for v in cheb_nodes(2)]
    ax1 = [to_domain(np.array([1.0, v]), dom)[1] for v in cheb_nodes(1)]
    expected = np.array(list(itertools.product(ax0, ax1)))
    np.testing.assert_array_equal(tensor_nodes((2, 1), dom), expected)


def test_degree_zero_axis_is_upper_corner():
    dom = _dom2()
    nodes = tensor_nodes((0, 0), dom)
    np.testing.assert_array_equal(nodes, [[2.0, 1.2]])
    interp = build_interpolant(dom, (0, 0), [4.25])
    assert evaluate(interp, (0.77, 0.9)) == 4.25
    assert evaluate(interp, (2.0, 1.2)) == 4.25


def test_degree_validation():
    with pytest.raises(ValueError, match="nonnegative"):
        check_degrees((2, -1))
    with pytest.raises(ValueError, match="expected 2 degrees"):
        check_degrees((2,), ndim=2)
    with pytest.raises(ValueError, match="exceeds cap"):
        check_degrees((4096, 4095))
    assert check_degrees(3) == (3,)
    assert MAX_NODES == 1 << 24


# ---------------------------------------------------------------------------
# interpolation


@settings(max_examples=30, deadline=None)
@given(
    deg=st.tuples(st.integers(0, 6), st.integers(0, 5)),
    seed=st.integers(0, 2**31 - 1),
)
def test_interpolant_reproduces_node_values(deg, seed):
    dom = _dom2()
    nodes = tensor_nodes(deg, dom)
    values = np.random.default_rng(seed).uniform(-1e3, 1e3, len(nodes))
    interp = build_interpolant(dom, deg, values)
    got = evaluate_batch(interp, nodes)
    np.testing.assert_allclose(got, values, rtol=1e-12, atol=1e-9)


def test_polynomial_reproduced_exactly():
    dom = Hyperrectangle((-2.0, 0.0), (1.0, 4.0))

    def f(x, y):
        return 3.0 + 2.0 * x - y + 0.5 * x * x * y

    nodes = tensor_nodes((2, 1), dom)
    interp = build_interpolant(dom, (2, 1), f(nodes[:, 0], nodes[:, 1]))
    rng = np.random.default_rng(11)
    pts = rng.uniform(dom.lo, dom.hi, size=(200, 2))
    np.testing.assert_allclose(
        evaluate_batch(interp, pts), f(pts[:, 0], pts[:, 1]),
        rtol=0, atol=1e-13)


def test_basis_function_coefficients():
    # interpolating T_j itself yields the unit coefficient vector e_j
    dom = Hyperrectangle((-1.0,), (1.0,))
    nodes = tensor_nodes((5,), dom)[:, 0]
    for j in range(6):
        vals = np.polynomial.chebyshev.chebval(nodes, np.eye(6)[j])
        interp = build_interpolant(dom, (5,), vals)
        np.testing.assert_allclose(interp.coeffs, np.eye(6)[j], atol=1e-14)


def test_coeff_layout_row_major_last_axis_fastest():
    dom = Hyperrectangle((-1.0, -1.0), (1.0, 1.0))
    nodes = tensor_nodes((1, 2), dom)
    vals = nodes[:, 0] * (2.0 * nodes[:, 1] ** 2 - 1.0)  # T_1(x) T_2(y)
    interp = build_interpolant(dom, (1, 2), vals)
    expected = np.zeros(6)
    expected[1 * 3 + 2] = 1.0  # flat index i*(N_1+1) + j
    np.testing.assert_allclose(interp.coeffs, expected, atol=1e-14)
    assert interp.shape == (2, 3)
    assert interp.coeff_tensor().shape == (2, 3)


def test_build_interpolant_input_validation():
    dom = _dom2()
    with pytest.raises(ValueError, match="got 5 node values, expected 6"):
        build_interpolant(dom, (2, 1), np.zeros(5))
    bad = np.ones(6)
    bad[4] = np.nan
    with pytest.raises(ValueError, match="non-finite node value at flat "
                       "index 4"):
        build_interpolant(dom, (2, 1), bad)


def test_evaluate_batch_edges():
    dom = _dom2()
    interp = build_interpolant(dom, (2, 2), np.arange(9.0))
    assert evaluate_batch(interp, np.zeros((0, 2))).shape == (0,)
    with pytest.raises(ValueError, match="3 components"):
        evaluate_batch(interp, np.zeros((4, 3)))
    with pytest.raises(DomainError):
        evaluate_batch(interp, [[0.4, 1.0]])
    out = evaluate_batch(interp, [[0.4, 1.0]], allow_extrapolation=True)
    assert np.isfinite(out[0])


def test_interpolant_defensive_state():
    dom = _dom2()
    meta = {"pricer": "unit"}
    interp = build_interpolant(dom, (1, 1), [1.0, 2.0, 3.0, 4.0], meta)
    meta["pricer"] = "mutated"
    assert interp.meta["pricer"] == "unit"
    with pytest.raises(ValueError):
        interp.coeffs[0] = 99.0
    with pytest.raises(ValueError, match="coefficient length"):
        Interpolant(dom, (1, 1), np.zeros(5))


# ---------------------------------------------------------------------------
# differentiation


def test_differentiate_polynomial_exact():
    dom = Hyperrectangle((-2.0, 0.0), (1.0, 4.0))

    def f(x, y):
        return x**3 - 2.0 * x * y + 1.0

    nodes = tensor_nodes((3, 1), dom)
    interp = build_interpolant(dom, (3, 1), f(nodes[:, 0], nodes[:, 1]))
    dx = differentiate(interp, 0)
    dy = differentiate(interp, 1)
    assert dx.degrees == (2, 1)
    assert dy.degrees == (3, 0)
    rng = np.random.default_rng(5)
    pts = rng.uniform(dom.lo, dom.hi, size=(100, 2))
    np.testing.assert_allclose(
        evaluate_batch(dx, pts), 3.0 * pts[:, 0] ** 2 - 2.0 * pts[:, 1],
        rtol=0, atol=1e-12)
    np.testing.assert_allclose(
        evaluate_batch(dy, pts), -2.0 * pts[:, 0], rtol=0, atol=1e-12)


def test_differentiate_matches_finite_differences():
    dom = Hyperrectangle((0.0,), (1.0,))
    nodes = tensor_nodes((20,), dom)
    interp = build_interpolant(dom, (20,), np.exp(nodes[:, 0]))
    deriv = differentiate(interp, 0)
    h = 1e-5
    for x in (0.1, 0.37, 0.5, 0.82):
        fd = (evaluate(interp, x + h) - evaluate(interp, x - h)) / (2 * h)
        assert evaluate(deriv, x) == pytest.approx(fd, abs=1e-6)
        assert evaluate(deriv, x) == pytest.approx(math.exp(x), abs=1e-9)


def test_differentiate_rejects_bad_axis():
    dom = _dom2()
    interp = build_interpolant(dom, (2, 0), np.arange(3.0))
    with pytest.raises(ValueError, match="degree-0"):
        differentiate(interp, 1)
    with pytest.raises(ValueError, match="out of range"):
        differentiate(interp, 2)


# ---------------------------------------------------------------------------
# serialization


def test_serialize_roundtrip():
    dom = _dom2()
    rng = np.random.default_rng(17)
    interp = build_interpolant(
        dom, (3, 2), rng.standard_normal(12),
        meta={"pricer": "unit", "offline_ms": 1.5})
    data = serialize(interp)
    assert isinstance(data, bytes)
    doc = json.loads(data.decode("utf-8"))
    assert doc["version"] == SERIAL_VERSION == 1
    assert doc["meta"] == {"pricer": "unit", "offline_ms": "1.5"}

    back = deserialize(data)
    assert back.domain.lo == dom.lo
    assert back.domain.hi == dom.hi
    assert back.domain.names == dom.names
    assert back.degrees == interp.degrees
    np.testing.assert_array_equal(back.coeffs, interp.coeffs)
    pts = rng.uniform(dom.lo, dom.hi, size=(20, 2))
    np.testing.assert_array_equal(
        evaluate_batch(back, pts), evaluate_batch(interp, pts))


def test_deserialize_rejects_bad_payloads():
    dom = _dom2()
    good = json.loads(serialize(build_interpolant(dom, (1, 1), np.ones(4))))
    with pytest.raises(ValueError, match="malformed"):
        deserialize(b"{not json")
    with pytest.raises(ValueError, match="malformed"):
        deserialize(b"[1, 2, 3]")
    bad = dict(good, version=2)
    with pytest.raises(ValueError, match="version 2"):
        deserialize(json.dumps(bad))
    bad = {k: v for k, v in good.items() if k != "domain"}
    with pytest.raises(ValueError, match="malformed"):
        deserialize(json.dumps(bad))
    bad = dict(good, coeffs=[1.0, 2.0, 3.0])
    with pytest.raises(ValueError, match="coefficient length"):
        deserialize(json.dumps(bad))


# ---------------------------------------------------------------------------
# domain type


def test_hyperrectangle_validation():
    with pytest.raises(ValueError, match="degenerate or inverted"):
        Hyperrectangle((1.0,), (1.0,))
    with pytest.raises(ValueError, match="equal length"):
        Hyperrectangle((0.0, 1.0), (1.0,))
    with pytest.raises(ValueError, match="finite"):
        Hyperrectangle((0.0,), (np.inf,))
    with pytest.raises(ValueError, match="axis names"):
        Hyperrectangle((0.0,), (1.0,), names=("a", "b"))
    dom = Hyperrectangle((0.0, 1.0), (1.0, 2.0))
    assert dom.names == ("p0", "p1")
    assert dom.ndim == 2
    assert dom.contains([[0.5, 1.5], [0.5, 2.5]]).tolist() == [True, False]
