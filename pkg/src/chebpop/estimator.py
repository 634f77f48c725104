"""scikit-learn style wrapper around the interpolation core.

fit is the offline phase: y carries prices at the tensor Chebyshev nodes of
the configured domain, which are the only admissible design points. predict
is the online phase. The functional API in chebyshev/engine stays the
primary interface; this adapter exists for pipelines that expect the
estimator protocol (get_params/set_params/clone, fit/predict/score).
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from . import chebyshev
from .chebyshev import Hyperrectangle


class ChebyshevSurrogate(BaseEstimator, RegressorMixin):
    """Tensor Chebyshev interpolant as a regressor on a fixed domain.

    Parameters
    ----------
    degrees : int or sequence of int
        Polynomial degree per axis; a scalar broadcasts to every axis.
    lo, hi : sequence of float
        Domain bounds per axis.
    names : sequence of str, optional
        Axis labels carried into error messages.

    Unlike a generic regressor, the design is fixed: fit accepts exactly the
    node grid from interpolation_nodes() (or X=None as a shorthand) and the
    matching y of node prices. predict evaluates anywhere in the domain and
    raises for points outside it.
    """

    def __init__(self, degrees=10, lo=(0.0,), hi=(1.0,), names=None):
        self.degrees = degrees
        self.lo = lo
        self.hi = hi
        self.names = names

    def _domain(self):
        return Hyperrectangle(tuple(np.atleast_1d(self.lo)),
                              tuple(np.atleast_1d(self.hi)), self.names)

    def _degree_vector(self, dom):
        deg = np.atleast_1d(self.degrees)
        if deg.size == 1:
            deg = np.repeat(deg, dom.ndim)
        return chebyshev.check_degrees(deg, dom.ndim)

    def interpolation_nodes(self):
        """The admissible design: mapped Chebyshev nodes, shape (n, D)."""
        dom = self._domain()
        return chebyshev.tensor_nodes(self._degree_vector(dom), dom)

    def fit(self, X, y):
        """Interpolate node prices y; X must match interpolation_nodes().

        Pass X=None to skip the design check when y is already in node
        order (row-major, last axis fastest).
        """
        dom = self._domain()
        deg = self._degree_vector(dom)
        nodes = chebyshev.tensor_nodes(deg, dom)
        y = np.asarray(y, dtype=float).ravel()
        if y.size != len(nodes):
            raise ValueError(
                f"y has {y.size} values, the degree-{tuple(deg)} grid has "
                f"{len(nodes)} nodes"
            )
        if X is not None:
            X = np.asarray(X, dtype=float)
            if X.shape != nodes.shape or not np.allclose(
                    X, nodes, rtol=0.0, atol=1e-9):
                raise ValueError(
                    "X must equal interpolation_nodes() row for row; "
                    "arbitrary designs are not admissible"
                )
        self.interpolant_ = chebyshev.build_interpolant(dom, deg, y)
        self.n_features_in_ = dom.ndim
        return self

    def predict(self, X):
        """Evaluate the fitted surrogate at points X, shape (n, D)."""
        if not hasattr(self, "interpolant_"):
            raise AttributeError("this ChebyshevSurrogate is not fitted yet; "
                                 "call fit first")
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        out = chebyshev.evaluate_batch(self.interpolant_, np.atleast_2d(X))
        return out[0] if single else out

    @classmethod
    def from_interpolant(cls, interp):
        """Wrap an existing interpolant (e.g. a deserialized surrogate)."""
        est = cls(degrees=interp.degrees, lo=interp.domain.lo,
                  hi=interp.domain.hi, names=interp.domain.names)
        est.interpolant_ = interp
        est.n_features_in_ = interp.domain.ndim
        return est
