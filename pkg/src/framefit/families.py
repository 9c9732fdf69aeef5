"""Simple synthetic frame families, mainly used for validation and demos."""

from __future__ import annotations

import numpy as np

from .core import FrameFamily, FrameJet
from .errors import DimensionMismatchError


class ConstantFrameFamily(FrameFamily):
    """F(x) = F0 for every x; all parameter derivatives vanish."""

    def __init__(self, F0, P: int = 1):
        F0 = np.asarray(F0, dtype=float)
        if F0.ndim != 2:
            raise DimensionMismatchError("F0 must be a matrix")
        self.F0 = F0
        self.M, self.N = F0.shape
        self.P = P

    def jet(self, x, order: int = 2) -> FrameJet:
        self.check_point(x)
        dF = np.zeros((self.P, self.M, self.N)) if order >= 1 else None
        d2F = np.zeros((self.P, self.P, self.M, self.N)) if order >= 2 else None
        return FrameJet(self.F0.copy(), dF, d2F)


class QuadraticFrameFamily(FrameFamily):
    """Entrywise quadratic family

        F(x) = F0 + sum_p x_p C[p] + 0.5 sum_{p,q} x_p x_q D[p, q]

    with D symmetric in (p, q).  First partials are C[p] + sum_q x_q D[p, q],
    second partials are the constants D[q, p].
    """

    def __init__(self, F0, C, D=None):
        F0 = np.asarray(F0, dtype=float)
        C = np.asarray(C, dtype=float)
        if F0.ndim != 2 or C.ndim != 3 or C.shape[1:] != F0.shape:
            raise DimensionMismatchError("C must have shape (P, M, N) matching F0")
        P = C.shape[0]
        if D is None:
            D = np.zeros((P, P) + F0.shape)
        D = np.asarray(D, dtype=float)
        if D.shape != (P, P) + F0.shape:
            raise DimensionMismatchError("D must have shape (P, P, M, N)")
        if not np.allclose(D, D.transpose(1, 0, 2, 3)):
            raise DimensionMismatchError("D must be symmetric in (p, q)")
        self.F0, self.C, self.D = F0, C, 0.5 * (D + D.transpose(1, 0, 2, 3))
        self.M, self.N = F0.shape
        self.P = P

    def jet(self, x, order: int = 2) -> FrameJet:
        x = self.check_point(x)
        F = self.F0 + np.tensordot(x, self.C, axes=1)
        F = F + 0.5 * np.einsum("p,q,pqmn->mn", x, x, self.D)
        dF = None
        d2F = None
        if order >= 1:
            dF = self.C + np.einsum("q,pqmn->pmn", x, self.D)
        if order >= 2:
            d2F = self.D.copy()
        return FrameJet(F, dF, d2F)


class LinearFrameFamily(QuadraticFrameFamily):
    """F(x) = F0 + sum_p x_p C[p]; second partials vanish identically."""

    def __init__(self, F0, C):
        super().__init__(F0, C, D=None)


class CallableFrameFamily(FrameFamily):
    """Frame family built from user-supplied evaluation callables.

    ``f(x) -> (M, N)``, ``df(x) -> (P, M, N)`` and ``d2f(x) -> (P, P, M, N)``
    supply the jet pieces; ``member`` optionally restricts the domain beyond
    the full-row-rank requirement.
    """

    def __init__(self, dims, f, df=None, d2f=None, member=None):
        self.M, self.N, self.P = dims
        self._f, self._df, self._d2f = f, df, d2f
        self._member = member

    def jet(self, x, order: int = 2) -> FrameJet:
        x = self.check_point(x)
        F = np.asarray(self._f(x), dtype=float)
        dF = d2F = None
        if order >= 1:
            if self._df is None:
                raise DimensionMismatchError("family has no first-order evaluator")
            dF = np.asarray(self._df(x), dtype=float)
        if order >= 2:
            if self._d2f is None:
                raise DimensionMismatchError("family has no second-order evaluator")
            d2F = np.asarray(self._d2f(x), dtype=float)
        return FrameJet(F, dF, d2F)

    def contains(self, x) -> bool:
        if self._member is not None:
            try:
                x = self.check_point(x)
            except DimensionMismatchError:
                return False
            if not self._member(x):
                return False
        return super().contains(x)
