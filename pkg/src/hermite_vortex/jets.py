"""Truncated multivariate Taylor polynomials ("jets").

A jet stores the Taylor coefficients c_alpha of a smooth function about an
expansion point, for every multi-index alpha in a downward-closed set of
monomials. Two truncations are supported:

* total degree ``|alpha| <= order`` (the default), and
* grouped degree, where the variables are split into consecutive groups and
  each group's degree is bounded by ``order`` separately.

Both truncations are quotients by a monomial ideal, so sums and products are
exact modulo the discarded monomials.  Mixed partial derivatives at the
expansion point are recovered as ``c_alpha * prod(alpha!)``.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import gammainc

__all__ = [
    "TaylorJet",
    "jet_variable",
    "jet_constant",
    "jet_add",
    "jet_mul",
    "jet_scale",
    "jet_exp",
    "jet_entire_g",
    "entire_g_taylor",
    "extract_partial",
]


class _Basis:
    """Monomial layout shared by all jets with the same shape."""

    def __init__(self, nvars, order, groups):
        self.nvars = nvars
        self.order = order
        self.groups = groups
        if groups is None:
            exps = _graded_exponents(nvars, order)
        else:
            per_group = [_graded_exponents(g, order) for g in groups]
            blocks = np.meshgrid(*[np.arange(len(p)) for p in per_group], indexing="ij")
            idx = [b.ravel() for b in blocks]
            exps = np.concatenate([p[i] for p, i in zip(per_group, idx)], axis=1)
            order_key = np.lexsort((*exps.T[::-1], exps.sum(axis=1)))
            exps = exps[order_key]
        self.exponents = exps
        self.size = len(exps)
        self.degree = exps.sum(axis=1)
        self.max_degree = int(self.degree.max())
        self._radix = order + 1
        keys = self._keys(exps)
        self._lookup = np.full(self._radix ** nvars, -1, dtype=np.int64)
        self._lookup[keys] = np.arange(self.size)
        self._pairs = None

    def _keys(self, exps):
        return np.ravel_multi_index(exps.T, (self._radix,) * self.nvars)

    def admissible(self, exps):
        exps = np.atleast_2d(exps)
        if self.groups is None:
            return exps.sum(axis=1) <= self.order
        ok = np.ones(len(exps), dtype=bool)
        start = 0
        for g in self.groups:
            ok &= exps[:, start:start + g].sum(axis=1) <= self.order
            start += g
        return ok

    def index(self, alpha):
        alpha = np.asarray(alpha, dtype=np.int64)
        if alpha.shape != (self.nvars,) or np.any(alpha < 0):
            raise ValueError(f"bad multi-index {tuple(alpha)} for {self.nvars} variables")
        if not self.admissible(alpha)[0]:
            raise ValueError(f"multi-index {tuple(alpha)} exceeds the truncation order")
        return int(self._lookup[self._keys(alpha[None, :])[0]])

    def indices(self, alphas):
        alphas = np.asarray(alphas, dtype=np.int64)
        if not np.all(self.admissible(alphas)):
            raise ValueError("multi-index exceeds the truncation order")
        return self._lookup[self._keys(alphas)]

    @property
    def pairs(self):
        # (i, j, k): monomial i times monomial j lands on monomial k
        if self._pairs is None:
            rows_i, rows_j, rows_k = [], [], []
            for i in range(self.size):
                s = self.exponents[i] + self.exponents
                ok = self.admissible(s)
                j = np.nonzero(ok)[0]
                rows_i.append(np.full(len(j), i, dtype=np.int64))
                rows_j.append(j)
                rows_k.append(self._lookup[self._keys(s[ok])])
            self._pairs = (np.concatenate(rows_i), np.concatenate(rows_j),
                           np.concatenate(rows_k))
        return self._pairs


def _graded_exponents(nvars, order):
    out = []

    def rec(prefix, remaining, nleft):
        if nleft == 1:
            out.append(prefix + [remaining])
            return
        for e in range(remaining, -1, -1):
            rec(prefix + [e], remaining - e, nleft - 1)

    for deg in range(order + 1):
        rec([], deg, nvars)
    return np.array(out, dtype=np.int64).reshape(-1, nvars)


@lru_cache(maxsize=None)
def _basis(nvars, order, groups):
    return _Basis(nvars, order, groups)


class TaylorJet:
    """Immutable truncated Taylor polynomial in ``nvars`` variables.

    Parameters
    ----------
    nvars : int
        Number of variables.
    order : int
        Truncation degree (total, or per group when ``groups`` is given).
    coeffs : array_like, optional
        Coefficients in the basis layout (see :meth:`exponents`).
    groups : tuple of int, optional
        Sizes of consecutive variable groups; must sum to ``nvars``.
    """

    __slots__ = ("_basis", "_c")
    __array_priority__ = 1000

    def __init__(self, nvars, order, coeffs=None, groups=None):
        if nvars < 1 or order < 0:
            raise ValueError("need nvars >= 1 and order >= 0")
        if groups is not None:
            groups = tuple(int(g) for g in groups)
            if sum(groups) != nvars or min(groups) < 1:
                raise ValueError("groups must be positive and sum to nvars")
        basis = _basis(int(nvars), int(order), groups)
        if coeffs is None:
            c = np.zeros(basis.size)
        else:
            c = np.array(coeffs, dtype=float)
            if c.shape != (basis.size,):
                raise ValueError(f"expected {basis.size} coefficients, got {c.shape}")
        c.setflags(write=False)
        self._basis = basis
        self._c = c

    @classmethod
    def _wrap(cls, basis, c):
        jet = cls.__new__(cls)
        c.setflags(write=False)
        jet._basis = basis
        jet._c = c
        return jet

    @property
    def nvars(self):
        return self._basis.nvars

    @property
    def order(self):
        return self._basis.order

    @property
    def groups(self):
        return self._basis.groups

    @property
    def coeffs(self):
        return self._c

    @property
    def exponents(self):
        return self._basis.exponents

    @property
    def constant(self):
        return float(self._c[0])

    def coeff(self, alpha):
        """Raw Taylor coefficient of the monomial ``x**alpha``."""
        return float(self._c[self._basis.index(alpha)])

    def as_dict(self, tol=0.0):
        return {tuple(int(e) for e in exp): float(v)
                for exp, v in zip(self._basis.exponents, self._c) if abs(v) > tol}

    def _like(self, c):
        return TaylorJet._wrap(self._basis, c)

    def _check(self, other):
        if other._basis is not self._basis:
            raise ValueError("jets differ in number of variables, order or grouping")

    def __add__(self, other):
        if isinstance(other, TaylorJet):
            self._check(other)
            return self._like(self._c + other._c)
        c = self._c.copy()
        c[0] += float(other)
        return self._like(c)

    __radd__ = __add__

    def __neg__(self):
        return self._like(-self._c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TaylorJet):
            self._check(other)
            i, j, k = self._basis.pairs
            c = np.bincount(k, weights=self._c[i] * other._c[j], minlength=self._basis.size)
            return self._like(c)
        return self._like(self._c * float(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TaylorJet):
            return self * other.reciprocal()
        return self._like(self._c / float(other))

    def __pow__(self, n):
        if int(n) != n or n < 0:
            raise ValueError("only non-negative integer powers")
        out = self._like(np.eye(1, self._basis.size).ravel())
        for _ in range(int(n)):
            out = out * self
        return out

    def compose(self, taylor):
        """Return ``f(self)`` given the Taylor coefficients of ``f`` at the
        constant term, ``taylor[n] = f^(n)(c0) / n!``."""
        h = self._like(np.concatenate([[0.0], self._c[1:]]))
        out = np.zeros(self._basis.size)
        out[0] = taylor[0]
        power = h
        for n in range(1, len(taylor)):
            if not np.any(power._c):
                break
            out += taylor[n] * power._c
            if n < len(taylor) - 1:
                power = power * h
        return self._like(out)

    def reciprocal(self):
        c0 = self._c[0]
        if c0 == 0.0:
            raise ZeroDivisionError("reciprocal of a jet with zero constant term")
        n = self._basis.max_degree
        return self.compose([(-1.0) ** k / c0 ** (k + 1) for k in range(n + 1)])

    def __repr__(self):
        shown = dict(list(self.as_dict().items())[:6])
        return f"TaylorJet(nvars={self.nvars}, order={self.order}, groups={self.groups}, {shown})"


def jet_variable(i, base, d, order, groups=None):
    """Jet of the coordinate function ``x_i`` expanded about ``base``."""
    if not 0 <= i < d:
        raise ValueError(f"variable index {i} out of range for {d} variables")
    jet = TaylorJet(d, order, groups=groups)
    c = np.zeros(jet._basis.size)
    c[0] = base
    if order >= 1:
        alpha = np.zeros(d, dtype=np.int64)
        alpha[i] = 1
        c[jet._basis.index(alpha)] = 1.0
    return jet._like(c)


def jet_constant(value, d, order, groups=None):
    jet = TaylorJet(d, order, groups=groups)
    return jet + value


def jet_add(a, b):
    return a + b


def jet_mul(a, b):
    return a * b


def jet_scale(a, factor):
    return a * float(factor)


def jet_exp(a):
    """``exp(a)`` truncated to the jet's order."""
    c0 = a.constant
    n = a._basis.max_degree
    e0 = math.exp(c0)
    return a.compose([e0 / math.factorial(k) for k in range(n + 1)])


def entire_g_taylor(u0, c, n):
    """Taylor coefficients at ``u0`` of ``g(u) = (1 - exp(-c u)) / u``.

    ``g(u) = int_0^c exp(-u s) ds``, so the k-th coefficient is
    ``(-1)^k / k! * int_0^c s^k exp(-u0 s) ds``; this avoids the 0/0 at u = 0
    and the cancellation near it.
    """
    x = c * u0
    out = np.empty(n + 1)
    if abs(x) < 1.0:
        for k in range(n + 1):
            # int_0^1 tau^k exp(-x tau) d tau as a power series in x
            total, term, j = 0.0, 1.0, 0
            while True:
                piece = term / (k + j + 1)
                total += piece
                j += 1
                term *= -x / j
                if abs(term) < 1e-18 * abs(total) or j > 200:
                    break
            out[k] = (-1.0) ** k * c ** (k + 1) / math.factorial(k) * total
    else:
        if u0 <= 0.0:
            raise ValueError("g(u) Taylor coefficients need u0 > 0 when c*u0 >= 1")
        ks = np.arange(n + 1)
        out = (-1.0) ** ks * gammainc(ks + 1, x) / u0 ** (ks + 1)
    return out


def jet_entire_g(a, c):
    """``g(a)`` for ``g(u) = (1 - exp(-c u)) / u``, valid at ``a = 0``."""
    return a.compose(entire_g_taylor(a.constant, c, a._basis.max_degree))


def extract_partial(a, alpha):
    """Mixed partial derivative ``D^alpha`` at the expansion point."""
    alpha = tuple(int(v) for v in alpha)
    return a.coeff(alpha) * math.prod(math.factorial(v) for v in alpha)
