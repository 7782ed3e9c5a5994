"""Gamma and Xi interaction tensors and their per-pair cache.

``gamma[k, l, m]`` is ``D_t^k D_b^m D_a^l K`` at the origin for the pair
separation ``s`` (indices in :func:`~hermite_vortex.hermite_basis.hermite_indices`
layout); it does not include the projection prefactor.  ``xi[l, m]`` holds the
two components of ``D_b^m D_a^l W(b - a - s)``.

Both tensors are homogeneous in the core size: with ``n = |k| + |l| + |m|``,

    gamma(s, lam) = lam^(-2 - n) gamma(s / lam, 1)
    xi(s, lam)    = lam^(-1 - |l| - |m|) xi(s / lam, 1)

and point reflection ``s -> -s`` multiplies entries by ``(-1)^n`` and
``-(-1)^(|l| + |m|)`` respectively.  The cache builds at unit core size and
rescales, so a vortex's self-interaction is built once per run.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .hermite_basis import hermite_indices
from .kernels import kernel_K_multi_jet, xi_integrand_jet

__all__ = [
    "CoeffTensors",
    "TensorCache",
    "build_gamma",
    "build_xi",
    "build_tensors",
    "tensor_cache_get",
]


@lru_cache(maxsize=None)
def _layout(order):
    idx = np.array(hermite_indices(order), dtype=np.int64)
    P = len(idx)
    deg = idx.sum(axis=1)
    fact = np.array([math.factorial(a) * math.factorial(b) for a, b in idx], dtype=float)
    # gamma pattern (a <- l, b <- m, t <- k)
    k, l, m = np.meshgrid(np.arange(P), np.arange(P), np.arange(P), indexing="ij")
    gamma_alpha = np.concatenate([idx[l], idx[m], idx[k]], axis=-1).reshape(-1, 6)
    gamma_fact = (fact[k] * fact[l] * fact[m]).reshape(-1)
    gamma_deg = deg[k] + deg[l] + deg[m]
    l2, m2 = np.meshgrid(np.arange(P), np.arange(P), indexing="ij")
    xi_alpha = np.concatenate([idx[l2], idx[m2]], axis=-1).reshape(-1, 4)
    xi_fact = (fact[l2] * fact[m2]).reshape(-1)
    xi_deg = deg[l2] + deg[m2]
    return {
        "P": P,
        "gamma_alpha": gamma_alpha, "gamma_fact": gamma_fact, "gamma_deg": gamma_deg,
        "xi_alpha": xi_alpha, "xi_fact": xi_fact, "xi_deg": xi_deg,
    }


def build_gamma(order, s, lam):
    """Gamma tensor of shape ``(P, P, P)`` straight from the kernel jet."""
    lay = _layout(order)
    jet = kernel_K_multi_jet(order, s, lam)
    pos = jet._basis.indices(lay["gamma_alpha"])
    P = lay["P"]
    return (jet.coeffs[pos] * lay["gamma_fact"]).reshape(P, P, P)


def build_xi(order, s, lam):
    """Xi tensor of shape ``(P, P, 2)`` straight from the integrand jets."""
    lay = _layout(order)
    w1, w2 = xi_integrand_jet(order, s, lam)
    pos = w1._basis.indices(lay["xi_alpha"])
    P = lay["P"]
    return np.stack([(w.coeffs[pos] * lay["xi_fact"]).reshape(P, P) for w in (w1, w2)], axis=-1)


@dataclass(frozen=True)
class CoeffTensors:
    order: int
    s: tuple
    lam: float
    gamma: np.ndarray
    xi: np.ndarray

    def scaled(self, lam):
        """Same normalized separation ``s / lam`` at a different core size."""
        lay = _layout(self.order)
        r = self.lam / lam
        g = self.gamma * (r ** (2 + lay["gamma_deg"]))
        x = self.xi * (r ** (1 + lay["xi_deg"]))[..., None]
        s = tuple(v * lam / self.lam for v in self.s)
        return CoeffTensors(self.order, s, lam, g, x)

    def reflected(self):
        """Tensors for the separation ``-s``."""
        lay = _layout(self.order)
        g = self.gamma * (-1.0) ** lay["gamma_deg"]
        x = self.xi * (-(-1.0) ** lay["xi_deg"])[..., None]
        return CoeffTensors(self.order, tuple(-v for v in self.s), self.lam, g, x)


def build_tensors(order, s, lam):
    s = tuple(float(v) for v in s)
    return CoeffTensors(order, s, float(lam), build_gamma(order, s, lam), build_xi(order, s, lam))


class TensorCache:
    """Per-pair tensor cache with a refresh tolerance on ``s`` and ``lam``.

    An entry is reused while both the separation and the core size stay
    within ``tolerance`` (max-norm) of the cached values; ``tolerance=0``
    reuses only exact repeats.  Builds happen at unit core size and are
    rescaled, so entries with the same ``s / lam`` share one kernel build.
    """

    def __init__(self, order, tolerance=0.0):
        if tolerance < 0:
            raise ValueError("tolerance must be >= 0")
        self.order = int(order)
        self.tolerance = float(tolerance)
        self.builds = 0
        self._entries = {}
        self._normalized = {}
        self._lock = threading.Lock()

    def _normalized_tensors(self, sigma):
        hit = self._normalized.get(sigma)
        if hit is None:
            hit = build_tensors(self.order, sigma, 1.0)
            self.builds += 1
            if len(self._normalized) > 64:
                self._normalized.clear()
            self._normalized[sigma] = hit
        return hit

    def get(self, key, s, lam):
        s = (float(s[0]), float(s[1]))
        lam = float(lam)
        with self._lock:
            entry = self._entries.get(key)
            if entry is not None:
                ds = max(abs(s[0] - entry.s[0]), abs(s[1] - entry.s[1]))
                if ds <= self.tolerance and abs(lam - entry.lam) <= self.tolerance:
                    return entry
            sigma = (s[0] / lam, s[1] / lam)
            entry = self._normalized_tensors(sigma).scaled(lam)
            self._entries[key] = entry
            return entry


_caches = {}


def tensor_cache_get(order, s, lam, tolerance=0.0, key=None):
    """Module-level convenience wrapper around a shared :class:`TensorCache`."""
    cache = _caches.setdefault((int(order), float(tolerance)), TensorCache(order, tolerance))
    return cache.get(key, s, lam)
