"""Numba-compiled inner loops.

Everything here is a plain sequential kernel so results are bit-identical
with or without numba; the fallback decorator keeps the package importable
if numba is missing (pure-Python speed only).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


@njit(cache=True, nogil=True)
def dtw_table(cost):
    """Cumulative-cost table for steps {(1,0),(0,1),(1,1)}, unit weights."""
    F, G = cost.shape
    D = np.empty((F, G))
    D[0, 0] = cost[0, 0]
    for j in range(1, G):
        D[0, j] = D[0, j - 1] + cost[0, j]
    for i in range(1, F):
        D[i, 0] = D[i - 1, 0] + cost[i, 0]
        for j in range(1, G):
            best = D[i - 1, j - 1]
            if D[i - 1, j] < best:
                best = D[i - 1, j]
            if D[i, j - 1] < best:
                best = D[i, j - 1]
            D[i, j] = cost[i, j] + best
    return D


@njit(cache=True, nogil=True)
def sosfilt(sos, x, zi):
    """Direct-form-II-transposed biquad cascade over a 1-D signal.

    ``zi`` is (n_sections, 2) initial state, consumed (not mutated).
    """
    n = x.shape[0]
    k = sos.shape[0]
    y = x.copy()
    z = zi.copy()
    for s in range(k):
        b0, b1, b2 = sos[s, 0], sos[s, 1], sos[s, 2]
        a1, a2 = sos[s, 4], sos[s, 5]
        z1, z2 = z[s, 0], z[s, 1]
        for i in range(n):
            xi = y[i]
            yi = b0 * xi + z1
            z1 = b1 * xi + z2 - a1 * yi
            z2 = b2 * xi - a2 * yi
            y[i] = yi
    return y


@njit(cache=True, nogil=True)
def pegasos_epochs(X, Y, lam, perms):
    """Epoch-shuffled one-vs-rest Pegasos subgradient descent.

    X: (n, d) standardized features. Y: (K, n) matrix of +-1 targets.
    perms: (epochs, n) sample visit order per epoch. Weight shrink happens
    every step; the data term and (unregularized) bias only on margin
    violations. Learning rate 1/(lam*t) with a global step counter t.
    """
    n, d = X.shape
    K = Y.shape[0]
    W = np.zeros((K, d))
    b = np.zeros(K)
    t = 0
    for e in range(perms.shape[0]):
        for s in range(n):
            idx = perms[e, s]
            t += 1
            eta = 1.0 / (lam * t)
            shrink = 1.0 - eta * lam
            for k in range(K):
                acc = b[k]
                for j in range(d):
                    acc += W[k, j] * X[idx, j]
                yk = Y[k, idx]
                if yk * acc < 1.0:
                    step = eta * yk
                    for j in range(d):
                        W[k, j] = shrink * W[k, j] + step * X[idx, j]
                    b[k] += step
                else:
                    for j in range(d):
                        W[k, j] = shrink * W[k, j]
    return W, b
