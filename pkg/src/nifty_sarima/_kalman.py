"""Compiled kernels for the ARMA state-space likelihood.

The ARMA(r, r-1) process is written in Harvey's companion form::

    w_t       = Z a_t,               Z = (1, 0, ..., 0)
    a_{t+1}   = T a_t + R e_{t+1},   T[:, 0] = phi, T[i, i+1] = 1
                                     R = (1, theta_1, ..., theta_{r-1})

All kernels work with unit innovation variance; callers rescale.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def is_stable(coefs):  # pragma: no cover
    """True if 1 - sum(coefs[i] z^(i+1)) has every root outside the unit circle.

    Uses the Levinson step-down recursion: the polynomial is stable iff every
    reflection coefficient has modulus below one.
    """
    a = coefs.copy()
    k = a.size
    while k > 0 and a[k - 1] == 0.0:
        k -= 1
    while k > 0:
        r = a[k - 1]
        if not abs(r) < 1.0:
            return False
        denom = 1.0 - r * r
        b = np.empty(k - 1)
        for j in range(k - 1):
            b[j] = (a[j] + r * a[k - 2 - j]) / denom
        a = b
        k -= 1
    return True


@njit(cache=True)
def stationary_covariance(phi, rvec, max_doublings=64):  # pragma: no cover
    """Solve P = T P T' + R R' by the doubling algorithm.

    Returns (P, converged). ``phi`` and ``rvec`` both have length r.
    """
    r = rvec.size
    P = np.outer(rvec, rvec)
    A = np.zeros((r, r))
    for i in range(r):
        A[i, 0] = phi[i]
        if i + 1 < r:
            A[i, i + 1] = 1.0
    for _ in range(max_doublings):
        P = P + A @ P @ A.T
        A = A @ A
        if np.max(np.abs(A)) < 1e-15:
            return P, True
        if not np.isfinite(A[0, 0]):
            break
    return P, False


@njit(cache=True)
def kalman_filter(w, phi, rvec):  # pragma: no cover
    """Prediction-error decomposition of a zero-mean ARMA sample.

    Returns (v, F, a, P, ok): one-step prediction errors and their variances
    (unit innovation variance), plus the predicted state mean and covariance
    for the period after the last observation.
    """
    r = rvec.size
    n = w.size
    v = np.empty(n)
    F = np.empty(n)
    a = np.zeros(r)
    P, ok = stationary_covariance(phi, rvec)
    if not ok:
        return v, F, a, P, False
    Pf = np.empty((r, r))
    M = np.empty(r)
    for t in range(n):
        f = P[0, 0]
        if not f > 0.0:
            return v, F, a, P, False
        e = w[t] - a[0]
        v[t] = e
        F[t] = f
        for i in range(r):
            M[i] = P[i, 0]
        for i in range(r):
            a[i] += M[i] * e / f
            for j in range(r):
                Pf[i, j] = P[i, j] - M[i] * M[j] / f
        # a <- T a ; P <- T Pf T' + R R'
        a0 = a[0]
        for i in range(r - 1):
            a[i] = phi[i] * a0 + a[i + 1]
        a[r - 1] = phi[r - 1] * a0
        p00 = Pf[0, 0]
        for i in range(r):
            for j in range(i, r):
                x = phi[i] * phi[j] * p00 + rvec[i] * rvec[j]
                if j + 1 < r:
                    x += phi[i] * Pf[0, j + 1]
                if i + 1 < r:
                    x += phi[j] * Pf[i + 1, 0]
                    if j + 1 < r:
                        x += Pf[i + 1, j + 1]
                P[i, j] = x
                P[j, i] = x
    return v, F, a, P, True
