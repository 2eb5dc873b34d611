"""Pure numpy implementations of the hot kernels.

Mirrors ``_ckernels.pyx`` function for function. Used when the compiled
extension is unavailable or ``VORTEXLAB_KERNELS=python`` is set.
"""
import math

import numpy as np

PI = math.pi
INV_2PI = 1.0 / (2.0 * math.pi)


def plane_velocity(gam, pos):
    gam = np.asarray(gam, dtype=np.float64)
    pos = np.asarray(pos, dtype=np.float64)
    dx = pos[:, 0, None] - pos[None, :, 0]
    dy = pos[:, 1, None] - pos[None, :, 1]
    l2 = dx * dx + dy * dy
    np.fill_diagonal(l2, np.inf)
    w = gam[None, :] / l2
    out = np.empty_like(pos)
    out[:, 0] = -INV_2PI * np.sum(w * dy, axis=1)
    out[:, 1] = INV_2PI * np.sum(w * dx, axis=1)
    return out


def halfplane_velocity(gam, pos, tracer, scale):
    gam = np.asarray(gam, dtype=np.float64)
    pos = np.asarray(pos, dtype=np.float64)
    x, y = pos[:, 0], pos[:, 1]
    dx = x[:, None] - x[None, :]
    ysum = y[:, None] + y[None, :]
    ydif = y[:, None] - y[None, :]
    A = dx * dx + ysum * ysum
    B = dx * dx + ydif * ydif
    np.fill_diagonal(B, np.inf)
    np.fill_diagonal(A, np.inf)
    g = gam[None, :]
    vx = np.sum(g * (ysum / A - ydif / B), axis=1) / PI
    vy = -np.sum(g * dx * (1.0 / A - 1.0 / B), axis=1) / PI
    self_term = np.where(np.asarray(tracer, dtype=bool), 0.0, gam / (2.0 * PI * y))
    out = np.empty_like(pos)
    out[:, 0] = scale * (vx + self_term)
    out[:, 1] = scale * vy
    return out


def restricted3_rhs(x, y, t, eps, omega0):
    p1 = x * x + (y - 1.0) ** 2
    p2 = x * x + (y + 1.0) ** 2
    dhdx = x / PI * (1.0 / p1 + 1.0 / p2) + omega0 * x
    dhdy = ((y - 1.0) / p1 + (y + 1.0) / p2) / PI + omega0 * y
    c = 1.25 / PI * eps
    wt = omega0 * t
    return dhdy - c * math.cos(wt), -dhdx + c * math.sin(wt)


def _agm(k2, kp2):
    """K(k) and the tail sum T = sum_{n>=1} 2^(n-1) c_n^2 of the AGM.

    E = K (1 - k^2/2 - T); keeping T separate avoids cancellation in K - E.
    """
    a = 1.0
    b = math.sqrt(kp2)
    c = math.sqrt(k2)
    tail = 0.0
    pw = 0.5
    for _ in range(64):
        an = 0.5 * (a + b)
        b = math.sqrt(a * b)
        c = c * c / (4.0 * an)
        a = an
        pw *= 2.0
        tail += pw * c * c
        if c < 1e-17 * a:
            break
    return PI / (2.0 * a), tail


def _moduli(dz, r, rp):
    D = dz * dz + (r + rp) ** 2
    k2 = 4.0 * r * rp / D
    kp2 = (dz * dz + (r - rp) ** 2) / D
    return D, k2, kp2


def green_fast(dz, r, rp):
    D, k2, kp2 = _moduli(dz, r, rp)
    K, tail = _agm(k2, kp2)
    k = math.sqrt(k2)
    return math.sqrt(r * rp) * K * tail / (PI * k)


def green_grad_fast(dz, r, rp):
    """(G, dG/dz, dG/dr) with respect to the first ring's coordinates."""
    D, k2, kp2 = _moduli(dz, r, rp)
    K, tail = _agm(k2, kp2)
    k = math.sqrt(k2)
    sq = math.sqrt(r * rp)
    G = sq * K * tail / (PI * k)
    dF = K * (0.5 * k2 * k2 - (2.0 - k2) * tail) / (kp2 * k2)
    pre = sq / (2.0 * PI) * dF
    dGdz = -pre * k * dz / D
    dGdr = G / (2.0 * r) + pre * 0.5 * k * (1.0 / r - 2.0 * (r + rp) / D)
    return G, dGdz, dGdr


def _agm_array(k2, kp2):
    a = np.ones_like(k2)
    b = np.sqrt(kp2)
    c = np.sqrt(k2)
    tail = np.zeros_like(k2)
    pw = 0.5
    for _ in range(64):
        an = 0.5 * (a + b)
        b = np.sqrt(a * b)
        c = c * c / (4.0 * an)
        a = an
        pw *= 2.0
        tail += pw * c * c
        if np.all(c < 1e-17 * a):
            break
    return PI / (2.0 * a), tail


def green_fast_array(dz, r, rp):
    dz, r, rp = np.broadcast_arrays(
        np.asarray(dz, dtype=np.float64),
        np.asarray(r, dtype=np.float64),
        np.asarray(rp, dtype=np.float64),
    )
    D, k2, kp2 = _moduli(dz, r, rp)
    K, tail = _agm_array(k2, kp2)
    return np.sqrt(r * rp) * K * tail / (PI * np.sqrt(k2))


def ring_velocity(Z, R, gam, a):
    Z = np.asarray(Z, dtype=np.float64)
    R = np.asarray(R, dtype=np.float64)
    gam = np.asarray(gam, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    n = Z.shape[0]
    out = np.empty((n, 2))
    out[:, 0] = gam / (4.0 * PI * R) * (np.log(8.0 * R / a) - 0.25)
    out[:, 1] = 0.0
    for i in range(n):
        sz = 0.0
        sr = 0.0
        for j in range(n):
            if i == j:
                continue
            _, gz, gr = green_grad_fast(Z[i] - Z[j], R[i], R[j])
            sz += gam[j] * gr
            sr += gam[j] * gz
        out[i, 0] += sz / (PI * R[i])
        out[i, 1] = -sr / (PI * R[i])
    return out


# Dormand-Prince 5(4) tableau
DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
DP_A = np.zeros((7, 7))
DP_A[1, :1] = [1 / 5]
DP_A[2, :2] = [3 / 40, 9 / 40]
DP_A[3, :3] = [44 / 45, -56 / 15, 32 / 9]
DP_A[4, :4] = [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]
DP_A[5, :5] = [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]
DP_A[6, :6] = [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]
DP_B = DP_A[6].copy()
# fifth-order minus embedded fourth-order weights
DP_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])


def dp5_step(f, t, y, h, f0, rel_tol, abs_tol):
    """One Dormand-Prince trial step. Returns (y_new, f_new, error_norm, K)."""
    K = np.empty((7, y.shape[0]))
    K[0] = f0
    for i in range(1, 6):
        K[i] = f(t + DP_C[i] * h, y + h * (DP_A[i, :i] @ K[:i]))
    y_new = y + h * (DP_B[:6] @ K[:6])
    K[6] = f(t + h, y_new)
    err = h * (DP_E @ K)
    if not err.size:
        return y_new, K[6], 0.0, K
    scale = np.maximum(abs_tol, rel_tol * np.maximum(np.abs(y), np.abs(y_new)))
    return y_new, K[6], float(np.max(np.abs(err) / scale)), K
