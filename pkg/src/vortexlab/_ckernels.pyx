# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Same contract as ``_pykernels``."""
import numpy as np

from libc.math cimport sqrt, log, cos, sin, M_PI

cdef double INV_2PI = 1.0 / (2.0 * M_PI)


def plane_velocity(const double[::1] gam, const double[:, ::1] pos):
    cdef Py_ssize_t n = gam.shape[0], i, j
    cdef double dx, dy, l2, sx, sy
    out = np.empty((n, 2))
    cdef double[:, ::1] o = out
    for i in range(n):
        sx = 0.0
        sy = 0.0
        for j in range(n):
            if i == j:
                continue
            dx = pos[i, 0] - pos[j, 0]
            dy = pos[i, 1] - pos[j, 1]
            l2 = dx * dx + dy * dy
            sx += gam[j] * dy / l2
            sy += gam[j] * dx / l2
        o[i, 0] = -INV_2PI * sx
        o[i, 1] = INV_2PI * sy
    return out


def halfplane_velocity(const double[::1] gam, const double[:, ::1] pos, tracer, double scale):
    cdef Py_ssize_t n = gam.shape[0], i, j
    cdef double dx, ys, yd, A, B, vx, vy
    cdef unsigned char[::1] tr = np.ascontiguousarray(tracer, dtype=np.uint8)
    out = np.empty((n, 2))
    cdef double[:, ::1] o = out
    for i in range(n):
        vx = 0.0
        vy = 0.0
        for j in range(n):
            if i == j:
                continue
            dx = pos[i, 0] - pos[j, 0]
            ys = pos[i, 1] + pos[j, 1]
            yd = pos[i, 1] - pos[j, 1]
            A = dx * dx + ys * ys
            B = dx * dx + yd * yd
            vx += gam[j] * (ys / A - yd / B)
            vy -= gam[j] * dx * (1.0 / A - 1.0 / B)
        vx /= M_PI
        vy /= M_PI
        if not tr[i]:
            vx += gam[i] / (2.0 * M_PI * pos[i, 1])
        o[i, 0] = scale * vx
        o[i, 1] = scale * vy
    return out


def restricted3_rhs(double x, double y, double t, double eps, double omega0):
    cdef double p1 = x * x + (y - 1.0) * (y - 1.0)
    cdef double p2 = x * x + (y + 1.0) * (y + 1.0)
    cdef double dhdx = x / M_PI * (1.0 / p1 + 1.0 / p2) + omega0 * x
    cdef double dhdy = ((y - 1.0) / p1 + (y + 1.0) / p2) / M_PI + omega0 * y
    cdef double c = 1.25 / M_PI * eps
    cdef double wt = omega0 * t
    return dhdy - c * cos(wt), -dhdx + c * sin(wt)


cdef inline void _agm(double k2, double kp2, double* K, double* tail) noexcept nogil:
    cdef double a = 1.0, b = sqrt(kp2), c = sqrt(k2), an, pw = 0.5, s = 0.0
    cdef int it
    for it in range(64):
        an = 0.5 * (a + b)
        b = sqrt(a * b)
        c = c * c / (4.0 * an)
        a = an
        pw *= 2.0
        s += pw * c * c
        if c < 1e-17 * a:
            break
    K[0] = M_PI / (2.0 * a)
    tail[0] = s


cdef inline double _green(double dz, double r, double rp) noexcept nogil:
    cdef double D = dz * dz + (r + rp) * (r + rp)
    cdef double k2 = 4.0 * r * rp / D
    cdef double kp2 = (dz * dz + (r - rp) * (r - rp)) / D
    cdef double K, tail
    _agm(k2, kp2, &K, &tail)
    return sqrt(r * rp) * K * tail / (M_PI * sqrt(k2))


cdef inline void _green_grad(double dz, double r, double rp,
                             double* G, double* gz, double* gr) noexcept nogil:
    cdef double D = dz * dz + (r + rp) * (r + rp)
    cdef double k2 = 4.0 * r * rp / D
    cdef double kp2 = (dz * dz + (r - rp) * (r - rp)) / D
    cdef double K, tail, k, sq, dF, pre
    _agm(k2, kp2, &K, &tail)
    k = sqrt(k2)
    sq = sqrt(r * rp)
    G[0] = sq * K * tail / (M_PI * k)
    dF = K * (0.5 * k2 * k2 - (2.0 - k2) * tail) / (kp2 * k2)
    pre = sq / (2.0 * M_PI) * dF
    gz[0] = -pre * k * dz / D
    gr[0] = G[0] / (2.0 * r) + pre * 0.5 * k * (1.0 / r - 2.0 * (r + rp) / D)


def green_fast(double dz, double r, double rp):
    return _green(dz, r, rp)


def green_grad_fast(double dz, double r, double rp):
    cdef double G, gz, gr
    _green_grad(dz, r, rp, &G, &gz, &gr)
    return G, gz, gr


def green_fast_array(dz, r, rp):
    dz, r, rp = np.broadcast_arrays(
        np.asarray(dz, dtype=np.float64),
        np.asarray(r, dtype=np.float64),
        np.asarray(rp, dtype=np.float64),
    )
    shape = dz.shape
    cdef const double[::1] a = np.ascontiguousarray(dz, dtype=np.float64).reshape(-1)
    cdef const double[::1] b = np.ascontiguousarray(r, dtype=np.float64).reshape(-1)
    cdef const double[::1] c = np.ascontiguousarray(rp, dtype=np.float64).reshape(-1)
    cdef Py_ssize_t n = a.shape[0], i
    out = np.empty(n)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _green(a[i], b[i], c[i])
    return out.reshape(shape)


def ring_velocity(const double[::1] Z, const double[::1] R, const double[::1] gam, const double[::1] a):
    cdef Py_ssize_t n = Z.shape[0], i, j
    cdef double G, gz, gr, sz, sr
    out = np.empty((n, 2))
    cdef double[:, ::1] o = out
    for i in range(n):
        sz = 0.0
        sr = 0.0
        for j in range(n):
            if i == j:
                continue
            _green_grad(Z[i] - Z[j], R[i], R[j], &G, &gz, &gr)
            sz += gam[j] * gr
            sr += gam[j] * gz
        o[i, 0] = gam[i] / (4.0 * M_PI * R[i]) * (log(8.0 * R[i] / a[i]) - 0.25) + sz / (M_PI * R[i])
        o[i, 1] = -sr / (M_PI * R[i])
    return out


cdef double DP_C[7]
cdef double DP_A[7][7]
cdef double DP_E[7]
DP_C[:] = [0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0]
DP_A[0][:] = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
DP_A[1][:] = [1.0 / 5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
DP_A[2][:] = [3.0 / 40, 9.0 / 40, 0.0, 0.0, 0.0, 0.0, 0.0]
DP_A[3][:] = [44.0 / 45, -56.0 / 15, 32.0 / 9, 0.0, 0.0, 0.0, 0.0]
DP_A[4][:] = [19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0.0, 0.0, 0.0]
DP_A[5][:] = [9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0.0, 0.0]
DP_A[6][:] = [35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0]
DP_E[:] = [71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200, 22.0 / 525, -1.0 / 40]


def dp5_step(f, double t, const double[::1] y, double h, f0, double rel_tol, double abs_tol):
    """One Dormand-Prince trial step. Returns (y_new, f_new, error_norm, K)."""
    cdef Py_ssize_t n = y.shape[0], i, s, j
    K = np.empty((7, n))
    cdef double[:, ::1] k = K
    cdef const double[::1] src = np.ascontiguousarray(f0, dtype=np.float64)
    cdef double[::1] st
    cdef double acc, e, sc, ay, worst = 0.0
    for j in range(n):
        k[0, j] = src[j]
    for i in range(1, 7):
        stage = np.empty(n)
        st = stage
        for j in range(n):
            acc = 0.0
            for s in range(i):
                acc += DP_A[i][s] * k[s, j]
            st[j] = y[j] + h * acc
        if i == 6:
            y_new = stage
        src = np.ascontiguousarray(f(t + DP_C[i] * h, stage), dtype=np.float64)
        for j in range(n):
            k[i, j] = src[j]
    st = y_new
    for j in range(n):
        e = 0.0
        for s in range(7):
            e += DP_E[s] * k[s, j]
        e = h * e
        if e < 0:
            e = -e
        ay = y[j] if y[j] >= 0 else -y[j]
        if st[j] > ay:
            ay = st[j]
        elif -st[j] > ay:
            ay = -st[j]
        sc = rel_tol * ay
        if sc < abs_tol:
            sc = abs_tol
        e = e / sc
        if not e <= worst:
            worst = e
    return y_new, K[6], worst, K
