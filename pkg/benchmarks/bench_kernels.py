"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]

Each row times one kernel call pattern on both backends and reports the
speedup of the compiled one. A short end-to-end ring integration is timed
with each backend swapped in as well.
"""
import argparse
import time

import numpy as np

from vortexlab import kernels
from vortexlab.integrate import IntegratorSettings, integrate
from vortexlab.rings import RingModel, RingSystem


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(b):
    rng = np.random.default_rng(0)
    gam = rng.uniform(0.5, 1.5, 16)
    pos = np.ascontiguousarray(rng.uniform(-2, 2, (16, 2)))
    hpos = pos.copy()
    hpos[:, 1] = np.abs(hpos[:, 1]) + 0.1
    tracer = np.zeros(16, dtype=np.uint8)
    dz = rng.uniform(-3, 3, 20000)
    r = rng.uniform(0.1, 3, 20000)
    rp = rng.uniform(0.1, 3, 20000)
    Z = np.ascontiguousarray(rng.uniform(-1, 1, 8))
    R = np.ascontiguousarray(rng.uniform(0.5, 2, 8))
    a = 0.02 * R
    rgam = np.ones(8)

    def rhs(t, y):
        return b.plane_velocity(gam, y.reshape(-1, 2)).reshape(-1)

    y0 = pos.reshape(-1).copy()
    f0 = rhs(0.0, y0)
    return {
        "plane_velocity N=16 (x1000)": lambda: [b.plane_velocity(gam, pos) for _ in range(1000)],
        "halfplane_velocity N=16 (x1000)": lambda: [b.halfplane_velocity(gam, hpos, tracer, 1.0) for _ in range(1000)],
        "green_fast scalar (x20000)": lambda: [b.green_fast(dz[i], r[i], rp[i]) for i in range(20000)],
        "green_fast_array n=20000": lambda: b.green_fast_array(dz, r, rp),
        "ring_velocity N=8 (x1000)": lambda: [b.ring_velocity(Z, R, rgam, a) for _ in range(1000)],
        "dp5_step plane N=16 (x1000)": lambda: [b.dp5_step(rhs, 0.0, y0, 1e-3, f0, 1e-10, 1e-12) for _ in range(1000)],
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if "cython" not in kernels.BACKENDS:
        print("compiled backend not built; only the numpy backend is available")
        return
    py, cy = kernels.BACKENDS["python"], kernels.BACKENDS["cython"]
    print(f"{'kernel':36s} {'numpy [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    cp, cc = cases(py), cases(cy)
    for name in cp:
        tp, tc = _time(cp[name], args.repeat), _time(cc[name], args.repeat)
        print(f"{name:36s} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f}")
    rows = {}
    for label, b in (("python", py), ("cython", cy)):
        saved = kernels.ring_velocity, kernels.dp5_step
        kernels.ring_velocity, kernels.dp5_step = b.ring_velocity, b.dp5_step
        try:
            rs = RingSystem.from_rings([(0.0, 1.0, 1.0, 0.05), (0.3, 1.0, 1.0, 0.05)])
            rows[label] = _time(lambda: integrate(RingModel(rs), settings=IntegratorSettings(t_end=20.0)),
                                args.repeat)
        finally:
            kernels.ring_velocity, kernels.dp5_step = saved
    print(f"{'ring leapfrog integration t=20':36s} {rows['python']:11.4f} {rows['cython']:11.4f} "
          f"{rows['python'] / rows['cython']:8.1f}")


if __name__ == "__main__":
    main()
