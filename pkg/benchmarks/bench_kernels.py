"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Times the batched loss quadrature and the decision-stump search on both
backends and checks that they agree.
"""

import argparse
import timeit

import numpy as np

from marginloss import _backend
from marginloss.losses import named_loss
from marginloss.quadrature import integrate_named_batch


def quad_case(kernels, upper, codes):
    return integrate_named_batch(codes, upper, kernels=kernels)


def stump_case(kernels, X, y, w, order):
    return kernels.best_stump(X, y, w, order)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--rows", type=int, default=5000)
    ap.add_argument("--features", type=int, default=10)
    args = ap.parse_args()

    if _backend.compiled_kernels is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    backends = {"python": _backend.python_kernels, "compiled": _backend.compiled_kernels}

    loss = named_loss("gaussian", 4)
    upper = np.linspace(-10, 10, args.points)
    rng = np.random.Generator(np.random.PCG64(0))
    X = rng.standard_normal((args.rows, args.features))
    y = np.where(rng.random(args.rows) < 0.5, 1.0, -1.0)
    w = np.full(args.rows, 1.0 / args.rows)
    order = np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").T)

    cases = {
        f"quadrature ({args.points} upper limits, gaussian:4)": lambda k: quad_case(k, upper, loss._codes),
        f"stump search ({args.rows} x {args.features})": lambda k: stump_case(k, X, y, w, order),
    }
    print(f"{'case':48s} {'python [s]':>12s} {'compiled [s]':>13s} {'speedup':>8s}")
    for name, run in cases.items():
        times = {b: min(timeit.repeat(lambda: run(k), number=1, repeat=args.repeat))
                 for b, k in backends.items()}
        a, b = run(backends["python"]), run(backends["compiled"])
        if isinstance(a, np.ndarray):
            agree = float(np.max(np.abs(a - b))) <= 1e-10
        else:
            agree = a[:3] == b[:3] and abs(a[3] - b[3]) <= 1e-12
        print(f"{name:48s} {times['python']:12.4f} {times['compiled']:13.4f} "
              f"{times['python'] / times['compiled']:7.1f}x  agree={agree}")


if __name__ == "__main__":
    main()
