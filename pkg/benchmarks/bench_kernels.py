"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import random
import timeit

from cei_ground import _kernels_py, kernels


def cases():
    rng = random.Random(7)
    perms = []
    for _ in range(200):
        m = rng.randint(4, 12)
        order = list(range(m))
        rng.shuffle(order)
        perms.append(([rng.randint(0, 1) for _ in range(m)], order))
    return perms


def bench(mod, perms, repeat):
    t_sign = min(timeit.repeat(lambda: [mod.koszul_sort_sign(p, o) for p, o in perms], number=50, repeat=repeat))
    t_exp = min(timeit.repeat(lambda: mod.bounded_exponents(6, 2, 5), number=50, repeat=repeat))
    return t_sign, t_exp


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    perms = cases()
    py = bench(_kernels_py, perms, args.repeat)
    print(f"active backend: {kernels.BACKEND}")
    if kernels.BACKEND != "cython":
        print("compiled extension not active (not built, or CEI_GROUND_PURE is set); only the fallback was timed")
        print(f"koszul_sort_sign   python {py[0]:.4f}s")
        print(f"bounded_exponents  python {py[1]:.4f}s")
        return
    cy = bench(kernels, perms, args.repeat)
    for name, a, b in [("koszul_sort_sign", py[0], cy[0]), ("bounded_exponents", py[1], cy[1])]:
        print(f"{name:18s} python {a:.4f}s  cython {b:.4f}s  speedup {a / b:.1f}x")


if __name__ == "__main__":
    main()
