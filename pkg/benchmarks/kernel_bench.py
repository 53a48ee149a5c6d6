"""Compare the compiled statevector kernels against the numpy fallback.

Usage: python benchmarks/kernel_bench.py [qubits ...]
"""

import sys
import time

import numpy as np

import beqsim.core as core


def bench(n, reps=2000):
    rng = np.random.default_rng(0)
    amp = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    amp /= np.linalg.norm(amp)
    st = core.StateVector(n, amp.astype(np.complex128))
    m = np.linalg.qr(rng.normal(size=(2, 2))
                     + 1j * rng.normal(size=(2, 2)))[0]

    def loop():
        t0 = time.perf_counter()
        s = st
        for k in range(reps):
            s = core.apply_matrix1(s, k % n, m)
            s = core.apply_cnot(s, k % n, (k + 1) % n)
            s = core.apply_cphase(s, k % n, (k + 1) % n)
        return time.perf_counter() - t0

    fk = core._fk
    if fk is None:
        print("compiled kernels unavailable; timing fallback only")
        print(f"n={n}: fallback {loop():.3f}s")
        return
    fast = loop()
    core._fk = None
    slow = loop()
    core._fk = fk
    print(f"n={n:2d}: compiled {fast:.3f}s  numpy {slow:.3f}s  "
          f"speedup {slow / fast:.1f}x")


if __name__ == "__main__":
    sizes = [int(a) for a in sys.argv[1:]] or [3, 6, 10]
    for n in sizes:
        bench(n)
