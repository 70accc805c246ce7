"""Smoke test for the imdiff Python module.

Build and copy the extension next to this file, then run it:

    cargo build --release -p imdiff-py --features extension-module
    cp target/release/libimdiff_py.so python/imdiff.so
    python3 python/smoke_test.py
"""

import cmath
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import imdiff  # noqa: E402


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    assert close(imdiff.gamma(1.0), 1.0, 1e-15)
    z = 0.3 + 0.7j
    assert close(imdiff.gamma(z + 1), z * imdiff.gamma(z), 1e-13)
    assert close(cmath.exp(imdiff.log_gamma(2.5 + 3j)), imdiff.gamma(2.5 + 3j), 1e-13)
    assert close(imdiff.macdonald_k(0.5, 2.0), math.sqrt(math.pi / 4) * math.exp(-2), 1e-14)
    assert close(imdiff.hyp2f1(1, 1, 2, -1), math.log(2), 1e-13)
    assert imdiff.whittaker_w(0.2, 1.3j, 2.0).imag == 0.0

    mp = imdiff.PolynomialFamily.meixner_pollaczek(1.0, math.pi / 2)
    assert close(mp.eval(1, 1.0), 2.0, 1e-13)
    assert mp.eigen_defect(3) < 1e-9
    gram = mp.gram_matrix(3)
    assert abs(gram[0][1]) < 1e-8 * abs(gram[0][0])

    spec = imdiff.WeightSpec(0.0, [1.0])
    assert abs(spec.apply(lambda s: 1.0, 0.4)) < 1e-13
    try:
        imdiff.PolynomialFamily.meixner_pollaczek(-1.0, 1.0)
        raise AssertionError("negative a accepted")
    except ValueError:
        pass

    p = imdiff.ExtensionParams(0.2, 0.3, 1.2)
    assert p.d_residual(1.0, 0.7) < 1e-10
    assert close(abs(p.delta(0.0, 0.5)) ** 2, 1 / (1 + math.cos(1.2) + 0.25), 1e-12)

    kl = imdiff.Transform.kl()
    g = imdiff.RealFunction(lambda x: math.exp(-x - 1 / x), "exp(-x-1/x)")
    f = kl.forward(g)
    assert close(f(0.5), 0.099532589771659332, 1e-12)
    assert close(f(0.5), f(-0.5), 1e-14)

    gauss = imdiff.RealFunction.battery("line_gaussian")[0]
    source, target = imdiff.double_mellin_norms(gauss)
    assert close(target, source, 1e-6)

    report = imdiff.run_suite("specfun", timings=False)
    assert report.passed, str(report)
    assert all(c.ms == 0 for c in report.checks)
    assert "specfun.k_recurrence" in imdiff.check_ids("specfun")
    assert not imdiff.run_suite("as_written").passed
    try:
        imdiff.run_suite("nonesuch")
        raise AssertionError("unknown suite accepted")
    except ValueError:
        pass

    print("imdiff smoke test: OK")


if __name__ == "__main__":
    main()
