"""Smoke test for the fracstab_py extension module.

Build and run:

    python -m venv .venv && . .venv/bin/activate
    pip install maturin
    maturin develop -m crates/python/Cargo.toml --release
    python python/smoke_test.py
"""

import math

import fracstab_py as fs


def main():
    # Robust regions and the sign of c.
    assert fs.order_independent_region(1.0, 1.0, 4.0) == "stable-all"
    assert fs.order_independent_region(-5.0, -5.0, 4.0) == "unstable-all"
    assert fs.classify_coeffs(1.0, 1.0, -1.0, 0.5, 0.7)["kind"] == "UnstableAllOrders"

    # Verdict from a matrix, checked against the root count.
    matrix = [[0.36, -1.0], [0.08, -0.064]]
    for q1, expected in [(0.58, "StableAtOrders"), (0.63, "UnstableAtOrders")]:
        v = fs.classify_matrix(matrix, q1, 0.8)
        assert v["kind"] == expected, v
        a, b, c = -matrix[0][0], -matrix[1][1], matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
        n = fs.count_rhp_roots(a, b, c, q1, 0.8)
        assert (n == 0) == (expected == "StableAtOrders"), n

    # Critical curve: curve points are imaginary-axis roots.
    curve = fs.CriticalCurve(4.0, 0.4, 0.8)
    b, a = curve.gamma_point(1.0)
    assert abs(b + 5.472136) < 1e-6 and abs(a - 2.381966) < 1e-6
    f = fs.CharFunction(a, b, 4.0, 0.4, 0.8)
    assert abs(f(1j)) < 1e-12
    assert abs(curve.a_star(b) - a) < 1e-9
    assert abs(fs.critical_a(b, 4.0, 0.4, 0.8) - a) < 1e-9
    assert f.root_sensitivity(1j).real < 0
    try:
        f.count_rhp_roots()
    except RuntimeError:
        pass
    else:
        raise AssertionError("boundary root not reported")

    try:
        fs.CharFunction(1.0, 1.0, 1.0, 1.5, 0.5)
    except ValueError:
        pass
    else:
        raise AssertionError("invalid order accepted")

    # FitzHugh-Nagumo anchors.
    p = fs.FhnParams(0.08, 0.7, 0.8, 1.24567)
    eq = p.equilibrium()
    assert abs(eq["v_star"] - 0.8) < 1e-5 and abs(eq["w_star"] - 1.875) < 1e-5
    q1 = p.hopf_q1(0.8)
    assert abs(q1 - 0.599) < 0.005, q1
    assert p.classify(0.58, 0.8)["kind"] == "StableAtOrders"
    assert abs(p.robust_threshold - math.sqrt(1 - 0.064)) < 1e-12
    hopf = p.hopf_curve(50)
    assert any(abs(x - 0.599) < 0.01 and abs(y - 0.8) < 1e-12 for x, y in hopf)
    branch = p.branch_diagram(-1.0, 3.0, 9)
    assert len(branch) == 9 and branch[0][2] is True

    t, v, w = p.simulate(0.63, 0.8, 20.0)
    assert len(t) == len(v) == len(w) == 2001
    assert abs(v[0] - eq["v_star"] - 0.01) < 1e-15

    # Linear solver and decay fit.
    times, states = fs.simulate_linear([[-1.0, 1.0], [-1.0, -1.0]], 0.4, 0.8, [1.0, 0.0], 200.0, 0.05)
    rate = fs.estimate_decay_exponent(times, states, 0.5)
    assert 0.25 <= rate <= 0.55, rate

    print("fracstab_py smoke test passed")


if __name__ == "__main__":
    main()
