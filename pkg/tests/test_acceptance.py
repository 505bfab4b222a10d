"""Acceptance criteria, one test each.  Every test prints a PASS/FAIL line
(also collected into the pytest terminal summary)."""

import time

import numpy as np

from conftest import EXAMPLE_TEXT
from levikohn import (
    DefiningFunction,
    HermitianMetric,
    HoloMap,
    classify_point,
    frame_trace_det,
    graph_frame,
    holomorphic_dimension,
    levi_matrix_on_frame,
    parse_expression,
    run_chain,
    sample_boundary,
    tangency_order,
)

RESULTS = []


def record(num, title, ok, elapsed, limit, detail=""):
    passed = bool(ok) and elapsed < limit
    line = (f"criterion {num} {'PASS' if passed else 'FAIL'}: {title} "
            f"({elapsed:.2f}s, limit {limit:g}s){' - ' + detail if detail else ''}")
    RESULTS.append(line)
    print(line)
    assert ok, detail
    assert elapsed < limit, f"runtime {elapsed:.2f}s over {limit}s"


def P(text, n=3):
    return parse_expression(text, n)


def test_criterion_1_levi_matrix():
    t = time.perf_counter()
    d = DefiningFunction(P(EXAMPLE_TEXT))
    m = levi_matrix_on_frame(d, graph_frame(d))
    want = ((P("-z2*conj(z2) + z1*conj(z1)"), P("-conj(z1)*z2")),
            (P("-z1*conj(z2)"), P("-z1*conj(z1) + 3*z2*conj(z2)")))
    ok = m.entries == want
    record(1, "Levi matrix on the graph frame equals the expected matrix exactly", ok,
           time.perf_counter() - t, 1.0)


def test_criterion_2_trace_det():
    t = time.perf_counter()
    d = DefiningFunction(P(EXAMPLE_TEXT))
    trace, det = frame_trace_det(levi_matrix_on_frame(d, graph_frame(d)))
    ok = (trace == P("2*z2*conj(z2)")
          and det == P("-z1^2*conj(z1)^2 - 3*z2^2*conj(z2)^2 + 3*z1*conj(z1)*z2*conj(z2)"))
    record(2, "trace = 2|z2|^2 and det = -|z1|^4 - 3|z2|^4 + 3|z1|^2|z2|^2", ok,
           time.perf_counter() - t, 1.0, f"trace={trace}, det={det}")


def test_criterion_3_classification():
    t = time.perf_counter()
    d = DefiningFunction(P(EXAMPLE_TEXT))
    origin = classify_point(d, (0, 0, 0), 2)
    box = [(-0.5, 0.5)] * 4 + [(-0.2, 0.2), (-0.5, 0.5)]
    pts = sample_boundary(d, box, 200, seed=7)
    graph = HermitianMetric.graph()
    reps = [classify_point(d, p, 2, graph) for p in pts]
    margins = np.array([r.q_margin for r in reps])
    negative = any(r.eigenvalues[0] < -1e-9 for r in reps)
    ok = (origin.signature == (0, 0, 2) and not origin.z_q and len(pts) == 200
          and margins.min() >= -1e-9 and negative)
    record(3, "origin signature (0,0,2), Z(2) fails; 200 samples: q=2 margin >= -1e-9, "
              "a negative eigenvalue exists", ok, time.perf_counter() - t, 10.0,
           f"min margin {margins.min():.3e}, samples {len(pts)}, negative eigenvalue {negative}")


def test_criterion_4_curve_containment():
    t = time.perf_counter()
    d = DefiningFunction(P(EXAMPLE_TEXT))
    w = lambda s: parse_expression(s, 1, letter="w")  # noqa: E731
    curve = tangency_order(d, HoloMap((w("w1"), w("w1"), w("0"))))
    axis = tangency_order(d, HoloMap((w("w1"), w("0"), w("0"))))
    ok = curve.identically_zero and axis.order == 4
    record(4, "phi(w)=(w,w,0) identically zero, phi(w)=(w,0,0) order 4", ok,
           time.perf_counter() - t, 1.0, f"curve zero={curve.identically_zero}, axis order={axis.order}")


def test_criterion_5_kohn_certification():
    from levikohn import verify_certificate
    t = time.perf_counter()
    d = DefiningFunction(P("z1*conj(z1) + z2*conj(z2) - 1", 2))
    rep = run_chain(d, 1)
    cert = rep.certificate
    ok = (rep.status == "certified" and rep.h == 1 and cert is not None
          and cert["unit_witness"].verify() and verify_certificate(cert, d)
          and all(c.identity_holds() for c in cert["sos_certificates"]))
    record(5, "unit ball q=1 certified(1) with a replayable certificate", ok,
           time.perf_counter() - t, 5.0, f"status {rep.status}({rep.h})")


def test_criterion_6_kohn_dichotomy():
    t = time.perf_counter()
    d = DefiningFunction(P("2*x2", 2))
    rep = run_chain(d, 1)
    want_v = (P("z2 + conj(z2)", 2),)
    hd = holomorphic_dimension(d, rep.variety, (0, 0)) if rep.variety is not None else None
    ok = (rep.status == "stuck" and rep.variety is not None and rep.variety.generators == want_v
          and hd is not None and hd.value == 1 and hd.value >= 1)
    record(6, "r = 2x2, q=1 stuck with V = {x2 = 0}, hol dim 1 >= q", ok,
           time.perf_counter() - t, 5.0,
           f"status {rep.status}({rep.h}), hol dim {None if hd is None else hd.value}")


def test_criterion_7_property_suites():
    from test_cli import PROBLEMS, report_bytes
    from test_kohn import minor_oracle_mismatches, monotonicity_failures
    from test_levi import ky_fan_violation, test_hermitian_symmetry_and_annihilation
    from test_poly import test_wirtinger_vs_finite_differences
    from test_variety import jacobi_identity_failures

    t = time.perf_counter()
    parts = {}

    def check(key, fn):
        try:
            parts[key] = bool(fn())
        except AssertionError:
            parts[key] = False

    check("a", lambda: test_hermitian_symmetry_and_annihilation() or True)
    below, gap = ky_fan_violation(np.random.default_rng(12), matrices=20, planes=1000)
    parts["b"] = below >= -1e-9 and gap <= 1e-9
    parts["c"] = minor_oracle_mismatches(100) == 0
    check("d", lambda: test_wirtinger_vs_finite_differences() or True)
    parts["e"] = jacobi_identity_failures(50) == 0
    parts["f"] = monotonicity_failures() == []
    ex = str(PROBLEMS / "example.json")
    parts["g"] = all(
        len({report_bytes(argv) for _ in range(3)}) == 1
        for argv in (["classify", "--input", ex], ["kohn", "--input", ex],
                     ["tangency", "--map", "curve", "--input", ex])
    )
    ok = all(parts.values())
    record(7, "property suites (a)-(g)", ok, time.perf_counter() - t, 120.0,
           ", ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in sorted(parts.items())))
