"""End-to-end acceptance checks, one test per criterion.

The terminal summary lists a PASS or FAIL line for each of them.
"""

import json
import random
import time
from importlib import resources

from faltings_gap.certify import (LEMMAS, GridSpec, certify, derived_constants_check,
                                  e2_zero_on_left_edge, fd_identity_residuals)
from faltings_gap.cli import main
from faltings_gap.construct import (EisensteinSpec, _heights, auto_p, build_eisenstein,
                                    family_heights, verify_eisenstein)
from faltings_gap.heights import hmin_closed, hmin_modular, read_corpus, scan_corpus, weil_height
from faltings_gap.modular import e2_eval, inverse_j, j_eval, log_abs_delta, rho, v_eval
from faltings_gap.numctx import PrecisionContext

HMIN_8 = "-0.74875248"  # leading digits, truncated
H1_8 = -0.74862817


def cli_json(capsys, *argv):
    code = main(list(argv))
    out, _ = capsys.readouterr()
    assert code == 0
    return json.loads(out)


def test_criterion_1_hmin_two_ways(capsys):
    t0 = time.perf_counter()
    code = main(["hmin", "--digits", "50"])
    out, _ = capsys.readouterr()
    elapsed = time.perf_counter() - t0
    assert code == 0
    closed_text = out.splitlines()[0].split("=")[1].strip()
    assert closed_text.startswith(HMIN_8)
    ctx = PrecisionContext(digits=50)
    assert abs(hmin_closed(ctx) - hmin_modular(ctx)) < ctx.mp.mpf(10) ** -40
    assert elapsed < 1.0


def test_criterion_2_h1(capsys):
    t0 = time.perf_counter()
    d = cli_json(capsys, "height", "--poly", "x - 1", "--json")
    elapsed = time.perf_counter() - t0
    assert abs(float(d["faltings_stable"]) - H1_8) < 1e-8
    assert elapsed < 1.0


def test_criterion_3_gap_constant(capsys):
    t0 = time.perf_counter()
    d = cli_json(capsys, "gap", "--digits", "60", "--json")
    elapsed = time.perf_counter() - t0
    ctx = PrecisionContext(digits=60)
    mpf = ctx.mp.mpf
    assert abs(mpf(d["p_star"]) - mpf("0.964")) < mpf("5e-4")
    assert abs(mpf(d["gap"]) - mpf("4.601e-18")) < mpf("1e-21")
    assert d["final_gap"] == d["gap"]
    assert elapsed < 60


def test_criterion_4_lemma_suite():
    ctx = PrecisionContext(digits=30)
    t0 = time.perf_counter()
    runs = [(lemma, "0") for lemma in LEMMAS if lemma != "l64"]
    runs += [("l64", d) for d in ("0.3", "0.1", "0.01")]
    for lemma, delta in runs:
        res = certify(lemma, GridSpec(nx=100, ny=100, exclusion_delta=delta), ctx)
        assert res.passed and res.violations == [], (lemma, delta, res.violations[:3])
        assert res.min_margin >= 0, (lemma, delta)
    consts = derived_constants_check(ctx)
    assert consts.passed
    d = {name: (value, bound, margin) for name, value, bound, margin in consts.details}
    value, bound, margin = d["log 1193"]
    assert abs(margin - ctx.mp.mpf("0.00577")) < 5e-6 and value < bound
    value, bound, margin = next(v for k, v in d.items() if k.startswith("24 "))
    assert value < ctx.mp.mpf("22.16") and margin > 0
    assert time.perf_counter() - t0 < 300


def test_criterion_5_e2_facts():
    ctx = PrecisionContext(digits=30)
    mp = ctx.mp
    assert abs(e2_eval(rho(ctx), ctx)) < mp.mpf(10) ** -25
    y, changes = e2_zero_on_left_edge(ctx)
    assert changes == 1 and abs(y - mp.sqrt(3) / 2) < mp.mpf(10) ** -6
    rng = random.Random(11)
    pts = [mp.mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.9, 4.5)) for _ in range(20)]
    residuals = list(fd_identity_residuals(pts, ctx))
    assert len(residuals) == 20
    for rx, ry, bound in residuals:
        assert rx < bound and ry < bound


def test_criterion_6_construction():
    ctx = PrecisionContext(digits=30)
    t0 = time.perf_counter()
    for n in range(1, 51):
        res = build_eisenstein(EisensteinSpec(n, auto_p(n)))
        assert verify_eisenstein(res), n
    first = build_eisenstein(EisensteinSpec(1, 17))
    assert first.f_coeffs == (17, 1)
    member = family_heights(1, ctx, p=17)[0]
    assert member.constructed
    h0 = ctx.mp.log(17) / 300
    assert abs(h0 - ctx.mp.mpf("0.00944404")) < 1e-8
    # the family value at n = 100 with p = 17 is the formula value log p / 3n
    hmin = hmin_closed(ctx)
    h0_100, height_100 = _heights(100, 17, ctx)
    assert abs(height_100 - hmin - ctx.mp.mpf("0.00944404")) < 1e-8 and abs(h0_100 - h0) < 1e-28
    eps = ctx.mp.mpf("0.01")
    n = next(k for k in range(1, 101) if ctx.mp.log(auto_p(k)) / (3 * k) < eps)
    res = build_eisenstein(EisensteinSpec(n, auto_p(n)), ctx)
    assert verify_eisenstein(res) and res.height - hmin < eps
    assert time.perf_counter() - t0 < 10


def test_criterion_7_corpus_sandwich_and_gap():
    ctx = PrecisionContext(digits=40)
    mp = ctx.mp
    polys = read_corpus(resources.files("faltings_gap") / "corpus" / "cyclotomic_salem.txt")
    assert len(polys) >= 20
    result = scan_corpus(polys, ctx)
    assert result.failures == []
    assert len(result.reports) == len(polys)
    tol = mp.mpf(10) ** -(ctx.digits - 5)
    hmin = hmin_closed(ctx)
    for r in result.reports:
        middle = r.weil_total / 12 - r.faltings_stable
        assert mp.mpf("0.72") <= middle <= mp.log(1 + r.weil_total) / 2 + mp.mpf("2.071"), str(r.poly)
        if str(r.poly) == "x":
            assert abs(r.faltings_stable - hmin) < tol
        else:
            assert r.faltings_stable - hmin > tol, str(r.poly)
    assert [str(r.poly) for r in result.reports[:2]] == ["x", "x - 1"]


def test_criterion_8_property_suites():
    ctx = PrecisionContext(digits=40)
    mp = ctx.mp
    rng = random.Random(8)
    worst = mp.zero
    for _ in range(100):
        tau = mp.mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.87, 2.5))
        j0 = j_eval(tau, ctx)
        worst = max(worst, abs(j_eval(inverse_j(j0, ctx), ctx) - j0) / max(1, abs(j0)))
    assert worst < mp.mpf(10) ** -(ctx.digits - 6)

    polys = [p for p in read_corpus(resources.files("faltings_gap") / "corpus" / "cyclotomic_salem.txt")
             if p.coeffs[0] != 0][:20]
    assert len(polys) == 20
    for p in polys:
        assert abs(weil_height(p, ctx).total - weil_height(p.reversed(), ctx).total) < mp.mpf(10) ** -35

    for a, b, c, d in [(0, -1, 1, 0), (1, 1, 0, 1), (2, 1, 1, 1), (1, -2, 2, -3)]:
        z = mp.mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.9, 1.8))
        w = (a * z + b) / (c * z + d)
        assert abs(v_eval(w, ctx) - v_eval(z, ctx)) < mp.mpf(10) ** -30
        if w.imag > 0.6:
            assert abs(log_abs_delta(w, ctx) - log_abs_delta(z, ctx) - 12 * mp.log(abs(c * z + d))) < 1e-25

    doubled = PrecisionContext(digits=40, series_terms=2 * ctx.terms)
    for tau in [1j, complex(-0.5, 0.87), complex(0.3, 1.4), complex(0.0, 4.0)]:
        assert abs(log_abs_delta(tau, ctx) - log_abs_delta(tau, doubled)) < 1e-38
        assert abs(e2_eval(tau, ctx) - e2_eval(tau, doubled)) < 1e-38
