import pytest

from faltings_gap.certify import GridSpec, certify
from faltings_gap.errors import InsufficientPrecision, NotUnimodal, OutOfRange
from faltings_gap.gap import (_check_unimodal, c_of_delta_prime, delta_of_eps, delta_prime,
                              eps_of_p, gap_fn, maximize_gap, required_digits)
from faltings_gap.numctx import PrecisionContext, make_mp


def literal_c(dp, dps=150):
    """The six-term expression exactly as displayed, evaluated with many spare digits."""
    o = make_mp(dps)
    dp = o.mpf(dp)
    q = o.exp(-o.pi * o.sqrt(3))
    return (o.pi / 6 * dp - o.log(1 + 2 / o.sqrt(3) * dp) / 2
            + 2 * q * (1 - o.exp(-2 * o.pi * dp)) / (1 + q)
            + 2 * q ** 3 * (1 - o.exp(-6 * o.pi * dp)) / (1 + q ** 3)
            + 2 / ((1 - q ** 2) * (1 - q ** 2 * o.exp(-4 * o.pi * dp)))
            - 2 / (1 - q ** 2) ** 2)


def literal_gap(P, dps=150):
    o = make_mp(dps)
    P = o.mpf(P)
    eps = o.exp(-o.mpf("37.84") / P)
    d = o.mpf("0.027") * o.cbrt(eps)
    dp = d / 2 * o.sqrt(1 - d * d / 4) - o.sqrt(3) / 4 * d * d
    return (1 - P) * literal_c(dp, dps)


def test_eps(ctx60):
    assert abs(eps_of_p("0.964", ctx60) - ctx60.mp.mpf("8.96582063664628e-18")) < 1e-30
    for bad in [0, 1, "1.0", -0.3, 2]:
        with pytest.raises(OutOfRange):
            eps_of_p(bad, ctx60)


def test_eps_and_delta_bounds_on_scan(ctx60):
    mp = ctx60.mp
    for k in range(1, 200):
        P = mp.mpf(k) / 200
        e = eps_of_p(P, ctx60)
        assert e < mp.mpf("5.08e-5")
        assert delta_of_eps(e, ctx60) < mp.mpf(1) / 2


def test_delta_of_eps(ctx60):
    mp = ctx60.mp
    assert delta_of_eps(0, ctx60) == 0
    d = delta_of_eps("8.966e-18", ctx60)
    assert abs(d - mp.mpf("0.027") * mp.mpf("8.966e-18") ** (mp.mpf(1) / 3)) < 1e-60
    assert abs(d - mp.mpf("5.60915e-8")) < 1e-13
    edge = delta_of_eps("5.08e-5", ctx60)
    assert mp.mpf("9.99e-4") < edge <= mp.mpf("0.001")
    with pytest.raises(OutOfRange):
        delta_of_eps("5.1e-5", ctx60)
    with pytest.raises(OutOfRange):
        delta_of_eps(-1e-20, ctx60)


def test_delta_prime(ctx60):
    mp = ctx60.mp
    assert delta_prime(0, ctx60) == 0
    assert abs(delta_prime("5.6095e-8", ctx60) - mp.mpf("2.80474e-8")) < 1e-13
    assert abs(delta_prime("0.1", ctx60) - mp.mpf("0.0456073338696732540556")) < 1e-20
    for bad in ["0.5", -0.01]:
        with pytest.raises(OutOfRange):
            delta_prime(bad, ctx60)


def test_c_at_zero(ctx60):
    assert c_of_delta_prime(0, ctx60) == 0


@pytest.mark.parametrize("dp", ["2.80474e-8", "1e-12", "0.0456", "0.3"])
def test_c_against_literal_formula(dp, ctx60):
    assert abs(c_of_delta_prime(dp, ctx60) - literal_c(dp)) < abs(literal_c(dp)) * 1e-25


def test_c_at_gap_scale(ctx60):
    assert abs(c_of_delta_prime("2.80474e-8", ctx60) - ctx60.mp.mpf("1.2782889018432554e-16")) < 1e-30
    assert abs(c_of_delta_prime("2.80474e-8", ctx60) - ctx60.mp.mpf("1.278e-16")) < 1e-19


def test_c_bounded_by_v_away_from_corners(ctx30):
    c = c_of_delta_prime("0.0456", ctx30)
    assert c > 0
    res = certify("l64", GridSpec(nx=30, ny=30, exclusion_delta="0.1"), ctx30)
    assert res.passed and res.min_margin > 0
    assert abs(c - c_of_delta_prime(delta_prime("0.1", ctx30), ctx30)) < 1e-4


def test_precision_guard():
    c = PrecisionContext(digits=20)
    assert required_digits("1e-8", c) == 31
    with pytest.raises(InsufficientPrecision):
        c_of_delta_prime("1e-8", c)
    c_of_delta_prime("1e-2", c)


def test_c_increasing_on_uniform_samples(ctx60):
    mp = ctx60.mp
    vals = [c_of_delta_prime(mp.mpf("0.05") * k / 100, ctx60) for k in range(101)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_c_linear_coefficient_is_slightly_negative(ctx60):
    """C'(0) = pi/6 - 1/sqrt3 + 4 pi q/(1+q) + 12 pi q^3/(1+q^3) - 8 pi q^2/(1-q^2)^3 < 0."""
    mp = ctx60.mp
    q = mp.exp(-mp.pi * mp.sqrt(3))
    slope = (mp.pi / 6 - 1 / mp.sqrt(3) + 4 * mp.pi * q / (1 + q)
             + 12 * mp.pi * q ** 3 / (1 + q ** 3) - 8 * mp.pi * q ** 2 / (1 - q ** 2) ** 3)
    assert mp.mpf("-9.64e-11") < slope < mp.mpf("-9.63e-11")
    assert c_of_delta_prime("1e-10", ctx60) < 0 < c_of_delta_prime("1e-9", ctx60)


def test_cancellation_audit():
    for D in (40, 60):
        lo, hi = PrecisionContext(digits=D), PrecisionContext(digits=D + 20)
        for dp in ["2.8e-8", "1e-6", "1e-3", "0.04"]:
            a, b = c_of_delta_prime(dp, lo), c_of_delta_prime(dp, hi)
            need = D - 2 * (-float(hi.mp.log10(hi.mp.mpf(dp)))) - 5
            assert abs(a - b) <= abs(b) * 10.0 ** -need


def test_gap_fn_at_0964(ctx60):
    g = gap_fn("0.964", ctx60)
    assert abs(g - ctx60.mp.mpf("4.601e-18")) < 1e-21
    assert abs(g - ctx60.mp.mpf("4.6012223275760588e-18")) < 1e-33
    assert abs(g - literal_gap("0.964")) < 1e-40


def test_gap_fn_collapses_near_one(ctx60):
    assert gap_fn("0.999999", ctx60) < gap_fn("0.964", ctx60)


def test_gap_fn_at_half_matches_literal_value(ctx60):
    # the value is negative: delta'(0.5) ~ 1.5e-13 lies below the sign change of C near 5.8e-10
    g = gap_fn("0.5", ctx60)
    ref = literal_gap("0.5")
    assert abs(g - ref) < abs(ref) * 1e-20
    assert abs(g - ctx60.mp.mpf("-7.198438225741216e-24")) < 1e-38


def test_gap_fn_sign_on_scan():
    c = PrecisionContext(digits=60)
    mp = c.mp
    grid = [mp.mpf("0.75") + (mp.mpf("0.9999") - mp.mpf("0.75")) * k / 999 for k in range(1000)]
    assert all(gap_fn(P, c) > 0 for P in grid)
    assert gap_fn("0.7", c) < 0


def test_gap_fn_log_spaced_scan_agrees_with_literal():
    # down to P = 0.05 the cancellation needs several hundred digits
    o = make_mp(30)
    ps = [o.mpf("0.05") * (o.mpf("0.9999") / o.mpf("0.05")) ** (o.mpf(k) / 39) for k in range(40)]
    for P in ps:
        dp_est = 0.027 * float(o.exp(-o.mpf("37.84") / P / 3)) / 2
        digits = int(2 * -o.log10(dp_est)) + 30
        c = PrecisionContext(digits=digits)
        g = gap_fn(P, c)
        ref = literal_gap(P, dps=digits + 40)
        assert abs(g - ref) <= abs(ref) * 1e-10


def test_maximize_defaults(ctx60):
    r = maximize_gap(ctx60)
    mp = ctx60.mp
    assert abs(r.p_star - mp.mpf("0.964")) < 5e-4
    assert abs(r.p_star - mp.mpf("0.96358136199215548")) < 1e-6
    assert abs(r.gap - mp.mpf("4.601e-18")) < 1e-21
    assert r.final_gap == r.gap
    assert r.digits_used == 60
    assert abs(r.eps - mp.exp(-mp.mpf("37.84") / r.p_star)) < 1e-70
    assert r.delta < mp.mpf(1) / 2 and 0 < r.delta_prime < r.delta / 2
    assert abs(r.gap - (1 - r.p_star) * r.c_value) < 1e-75


def test_maximize_at_least_25_correct_digits(ctx60):
    r = maximize_gap(ctx60)
    ref = literal_gap(r.p_star, dps=200)
    assert abs(r.gap - ref) <= abs(ref) * 1e-25


def test_maximize_degenerate_interval(ctx60):
    mp = ctx60.mp
    r = maximize_gap(ctx60, p_lo=mp.mpf("0.9") - mp.mpf("1e-7"), p_hi="0.9")
    assert r.p_star == mp.mpf("0.9") - mp.mpf("1e-7")


def test_maximize_rejects_bad_interval(ctx60):
    with pytest.raises(OutOfRange):
        maximize_gap(ctx60, p_lo="0.9", p_hi="0.8")
    with pytest.raises(OutOfRange):
        maximize_gap(ctx60, p_lo="0", p_hi="0.8")


def test_unimodal_check():
    _check_unimodal([1, 2, 3, 2, 1], 3)
    _check_unimodal([1, 3, 3, 2, 1], 3)
    _check_unimodal([3, 1, 0.5, 1, 2], 3)
    with pytest.raises(NotUnimodal):
        _check_unimodal([1, 3, 1, 2.95, 1], 3)
