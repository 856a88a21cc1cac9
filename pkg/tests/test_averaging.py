import time
from fractions import Fraction
from math import comb

import pytest

from modules.averaging_module import (
    HolomorphicInputError,
    RSeriesTable,
    RTableFormatError,
    average,
    average_by_power_sums,
    generating_series_check,
    r_table,
    raverage,
    reduce,
)
from modules.model_module import ModelHypersurface, UnsupportedModelError, fiber_data
from modules.series_module import TruncatedSeries, embed, parse_expression, weighted_component


def hol(text, model, order):
    return parse_expression(text, model.holomorphic_signature(), order)


def amb(text, model, order):
    return parse_expression(text, model.signature(), order)


def quadric_closed_form(j, mu, sig, order):
    """R(zbar^j) on w = zbar^2 + 2 mu z zbar."""
    total = TruncatedSeries.zero(sig, order)
    for p in range(j // 2 + 1):
        for q in range(p + 1):
            c = comb(j, 2 * p) * comb(p, q) * mu ** (j - 2 * p + 2 * q) * (-1) ** j
            total = total + TruncatedSeries.monomial(sig, order, {"z": j - 2 * p + 2 * q, "w": p - q}, c)
    return total


# ---------- reduction ----------

def test_reduce_quadric(quadric_fd, quadric):
    rep = reduce(amb("zbar^2", quadric, 8), quadric_fd)
    assert rep.coefficients == (hol("w", quadric, 8), hol("-z", quadric, 8))
    rep = reduce(amb("wbar", quadric, 8), quadric_fd)
    assert rep.coefficients == (hol("z^2", quadric, 8), hol("z", quadric, 8))
    assert reduce(amb("zbar", quadric, 8), quadric_fd).as_series() == amb("zbar", quadric, 8)


def test_reduce_kills_defining_functions(quadric_fd, bishop_fd, quadric, bishop):
    for model, fd in ((quadric, quadric_fd), (bishop, bishop_fd)):
        for rho in model.defining_functions(fd.order):
            assert reduce(rho, fd).is_zero()


def test_reduce_rejects_product_models(silly_fd, silly):
    with pytest.raises(UnsupportedModelError):
        reduce(amb("zbar", silly, 12), silly_fd)


# ---------- averaging examples ----------

def test_quadric_r_values(quadric_fd, quadric):
    assert raverage(amb("zbar", quadric, 8), quadric_fd) == hol("-1/2 z", quadric, 8)
    assert raverage(amb("wbar", quadric, 8), quadric_fd) == hol("1/2 z^2", quadric, 8)
    assert raverage(amb("zbar^2", quadric, 8), quadric_fd) == hol("w + 1/2 z^2", quadric, 8)
    assert raverage(amb("zbar^4", quadric, 8), quadric_fd) == hol("w^2 + 2 z^2*w + 1/2 z^4", quadric, 8)


@pytest.mark.parametrize("mu", [Fraction(1, 2), Fraction(1, 3)])
def test_quadric_closed_form(mu):
    model = ModelHypersurface.quadric(mu)
    fd = fiber_data(model, 6)
    for j in range(7):
        expected = quadric_closed_form(j, mu, model.holomorphic_signature(), 6)
        assert raverage(amb(f"zbar^{j}", model, 6), fd) == expected


def test_bishop_average_is_fast(bishop_fd, bishop):
    start = time.perf_counter()
    first = average(amb("zbar", bishop, 6), bishop_fd)
    second = average(amb("wbar", bishop, 6), bishop_fd)
    assert time.perf_counter() - start < 1.0
    assert first == hol("-2 z", bishop, 6)
    assert second == hol("w", bishop, 6)
    assert average(amb("zbar^2", bishop, 6), bishop_fd) == hol("4 w + 7 z^2", bishop, 6)


def test_silly_cubic_average(silly_fd, silly):
    assert raverage(amb("wbar^2", silly, 12), silly_fd) == hol("z^3 - w^2", silly, 12)
    assert raverage(amb("zbar^3", silly, 12), silly_fd) == hol("z^3", silly, 12)
    assert raverage(amb("zbar*wbar", silly, 12), silly_fd).is_zero()


def test_raverage_rejects_holomorphic_variables(quadric_fd, quadric):
    with pytest.raises(HolomorphicInputError):
        raverage(amb("z*zbar", quadric, 8), quadric_fd)
    with pytest.raises(HolomorphicInputError):
        raverage(amb("w", quadric, 8), quadric_fd)


# ---------- properties ----------

def _cases(quadric_fd, bishop_fd):
    return [quadric_fd.at_order(6), bishop_fd]


def test_linearity(rng, make_series, make_coefficient, quadric_fd, bishop_fd):
    for i in range(100):
        fd = _cases(quadric_fd, bishop_fd)[i % 2]
        f = make_series(rng, fd.signature, 6)
        g = make_series(rng, fd.signature, 6)
        c = make_coefficient(rng)
        assert average(f + g.scale(c), fd) == average(f, fd) + average(g, fd).scale(c)


def test_ideal_is_annihilated(rng, make_series, quadric_fd, bishop_fd):
    for i in range(100):
        fd = _cases(quadric_fd, bishop_fd)[i % 2]
        h = make_series(rng, fd.signature, 6, terms=4)
        rho, rho_bar = fd.model.defining_functions(6)
        assert average(h * rho, fd).is_zero()
        assert average(h * rho_bar, fd).is_zero()


def test_holomorphic_factors_pass_through(rng, make_series, quadric_fd, bishop_fd):
    for i in range(100):
        fd = _cases(quadric_fd, bishop_fd)[i % 2]
        f = make_series(rng, fd.signature, 6, terms=4)
        h = make_series(rng, fd.holomorphic, 6, terms=3)
        assert average(embed(h, fd.signature), fd) == h
        assert average(embed(h, fd.signature) * f, fd) == h * average(f, fd)


def test_average_preserves_weighted_degree(rng, make_series, quadric_fd, bishop_fd):
    for i in range(100):
        fd = _cases(quadric_fd, bishop_fd)[i % 2]
        f = make_series(rng, fd.signature, 6, terms=8)
        a, b = rng.randint(0, 4), rng.randint(0, 4)
        avg = average(weighted_component(f, a, b), fd)
        assert all(fd.holomorphic.degree(m) == a + b for m in avg.terms)


def test_power_sum_route_matches_reduction(rng, make_series, quadric_fd, bishop_fd):
    for i in range(100):
        fd = _cases(quadric_fd, bishop_fd)[i % 2]
        f = make_series(rng, fd.signature, 6)
        assert average_by_power_sums(f, fd) == average(f, fd)


# ---------- R-series tables ----------

def test_leading_term_law(quadric, bishop):
    for model in (quadric, bishop, ModelHypersurface(3, (2, 1, 0, 1))):
        table = r_table(fiber_data(model, 8), 8, 8)
        assert table.leading_term_violations(model) == []


def test_leading_term_violation_is_reported(quadric_fd, quadric):
    table = r_table(quadric_fd, 4, 8)
    table.entries[(2, 0)] = hol("2 w + 1/2 z^2", quadric, 8)
    assert table.leading_term_violations(quadric) == [(2, 0)]


def test_r_table_is_independent_of_jobs(bishop_fd):
    serial = r_table(bishop_fd, 6, 6, jobs=1)
    parallel = r_table(bishop_fd, 6, 6, jobs=4)
    assert serial == parallel
    assert list(serial.entries)[:4] == [(0, 0), (1, 0), (0, 1), (2, 0)]


def test_r_table_dict_round_trip(quadric_fd, silly_fd):
    for fd, d in ((quadric_fd, 6), (silly_fd, 9)):
        table = r_table(fd, d)
        assert RSeriesTable.from_dict(table.to_dict()) == table


@pytest.mark.parametrize("data", [
    {"order": 4, "degree_bound": 2, "entries": []},
    {"k": 2, "order": 4, "degree_bound": 2, "entries": [{"a": 1, "b": 0, "series": 5}]},
    {"k": 2, "order": 4, "degree_bound": 2, "entries": [{"a": "x", "b": 0, "series": ""}]},
    {"k": 2, "order": 4, "degree_bound": 2, "entries": 3},
    {"k": 2, "order": 4, "degree_bound": 2, "weights": [1, 2]},
    ["k", 2],
])
def test_r_table_from_dict_rejects_malformed_data(data):
    with pytest.raises(RTableFormatError):
        RSeriesTable.from_dict(data)


# ---------- generating series ----------

def test_generating_identity_holds(quadric_fd, bishop_fd, silly_fd):
    for fd in (quadric_fd, bishop_fd, silly_fd):
        report = generating_series_check(fd, fd.order, 6)
        assert report.agrees, report.mismatches
        assert report.to_dict()["status"] == "holds"


def test_generating_identity_on_bishop_to_eighth_power(bishop):
    report = generating_series_check(fiber_data(bishop, 8), 8, 8)
    assert report.agrees, report.mismatches
    assert report.printed_form_agrees is None


def test_printed_quadric_form_differs_at_constant_term(quadric_fd, bishop_fd):
    report = generating_series_check(quadric_fd, 8, 8)
    assert report.agrees
    assert report.printed_form_agrees is False
    assert report.printed_form_mismatches[0] == 0
    assert generating_series_check(bishop_fd, 6, 4).printed_form_agrees is None
