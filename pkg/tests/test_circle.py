from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import oracles
from qcnull.circle import (CirclePoint, BalancedExpansion, TmLevel, add, balanced_expand,
                           canonicalize, in_T_plus, in_Tm, int_scale, neg, tail_bound,
                           verify_first_digit_theorem)

ODD_PRIMES = [3, 5, 7, 11, 13]


def pt(text):
    return CirclePoint.parse(text)


class TestCanonicalize:
    def test_boundary_representative(self):
        assert canonicalize(3, 2) == CirclePoint(1, 2)

    def test_integer_is_zero(self):
        assert canonicalize(5, 5) == CirclePoint(0, 1)

    def test_already_canonical(self):
        assert canonicalize(11, 49) == CirclePoint(11, 49)

    def test_negative_denominator(self):
        assert canonicalize(1, -3) == CirclePoint(-1, 3)

    def test_zero_denominator(self):
        with pytest.raises(ZeroDivisionError):
            canonicalize(1, 0)

    @pytest.mark.parametrize("n,d", [(2, 4), (3, 4), (-1, 2), (0, 2)])
    def test_rejects_non_canonical_construction(self, n, d):
        with pytest.raises(ValueError):
            CirclePoint(n, d)

    def test_str_and_parse(self):
        assert str(pt("-12/49")) == "-12/49"
        assert pt("37/49") == CirclePoint(-12, 49)
        assert pt("3") == CirclePoint(0, 1)


class TestGroupOps:
    def test_int_scale(self):
        assert int_scale(6, pt("6/25")) == pt("11/25")

    def test_add(self):
        assert add(pt("1/4"), pt("1/4")) == pt("1/2")

    def test_neg_half(self):
        assert neg(pt("1/2")) == pt("1/2")

    def test_operators(self):
        a, b = pt("1/3"), pt("1/5")
        assert a + b == pt("8/15")
        assert a - b == pt("2/15")
        assert -a == pt("-1/3")
        assert 3 * a == pt("0")


class TestArcs:
    def test_closed_endpoint(self):
        assert in_Tm(pt("1/4"), TmLevel(1))
        assert in_Tm(pt("-1/4"), 1)

    def test_example_point(self):
        assert in_T_plus(pt("11/49"))

    def test_outside(self):
        assert not in_T_plus(pt("2/5"))

    def test_higher_level(self):
        assert in_Tm(pt("1/8"), 2)
        assert not in_Tm(pt("1/7"), 2)

    def test_level_must_be_positive(self):
        with pytest.raises(ValueError):
            TmLevel(0)


class TestBalancedExpansion:
    def test_example(self):
        assert balanced_expand(pt("11/49"), 7).digits == (2, -3)

    def test_zero(self):
        assert balanced_expand(pt("0"), 5).digits == ()

    def test_single_digit(self):
        assert balanced_expand(pt("-1/5"), 5).digits == (-1,)

    def test_rejects_other_denominators(self):
        with pytest.raises(ValueError):
            balanced_expand(pt("1/6"), 5)

    def test_rejects_even_base(self):
        with pytest.raises(ValueError):
            balanced_expand(pt("1/4"), 2)

    def test_rejects_wide_digits(self):
        with pytest.raises(ValueError):
            BalancedExpansion(5, (3,))

    def test_padic_origin(self):
        e = BalancedExpansion(5, (1, 0, -1), origin=0)
        assert e.value() == 1 - 25
        assert e.digit(2) == -1 and e.digit(3) == 0


class TestTailBound:
    @pytest.mark.parametrize("p,k,expected", [(5, 1, Fraction(1, 10)), (7, 2, Fraction(1, 98)),
                                              (3, 1, Fraction(1, 6))])
    def test_values(self, p, k, expected):
        assert tail_bound(p, k) == expected

    @pytest.mark.parametrize("p,k", [(2, 1), (5, 0)])
    def test_rejects(self, p, k):
        with pytest.raises(ValueError):
            tail_bound(p, k)


# Frozen from oracles.first_digit_failures(7, 3, [1], 1): the depth-3 failures of the
# p = 7 statement without the extra multiplier.  All have first digit +-2.
P7_DEPTH3_FAILURES = sorted(
    Fraction(n, 343) for n in
    [-85, -84, -83, -82, -81, -80, -79, -78, -77, -76, -75, -74,
     74, 75, 76, 77, 78, 79, 80, 81, 82, 83, 84, 85])


class TestFirstDigitTheorem:
    def test_variant_a_p5(self):
        r = verify_first_digit_theorem(5, 3, "a")
        assert r.status == "pass" and r.bound == 1

    def test_variant_c_p11(self):
        assert verify_first_digit_theorem(11, 2, "c").status == "pass"

    def test_documented_exception_depth2(self):
        r = verify_first_digit_theorem(7, 2, "cor-c1")
        assert r.status == "expected-counterexample"
        assert r.ok and r.matches_documented_exception
        pts = sorted(str(e.point()) for e in r.counterexamples)
        assert pts == sorted(["11/49", "-11/49", "12/49", "-12/49"])
        assert [2, -3] in [list(e.digits) for e in r.counterexamples]

    def test_oracle_reproduces_frozen_failures(self):
        assert sorted(oracles.first_digit_failures(7, 3, [1], 1)) == P7_DEPTH3_FAILURES

    def test_documented_exception_depth3(self):
        r = verify_first_digit_theorem(7, 3, "cor-c1")
        assert r.status == "expected-counterexample"
        assert sorted(e.point().as_fraction() for e in r.counterexamples) == P7_DEPTH3_FAILURES

    def test_hypothesis_counts_match_oracle(self):
        # Frozen from oracles: count of r/7^3 with y in T_+, and of r/5^3 with
        # y, 2y, 3y in T_+.
        assert verify_first_digit_theorem(7, 3, "cor-c1").hypothesis_held == 171
        assert verify_first_digit_theorem(5, 3, "b").hypothesis_held == 21

    def test_report_serialization(self):
        d = verify_first_digit_theorem(7, 2, "cor-c1").to_dict()
        assert d["kind"] == "digit-theorem"
        assert d["status"] == "expected-counterexample"
        assert {"digits": [2, -3], "point": "11/49"} in d["counterexamples"]

    def test_cor_variants_need_p5(self):
        with pytest.raises(ValueError):
            verify_first_digit_theorem(3, 2, "cor-c1")

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            verify_first_digit_theorem(5, 2, "z")

    @pytest.mark.parametrize("p", [5, 7, 11, 13])
    @pytest.mark.parametrize("variant", ["a", "b", "c", "cor-p-1"])
    def test_variants_agree_with_oracle(self, p, variant):
        r = verify_first_digit_theorem(p, 2, variant)
        expected = oracles.first_digit_failures(p, 2, r.multipliers, r.bound)
        assert sorted(e.point().as_fraction() for e in r.counterexamples) == expected == []


# -- properties ----------------------------------------------------------------

fractions_ = st.builds(Fraction, st.integers(-10 ** 6, 10 ** 6), st.integers(1, 10 ** 4))


def _valid(a: CirclePoint):
    from math import gcd
    return gcd(a.numerator, a.denominator) == 1 and -a.denominator < 2 * a.numerator <= a.denominator


@given(fractions_, fractions_, st.integers(-1000, 1000))
def test_canonical_closure(x, y, n):
    a = canonicalize(x.numerator, x.denominator)
    b = canonicalize(y.numerator, y.denominator)
    for r in (a, b, add(a, b), neg(a), int_scale(n, a)):
        assert _valid(r)
    assert add(a, b).as_fraction() == oracles.canon(x + y)
    assert int_scale(n, a).as_fraction() == oracles.canon(n * x)


@given(st.sampled_from(ODD_PRIMES), st.integers(0, 6), st.data())
def test_expansion_round_trip(p, d, data):
    r = data.draw(st.integers(0, p ** d - 1))
    a = canonicalize(r, p ** d)
    e = balanced_expand(a, p)
    assert e.point() == a
    assert all(abs(c) <= (p - 1) // 2 for c in e.digits)


@given(st.sampled_from(ODD_PRIMES), st.integers(1, 5), st.data())
def test_tail_soundness(p, k, data):
    half = (p - 1) // 2
    tail = data.draw(st.lists(st.integers(-half, half), max_size=8))
    value = sum((Fraction(c, p ** (k + i)) for i, c in enumerate(tail, 1)), Fraction(0))
    assert abs(value) <= tail_bound(p, k)


@given(fractions_, st.integers(1, 50), st.integers(1, 50))
def test_arc_monotonicity(x, m1, m2):
    m1, m2 = sorted((m1, m2))
    a = canonicalize(x.numerator, x.denominator)
    if in_Tm(a, m2):
        assert in_Tm(a, m1)
    assert in_Tm(a, m1) == (oracles.dist(x) <= Fraction(1, 4 * m1))
