"""Special functions and scalar solvers against scipy and frozen values."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from bloch_siegert_lab.errors import (
    ConvergenceError,
    DomainError,
    NoSignChangeError,
)
from bloch_siegert_lab.numerics import (
    DEFAULT_TOL,
    Tolerance,
    bessel_j,
    bessel_j0_minus_1,
    bessel_j_sequence,
    find_root_bracketed,
    first_bessel_j0_zero,
    minimize_scalar_bracketed,
)


class TestTolerance:
    def test_defaults(self):
        assert DEFAULT_TOL.abs_tol == 1e-12
        assert DEFAULT_TOL.rel_tol == 1e-12
        assert DEFAULT_TOL.max_iter == 200

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"abs_tol": 0.0},
            {"abs_tol": -1e-9},
            {"rel_tol": 0.0},
            {"abs_tol": math.nan},
            {"rel_tol": math.inf},
            {"max_iter": 0},
        ],
    )
    def test_rejects_bad_fields(self, kwargs):
        with pytest.raises(ValueError):
            Tolerance(**kwargs)


class TestBesselJ:
    def test_frozen_j1_at_one(self):
        # classic tabulated value
        assert bessel_j(1, 1.0) == pytest.approx(0.4400505857449335, abs=1e-15)

    def test_matches_scipy_on_grid(self):
        xs = np.concatenate([np.linspace(0.0, 7.9, 41), np.linspace(8.0, 60.0, 41)])
        for n in range(0, 8):
            for x in xs:
                want = special.jv(n, x)
                got = bessel_j(n, float(x))
                assert got == pytest.approx(want, abs=2e-15, rel=2e-13), (n, x)

    def test_sequence_matches_scipy(self):
        for x in [0.0, 0.3, 2.0, 7.99, 8.0, 13.7, 42.0]:
            seq = bessel_j_sequence(12, x)
            want = special.jv(np.arange(13), x)
            np.testing.assert_allclose(seq, want, atol=2e-15, rtol=2e-13)

    def test_negative_argument_parity(self):
        for n in range(5):
            assert bessel_j(n, -3.2) == pytest.approx(
                (-1.0) ** n * bessel_j(n, 3.2), abs=1e-15
            )

    def test_rejects_bad_order_and_argument(self):
        with pytest.raises(DomainError):
            bessel_j(-1, 1.0)
        with pytest.raises(DomainError):
            bessel_j(2, math.nan)
        with pytest.raises(DomainError):
            bessel_j(2, math.inf)

    @given(st.floats(min_value=1e-8, max_value=50.0), st.integers(min_value=1, max_value=15))
    @settings(max_examples=200, deadline=None)
    def test_recurrence_invariant(self, x, n):
        # J_{n-1}(x) + J_{n+1}(x) = (2n/x) J_n(x)
        lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x)
        rhs = (2.0 * n / x) * bessel_j(n, x)
        assert lhs == pytest.approx(rhs, abs=5e-13, rel=5e-11)

    @given(st.floats(min_value=0.0, max_value=50.0))
    @settings(max_examples=100, deadline=None)
    def test_normalization_invariant(self, x):
        # J_0^2 + 2 sum_{k>=1} J_k^2 = 1
        seq = bessel_j_sequence(max(40, int(x) + 25), x)
        total = seq[0] ** 2 + 2.0 * float((seq[1:] ** 2).sum())
        assert total == pytest.approx(1.0, abs=1e-12)


class TestBesselJ0Minus1:
    def test_matches_direct_subtraction_moderate(self):
        for x in [0.5, 1.0, 2.5, 7.0, 12.0]:
            assert bessel_j0_minus_1(x) == pytest.approx(
                special.jv(0, x) - 1.0, abs=1e-15, rel=1e-12
            )

    def test_small_argument_no_cancellation(self):
        # at x = 1e-6 the direct subtraction loses ten digits; the series
        # keeps full relative precision: J0(x) - 1 = -x^2/4 (1 - x^2/16 ...)
        x = 1e-6
        want = -x * x / 4.0 * (1.0 - x * x / 16.0)
        assert bessel_j0_minus_1(x) == pytest.approx(want, rel=1e-14)

    def test_even_in_x(self):
        assert bessel_j0_minus_1(-0.37) == bessel_j0_minus_1(0.37)


class TestFirstBesselJ0Zero:
    def test_frozen_value(self):
        assert first_bessel_j0_zero() == pytest.approx(2.404825557695773, abs=1e-12)

    def test_is_a_zero(self):
        assert abs(special.jv(0, first_bessel_j0_zero())) < 5e-13


class TestFindRootBracketed:
    def test_simple_root(self):
        root = find_root_bracketed(lambda x: x * x - 2.0, 0.0, 2.0)
        assert root == pytest.approx(math.sqrt(2.0), abs=1e-12)

    def test_seeded_random_cubics(self):
        rng = np.random.default_rng(20240817)
        for _ in range(1000):
            r = sorted(rng.uniform(-3.0, 3.0, size=3))
            scale = rng.uniform(0.2, 5.0)
            f = lambda x, r=r, s=scale: s * (x - r[0]) * (x - r[1]) * (x - r[2])
            lo = r[2] - rng.uniform(0.05, 0.5) * (r[2] - r[1] + 0.1)
            lo = max(lo, 0.5 * (r[1] + r[2]))
            hi = r[2] + rng.uniform(0.1, 2.0)
            if f(lo) == 0.0 or f(hi) == 0.0:
                continue
            root = find_root_bracketed(f, lo, hi, Tolerance(1e-14, 1e-14, 200))
            assert abs(f(root)) <= 1e-10

    def test_exact_endpoint_root(self):
        assert find_root_bracketed(lambda x: x - 1.0, 1.0, 3.0) == 1.0

    def test_no_sign_change_raises(self):
        with pytest.raises(NoSignChangeError):
            find_root_bracketed(lambda x: x * x + 1.0, -1.0, 1.0)

    def test_non_finite_endpoint_raises(self):
        with pytest.raises(DomainError):
            find_root_bracketed(
                lambda x: math.inf if x >= 0.0 else -1.0, -1.0, 1.0
            )

    def test_max_iter_exhaustion_raises(self):
        with pytest.raises(ConvergenceError):
            find_root_bracketed(
                lambda x: math.tanh(50.0 * (x - 0.123456789)),
                0.0,
                1.0,
                Tolerance(1e-15, 1e-15, 3),
            )

    @given(
        st.floats(min_value=-5.0, max_value=5.0),
        st.floats(min_value=0.01, max_value=10.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_root_inside_bracket(self, center, width):
        f = lambda x: math.atan(x - center)
        root = find_root_bracketed(f, center - width, center + width)
        assert center - width <= root <= center + width
        assert root == pytest.approx(center, abs=1e-10 + 1e-10 * abs(center))


class TestMinimizeScalarBracketed:
    def test_quadratic(self):
        xmin = minimize_scalar_bracketed(lambda x: (x - 0.7) ** 2, -1.0, 2.0)
        assert xmin == pytest.approx(0.7, abs=1e-7)

    def test_quartic_offset(self):
        xmin = minimize_scalar_bracketed(
            lambda x: (x - 2.0) ** 4 + 3.0, 0.0, 5.0, Tolerance(1e-10, 1e-10, 300)
        )
        assert xmin == pytest.approx(2.0, abs=1e-2)  # quartic floor is flat

    def test_cosine_well(self):
        xmin = minimize_scalar_bracketed(math.cos, 2.0, 4.5)
        assert xmin == pytest.approx(math.pi, abs=1e-7)

    def test_bad_bracket_raises(self):
        with pytest.raises(DomainError):
            minimize_scalar_bracketed(lambda x: x * x, 2.0, -1.0)
