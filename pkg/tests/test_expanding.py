import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from soliton_lab import (
    ClassKind,
    IntegratorControls,
    PhasePoint,
    SolitonParams,
    asymptotics_report,
    classify_expanding,
    compute_separatrix,
    integrate,
    saddle_linearization,
)
from soliton_lab.errors import InvalidParams, InvalidPinchSlope, RegimeNotReached

SQRT2 = math.sqrt(2.0)


@pytest.fixture(scope="module")
def separatrix():
    return compute_separatrix(1.0)


class TestSaddle:
    def test_eigenvalues(self):
        s = saddle_linearization()
        assert s.eigenvalues == (1 / SQRT2, -1 / SQRT2)

    def test_determinant_is_product(self):
        s = saddle_linearization()
        assert s.determinant == -0.5
        assert s.eigenvalues[0] * s.eigenvalues[1] == pytest.approx(-0.5, abs=1e-15)

    def test_eigenpairs(self):
        assert max(saddle_linearization().residuals()) < 1e-15

    def test_explicit_products(self):
        (m00, m01), (m10, m11) = saddle_linearization().matrix
        x = (SQRT2, 1.0)
        assert (m00 * x[0] + m01 * x[1], m10 * x[0] + m11 * x[1]) == pytest.approx((1.0, SQRT2 / 2))


class TestSeparatrix:
    def test_cone_end_ratio(self, separatrix):
        t = separatrix.trajectory
        assert t.r[0] == pytest.approx(-200.0)
        v = t.h[0]
        assert abs(v / (-t.r[0] / 2) - 1) < 0.01

    def test_cone_end_scipy_oracle(self, separatrix):
        # independent DOP853 shot from the same launch point, rtol 1e-12
        assert separatrix.trajectory.h[0] == pytest.approx(100.53634023, rel=1e-8)
        assert separatrix.asym_cone_const == pytest.approx(0.53634023, abs=1e-6)

    def test_w_tends_to_minus_half(self, separatrix):
        assert abs(separatrix.trajectory.u[0] + 0.5) < 1e-3

    def test_first_integral(self, separatrix):
        rep = separatrix.first_integral
        assert abs(rep.initial_value) < 1e-8
        assert rep.max_drift < 1e-8

    def test_cusp_constant_converges(self, separatrix):
        assert separatrix.asym_cusp_const > 0
        assert separatrix.cusp_spread < 0.01

    def test_cusp_end_curvature(self, separatrix):
        t = separatrix.trajectory
        assert t.h[-1] < 1e-6
        # normalized curvature -(w + 1/2) on the decaying end
        assert abs(-(t.u[-1] + 0.5) + 0.5) < 1e-3

    def test_richardson(self, separatrix):
        assert separatrix.richardson_cone_diff < 1e-6

    def test_scales_with_a(self):
        res = compute_separatrix(2.0, richardson=False)
        t = res.trajectory
        assert 2.0 * t.h[0] == pytest.approx(100.53634023, rel=1e-7)
        assert 2.0 * t.u[0] == pytest.approx(-0.5, abs=1e-3)

    def test_cusp_rate_is_stable_eigenvalue(self, separatrix):
        # the stable manifold decays like e^(lambda r) with lambda = -1/sqrt 2
        rate = asymptotics_report(separatrix.trajectory)["cusp_rate"]
        assert rate == pytest.approx(1 / SQRT2, abs=1e-3)

    @pytest.mark.parametrize("delta,extent", [(0.0, 200.0), (1e-5, 200.0), (1e-8, 0.0)])
    def test_preconditions(self, delta, extent):
        with pytest.raises(InvalidParams):
            compute_separatrix(1.0, delta, extent)


class TestClassifyExpanding:
    def test_negative_curvature_cone(self):
        c = classify_expanding(0.75, -0.25)
        assert c.kind == ClassKind.ALPHA_BETA_CONE
        assert c.asymptotic.degrees == 240.0 and c.apex.degrees == 90.0
        assert c.curvature_sign == -1

    def test_positive_curvature_cone(self):
        c = classify_expanding(1.0, -0.85)
        assert c.asymptotic.degrees == 180.0
        assert c.apex.degrees == pytest.approx(306.0, abs=1e-12)
        assert c.curvature_sign == 1

    def test_blunt(self):
        c = classify_expanding(1.0, -1.0)
        assert c.kind == ClassKind.BLUNT_CONE and c.asymptotic.degrees == 180.0

    def test_cusped(self):
        for b in (0.0, "separatrix"):
            c = classify_expanding(1.0, b)
            assert c.kind == ClassKind.CUSPED_CONE and c.asymptotic.degrees == 180.0
            assert "universal cover" in c.note

    def test_gaussian(self):
        assert classify_expanding(1.0, -0.5).kind == ClassKind.GAUSSIAN_CONE
        assert classify_expanding(0.5, "isocline").kind == ClassKind.GAUSSIAN_PLANE

    def test_rejected(self):
        c = classify_expanding(1.0, 0.5)
        assert c.kind == ClassKind.UNBOUNDED_CURVATURE and c.rejected
        assert "separatrix" in c.rejected_reason

    @pytest.mark.parametrize("b", [math.inf, "cone"])
    def test_invalid(self, b):
        with pytest.raises(InvalidPinchSlope):
            classify_expanding(1.0, b)

    @given(a=st.floats(0.1, 5), b=st.floats(-5, -1e-3))
    def test_curvature_sign_rule(self, a, b):
        c = classify_expanding(a, b)
        if c.kind == ClassKind.ALPHA_BETA_CONE:
            assert (c.curvature_sign == 1) == (math.pi / a < -2 * math.pi * b)


class TestAsymptotics:
    def test_parabola_exact_relation(self):
        # from v^2 - 2w + ln(2w + 1) = H0 at (1, 1): v^2/(2w) = 1 + (H0 - ln(2w+1))/(2w)
        t, _ = integrate(SolitonParams(1, 1), PhasePoint(1, 1), controls=IntegratorControls(max_r_span=20))
        H0 = 1 - 2 + math.log(3)
        w = t.u[-1]
        ratio = asymptotics_report(t)["parabola_ratio"]
        assert ratio == pytest.approx(1 + (H0 - math.log(2 * w + 1)) / (2 * w), rel=1e-8)

    def test_parabola_ratio_tends_to_one(self):
        t, _ = integrate(SolitonParams(1, 1), PhasePoint(1, 1), controls=IntegratorControls(max_r_span=20))
        w = t.u
        sel = w > 200
        v = t.h[sel]
        assert np.all(np.abs(v * v / (2 * w[sel]) - 1) < 0.02)

    def test_parabola_error_at_w50_exceeds_two_percent(self):
        # the logarithmic correction is still about 4.5% at w = 50
        H0 = 1 - 2 + math.log(3)
        assert abs((H0 - math.log(101)) / 100) > 0.02

    @pytest.mark.parametrize("a,b", [(1.0, -0.85), (0.75, -0.25), (1.0, -1.0), (2.0, -0.1)])
    def test_cone_slope(self, a, b):
        t, _ = integrate(SolitonParams(1, a), PhasePoint(0, b), controls=IntegratorControls(max_r_span=200))
        assert abs(asymptotics_report(t)["cone_slope_ratio"] - 1) < 1e-3

    def test_regime_not_reached(self):
        t, _ = integrate(SolitonParams(1, 1), PhasePoint(1, 0.2), controls=IntegratorControls(max_r_span=0.5))
        with pytest.raises(RegimeNotReached):
            asymptotics_report(t)

    def test_wrong_case(self):
        t, _ = integrate(SolitonParams(0, 1), PhasePoint(1, 0.2), controls=IntegratorControls(max_r_span=0.5))
        with pytest.raises(InvalidParams):
            asymptotics_report(t)


class TestConservation:
    @settings(max_examples=30)
    @given(a=st.floats(0.2, 3), h=st.floats(0, 3), u=st.floats(-2, 2))
    def test_drift_off_isocline(self, a, h, u):
        # clipped to a bounded window as in the portraits: on blow-up branches the
        # terms of H grow like v^2 and the drift scales with rel_tol * v^2
        if abs(a * u + 0.5) < 1e-3 or (h == 0 and u == 0):
            return
        _, rep = integrate(SolitonParams(1, a), PhasePoint(h, u), controls=IntegratorControls(max_r_span=10),
                           window=(0.0, 10.0, -10.0, 10.0))
        assert rep.relative_drift < 1e-8

    def test_blow_up_drift_tracks_term_size(self):
        t, rep = integrate(SolitonParams(1, 1), PhasePoint(0, 1), controls=IntegratorControls(max_r_span=10))
        assert t.termination == "blowup"
        assert rep.max_drift < 1e-9 * (t.h[-1] ** 2)

    def test_isocline_invariant(self):
        t, _ = integrate(SolitonParams(1, 2.0), PhasePoint(1.0, -0.25), controls=IntegratorControls(max_r_span=3))
        assert np.all(t.u == -0.25)
