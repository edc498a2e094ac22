import dataclasses

import pytest
from hypothesis import given
from hypothesis import strategies as st

import evacgame as eg
from evacgame.payoff import FORMULA_A_SE, PAPER_A_SE, TABLE_PARAMS, Decision

TOL = 1e-12


class TestBaselineMatrix:
    def test_reference_params(self):
        m = eg.baseline_matrix(TABLE_PARAMS)
        assert m.a_ee == pytest.approx(0.5, abs=TOL)
        assert m.a_es == pytest.approx(0.3, abs=TOL)
        assert m.a_ss == pytest.approx(0.5, abs=TOL)

    def test_stay_side_formula_value(self):
        # formula gives 0.5 - 0.93 * 0.2 = 0.314; the printed coefficient
        # table says 0.656, which neither the formula nor the incentive
        # table supports
        m = eg.baseline_matrix(TABLE_PARAMS)
        assert m.a_se == pytest.approx(0.314, abs=TOL)
        assert m.a_se == pytest.approx(FORMULA_A_SE, abs=TOL)
        assert abs(m.a_se - 0.656) > 0.3

    def test_total_loss_no_costs(self):
        m = eg.baseline_matrix(eg.PayoffParams(p=1.0, alpha=0.0, beta=0.0))
        for c in (m.a_ee, m.a_es, m.a_se, m.a_ss):
            assert c == pytest.approx(0.0, abs=TOL)


class TestIncentiveMatrix:
    def test_reference_params_theta_01(self):
        m = eg.incentive_matrix(dataclasses.replace(TABLE_PARAMS, theta=0.1))
        assert m.a_ee == pytest.approx(0.4, abs=TOL)
        assert m.a_es == pytest.approx(0.5, abs=TOL)
        assert m.a_ss == pytest.approx(0.42, abs=TOL)

    def test_theta_zero(self):
        m = eg.incentive_matrix(TABLE_PARAMS)
        assert m.a_es == pytest.approx(0.4, abs=TOL)

    def test_full_transport_compensation(self):
        params = dataclasses.replace(TABLE_PARAMS, r_T=1.0, theta=0.0)
        assert eg.incentive_matrix(params).a_ee == pytest.approx(
            eg.baseline_matrix(params).a_ee, abs=TOL
        )

    @pytest.mark.parametrize("theta", [-0.1, 0.0, 0.1, 0.2])
    def test_agreement_with_published_coefficients(self, theta):
        formula = eg.incentive_matrix(dataclasses.replace(TABLE_PARAMS, theta=theta))
        published = eg.paper_coefficient_matrix(theta)
        assert formula.a_ee == pytest.approx(published.a_ee, abs=TOL)
        assert formula.a_es == pytest.approx(published.a_es, abs=TOL)
        assert formula.a_ss == pytest.approx(published.a_ss, abs=TOL)
        # the one published entry the formulas do not reproduce
        assert formula.a_se == pytest.approx(FORMULA_A_SE, abs=TOL)
        assert published.a_se == pytest.approx(PAPER_A_SE, abs=TOL)
        assert abs(formula.a_se - published.a_se) > 0.15


class TestPublishedCoefficients:
    def test_theta_02(self):
        m = eg.paper_coefficient_matrix(0.2)
        assert m.a_ee == pytest.approx(0.5, abs=TOL)
        assert m.a_es == pytest.approx(0.6, abs=TOL)
        assert m.a_se == pytest.approx(0.47, abs=TOL)

    def test_theta_negative(self):
        m = eg.paper_coefficient_matrix(-0.1)
        assert m.a_ee == pytest.approx(0.2, abs=TOL)
        assert m.a_es == pytest.approx(0.3, abs=TOL)

    def test_stay_beats_evacuate_without_incentive(self):
        m = eg.paper_coefficient_matrix(0.0)
        assert m.a_es == pytest.approx(0.4, abs=TOL)
        assert m.a_se == pytest.approx(0.47, abs=TOL)
        assert m.a_es < m.a_se

    def test_theta_monotonicity(self):
        thetas = [-0.1, 0.0, 0.1, 0.2]
        ms = [eg.paper_coefficient_matrix(t) for t in thetas]
        for lo, hi in zip(ms, ms[1:]):
            assert hi.a_ee > lo.a_ee
            assert hi.a_es > lo.a_es
            assert hi.a_se == lo.a_se
            assert hi.a_ss == lo.a_ss

    def test_theta_out_of_range(self):
        with pytest.raises(ValueError):
            eg.paper_coefficient_matrix(1.5)


class TestPairPayoff:
    def test_mixed_pair(self):
        m = eg.paper_coefficient_matrix(0.0)
        assert eg.pair_payoff(m, Decision.EVACUATE, Decision.STAY) == pytest.approx(
            (0.4, 0.47), abs=TOL
        )

    def test_transpose(self):
        m = eg.paper_coefficient_matrix(0.0)
        assert eg.pair_payoff(m, Decision.STAY, Decision.EVACUATE) == pytest.approx(
            (0.47, 0.4), abs=TOL
        )

    def test_uniform_pair(self):
        m = eg.paper_coefficient_matrix(0.1)
        va, vb = eg.pair_payoff(m, Decision.EVACUATE, Decision.EVACUATE)
        assert va == vb == pytest.approx(m.a_ee, abs=TOL)

    @given(
        theta=st.floats(-1, 1),
        da=st.sampled_from(list(Decision)),
        db=st.sampled_from(list(Decision)),
    )
    def test_symmetry_property(self, theta, da, db):
        m = eg.paper_coefficient_matrix(theta)
        assert eg.pair_payoff(m, da, db) == tuple(reversed(eg.pair_payoff(m, db, da)))

    @given(
        scale=st.floats(0.1, 100),
        da=st.sampled_from(list(Decision)),
        db=st.sampled_from(list(Decision)),
    )
    def test_linearity_in_property_value(self, scale, da, db):
        m = eg.paper_coefficient_matrix(0.1)
        scaled = m.with_property_value(scale)
        base = eg.pair_payoff(m, da, db)
        got = eg.pair_payoff(scaled, da, db)
        assert got[0] == pytest.approx(base[0] * scale, rel=1e-12)
        assert got[1] == pytest.approx(base[1] * scale, rel=1e-12)
        assert scaled.a_ee == m.a_ee


class TestParamsValidation:
    def test_probability_bounds(self):
        with pytest.raises(ValueError):
            eg.PayoffParams(p=1.5)
        with pytest.raises(ValueError):
            eg.PayoffParams(r_S=-0.1)

    def test_theta_bounds(self):
        with pytest.raises(ValueError):
            eg.PayoffParams(theta=1.2)

    def test_decision_symbols(self):
        assert Decision.EVACUATE.symbol == "E"
        assert Decision.STAY.symbol == "S"
        assert Decision.from_symbol("E") is Decision.EVACUATE
        assert Decision.from_symbol("S") is Decision.STAY
        with pytest.raises(ValueError):
            Decision.from_symbol("X")
