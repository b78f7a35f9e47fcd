import itertools
import math

import numpy as np
import pytest
from scipy.optimize import linprog

from qlocality.correlations import correlation, joint_distribution
from qlocality.hv_models import (
    CommonCauseModel,
    HiddenResponses,
    LocalStates,
    LocalTables,
    NonlocalRealisticModel,
    extremal_rt_model,
    lqt_model_from_separable,
    lrt_from_lt,
    model_correlation,
    model_joint_distribution,
    model_xy,
    random_common_cause_model,
    rt_model_from_quantum,
    setting_key,
    verify_locality_condition,
)
from qlocality.qubit_algebra import (
    I2,
    I4,
    SettingPair,
    ValidationError,
    make_product,
    make_singlet,
    make_werner,
    random_separable_decomposition,
    random_setting_pair,
    random_unit_vector,
    separable_state,
)

X = np.array([1.0, 0, 0])
Y = np.array([0, 1.0, 0])
Z = np.array([0, 0, 1.0])
AXES = [X, -X, Y, -Y, Z, -Z]


def werner_third_decomposition():
    """Anti-aligned product states along +-x, +-y, +-z: correlation tensor -I/3."""
    return [(1 / 6, n, -n) for n in AXES]


def grid_settings(rng, n=10):
    a = [random_unit_vector(rng) for _ in range(n)]
    b = [random_unit_vector(rng) for _ in range(n)]
    return [(ai, bj) for ai in a for bj in b]


class TestModelCorrelation:
    def test_single_cause_table(self):
        m = CommonCauseModel("lt", ((1.0, LocalTables([(Z, 1.0)], [(Z, -1.0)])),))
        assert model_correlation(m, Z, Z) == -1

    def test_lqt_maximally_mixed_cause(self):
        m = CommonCauseModel("lqt", ((1.0, LocalStates(I2 / 2, I2 / 2)),))
        assert model_correlation(m, Z, X) == 0

    def test_unknown_setting(self):
        m = CommonCauseModel("lt", ((1.0, LocalTables([(Z, 1.0)], [(Z, -1.0)])),))
        with pytest.raises(KeyError):
            model_correlation(m, X, Z)

    def test_werner_03_from_separable(self, rng):
        d = [(0.9 * p, ra, rb) for p, ra, rb in werner_third_decomposition()]
        d.append((0.1, np.zeros(3), np.zeros(3)))
        m = lqt_model_from_separable(d)
        rho = make_werner(0.3)
        # the decomposition really is the Werner state
        np.testing.assert_allclose(separable_state(d), rho, atol=1e-15)
        for a, b in grid_settings(rng, 10)[:10]:
            assert model_correlation(m, a, b) == pytest.approx(correlation(rho, a, b), abs=1e-9)


class TestValidation:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValidationError, match="sum"):
            CommonCauseModel("lqt", ((0.6, LocalStates(I2 / 2, I2 / 2)), (0.6, LocalStates(I2 / 2, I2 / 2))))

    def test_negative_weight(self):
        with pytest.raises(ValidationError):
            CommonCauseModel("lqt", ((1.5, LocalStates(I2 / 2, I2 / 2)), (-0.5, LocalStates(I2 / 2, I2 / 2))))

    def test_mean_bound(self):
        with pytest.raises(ValidationError, match="outside"):
            LocalTables([(Z, 1.2)], [(Z, 0.0)])

    def test_gamma_bound(self):
        with pytest.raises(ValidationError):
            NonlocalRealisticModel(((1.0, [((Z, Z), -1.01)]),))

    def test_payload_kind(self):
        with pytest.raises(ValidationError):
            CommonCauseModel("lt", ((1.0, LocalStates(I2 / 2, I2 / 2)),))


class TestLqtFromSeparable:
    def test_single_product(self, rng):
        ra, rb = np.array([0.3, -0.2, 0.5]), np.array([0, 0.9, 0.1])
        m = lqt_model_from_separable([(1.0, ra, rb)])
        rho = make_product(ra, rb)
        for a, b in grid_settings(rng, 4):
            assert model_correlation(m, a, b) == pytest.approx(correlation(rho, a, b), abs=1e-12)

    def test_werner_third(self, rng):
        m = lqt_model_from_separable(werner_third_decomposition())
        for a, b in grid_settings(rng, 5):
            assert model_correlation(m, a, b) == pytest.approx(-(a @ b) / 3, abs=1e-12)

    def test_classical_anticorrelated_mixture(self):
        m = lqt_model_from_separable([(0.5, Z, -Z), (0.5, -Z, Z)])
        assert model_correlation(m, Z, Z) == pytest.approx(-1, abs=1e-15)
        assert model_correlation(m, X, X) == pytest.approx(0, abs=1e-15)

    def test_random_decompositions(self, rng):
        for _ in range(20):
            d = random_separable_decomposition(rng)
            m = lqt_model_from_separable(d)
            rho = separable_state(d)
            for a, b in grid_settings(rng, 3):
                assert model_correlation(m, a, b) == pytest.approx(correlation(rho, a, b), abs=1e-10)

    def test_invalid(self):
        with pytest.raises(ValidationError):
            lqt_model_from_separable([])
        with pytest.raises(ValidationError):
            lqt_model_from_separable([(1.0, [0, 0, 2], [0, 0, 0])])
        with pytest.raises(ValidationError):
            lqt_model_from_separable([(0.5, Z, Z)])


class TestRtFromQuantum:
    def test_singlet_zz(self):
        m = rt_model_from_quantum(make_singlet(), [(Z, Z)])
        assert m.correlation(Z, Z) == pytest.approx(-1, abs=1e-15)

    def test_maximally_mixed(self, rng):
        settings = grid_settings(rng, 3)
        m = rt_model_from_quantum(I4 / 4, settings)
        assert all(m.correlation(a, b) == pytest.approx(0, abs=1e-15) for a, b in settings)

    def test_singlet_chsh_settings(self, maximal_settings):
        pa, pb = maximal_settings
        settings = [(a, b) for a in (pa.main, pa.perp) for b in (pb.main, pb.perp)]
        m = rt_model_from_quantum(make_singlet(), settings)
        assert m.max_abs_response() <= 1
        # plug the stored responses into X and Y directly
        g = {(i, j): m.causes[0][1][(setting_key(a), setting_key(b))]
             for i, a in enumerate((pa.main, pa.perp)) for j, b in enumerate((pb.main, pb.perp))}
        x = g[0, 1] + g[1, 0]
        y = g[0, 0] - g[1, 1]
        assert (x, y) == pytest.approx((math.sqrt(2), -math.sqrt(2)), abs=1e-12)
        xy = model_xy(m, pa, pb)
        assert xy.max_abs_pm == pytest.approx(2 * math.sqrt(2), abs=1e-12)
        assert xy.max_abs <= 2

    def test_extremal_model_outside_quantum(self, rng):
        pa, pb = random_setting_pair(rng), random_setting_pair(rng)
        m = extremal_rt_model(pa, pb)
        xy = model_xy(m, pa, pb)
        assert xy == (2.0, 2.0)
        assert m.max_abs_response() <= 1
        assert xy.sum_of_squares > 4 and xy.max_abs_pm > 2


class TestLocalityCondition:
    def test_separable_state(self, rng):
        d = random_separable_decomposition(rng)
        m = lqt_model_from_separable(d)
        v = verify_locality_condition(m, separable_state(d), grid_settings(rng, 5))
        assert v.passed and v.max_deviation <= 1e-9

    def test_own_joints_exact(self, rng):
        s_a = [random_unit_vector(rng) for _ in range(2)]
        s_b = [random_unit_vector(rng) for _ in range(2)]
        settings = [(a, b) for a in s_a for b in s_b]
        m = random_common_cause_model(rng, "lt", s_a, s_b, n_causes=1)
        v = verify_locality_condition(m, lambda a, b: model_joint_distribution(m, a, b), settings)
        assert v.max_deviation == 0.0 and v.passed

    def test_lp_minimal_deviation_against_singlet(self, maximal_settings):
        """Smallest deviation any local model can reach, by LP over deterministic strategies."""
        pa, pb = maximal_settings
        combos = [(ia, ib) for ia in range(2) for ib in range(2)]
        vecs_a, vecs_b = (pa.main, pa.perp), (pb.main, pb.perp)
        target = {c: joint_distribution(make_singlet(), vecs_a[c[0]], vecs_b[c[1]]) for c in combos}
        strategies = list(itertools.product((1, -1), repeat=4))  # (A0, A1, B0, B1)
        n = len(strategies)
        # variables: q_0..q_15, t ; minimize t
        A_ub, b_ub = [], []
        for (ia, ib) in combos:
            for k, (i, j) in enumerate(((1, 1), (1, -1), (-1, 1), (-1, -1))):
                row = [1.0 if (s[ia] == i and s[2 + ib] == j) else 0.0 for s in strategies]
                p = target[(ia, ib)][k]
                A_ub.append(row + [-1.0]); b_ub.append(p)
                A_ub.append([-r for r in row] + [-1.0]); b_ub.append(-p)
        res = linprog(c=[0.0] * n + [1.0], A_ub=A_ub, b_ub=b_ub,
                      A_eq=[[1.0] * n + [0.0]], b_eq=[1.0], bounds=[(0, None)] * (n + 1))
        assert res.success
        t_min = res.fun
        # analytic floor: |X - Y| differs by >= 2 sqrt2 - 2, spread over 4 correlations
        # each built from 4 probabilities
        assert t_min >= (2 * math.sqrt(2) - 2) / 16 - 1e-12
        settings = [(vecs_a[ia], vecs_b[ib]) for ia, ib in combos]
        rng = np.random.default_rng(7)
        for kind in ("lt", "lqt", "lrt"):
            for _ in range(50):
                m = random_common_cause_model(rng, kind, vecs_a, vecs_b)
                v = verify_locality_condition(m, make_singlet(), settings)
                assert not v.passed
                assert v.max_deviation >= t_min - 1e-9


class TestLrtFromLt:
    def _single(self, mean):
        return CommonCauseModel("lt", ((1.0, LocalTables([(Z, mean)], [(Z, 0.0)])),))

    def test_deterministic_plus_one(self):
        lrt = lrt_from_lt(self._single(1.0))
        resp = lrt.causes[0][1]
        assert all(ra[tuple(Z)] == 1.0 for _, ra, _ in resp.lambdas)
        assert resp.mean_alice(Z) == 1.0

    def test_zero_mean(self):
        resp = lrt_from_lt(self._single(0.0)).causes[0][1]
        plus = sum(p for p, ra, _ in resp.lambdas if ra[tuple(Z)] == 1.0)
        assert plus == pytest.approx(0.5, abs=1e-15)
        assert resp.mean_alice(Z) == pytest.approx(0.0, abs=1e-15)

    def test_point_six(self):
        resp = lrt_from_lt(self._single(0.6)).causes[0][1]
        plus = sum(p for p, ra, _ in resp.lambdas if ra[tuple(Z)] == 1.0)
        minus = sum(p for p, ra, _ in resp.lambdas if ra[tuple(Z)] == -1.0)
        assert (plus, minus) == pytest.approx((0.8, 0.2), abs=1e-15)
        assert resp.mean_alice(Z) == pytest.approx(0.6, abs=1e-15)
        assert all(abs(r) == 1 for _, ra, rb in resp.lambdas for r in (*ra.values(), *rb.values()))

    def test_reproduces_random_lt_models(self, rng):
        for _ in range(30):
            s_a = [random_unit_vector(rng) for _ in range(3)]
            s_b = [random_unit_vector(rng) for _ in range(3)]
            lt = random_common_cause_model(rng, "lt", s_a, s_b)
            lrt = lrt_from_lt(lt)
            for (w, tables), (w2, resp) in zip(lt.causes, lrt.causes):
                assert w == w2
                for s in s_a:
                    assert resp.mean_alice(s) == pytest.approx(tables.alice[setting_key(s)], abs=1e-9)
            for a in s_a:
                for b in s_b:
                    assert model_correlation(lrt, a, b) == pytest.approx(model_correlation(lt, a, b), abs=1e-9)
                    np.testing.assert_allclose(model_joint_distribution(lrt, a, b),
                                               model_joint_distribution(lt, a, b), atol=1e-9)

    def test_resolution_grid(self):
        resp = lrt_from_lt(self._single(0.6), resolution=10).causes[0][1]
        assert resp.mean_alice(Z) == pytest.approx(0.6, abs=2 / 10)

    def test_needs_lt(self):
        with pytest.raises(ValidationError):
            lrt_from_lt(lqt_model_from_separable([(1.0, Z, Z)]))


class TestModelBounds:
    @pytest.mark.parametrize("kind", ["lt", "lqt", "lrt"])
    def test_locality_bounds(self, rng, kind):
        for _ in range(300):
            pa, pb = random_setting_pair(rng), random_setting_pair(rng)
            m = random_common_cause_model(rng, kind, (pa.main, pa.perp), (pb.main, pb.perp))
            xy = model_xy(m, pa, pb)
            assert xy.max_abs <= 2 + 1e-12
            assert xy.max_abs_pm <= 2 + 1e-12
            if kind == "lqt":
                assert xy.sum_of_squares <= 1 + 1e-9

    def test_lrt_reaches_chsh_bound(self):
        """A deterministic local strategy saturates |X - Y| = 2."""
        pa_main, pa_perp, pb_main, pb_perp = X, Y, X, -Y
        resp = HiddenResponses(((1.0,
                                 [(pa_main, 1.0), (pa_perp, 1.0)],
                                 [(pb_main, 1.0), (pb_perp, -1.0)]),))
        m = CommonCauseModel("lrt", ((1.0, resp),))
        xy = model_xy(m, SettingPair(pa_main, pa_perp), SettingPair(pb_main, pb_perp))
        # X = A0 B1 + A1 B0 = -1 + 1, Y = A0 B0 - A1 B1 = 1 + 1
        assert xy == (0.0, 2.0)
        assert xy.max_abs_pm == 2.0
