"""Link-budget unit tests against independently computed values."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meshroute.linkbudget import (
    NO_INTERFERENCE_DBM,
    RadioConfig,
    antenna_gain_db,
    exclude_interferers,
    fspl_db,
    interference_power_dbm,
    link_snir_db,
    received_power_dbm,
    total_interference_dbm,
    SPEED_OF_LIGHT_M_S,
)

# frozen from a 50-digit mpmath evaluation of the closed forms
FSPL_60GHZ_100M = 108.01080822955625
PRX_DEFAULT_100M = -41.660808229556245
PRX_DEFAULT_500M = -70.24020831627662
DOUBLING_DB = 6.020599913279624
THREE_DB = 3.0102999566398120


class PointGeometry:
    """Minimal geometry provider for link-budget tests."""

    def __init__(self, points):
        self.points = [tuple(map(float, p)) for p in points]

    def distance_m(self, i, j):
        (xa, ya), (xb, yb) = self.points[i], self.points[j]
        d = math.hypot(xa - xb, ya - yb)
        if d == 0.0:
            raise ValueError("coincident points")
        return d

    def angle_at(self, at, a, b):
        (x0, y0) = self.points[at]
        va = (self.points[a][0] - x0, self.points[a][1] - y0)
        vb = (self.points[b][0] - x0, self.points[b][1] - y0)
        na, nb = math.hypot(*va), math.hypot(*vb)
        if na == 0.0 or nb == 0.0:
            raise ValueError("coincident points")
        cosang = (va[0] * vb[0] + va[1] * vb[1]) / (na * nb)
        return math.acos(max(-1.0, min(1.0, cosang)))


class TestFspl:
    def test_reference_value(self):
        assert fspl_db(60e9, 100.0) == pytest.approx(FSPL_60GHZ_100M, abs=1e-9)

    def test_doubling_distance_adds_six_db(self):
        assert fspl_db(60e9, 200.0) - fspl_db(60e9, 100.0) == pytest.approx(
            DOUBLING_DB, abs=1e-9
        )

    def test_zero_db_distance(self):
        d0 = SPEED_OF_LIGHT_M_S / (4.0 * math.pi * 60e9)
        assert fspl_db(60e9, d0) == pytest.approx(0.0, abs=1e-9)

    @pytest.mark.parametrize("f,d", [(60e9, 0.0), (60e9, -1.0), (0.0, 100.0), (-1.0, 5.0)])
    def test_domain_errors(self, f, d):
        with pytest.raises(ValueError):
            fspl_db(f, d)

    @given(
        f=st.floats(1e9, 100e9),
        d=st.floats(0.1, 5000.0),
    )
    @settings(max_examples=200)
    def test_doubling_property(self, f, d):
        assert fspl_db(f, 2 * d) - fspl_db(f, d) == pytest.approx(DOUBLING_DB, abs=1e-9)


class TestAntennaGain:
    def test_boresight_is_array_gain(self, default_cfg):
        assert antenna_gain_db(0.0, default_cfg) == pytest.approx(20.0)

    @given(theta=st.floats(-math.pi, math.pi))
    @settings(max_examples=200)
    def test_even_pattern(self, theta):
        cfg = RadioConfig()
        assert antenna_gain_db(theta, cfg) == antenna_gain_db(-theta, cfg)

    def test_floor_clamp(self, default_cfg):
        # x = B_w * theta = 5*pi makes sinc vanish entirely
        theta = 5.0 * math.pi / default_cfg.pattern_shape
        want = default_cfg.boresight_gain_db + default_cfg.pattern_floor_db
        assert antenna_gain_db(theta, default_cfg) == pytest.approx(want)
        # near the first null the raw pattern dips below the -30 dB floor
        assert 20.0 * math.log10(abs(math.sin(3.1) / 3.1)) < -30.0
        assert antenna_gain_db(0.31, default_cfg) == pytest.approx(want)

    @given(theta=st.floats(-math.pi, math.pi))
    @settings(max_examples=200)
    def test_never_below_floor(self, theta):
        cfg = RadioConfig()
        floor = cfg.boresight_gain_db + cfg.pattern_floor_db
        g = antenna_gain_db(theta, cfg)
        assert floor - 1e-12 <= g <= cfg.boresight_gain_db + 1e-12


class TestReceivedPower:
    def test_defaults_100m(self, default_cfg):
        assert received_power_dbm(100.0, default_cfg) == pytest.approx(
            PRX_DEFAULT_100M, abs=1e-9
        )

    def test_defaults_500m(self, default_cfg):
        assert received_power_dbm(500.0, default_cfg) == pytest.approx(
            PRX_DEFAULT_500M, abs=1e-9
        )

    def test_all_terms_vanish(self):
        cfg = RadioConfig(
            tx_power_dbm=0.0,
            rain_margin_db_per_m=0.0,
            o2_atten_db_per_m=0.0,
            boresight_gain_db=0.0,
        )
        d0 = SPEED_OF_LIGHT_M_S / (4.0 * math.pi * cfg.carrier_hz)
        assert received_power_dbm(d0, cfg) == pytest.approx(0.0, abs=1e-9)

    def test_eirp_mode_drops_tx_gain(self, default_cfg):
        eirp = RadioConfig(eirp_mode=True)
        assert received_power_dbm(100.0, eirp) == pytest.approx(
            received_power_dbm(100.0, default_cfg) - 20.0
        )

    @given(pair=st.tuples(st.floats(1.0, 3000.0), st.floats(1.0, 3000.0)))
    @settings(max_examples=200)
    def test_strictly_decreasing_in_distance(self, pair):
        cfg = RadioConfig()
        d1, d2 = sorted(pair)
        if d2 <= d1 * (1.0 + 1e-9):
            return  # too close: the dB difference can round away
        assert received_power_dbm(d1, cfg) > received_power_dbm(d2, cfg)

    def test_domain_error(self, default_cfg):
        with pytest.raises(ValueError):
            received_power_dbm(0.0, default_cfg)


class TestInterferencePower:
    def test_collinear_boresight_equals_received_power(self, default_cfg):
        # interferer on the victim's boresight ray and vice versa
        geom = PointGeometry([(100, 0), (0, 0), (-100, 0), (-50, 0)])
        p_in = interference_power_dbm(0, 1, 2, 3, geom, default_cfg)
        assert p_in == pytest.approx(received_power_dbm(200.0, default_cfg), abs=1e-9)

    def test_collinear_also_in_eirp_mode(self):
        cfg = RadioConfig(eirp_mode=True)
        geom = PointGeometry([(100, 0), (0, 0), (-100, 0), (-50, 0)])
        p_in = interference_power_dbm(0, 1, 2, 3, geom, cfg)
        assert p_in == pytest.approx(received_power_dbm(200.0, cfg), abs=1e-9)

    def test_both_floors_active(self, default_cfg):
        # both off-boresight angles sit on a pattern null, so both clamps bind
        geom = PointGeometry([(0, 0), (100, 0), (0, 150), (150, 150)])
        alpha = geom.angle_at(0, 1, 2)
        beta = geom.angle_at(2, 3, 0)
        floor_g = default_cfg.boresight_gain_db + default_cfg.pattern_floor_db
        assert antenna_gain_db(alpha, default_cfg) == pytest.approx(floor_g)
        assert antenna_gain_db(beta, default_cfg) == pytest.approx(floor_g)
        d = geom.distance_m(0, 2)
        p_in = interference_power_dbm(0, 1, 2, 3, geom, default_cfg)
        want = received_power_dbm(d, default_cfg) + 2 * default_cfg.pattern_floor_db
        assert p_in == pytest.approx(want, abs=1e-9)

    def test_square_layout_perpendicular(self, default_cfg):
        # victim at origin aims +x; interferer straight above aims +x too
        geom = PointGeometry([(0, 0), (100, 0), (0, 150), (150, 150)])
        p_in = interference_power_dbm(0, 1, 2, 3, geom, default_cfg)
        gain_perp = antenna_gain_db(math.pi / 2.0, default_cfg)
        want = received_power_dbm(150.0, default_cfg) + 2 * (gain_perp - 20.0)
        assert p_in == pytest.approx(want, abs=1e-9)

    def test_coincident_nodes_error(self, default_cfg):
        geom = PointGeometry([(0, 0), (100, 0), (0, 0), (50, 50)])
        with pytest.raises(ValueError):
            interference_power_dbm(0, 1, 2, 3, geom, default_cfg)


class TestTotalInterference:
    GEOM = PointGeometry(
        [(0, 0), (100, 0), (40, 120), (140, 120), (-60, 90), (-160, 90)]
    )

    def test_empty_context(self, default_cfg):
        assert total_interference_dbm(0, 1, [], self.GEOM, default_cfg) == NO_INTERFERENCE_DBM

    def test_single_interferer(self, default_cfg):
        one = interference_power_dbm(0, 1, 2, 3, self.GEOM, default_cfg)
        got = total_interference_dbm(0, 1, [(2, 3)], self.GEOM, default_cfg)
        assert got == pytest.approx(one, abs=1e-12)

    def test_two_identical_powers_add_three_db(self, default_cfg):
        # mirror the interferer so both contribute the same power
        geom = PointGeometry([(0, 0), (100, 0), (40, 120), (140, 120), (40, -120), (140, -120)])
        p1 = interference_power_dbm(0, 1, 2, 3, geom, default_cfg)
        p2 = interference_power_dbm(0, 1, 4, 5, geom, default_cfg)
        assert p1 == pytest.approx(p2, abs=1e-9)
        total = total_interference_dbm(0, 1, [(2, 3), (4, 5)], geom, default_cfg)
        assert total == pytest.approx(p1 + THREE_DB, abs=1e-9)

    def test_monotone_in_added_links(self, default_cfg):
        ctx = [(2, 3)]
        base = total_interference_dbm(0, 1, ctx, self.GEOM, default_cfg)
        more = total_interference_dbm(0, 1, ctx + [(4, 5)], self.GEOM, default_cfg)
        assert more >= base


class TestLinkSnir:
    GEOM = TestTotalInterference.GEOM

    def test_no_interference_is_prx_minus_noise(self, default_cfg):
        snir = link_snir_db(1, 0, [], self.GEOM, default_cfg)
        prx = received_power_dbm(100.0, default_cfg)
        assert snir == pytest.approx(prx - default_cfg.noise_dbm, abs=1e-12)

    def test_interferer_at_noise_power_costs_three_db(self, default_cfg):
        p_in = interference_power_dbm(0, 1, 2, 3, self.GEOM, default_cfg)
        cfg = default_cfg.with_noise(p_in)
        snir = link_snir_db(1, 0, [(2, 3)], self.GEOM, cfg)
        prx = received_power_dbm(100.0, cfg)
        assert snir == pytest.approx(prx - (cfg.noise_dbm + THREE_DB), abs=1e-9)

    def test_high_noise_regime_swamps_interference(self, default_cfg):
        cfg = default_cfg.with_noise(30.0)
        p_in = interference_power_dbm(0, 1, 4, 5, self.GEOM, cfg)
        assert p_in < -40.0
        with_ctx = link_snir_db(1, 0, [(4, 5)], self.GEOM, cfg)
        without = link_snir_db(1, 0, [], self.GEOM, cfg)
        assert abs(with_ctx - without) < 1e-3

    def test_asymmetry_witness(self, default_cfg):
        ctx = [(2, 3)]
        forward = link_snir_db(1, 0, ctx, self.GEOM, default_cfg)
        backward = link_snir_db(0, 1, ctx, self.GEOM, default_cfg)
        assert forward != backward


class TestExclusions:
    def test_drops_own_transmitter_and_receiver(self):
        links = [(1, 0), (0, 2), (1, 3), (4, 5), (2, 1)]
        kept = exclude_interferers(1, 0, links)
        assert kept == [(2, 1), (4, 5)]

    def test_identical_link_dropped(self):
        assert exclude_interferers(3, 7, [(3, 7)]) == []


class TestRadioConfig:
    def test_defaults_match_reference_setup(self):
        cfg = RadioConfig()
        assert cfg.tx_power_dbm == 30.0
        assert cfg.carrier_hz == 60e9
        assert cfg.rain_margin_db_per_m == 0.0205
        assert cfg.o2_atten_db_per_m == 0.016
        assert cfg.boresight_gain_db == 20.0
        assert cfg.noise_dbm == -100.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"carrier_hz": 0.0},
            {"rain_margin_db_per_m": -0.1},
            {"o2_atten_db_per_m": -0.1},
            {"pattern_shape": 0.0},
            {"pattern_floor_db": 1.0},
        ],
    )
    def test_invariant_violations(self, kwargs):
        with pytest.raises(ValueError):
            RadioConfig(**kwargs)
