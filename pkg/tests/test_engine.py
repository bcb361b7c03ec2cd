import pytest
from hypothesis import given, strategies as st

from cpt import engine
from cpt.errors import ModelError
from cpt.quantities import Dimension, Interval, Quantity
from cpt.scenario import UsageScenario, assess

import oracle

HOURS = Quantity(14600, "h")
EF = Quantity(0.4, "kgCO2/kWh")


def kg(lo, hi=None):
    return Interval.of(lo, hi, "kg")


def ug(lo, hi=None):
    return Interval.of(lo, hi, "ug")


def count(lo, hi=None):
    return Interval.of(lo, hi, "count")


def profile(wafer_kg, yld, tpw, stages=None):
    return engine.WaferProfile(
        "test", kg(wafer_kg), Interval.of(yld, unit="1"), count(tpw), stages
    )


class TestStageSum:
    def test_crystal_plus_wafer(self):
        out = engine.stage_sum({"crystal": kg(40), "wafer_processing": kg(410)})
        assert out.in_unit("kg") == (450, 450)

    def test_single_zero_stage(self):
        assert engine.stage_sum({"x": kg(0)}) == kg(0)

    def test_interval_stages(self):
        assert engine.stage_sum({"a": kg(1, 2), "b": kg(3, 4)}) == kg(4, 6)

    def test_empty(self):
        with pytest.raises(ModelError):
            engine.stage_sum({})

    def test_rejects_non_mass(self):
        with pytest.raises(ModelError):
            engine.stage_sum({"crystal": Interval.of(1, unit="W")})


class TestWaferProfile:
    def test_stage_sum_must_cover_total(self):
        with pytest.raises(ModelError, match="cover"):
            profile(450, 0.9, 1e11, {"crystal": kg(40), "wafer_processing": kg(300)})

    def test_stage_sum_within_one_percent(self):
        profile(450, 0.9, 1e11, {"crystal": kg(40), "wafer_processing": kg(406)})

    @pytest.mark.parametrize("yld", [0.0, 1.3])
    def test_yield_bounds(self, yld):
        with pytest.raises(ModelError, match="yield"):
            profile(450, yld, 1e11)

    def test_zero_transistors(self):
        with pytest.raises(ModelError, match="transistors_per_wafer"):
            profile(450, 0.9, 0)


class TestManufacturing:
    def test_5nm(self):
        out = engine.manufacturing_per_transistor(profile(450, 0.9, 1e11))
        assert out.in_unit("ug") == pytest.approx((5.0, 5.0), rel=1e-12)
        assert oracle.manufacturing_ug(450, 0.9, 1e11) == pytest.approx(5.0, rel=1e-12)

    def test_zero_wafer(self):
        assert engine.manufacturing_per_transistor(profile(0, 0.9, 1e11)) == ug(0)

    def test_7nm_lower_edge(self):
        out = engine.manufacturing_per_transistor(profile(350, 1.0, 1.75e11))
        assert out.in_unit("ug") == pytest.approx((2.0, 2.0), rel=1e-12)

    def test_chip_total(self):
        out = engine.manufacturing_chip_total(count(12e9), ug(5))
        assert out.in_unit("kg") == pytest.approx((60, 60), rel=1e-12)

    def test_chip_total_zero(self):
        assert engine.manufacturing_chip_total(count(0), ug(5, 7)) == kg(0)

    def test_chip_total_ryzen(self):
        # published value is 565.7 kg; 13.14e9 x 5 ug is 65.7 kg
        out = engine.manufacturing_chip_total(count(13.14e9), ug(5))
        assert out.in_unit("kg") == pytest.approx((65.7, 65.7), rel=1e-12)


class TestPower:
    def test_intel(self):
        out = engine.per_transistor_power(Interval.of(125, 253, "W"), count(12e9))
        assert out.in_unit("nW") == pytest.approx(
            (oracle.per_transistor_power_nw(125, 12e9), oracle.per_transistor_power_nw(253, 12e9)),
            rel=1e-12,
        )
        assert out.in_unit("nW") == pytest.approx((10.42, 21.08), abs=0.005)

    def test_zero_power(self):
        assert engine.per_transistor_power(Interval.of(0, unit="W"), count(5)) == Interval.of(0, unit="W")

    def test_ryzen(self):
        out = engine.per_transistor_power(Interval.of(170, 230, "W"), count(13.14e9))
        assert out.in_unit("nW") == pytest.approx((12.94, 17.50), abs=0.005)

    def test_zero_count(self):
        with pytest.raises(ModelError):
            engine.per_transistor_power(Interval.of(1, unit="W"), count(0))


class TestOperational:
    def test_intel_printed_power(self):
        inp = engine.OperationalInputs(Interval.of(10.4, 21.1, "nW"), HOURS, EF)
        out = engine.operational_per_transistor(inp)
        assert out.in_unit("ug") == pytest.approx(
            (oracle.operational_ug(10.4, 14600, 0.4), oracle.operational_ug(21.1, 14600, 0.4)),
            rel=1e-12,
        )
        assert out.in_unit("ug") == pytest.approx((60.736, 123.224), rel=1e-12)

    def test_zero_hours(self):
        inp = engine.OperationalInputs(Interval.of(10, 20, "nW"), Quantity(0, "h"), EF)
        assert engine.operational_per_transistor(inp) == ug(0)

    def test_apple_printed_power(self):
        inp = engine.OperationalInputs(Interval.of(0.8, 0.84, "nW"), HOURS, EF)
        out = engine.operational_per_transistor(inp)
        assert out.in_unit("ug") == pytest.approx((4.672, 4.9056), rel=1e-12)

    def test_input_dimensions_checked(self):
        with pytest.raises(ModelError):
            engine.OperationalInputs(ug(1), HOURS, EF)
        with pytest.raises(ModelError):
            engine.OperationalInputs(Interval.of(1, unit="nW"), Quantity(1, "kg"), EF)

    @given(
        st.floats(0, 1e3), st.floats(0, 1e3), st.floats(0, 1e5), st.floats(0, 1e5),
        st.floats(0, 2), st.floats(0, 2),
    )
    def test_monotone_in_each_input(self, p1, p2, h1, h2, e1, e2):
        def op(p, h, e):
            inp = engine.OperationalInputs(Interval.of(p, unit="nW"), Quantity(h, "h"), Quantity(e, "kgCO2/kWh"))
            return engine.operational_per_transistor(inp).hi

        p1, p2 = sorted((p1, p2))
        h1, h2 = sorted((h1, h2))
        e1, e2 = sorted((e1, e2))
        assert op(p1, h1, e1) <= op(p2, h1, e1)
        assert op(p1, h1, e1) <= op(p1, h2, e1)
        assert op(p1, h1, e1) <= op(p1, h1, e2)


class TestCpt:
    def test_table3_row1(self):
        out = engine.cpt_per_transistor(ug(4.5), ug(62, 126))
        assert out.in_unit("ug") == pytest.approx((66.5, 130.5))

    def test_zeros(self):
        assert engine.cpt_per_transistor(ug(0), ug(0)) == ug(0)

    def test_summary(self):
        assert engine.cpt_per_transistor(ug(2, 5), ug(60, 250)).in_unit("ug") == pytest.approx((62, 255))

    def test_rejects_non_mass(self):
        with pytest.raises(ModelError):
            engine.cpt_per_transistor(ug(1), Interval.of(1, unit="W"))

    def test_chip_total_m3(self):
        assert engine.chip_total(count(25e9), ug(2)).in_unit("kg") == pytest.approx((50, 50), rel=1e-12)

    def test_chip_total_zero(self):
        assert engine.chip_total(count(0), ug(3, 9)) == kg(0)

    def test_chip_total_intel_operational(self):
        out = engine.chip_total(count(12e9), ug(60.7, 123.2))
        assert out.in_unit("kg") == pytest.approx((728.4, 1478.4), rel=1e-12)


class TestAssess:
    def test_intel_default(self, builtin):
        b = assess("i9-13900K", UsageScenario(), builtin)
        # frozen from the plain-float oracle: 4.5 ug + (125..253 W / 12e9) * 14600 h * 0.4
        lo = 4.5 + oracle.operational_ug(oracle.per_transistor_power_nw(125, 12e9), 14600, 0.4)
        hi = 4.5 + oracle.operational_ug(oracle.per_transistor_power_nw(253, 12e9), 14600, 0.4)
        assert b.total_per_transistor.in_unit("ug") == pytest.approx((lo, hi), rel=1e-9)
        assert b.total_per_transistor.in_unit("ug") == pytest.approx((65.3333, 127.6267), rel=1e-5)

    def test_zero_hours(self, builtin):
        b = assess("i9-13900K", UsageScenario(years=0), builtin)
        assert b.operational_per_transistor == ug(0)
        assert b.operational_chip == kg(0)
        assert b.total_per_transistor == b.manufacturing_per_transistor
        assert b.manufacturing_share == 1.0

    def test_m3_default(self, builtin):
        b = assess("m3", UsageScenario(), builtin)
        lo, hi = b.total_per_transistor.in_unit("ug")
        assert (lo, hi) == pytest.approx((6.672, 7.1392), rel=1e-9)
        assert 6.5 <= (lo + hi) / 2 <= 7.1

    def test_breakdown_keeps_intermediates(self, builtin):
        b = assess("ryzen9-7950X", UsageScenario(), builtin)
        assert b.power_per_transistor.in_unit("nW") == pytest.approx((170 / 13.14, 230 / 13.14))
        assert b.transistor_count == count(13.14e9)
        assert 0 < b.manufacturing_share < 1

    def test_builtin_nodes_within_published_range(self, builtin):
        envelope = ug(2, 5)
        for node in builtin.nodes.values():
            assert envelope.contains(engine.manufacturing_per_transistor(node.profile)), node.id

    def test_utilization_scales_power(self, builtin):
        full = assess("m3", UsageScenario(), builtin)
        half = assess("m3", UsageScenario(utilization=0.5), builtin)
        assert half.operational_chip.hi == pytest.approx(full.operational_chip.hi / 2)
        assert half.manufacturing_chip == full.manufacturing_chip


def test_dimension_of_breakdown_fields(builtin):
    b = assess("m3", UsageScenario(), builtin)
    for name in ("manufacturing_per_transistor", "operational_per_transistor", "total_per_transistor",
                 "manufacturing_chip", "operational_chip", "total_chip"):
        assert getattr(b, name).dimension is Dimension.MASS_CO2
