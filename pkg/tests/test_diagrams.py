import random
import xml.etree.ElementTree as ET

import pytest

from pbs.diagrams import (
    EmptySeries,
    find_extrema,
    render_svg,
    sample_series,
    series_to_dict,
    summary_text,
)
from pbs.model import (
    AppliedMoment,
    BeamSpec,
    DistributedLoad,
    PointLoad,
    Support,
    SupportKind,
    Units,
    validate_beam,
)
from pbs.solver import evaluate_terms, solve_beam

from helpers import (
    cantilever_tip_load,
    propped_cantilever,
    random_beam,
    ss_central_load,
    ss_udl_beam,
    ss_with_moment,
)


def solved(spec, **kw):
    return solve_beam(validate_beam(spec), **kw)


# sampling --------------------------------------------------------------------


def test_shear_series_jumps_at_the_point_load():
    series = sample_series(solved(ss_central_load()), "shear", 101)
    at_load = [(x, v) for x, v in series.points if x == 5.0]
    assert len(at_load) == 2
    assert at_load[0][1] == pytest.approx(50.0, rel=1e-9)
    assert at_load[1][1] == pytest.approx(-50.0, rel=1e-9)


def test_shear_is_constant_on_unloaded_spans():
    series = sample_series(solved(ss_central_load()), "shear", 101)
    left = [v for x, v in series.points if x < 5.0]
    right = [v for x, v in series.points if 5.0 < x < 10.0]
    assert all(v == pytest.approx(50.0, rel=1e-9) for v in left)
    assert all(v == pytest.approx(-50.0, rel=1e-9) for v in right)
    # at the right end the reaction step closes the diagram back to zero
    assert series.points[-1][1] == pytest.approx(0.0, abs=1e-9 * 50)


def test_moment_vanishes_at_pinned_ends():
    series = sample_series(solved(ss_central_load()), "moment", 101)
    assert series.points[0] == (0.0, 0.0)
    assert series.points[-1][0] == 10.0
    assert series.points[-1][1] == pytest.approx(0.0, abs=1e-9 * 250)


def test_sampling_introduces_no_interpolation_error():
    sol = solved(propped_cantilever())
    for kind, terms in (("shear", sol.v), ("moment", sol.m)):
        series = sample_series(sol, kind, 200)
        jump_xs = {p.x for p in series.critical_points if p.tag == "jump"}
        for x, v in series.points:
            if x in jump_xs:
                continue  # the pre-jump twin is a left limit, not a value
            assert v == evaluate_terms(list(terms), x)


def test_jump_count_matches_load_counts():
    spec = BeamSpec(length=10.0,
                    units=Units(),
                    supports=(Support(SupportKind.SIMPLE, 0.0),
                              Support(SupportKind.ROLLER, 10.0)),
                    point_loads=(PointLoad(10.0, 2.0), PointLoad(-5.0, 7.0)),
                    moments=(AppliedMoment(4.0, 5.0),))
    sol = solved(spec)

    def duplicated_abscissas(series):
        xs = [x for x, _ in series.points]
        return {x for x in xs if xs.count(x) == 2}

    shear = sample_series(sol, "shear", 97)
    assert duplicated_abscissas(shear) == {2.0, 7.0}
    moment = sample_series(sol, "moment", 97)
    assert duplicated_abscissas(moment) == {5.0}


def test_minimum_sample_count():
    with pytest.raises(ValueError):
        sample_series(solved(ss_central_load()), "shear", 1)


# extrema ---------------------------------------------------------------------


def test_central_load_moment_extremum():
    points = find_extrema(solved(ss_central_load()), "moment")
    peak = next(p for p in points if p.tag == "max")
    assert peak.x == pytest.approx(5.0, abs=1e-9)
    assert peak.value == pytest.approx(250.0, rel=1e-9)


def test_udl_moment_extremum():
    points = find_extrema(solved(ss_udl_beam(w=2.0, L=6.0)), "moment")
    peak = next(p for p in points if p.tag == "max")
    assert peak.x == pytest.approx(3.0, abs=1e-9)
    assert peak.value == pytest.approx(9.0, rel=1e-9)


def test_cantilever_moment_extremum_is_at_the_fixed_end():
    points = find_extrema(solved(cantilever_tip_load()), "moment")
    bottom = next(p for p in points if p.tag == "min")
    assert bottom.x == 0.0
    assert bottom.value == pytest.approx(-20.0, rel=1e-9)


def test_extrema_never_fall_below_grid_samples():
    rng = random.Random(123)
    for _ in range(15):
        sol = solved(random_beam(rng))
        for kind in ("shear", "moment", "deflection"):
            series = sample_series(sol, kind, 500)
            values = [v for _, v in series.points]
            peak = max(p.value for p in series.critical_points if p.tag == "max")
            low = min(p.value for p in series.critical_points if p.tag == "min")
            scale = max(1e-12, max(abs(v) for v in values))
            assert peak >= max(values) - 1e-9 * scale
            assert low <= min(values) + 1e-9 * scale


def test_deflection_extremum_with_ramp_load_uses_bisection_path():
    spec = BeamSpec(length=10.0,
                    supports=(Support(SupportKind.SIMPLE, 0.0),
                              Support(SupportKind.ROLLER, 10.0)),
                    distributed_loads=(DistributedLoad(0.0, 10.0, 0.0, 6.0),))
    sol = solved(spec)
    series = sample_series(sol, "deflection", 2000)
    values = [v for _, v in series.points]
    low = min(p.value for p in series.critical_points if p.tag == "min")
    assert low <= min(values) + 1e-9 * abs(min(values))


def test_zero_crossing_is_reported():
    series = sample_series(solved(ss_with_moment()), "moment", 101)
    zeros = [p for p in series.critical_points if p.tag == "zero"]
    # M(x) = 2x - 8<x-2>^0: positive before the moment, negative after; no
    # interior crossing through zero other than the jump itself
    assert zeros == []
    deflection = sample_series(solved(ss_with_moment()), "deflection", 101)
    # antisymmetric deflection crosses zero mid-span
    assert any(abs(p.x - 2.0) < 1e-6 for p in deflection.critical_points if p.tag == "zero")


# rendering -------------------------------------------------------------------


def test_svg_is_well_formed_with_one_polygon_and_polyline():
    series = sample_series(solved(ss_central_load()), "moment", 64)
    svg = render_svg(series)
    root = ET.fromstring(svg)
    ns = "{http://www.w3.org/2000/svg}"
    assert root.tag == f"{ns}svg"
    assert len(root.findall(f"{ns}polygon")) == 1
    assert len(root.findall(f"{ns}polyline")) == 1


def test_svg_rendering_is_deterministic():
    series = sample_series(solved(propped_cantilever()), "shear", 128)
    assert render_svg(series) == render_svg(series)


def test_unit_label_appears_verbatim():
    spec = ss_central_load()
    spec = BeamSpec(length=spec.length, units=Units(length="cm", force="kg"),
                    supports=spec.supports, point_loads=spec.point_loads)
    series = sample_series(solved(spec), "moment", 64)
    assert series.unit_label == "kg·cm"
    assert "kg·cm" in render_svg(series)


def test_empty_series_is_rejected():
    series = sample_series(solved(ss_central_load()), "shear", 16)
    empty = type(series)(kind="shear", points=(), critical_points=(), unit_label="kN")
    with pytest.raises(EmptySeries):
        render_svg(empty)


def test_series_export_shape():
    series = sample_series(solved(ss_central_load()), "shear", 16)
    doc = series_to_dict(series)
    assert doc["kind"] == "shear"
    assert doc["unit"] == "kN"
    assert all(len(p) == 2 for p in doc["points"])
    assert all(set(c) == {"x", "value", "tag"} for c in doc["critical"])


# summary ---------------------------------------------------------------------


def test_summary_reports_symmetric_reactions():
    text = summary_text(solved(ss_central_load()))
    assert "R[0] = 50.000000 (up)" in text
    assert "R[1] = 50.000000 (up)" in text


def test_summary_reports_fixed_end_moment():
    text = summary_text(solved(propped_cantilever()))
    assert "M_r[0] = 40.000000 (ccw)" in text


def test_summary_flags_normalized_deflection():
    text = summary_text(solved(ss_central_load()))
    assert "deflection shown as EI·y" in text
    with_ei = summary_text(solved(ss_central_load(), ei=1e6))
    assert "deflection shown as EI·y" not in with_ei
    assert "EI = 1e+06" in with_ei
