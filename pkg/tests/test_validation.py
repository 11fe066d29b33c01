"""Reference-vs-model validation, sweep table, and delimited file round trips."""
import math

import pytest

from lapflex.gripper import jaw_state, valid_displacement_range
from lapflex.markers import synth_frame
from lapflex.validation import (
    ReferenceConfig,
    Source,
    SWEEP_COLUMNS,
    model_curve,
    read_mocap,
    read_references,
    sweep,
    validate,
    validate_mocap,
    write_mocap,
    write_references,
    write_report,
    write_sweep,
)


def refs_on_model(geom, sliders):
    return [ReferenceConfig(s, jaw_state(geom, s).total_angle) for s in sliders]


def test_validate_perfect_references(geom):
    report = validate(refs_on_model(geom, [0.5, 1.5, 3.0, 5.0]), geom, Source.CAD)
    assert report.mae == 0.0
    assert report.max_err == 0.0
    assert report.excluded == ()
    assert report.source is Source.CAD
    assert len(report.pairs) == 4


def test_validate_known_offsets(geom):
    refs = [
        ReferenceConfig(1.0, jaw_state(geom, 1.0).total_angle + 1.0),
        ReferenceConfig(2.0, jaw_state(geom, 2.0).total_angle - 2.0),
        ReferenceConfig(3.0, jaw_state(geom, 3.0).total_angle + 3.0),
    ]
    report = validate(refs, geom, Source.CAD)
    assert report.mae == pytest.approx(2.0, abs=1e-12)
    assert report.max_err == pytest.approx(3.0, abs=1e-12)


def test_validate_excludes_out_of_range(geom):
    lo, hi = valid_displacement_range(geom)
    refs = refs_on_model(geom, [1.0, 2.0]) + [
        ReferenceConfig(hi + 1.0, 95.0),
        ReferenceConfig(lo - 0.5, -3.0),
    ]
    report = validate(refs, geom, Source.CAD)
    assert len(report.pairs) == 2
    assert len(report.excluded) == 2
    assert {r.slider for r in report.excluded} == {hi + 1.0, lo - 0.5}


def test_validate_rejects_empty_and_all_excluded(geom):
    with pytest.raises(ValueError):
        validate([], geom, Source.CAD)
    with pytest.raises(ValueError):
        validate([ReferenceConfig(50.0, 10.0)], geom, Source.CAD)


def test_validate_mocap_noiseless_stream(geom):
    frames = [synth_frame(geom, 0.0)] + [
        synth_frame(geom, s) for s in (1.0, 2.5, 4.0)]
    report = validate_mocap(frames, geom)
    assert report.source is Source.MOCAP
    assert report.mae < 1e-9
    with pytest.raises(ValueError):
        validate_mocap(frames[:1], geom)  # baseline alone is not enough


def test_model_curve_spans_valid_range(geom):
    curve = model_curve(geom, n=100)
    lo, hi = valid_displacement_range(geom)
    assert len(curve) == 100
    assert curve[0][0] == pytest.approx(lo, abs=1e-12)
    assert curve[-1][0] == pytest.approx(hi, abs=1e-9)
    angles = [a for _, a in curve]
    assert angles == sorted(angles)  # monotone over the range


def test_sweep_rows_are_consistent(geom):
    rows = sweep(geom, n=50)
    assert len(rows) == 50
    assert len(rows[0]) == len(SWEEP_COLUMNS)
    mid = rows[25]
    state = jaw_state(geom, mid[0])
    assert mid[4] == pytest.approx(state.total_angle, abs=1e-12)
    assert mid[5] == pytest.approx(state.tip_width, abs=1e-12)


def test_references_file_round_trip(tmp_path, geom):
    path = str(tmp_path / "refs.csv")
    refs = refs_on_model(geom, [0.5, 2.0, 4.5])
    write_references(path, refs)
    assert read_references(path) == refs
    # repr floats survive the trip bit for bit
    again = str(tmp_path / "refs2.csv")
    write_references(again, read_references(path))
    assert open(path).read() == open(again).read()


def test_mocap_file_round_trip(tmp_path, geom):
    path = str(tmp_path / "frames.csv")
    import numpy as np
    rng = np.random.default_rng(5)
    frames = [synth_frame(geom, 0.0, rng, 0.1)] + [
        synth_frame(geom, s, rng, 0.1, timestamp=i * 0.1)
        for i, s in enumerate((1.0, 3.0, 5.0), start=1)]
    write_mocap(path, frames)
    back = read_mocap(path)
    assert back == frames


def test_write_sweep_and_report_files(tmp_path, geom):
    sweep_path = str(tmp_path / "sweep.csv")
    write_sweep(sweep_path, sweep(geom, n=10))
    lines = open(sweep_path).read().splitlines()
    assert lines[0].split(",") == list(SWEEP_COLUMNS)
    assert len(lines) == 12  # header + units + 10 rows

    report = validate(refs_on_model(geom, [1.0, 2.0]) +
                      [ReferenceConfig(50.0, 1.0)], geom, Source.CAD)
    report_path = str(tmp_path / "report.csv")
    write_report(report_path, report)
    text = open(report_path).read()
    assert "mae" in text and "excluded" in text
    assert text.endswith("\n") and "\r" not in text  # LF endings only
