"""Ingestion, resampling, feature extraction and windowing.

Resampling oracle: a slow pure-Python linear interpolation written
independently of np.interp.
"""

import io
import math

import numpy as np
import pytest

from conftest import make_recording
from smokewatch.errors import (
    EmptyRecording,
    InvalidSize,
    MalformedRow,
    NonMonotonicTime,
    TooFewSamples,
)
from smokewatch.signal import (
    CSV_HEADER,
    ChannelMode,
    FeatureSeries,
    GestureClass,
    SampleRateWarning,
    SensorRecording,
    extract_features,
    load_recording_csv,
    resample_uniform,
    rolling_windows,
    window_count,
    write_recording_csv,
)


def interp_oracle(ts, vs, at):
    """Piecewise-linear interpolation, one query point at a time."""
    out = []
    for q in at:
        j = 0
        while j + 2 < len(ts) and ts[j + 1] < q:
            j += 1
        t0, t1 = ts[j], ts[j + 1]
        w = (q - t0) / (t1 - t0)
        w = min(max(w, 0.0), 1.0)
        out.append(vs[j] * (1 - w) + vs[j + 1] * w)
    return out


# --- CSV ingestion -----------------------------------------------------------

def test_load_csv_roundtrip(rng):
    rec = make_recording(rng.normal(size=(37, 3)), label=GestureClass.COUGH)
    buf = io.StringIO()
    write_recording_csv(rec, buf)
    back = load_recording_csv(io.StringIO(buf.getvalue()),
                              label=GestureClass.COUGH, device="test")
    assert np.array_equal(back.t, rec.t)
    assert np.array_equal(back.x, rec.x)
    assert np.array_equal(back.y, rec.y)
    assert np.array_equal(back.z, rec.z)
    assert back.label is GestureClass.COUGH


def test_load_csv_three_rows():
    text = "t,x,y,z\n0.0,1,2,3\n0.02,4,5,6\n0.04,7,8,9\n"
    rec = load_recording_csv(io.StringIO(text))
    assert len(rec) == 3
    assert rec.x[2] == 7.0


def test_load_csv_header_only_is_empty():
    with pytest.raises(EmptyRecording):
        load_recording_csv(io.StringIO("t,x,y,z\n"))


def test_load_csv_single_row_is_empty():
    with pytest.raises(EmptyRecording):
        load_recording_csv(io.StringIO("t,x,y,z\n0.0,1,2,3\n"))


def test_load_csv_rejects_bad_header():
    with pytest.raises(MalformedRow):
        load_recording_csv(io.StringIO("time,x,y,z\n0,1,2,3\n0.1,1,2,3\n"))


def test_load_csv_rejects_non_numeric():
    with pytest.raises(MalformedRow):
        load_recording_csv(io.StringIO("t,x,y,z\n0.0,a,2,3\n0.1,1,2,3\n"))


def test_load_csv_rejects_wrong_column_count():
    with pytest.raises(MalformedRow):
        load_recording_csv(io.StringIO("t,x,y,z\n0.0,1,2\n0.1,1,2\n"))


def test_load_csv_rejects_non_monotonic_time():
    text = "t,x,y,z\n0.0,1,2,3\n0.02,1,2,3\n0.02,1,2,3\n"
    with pytest.raises(NonMonotonicTime):
        load_recording_csv(io.StringIO(text))


def test_load_csv_warns_on_rate_deviation():
    rows = "\n".join(f"{i*0.05},0,0,1" for i in range(10))
    with pytest.warns(SampleRateWarning):
        load_recording_csv(io.StringIO(f"{CSV_HEADER}\n{rows}\n"))


def test_write_csv_uses_roundtrip_floats(tmp_path):
    rec = make_recording(np.array([[0.1, 0.2, 0.3], [1 / 3, 2 / 3, 0.9]]))
    path = tmp_path / "r.csv"
    write_recording_csv(rec, path)
    text = path.read_text()
    assert text.startswith("t,x,y,z\n")
    assert repr(1 / 3) in text
    back = load_recording_csv(path)
    assert np.array_equal(back.x, rec.x)


def test_recording_validation():
    t = np.arange(5) / 50
    ones = np.ones(5)
    with pytest.raises(NonMonotonicTime):
        SensorRecording(t=t[::-1].copy(), x=ones, y=ones, z=ones)
    with pytest.raises(EmptyRecording):
        SensorRecording(t=t[:1], x=ones[:1], y=ones[:1], z=ones[:1])
    with pytest.raises(ValueError):
        SensorRecording(t=t, x=ones * np.nan, y=ones, z=ones)


# --- resampling --------------------------------------------------------------

def test_resample_constant_signal():
    rec = make_recording(np.full((17, 3), 0.5))
    series = resample_uniform(rec, 200)
    assert series.x.shape == (200,)
    assert np.all(series.x == 0.5)
    assert np.all(series.z == 0.5)


def test_resample_two_point_midpoint():
    rec = SensorRecording(t=np.array([0.0, 1.0]), x=np.array([0.0, 1.0]),
                          y=np.array([1.0, 0.0]), z=np.array([0.0, 0.0]))
    series = resample_uniform(rec, 3)
    assert series.x.tolist() == [0.0, 0.5, 1.0]
    assert series.y.tolist() == [1.0, 0.5, 0.0]


def test_resample_identity_on_uniform_input(rng):
    rec = make_recording(rng.normal(size=(200, 3)))
    series = resample_uniform(rec, 200)
    assert np.allclose(series.x, rec.x, rtol=1e-12, atol=0)
    assert np.allclose(series.y, rec.y, rtol=1e-12, atol=0)


def test_resample_preserves_endpoints(rng):
    # non-uniform timestamps, strictly increasing
    t = np.sort(rng.uniform(0, 4, 47))
    t[0], t[-1] = 0.0, 4.0
    t = np.unique(t)
    vals = rng.normal(size=(len(t), 3))
    rec = SensorRecording(t=t, x=vals[:, 0], y=vals[:, 1], z=vals[:, 2])
    series = resample_uniform(rec, 123)
    for axis in "xyz":
        got = getattr(series, axis)
        ref = getattr(rec, axis)
        assert got[0] == pytest.approx(ref[0], rel=1e-12)
        assert got[-1] == pytest.approx(ref[-1], rel=1e-12)


def test_resample_matches_slow_oracle(rng):
    for _ in range(20):
        m = int(rng.integers(2, 40))
        t = np.cumsum(rng.uniform(0.01, 0.1, m))
        vals = rng.normal(size=(m, 3))
        rec = SensorRecording(t=t, x=vals[:, 0], y=vals[:, 1], z=vals[:, 2])
        n = int(rng.integers(2, 50))
        series = resample_uniform(rec, n)
        at = np.linspace(t[0], t[-1], n)
        expect = interp_oracle(t.tolist(), vals[:, 0].tolist(), at)
        assert np.allclose(series.x, expect, rtol=1e-10, atol=1e-12)


def test_resample_validates_sizes():
    rec = make_recording(np.zeros((5, 3)))
    with pytest.raises(InvalidSize):
        resample_uniform(rec, 1)


# --- feature extraction ------------------------------------------------------

def _series(x, y, z):
    return FeatureSeries(x=np.asarray(x, float), y=np.asarray(y, float),
                         z=np.asarray(z, float))


def test_extract_single_axes(rng):
    vals = rng.normal(size=(200, 3))
    s = _series(vals[:, 0], vals[:, 1], vals[:, 2])
    assert np.array_equal(extract_features(s, ChannelMode.X).values, vals[:, 0])
    assert np.array_equal(extract_features(s, ChannelMode.Y).values, vals[:, 1])
    assert np.array_equal(extract_features(s, ChannelMode.Z).values, vals[:, 2])


def test_extract_xyz_concatenation_order(rng):
    vals = rng.normal(size=(200, 3))
    s = _series(vals[:, 0], vals[:, 1], vals[:, 2])
    v = extract_features(s, ChannelMode.XYZ).values
    assert v.shape == (600,)
    assert np.array_equal(v[0:200], vals[:, 0])
    assert np.array_equal(v[200:400], vals[:, 1])
    assert np.array_equal(v[400:600], vals[:, 2])


def test_extract_avg_constant():
    s = _series(np.ones(200), np.full(200, 2.0), np.full(200, 3.0))
    v = extract_features(s, ChannelMode.AVG).values
    assert np.all(v == 2.0)


def test_extract_avg_elementwise(rng):
    vals = rng.normal(size=(64, 3))
    s = _series(vals[:, 0], vals[:, 1], vals[:, 2])
    v = extract_features(s, ChannelMode.AVG).values
    expect = (vals[:, 0] + vals[:, 1] + vals[:, 2]) / 3
    assert np.max(np.abs(v - expect)) <= 1e-15


def test_mode_feature_length():
    assert ChannelMode.X.feature_length(200) == 200
    assert ChannelMode.XYZ.feature_length(200) == 600
    assert ChannelMode.AVG.feature_length(128) == 128


def test_mode_and_class_parsing():
    assert ChannelMode.parse("xyz") is ChannelMode.XYZ
    assert GestureClass.parse("Nose_Scratch") is GestureClass.NOSE_SCRATCH
    with pytest.raises(ValueError):
        ChannelMode.parse("XZ")
    with pytest.raises(ValueError):
        GestureClass.parse("sneeze")


# --- windowing ---------------------------------------------------------------

def brute_window_count(length, width, stride):
    count = 0
    start = 0
    while start + width <= length:
        count += 1
        start += stride
    return count


def test_window_count_examples():
    assert window_count(200, 200, 1) == 1
    assert window_count(1000, 200, 1) == 801
    assert window_count(1000, 200, 10) == 81
    assert window_count(199, 200, 1) == 0


def test_window_count_matches_brute_force(rng):
    for _ in range(300):
        length = int(rng.integers(0, 500))
        width = int(rng.integers(2, 60))
        stride = int(rng.integers(1, 9))
        assert window_count(length, width, stride) == \
            brute_window_count(length, width, stride)


def test_rolling_windows_contents(rng):
    vals = rng.normal(size=(57, 3))
    rec = make_recording(vals)
    wins = rolling_windows(rec, width=10, stride=4)
    assert len(wins) == window_count(57, 10, 4)
    for k, w in enumerate(wins):
        assert w.start == 4 * k
        assert np.array_equal(w.x, rec.x[4 * k:4 * k + 10])
        assert np.array_equal(w.z, rec.z[4 * k:4 * k + 10])


def test_rolling_windows_short_session_is_empty(rng):
    rec = make_recording(rng.normal(size=(9, 3)))
    assert rolling_windows(rec, width=10) == []
