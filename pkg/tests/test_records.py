import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from freespace_rabi.records import CSV_COLUMNS, ScanRecord, emit_records, read_records, render

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
unit = st.floats(0, 1, allow_nan=False)


def sample():
    return [
        ScanRecord("scan-gamma", "collision", gamma=1e-3, omega=1.0, theta=math.pi / 2, dt=1e-3 / 3,
                   infidelity=8.9e-5, purity=0.9998, entropy=1e-3, survival=0.999),
        ScanRecord("scan-gamma", "bloch", gamma=1e-3, omega=1.0, theta=math.pi / 2,
                   infidelity=0.1 + 0.2, purity=1 / 3, entropy=0.0),
        ScanRecord("scan-n", "jc", n_mean=25.0, theta=1.0, infidelity=1e-300),
    ]


def test_record_validation():
    with pytest.raises(ValueError):
        ScanRecord("x", "laser")
    with pytest.raises(ValueError):
        ScanRecord("x", "jc", infidelity=1.5)
    with pytest.raises(ValueError):
        ScanRecord("x", "jc", purity=float("nan"))


def test_empty_records_write_nothing(tmp_path):
    path = tmp_path / "out.csv"
    with pytest.raises(ValueError):
        emit_records([], path)
    assert not path.exists()


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_byte_identical(tmp_path, fmt):
    a = emit_records(sample(), tmp_path / f"a.{fmt}")
    b = emit_records(list(reversed(sample())), tmp_path / f"b.{fmt}")
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_round_trip(tmp_path, fmt):
    path = emit_records(sample(), tmp_path / f"r.{fmt}")
    back = read_records(path)
    assert back == sorted(sample(), key=ScanRecord.sort_key)


def test_csv_header_and_sorting():
    lines = render(sample(), "csv").splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert [ln.split(",")[:2] for ln in lines[1:]] == [
        ["scan-gamma", "bloch"], ["scan-gamma", "collision"], ["scan-n", "jc"]
    ]
    assert "0.30000000000000004" in lines[1]


def test_json_schema():
    data = json.loads(render(sample(), "json"))
    assert all(d["schema_version"] == "1" for d in data)
    assert data[0]["survival"] is None
    assert list(data[0])[1:] == list(CSV_COLUMNS)


def test_unknown_format(tmp_path):
    with pytest.raises(ValueError):
        emit_records(sample(), tmp_path / "x.csv", fmt="xml")


@given(finite, finite, unit, finite)
def test_round_trip_full_precision(a, b, c, d):
    rec = ScanRecord("h", "bloch", gamma=a, omega=b, infidelity=c, entropy=d)
    for fmt in ("csv", "json"):
        text = render([rec], fmt)
        if fmt == "csv":
            row = text.splitlines()[1].split(",")
            vals = dict(zip(CSV_COLUMNS, row))
        else:
            vals = json.loads(text)[0]
        assert float(vals["gamma"]) == a and float(vals["omega"]) == b
        assert float(vals["infidelity"]) == c and float(vals["entropy"]) == d
