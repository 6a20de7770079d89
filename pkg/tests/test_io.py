import numpy as np
import pytest

from rebar_gauge import io
from rebar_gauge.errors import TraceFormatError
from rebar_gauge.sigproc import Spectrum, Trace, forward_spectrum, ricker


def test_trace_round_trip_is_bit_exact(tmp_path, rng):
    tr = Trace(rng.normal(size=300) * 1e-7, dt=1.25e-11, t0=-3e-10, polarization="perp",
               meta={"column": 4})
    path = tmp_path / "t.txt"
    io.write_trace(path, tr)
    back = io.read_trace(path)
    assert np.array_equal(back.samples, tr.samples)
    assert back.dt == tr.dt and back.t0 == tr.t0 and back.polarization == "perp"
    assert back.meta["column"] == "4"


@pytest.mark.parametrize("text, fragment", [
    ("# rebar-gauge trace\n# dt_s=1e-11\n# n=9\n" + "0\n" * 8, "n"),
    ("# rebar-gauge trace\n# n=8\n" + "0\n" * 8, "dt"),
    ("# rebar-gauge trace\n# dt_s=-1\n# n=8\n" + "0\n" * 8, "dt"),
    ("# rebar-gauge trace\n# dt_s=1e-11\n# n=8\n" + "0\n" * 7 + "abc\n", "abc"),
    ("# rebar-gauge trace\n# dt_s=1e-11\n# n=8\n# polarization=diag\n" + "0\n" * 8, "polarization"),
])
def test_malformed_traces(text, fragment):
    with pytest.raises(TraceFormatError, match=fragment):
        io.parse_trace(text)


def test_missing_trace_file(tmp_path):
    with pytest.raises(TraceFormatError, match="cannot read"):
        io.read_trace(tmp_path / "nope.txt")


def test_bscan_round_trip(tmp_path, rng):
    m = rng.normal(size=(50, 7))
    path = tmp_path / "b.csv"
    io.write_bscan(path, m, 1e-11, 0.0, 0.01, "par")
    back, meta = io.read_bscan(path)
    assert np.array_equal(back, m)
    assert meta["trace_spacing_m"] == 0.01 and meta["polarization"] == "par"


def test_bscan_rejects_ragged(tmp_path):
    path = tmp_path / "b.csv"
    io.write_bscan(path, np.zeros((3, 3)), 1e-11, 0.0, 0.01, "par")
    path.write_text("1,2,3\n4,5\n")
    with pytest.raises(TraceFormatError):
        io.read_bscan(path)


def test_bscan_rejects_bad_spacing(tmp_path):
    path = tmp_path / "b.csv"
    io.write_bscan(path, np.zeros((3, 3)), 1e-11, 0.0, 0.0, "par")
    with pytest.raises(TraceFormatError, match="spacing"):
        io.read_bscan(path)


def test_spectrum_round_trip(tmp_path):
    spec = forward_spectrum(ricker(1e9, 1e-11, 512, 2e-9), (0.5e9, 2e9))
    path = tmp_path / "s.csv"
    io.atomic_write_text(path, io.format_spectrum(spec))
    back = io.read_spectrum(path)
    assert np.array_equal(back.bins, spec.bins)
    assert back.n_time == 512 and back.f_start == spec.f_start
    assert back.df == pytest.approx(spec.df, rel=1e-12)


def test_spectrum_rejects_uneven_grid(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("freq_hz,re,im\n1,0,0\n2,0,0\n4,0,0\n")
    with pytest.raises(TraceFormatError):
        io.read_spectrum(path)


def test_single_row_spectrum(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("freq_hz,re,im\n1e9,1,2\n")
    spec = io.read_spectrum(path)
    assert isinstance(spec, Spectrum) and len(spec) == 1


def test_atomic_write_leaves_no_temp_files(tmp_path):
    path = tmp_path / "sub" / "out.txt"
    io.atomic_write_text(path, "one")
    io.atomic_write_text(path, "two")
    assert path.read_text() == "two"
    assert [p.name for p in path.parent.iterdir()] == ["out.txt"]


def test_digest_depends_on_content(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.write_text("x")
    b.write_text("y")
    assert io.file_digest(a) != io.file_digest(b)
    assert io.file_digest(a, b) == io.file_digest(a, b)


def test_invalid_json(tmp_path):
    path = tmp_path / "x.json"
    path.write_text("{")
    with pytest.raises(TraceFormatError):
        io.read_json(path)
