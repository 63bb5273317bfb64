import csv
import json
import math

import jsonschema
import numpy as np
import pytest

from jchom.core import JcParams
from jchom.hom import hom_gamma
from jchom.scattering import transmission_probability
from jchom.sweep import (COLUMNS, PRESETS, Axis, Carrier, Observable, SweepSpec,
                         apply_overrides, emit, point_setup, preset_config, read_rows,
                         run_sweep, spec_from_config)


def small_gamma_spec(threads=1):
    return SweepSpec(params=JcParams.from_detuning(1.0, 0.2), xi=0.02,
                     axes=(Axis.linspace("delta", -1.0, 1.0, 3), Axis.linspace("e0", -0.5, 0.5, 3)),
                     observable=Observable.GAMMA, threads=threads)


def test_axis_and_spec_validation():
    with pytest.raises(ValueError):
        Axis("nu", (0.0, 1.0))
    with pytest.raises(ValueError):
        Axis("e0", (0.0,))
    with pytest.raises(ValueError):
        Axis("e0", (0.0, math.inf))
    p = JcParams.from_detuning(0.0, 0.1)
    with pytest.raises(ValueError):
        SweepSpec(p, 0.01, axes=(Axis("e0", (0, 1)), Axis("e0", (0, 1))))
    with pytest.raises(ValueError):
        SweepSpec(p, 0.01, axes=tuple(Axis(n, (0, 1)) for n in ("e0", "dt", "tau")))


def test_rows_outer_axis_major_and_match_direct_calls():
    spec = small_gamma_spec()
    rows = run_sweep(spec)
    assert [(r.delta, r.e0) for r in rows] == [(d, e) for d in (-1.0, 0.0, 1.0)
                                              for e in (-0.5, 0.0, 0.5)]
    for r, pt in zip(rows, spec.points()):
        params, inp, _ = point_setup(spec, pt)
        assert r.status == "ok"
        assert r.value == hom_gamma(inp, params).gamma


def test_serial_and_parallel_identical():
    a = run_sweep(small_gamma_spec(1))
    b = run_sweep(small_gamma_spec(2))
    assert [r.as_dict() for r in a] == [r.as_dict() for r in b]


def test_transmission_sweep_peaks_at_polaritons():
    cfg = apply_overrides(preset_config("fig2b"), ["delta.values=[0, 2]", "e0.num=801"])
    rows = run_sweep(spec_from_config(cfg))
    for delta in (0.0, 2.0):
        sel = [r for r in rows if r.delta == delta]
        vals = np.array([r.value for r in sel])
        p = JcParams.from_detuning(delta, 0.1)
        nu = np.array([r.e0 / 2 for r in sel])
        assert np.allclose(vals, transmission_probability(nu, p), rtol=0, atol=1e-15)
        assert vals.max() > 0.99


def test_point_failures_become_status_rows(tmp_path):
    spec = SweepSpec(params=JcParams.from_detuning(0.0, 0.1), xi=0.01,
                     axes=(Axis("xi", (-0.01, 0.01)),), observable=Observable.GAMMA)
    rows = run_sweep(spec)
    assert rows[0].status.startswith("error: ValueError") and math.isnan(rows[0].value)
    assert rows[1].status == "ok"
    out = tmp_path / "s.csv"
    emit(rows[:1], "csv", out)
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(COLUMNS) and len(lines) == 2


@pytest.mark.parametrize("fmt", ["csv", "jsonl"])
def test_emit_round_trip_bit_exact(tmp_path, fmt):
    rows = run_sweep(small_gamma_spec())
    path = tmp_path / f"out.{fmt}"
    emit(rows, fmt, path)
    back = read_rows(path, fmt)
    for a, b in zip(rows, back):
        for c in COLUMNS:
            x, y = getattr(a, c), getattr(b, c)
            assert x == y or (isinstance(x, float) and math.isnan(x) and math.isnan(y))


def test_csv_is_plain_and_jsonl_valid(tmp_path):
    rows = run_sweep(small_gamma_spec())
    emit(rows, "csv", tmp_path / "a.csv")
    with open(tmp_path / "a.csv", newline="") as fh:
        recs = list(csv.reader(fh))
    assert tuple(recs[0]) == COLUMNS
    assert all(float(x) == float(x) for x in recs[1][:6])
    emit(rows, "jsonl", tmp_path / "a.jsonl")
    for line in (tmp_path / "a.jsonl").read_text().splitlines():
        assert set(json.loads(line)) == set(COLUMNS)


def test_emit_reports_path_on_failure(tmp_path):
    with pytest.raises(OSError, match="missing"):
        emit([], "csv", tmp_path / "missing" / "x.csv")
    with pytest.raises(ValueError):
        emit([], "xml", tmp_path / "x")


def test_rerun_is_byte_identical(tmp_path):
    cfg = apply_overrides(preset_config("fig3a"), ["delta.num=3", "e0.num=4"])
    for k in range(2):
        emit(run_sweep(spec_from_config(cfg)), "csv", tmp_path / f"{k}.csv")
    assert (tmp_path / "0.csv").read_bytes() == (tmp_path / "1.csv").read_bytes()


def test_presets_validate_and_have_documented_grids():
    for name in PRESETS:
        spec_from_config(preset_config(name))
    fig3 = spec_from_config(preset_config("fig3a"))
    assert [len(a.values) for a in fig3.axes] == [201, 201]
    assert fig3.params.kappa == 0.1 and fig3.xi == pytest.approx(0.01)
    fig4 = spec_from_config(preset_config("fig4d"))
    assert [v * fig4.xi for v in fig4.axes[0].values] == pytest.approx([0, 2, 5, 10])
    with pytest.raises(ValueError):
        preset_config("fig9")


def test_config_errors():
    with pytest.raises(jsonschema.ValidationError):
        spec_from_config({"observable": "entropy"})
    with pytest.raises(jsonschema.ValidationError):
        spec_from_config({"axes": [{"name": "e0", "start": 0, "stop": 1}]})
    with pytest.raises(ValueError):
        spec_from_config({"params": {"g": 2.0}})
    spec = spec_from_config({"units": "absolute", "params": {"g": 2.0, "kappa": 0.2}})
    assert spec.params.g == 2.0
    with pytest.raises(ValueError):
        apply_overrides({}, ["nonsense"])
    with pytest.raises(ValueError):
        apply_overrides({}, ["tau.num=3"])
    with pytest.raises(ValueError):
        apply_overrides({}, ["colour=1"])


def test_overrides_replace_axis_fields():
    cfg = apply_overrides(preset_config("fig4d"), ["tau.values=[-1, 1]", "kappa=0.2",
                                                   "linear=true"])
    tau = [a for a in cfg["axes"] if a["name"] == "tau"][0]
    assert tau == {"name": "tau", "values": [-1, 1]}
    assert cfg["params"]["kappa"] == 0.2 and cfg["linear"] is True


def test_carrier_rules():
    p = JcParams.from_detuning(2.0, 0.1)
    for carrier in Carrier:
        spec = SweepSpec(p, 0.01, e0=0.4, carrier=carrier)
        _, inp, e0 = point_setup(spec, spec.points()[0])
        assert e0 == pytest.approx(2 * (inp.packet1.nu0 - p.omega_c))
        if carrier is Carrier.E0:
            assert e0 == pytest.approx(0.4)


def test_correlation_sweep_side_peak():
    cfg = apply_overrides(preset_config("fig4d"), ["dt.values=[0, 1000]",
                                                   "tau.values=[0, 1000]"])
    rows = run_sweep(spec_from_config(cfg))
    by = {(r.dt, r.tau): r.value for r in rows}
    assert all(r.status == "ok" for r in rows)
    assert abs(by[(1000.0, 1000.0)] - 0.5) < 0.02
    assert by[(0.0, 0.0)] < 0.5


def test_oracle_mode_marks_agreement():
    spec = SweepSpec(params=JcParams.from_detuning(1.0, 0.5), xi=0.1, e0=1.4,
                     axes=(Axis("tau", (0.0, 3.0)),), observable=Observable.G2_12, oracle=True)
    rows = run_sweep(spec)
    assert [r.status for r in rows] == ["ok", "ok"]
