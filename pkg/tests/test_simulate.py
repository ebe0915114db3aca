import json
import warnings
from importlib.resources import files

import numpy as np
import pytest

from fdmlink.analysis import modulation_ratio
from fdmlink.elements import POLE, inductor, resistor
from fdmlink.protocol import Transaction
from fdmlink.simulate import (
    BusTopology,
    CarrierSpec,
    ElectricalSizeWarning,
    HarmonicOverlapWarning,
    NodeSpec,
    Scenario,
    TopologyError,
    bus_amplitude,
    load_scenario,
    run_scenario,
    sweep_node_count,
)
from fdmlink.units import UnitError

DEMO = str(files("fdmlink").joinpath("data/demo_scenario.yaml"))


def _override_node(name, role, zh, zl):
    return NodeSpec(
        name=name,
        role=role,
        zin_override={("scl", "H"): zh, ("scl", "L"): zl},
    )


def _resistive_topology(n_slaves, zh=9000 + 0j, zl=30 + 0j, zp_ohm=2000.0):
    carrier = CarrierSpec("scl", 20e6, 1.0, resistor(zp_ohm))
    nodes = [_override_node("m", "master", zh, zl)]
    nodes += [_override_node(f"s{k}", "slave", zh, zl) for k in range(n_slaves)]
    return BusTopology(carriers=(carrier,), nodes=tuple(nodes))


def test_single_node_amplitude_ratio_matches_formula():
    topo = _resistive_topology(0)
    vh = bus_amplitude(topo, {"scl": ("H",)}, 0)
    vl = bus_amplitude(topo, {"scl": ("L",)}, 0)
    want = modulation_ratio(9000 + 0j, 30 + 0j, 2000 + 0j)
    assert vh / vl == pytest.approx(want, rel=1e-9)


def test_bus_amplitude_is_parallel_divider():
    # three nodes high, one low: hand-computed parallel combination
    topo = _resistive_topology(3)
    states = {"scl": ("H", "H", "H", "L")}
    y = 3 / 9000 + 1 / 30
    z = 1 / y
    want = 1.0 * abs(z / (2000 + z))
    assert bus_amplitude(topo, states, 0) == pytest.approx(want, rel=1e-12)


def test_pole_override_loads_nothing():
    carrier = CarrierSpec("scl", 20e6, 1.0, resistor(2000.0))
    base = BusTopology(carriers=(carrier,), nodes=(_override_node("m", "master", 9000 + 0j, 30 + 0j),))
    with_pole = BusTopology(
        carriers=(carrier,),
        nodes=(
            _override_node("m", "master", 9000 + 0j, 30 + 0j),
            _override_node("s", "slave", POLE, POLE),
        ),
    )
    a = bus_amplitude(base, {"scl": ("H",)}, 0)
    b = bus_amplitude(with_pole, {"scl": ("H", "H")}, 0)
    assert a == pytest.approx(b, rel=1e-12)


def test_attenuation_scales_amplitude():
    topo = _resistive_topology(0)
    att = BusTopology(carriers=topo.carriers, nodes=topo.nodes, attenuation_db=6.0)
    a = bus_amplitude(topo, {"scl": ("H",)}, 0)
    b = bus_amplitude(att, {"scl": ("H",)}, 0)
    assert b == pytest.approx(a * 10 ** (-6 / 20), rel=1e-12)


# -- topology validation --


def test_exactly_one_master():
    carrier = CarrierSpec("scl", 20e6, 1.0, resistor(2000.0))
    with pytest.raises(TopologyError, match="master"):
        BusTopology(carriers=(carrier,), nodes=(_override_node("a", "slave", 1, 1),))
    with pytest.raises(TopologyError, match="master"):
        BusTopology(
            carriers=(carrier,),
            nodes=(
                _override_node("a", "master", 1, 1),
                _override_node("b", "master", 1, 1),
            ),
        )


def test_one_carrier_per_line():
    c1 = CarrierSpec("scl", 20e6, 1.0, resistor(2000.0))
    c2 = CarrierSpec("scl", 50e6, 1.0, resistor(2000.0))
    with pytest.raises(TopologyError, match="one carrier per line"):
        BusTopology(carriers=(c1, c2), nodes=(_override_node("m", "master", 1, 1),))


def test_carrier_validation():
    with pytest.raises(TopologyError):
        CarrierSpec("clk", 20e6, 1.0, resistor(2000.0))
    with pytest.raises(TopologyError):
        CarrierSpec("scl", -20e6, 1.0, resistor(2000.0))


def test_harmonic_overlap_warning():
    c1 = CarrierSpec("scl", 20e6, 1.0, resistor(2000.0))
    c2 = CarrierSpec("sda", 40e6, 1.0, resistor(2000.0))
    with pytest.warns(HarmonicOverlapWarning):
        BusTopology(carriers=(c1, c2), nodes=(_override_node("m", "master", 1, 1),))
    # 20/50 MHz is a 2.5 ratio: fine
    c3 = CarrierSpec("sda", 50e6, 1.0, resistor(2000.0))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        BusTopology(carriers=(c1, c3), nodes=(_override_node("m", "master", 1, 1),))


def test_electrical_size_warning():
    c1 = CarrierSpec("scl", 50e6, 1.0, resistor(2000.0))
    # lambda at 50 MHz on FR-4 is 3 m; lambda/20 = 0.15 m
    with pytest.warns(ElectricalSizeWarning):
        BusTopology(
            carriers=(c1,),
            nodes=(_override_node("m", "master", 1, 1),),
            sheet_dimension_m=0.5,
        )
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        BusTopology(
            carriers=(c1,),
            nodes=(_override_node("m", "master", 1, 1),),
            sheet_dimension_m=0.1,
        )


# -- the packaged reference scenario --


@pytest.fixture(scope="module")
def demo():
    return load_scenario(DEMO)


def test_demo_loads(demo):
    assert isinstance(demo, Scenario)
    assert demo.clock_hz == pytest.approx(100e3)
    assert demo.sim_rate == pytest.approx(6.4e6)
    assert demo.sim_rate >= 50 * demo.clock_hz
    assert len(demo.topology.nodes) == 9
    assert len(demo.transactions) == 16
    lines = {c.line: c.frequency for c in demo.topology.carriers}
    assert lines == {"scl": pytest.approx(20e6), "sda": pytest.approx(50e6)}


def test_demo_runs_error_free(demo):
    metrics, decoded = demo.run()
    assert metrics.error_free
    assert metrics.bit_errors == {"scl": 0, "sda": 0}
    assert metrics.transactions_completed == 16
    for k in range(8):
        readback = decoded[2 * k + 1]
        assert readback.direction == "read" and readback.completed
        hi, lo = readback.payload
        assert (hi << 8) | lo == 0x0190 + 4 * k
    assert metrics.depth_db["scl"] > 6.0 and metrics.depth_db["sda"] > 6.0
    assert metrics.ber("scl") == 0.0


def test_demo_is_deterministic(demo):
    m1, d1 = demo.run()
    m2, d2 = demo.run()
    assert m1.to_json() == m2.to_json()  # byte identical
    assert [t.to_dict() for t in d1] == [t.to_dict() for t in d2]


def test_demo_seed_irrelevant_without_noise(demo):
    m1, _ = demo.run(seed=0)
    m2, _ = demo.run(seed=999)
    assert m1.bit_errors == m2.bit_errors
    assert m1.eye_margin_v == m2.eye_margin_v


def test_noise_degrades_monotonically(demo):
    totals = []
    for rms in (0.0, 0.0005, 0.02):
        m, _ = demo.run(seed=7, noise_rms=rms)
        totals.append(sum(m.bit_errors.values()))
    assert totals[0] == 0
    assert totals[0] <= totals[1] <= totals[2]
    assert totals[2] > 0


def test_noise_is_seed_reproducible(demo):
    m1, _ = demo.run(seed=11, noise_rms=0.001)
    m2, _ = demo.run(seed=11, noise_rms=0.001)
    m3, _ = demo.run(seed=12, noise_rms=0.001)
    assert m1.to_json() == m2.to_json()
    assert m1.bit_errors != m3.bit_errors or m1.eye_margin_v != m3.eye_margin_v


def test_metrics_dict_schema(demo):
    m, _ = demo.run()
    d = m.to_dict()
    assert d["schema_version"] == 1
    for key in (
        "clock_hz",
        "sim_rate_hz",
        "seed",
        "noise_rms_v",
        "n_samples",
        "bit_errors",
        "bits_checked",
        "ber",
        "eye_margin_v",
        "depth_db",
        "transactions_attempted",
        "transactions_completed",
        "error_free",
        "transactions",
    ):
        assert key in d
    json.dumps(d)  # serializable as-is


def test_trace_sink_collects_samples(demo):
    sink: dict = {}
    m, _ = demo.run(trace_sink=sink)
    assert len(sink["time_s"]) == m.n_samples
    assert set(sink) >= {"time_s", "wire_scl", "wire_sda"}
    det_keys = [k for k in sink if k.startswith("det_")]
    assert len(det_keys) == 2 * len(demo.topology.nodes)
    for k in det_keys:
        assert len(sink[k]) == m.n_samples


def test_run_scenario_direct_call(demo):
    metrics, decoded = run_scenario(
        demo.topology,
        [Transaction.write(0x18, [0x05]), Transaction.read(0x18, 2)],
        100e3,
    )
    assert metrics.error_free
    assert list(decoded[1].payload) == [0x01, 0x90]


def test_sim_rate_floor_enforced(demo):
    with pytest.raises(ValueError, match="sim_rate"):
        run_scenario(demo.topology, demo.transactions, 100e3, sim_rate=1e6)


# -- node-count sweep --


def test_sweep_node_count_rows(demo):
    rows = sweep_node_count(demo.topology, [1, 2, 4, 8, 16])
    assert [r["n"] for r in rows] == [1, 2, 4, 8, 16]
    for line in ("scl", "sda"):
        depths = [r[f"depth_db_{line}"] for r in rows]
        assert all(a >= b - 1e-9 for a, b in zip(depths, depths[1:]))  # depth shrinks
    assert rows[0]["ok"]  # one slave certainly clears 6 dB
    assert all(set(r) == {"n", "depth_db_scl", "depth_db_sda", "ok"} for r in rows)


def test_sweep_node_count_needs_a_slave():
    topo = _resistive_topology(0)
    with pytest.raises(TopologyError):
        sweep_node_count(topo, [1, 2])


# -- loader error paths --


def _write_scenario(tmp_path, text):
    p = tmp_path / "scen.yaml"
    p.write_text(text)
    return p


# exact values keep each design's stop resonance exactly on the other
# carrier; snapped values detune it and on a two-node bus the resulting
# cross-keying exceeds the slicer hysteresis (the nine-node demo dilutes
# the same effect across the bus)
MINIMAL = """
which: exact
clock: 100kHz
carriers:
  - {{line: scl, frequency: {freq}, amplitude: 20mV, pullup: [2kohm]}}
  - {{line: sda, frequency: 50MHz, amplitude: 20mV, pullup: [2kohm]}}
filter_defaults:
  scl: {{f_mod: 20MHz, f_stop: 50MHz, c_io: 8pF, shunt_c: 10pF, xm: 4.7uH}}
  sda: {{f_mod: 50MHz, f_stop: 20MHz, c_io: 8pF, xm: 1.0uH}}
nodes:
  - {{name: m, role: master}}
  - {{name: s, address: 0x18, registers: {{5: 0x0190}}}}
script:
  - W 0x18 0x05
  - R 0x18 2
"""


def test_minimal_inline_scenario(tmp_path):
    p = _write_scenario(tmp_path, MINIMAL.format(freq="20MHz"))
    sc = load_scenario(p)
    m, decoded = sc.run()
    assert m.error_free
    assert list(decoded[1].payload) == [0x01, 0x90]


def test_bare_number_rejected(tmp_path):
    p = _write_scenario(tmp_path, MINIMAL.format(freq="20000000"))
    with pytest.raises(UnitError):
        load_scenario(p)


def test_unknown_schema_version(tmp_path):
    p = _write_scenario(tmp_path, "schema_version: 99\n" + MINIMAL.format(freq="20MHz"))
    with pytest.raises(TopologyError, match="schema_version"):
        load_scenario(p)


def test_missing_pullup_rejected(tmp_path):
    text = MINIMAL.format(freq="20MHz").replace(", pullup: [2kohm]", "")
    p = _write_scenario(tmp_path, text)
    with pytest.raises(TopologyError, match="pull-up"):
        load_scenario(p)
