"""End-to-end link simulation: carriers, pull-up networks, filters, bus nodes.

The physical picture: one shared two-conductor line carries DC power plus
two ASK carriers, one per I2C line.  Each carrier source drives the line
through its pull-up network; every node hangs both of its filter ports on
the line and keys its own carrier by switching the filter's secondary port
between the released (high-impedance) and pulled (low-impedance) state.
The line voltage at carrier j is the source amplitude times the divider
between the pull-up and the total node/feed loading, so any node pulling
low collapses that carrier for everyone - a wired-AND in amplitude.

Demodulation runs per node per line: log detector, IIR reference, slicer
with hysteresis (same math as the modem kernels, stepped sample by sample
because slave reactions close the loop).  Bit errors are counted at
quarter-bit midpoints against the ideal wired-AND level of the same run.
"""

from __future__ import annotations

import copy
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import yaml

from .analysis import DEFAULT_POLE_CAP
from .elements import Network, capacitor, inductor, is_pole, resistor, series
from .loss import LOSSLESS, LossModel
from .modem import (
    H,
    L,
    DetectorParams,
    SlicerParams,
    check_carrier_separation,
)
from .protocol import (
    QUARTERS_PER_BIT,
    MasterEngine,
    ProtocolError,
    SlaveEngine,
    SlaveModel,
    Transaction,
    parse_script,
)
from .synthesis import FilterDesign, FilterSpec, synthesize
from .units import UnitError, parse_quantity

__all__ = [
    "LINES",
    "MIN_SAMPLES_PER_QUARTER",
    "TopologyError",
    "HarmonicOverlapWarning",
    "ElectricalSizeWarning",
    "CarrierSpec",
    "NodeSpec",
    "BusTopology",
    "bus_amplitude",
    "LinkMetrics",
    "run_scenario",
    "sweep_node_count",
    "Scenario",
    "load_scenario",
]

LINES = ("scl", "sda")
MIN_SAMPLES_PER_QUARTER = 13

# rough phase velocity on FR4 for the electrical-size check
_VELOCITY_M_S = 1.5e8


class TopologyError(ValueError):
    """Topology cannot carry the link (missing lines, roles, carriers)."""


class HarmonicOverlapWarning(UserWarning):
    """One carrier sits on an integer harmonic of the other."""


class ElectricalSizeWarning(UserWarning):
    """Sheet dimension is no longer small against the carrier wavelength."""


@dataclass(frozen=True)
class CarrierSpec:
    """One ASK carrier: source amplitude behind a pull-up network."""

    line: str
    frequency: float
    amplitude: float
    pullup: Network

    def __post_init__(self) -> None:
        if self.line not in LINES:
            raise TopologyError(f"carrier line must be one of {LINES}, got {self.line!r}")
        if self.frequency <= 0 or self.amplitude <= 0:
            raise TopologyError("carrier frequency and amplitude must be positive")

    def pullup_z(self, f: float) -> complex:
        return complex(self.pullup.impedance(f))


@dataclass(frozen=True)
class NodeSpec:
    """One bus node: a filter per line plus an optional slave register file.

    ``zin_override`` maps (line, state) to a fixed input impedance and
    bypasses the filter model entirely; lines without a filter or override
    do not load the bus.  Exactly one node carries role ``master``.
    """

    name: str
    role: str = "slave"
    filters: Mapping[str, FilterDesign] = field(default_factory=dict)
    loss: LossModel = LOSSLESS
    which: str = "exact"
    slave: SlaveModel | None = None
    zin_override: Mapping[tuple[str, str], complex] | None = None

    def __post_init__(self) -> None:
        if self.role not in ("master", "slave"):
            raise TopologyError(f"node role must be 'master' or 'slave', got {self.role!r}")

    def input_impedance(self, f: float, line: str, state: str) -> complex | None:
        """Node loading on the bus at f, or None if this line is unfiltered."""
        if self.zin_override is not None and (line, state) in self.zin_override:
            return self.zin_override[(line, state)]
        design = self.filters.get(line)
        if design is None:
            return None
        return design.input_impedance(f, state, which=self.which, loss=self.loss)


@dataclass(frozen=True)
class BusTopology:
    """Everything hanging on the shared line."""

    carriers: tuple[CarrierSpec, ...]
    nodes: tuple[NodeSpec, ...]
    dc_feed: Network | None = None
    attenuation_db: float = 0.0
    pole_cap: float = DEFAULT_POLE_CAP
    sheet_dimension_m: float | None = None

    def __post_init__(self) -> None:
        if not self.carriers:
            raise TopologyError("at least one carrier is required")
        lines = [c.line for c in self.carriers]
        if len(set(lines)) != len(lines):
            raise TopologyError("one carrier per line")
        masters = [n for n in self.nodes if n.role == "master"]
        if len(masters) != 1:
            raise TopologyError(f"exactly one master node required, found {len(masters)}")
        self._check_harmonics()
        self._check_size()

    def _check_harmonics(self) -> None:
        freqs = sorted(c.frequency for c in self.carriers)
        for i in range(len(freqs)):
            for j in range(i + 1, len(freqs)):
                ratio = freqs[j] / freqs[i]
                if abs(ratio - round(ratio)) < 1e-6 and round(ratio) >= 2:
                    warnings.warn(
                        f"carrier {freqs[j]:.4g} Hz is harmonic {round(ratio)} of "
                        f"{freqs[i]:.4g} Hz; keying sidebands can alias between lines",
                        HarmonicOverlapWarning,
                        stacklevel=3,
                    )

    def _check_size(self) -> None:
        if self.sheet_dimension_m is None:
            return
        f_max = max(c.frequency for c in self.carriers)
        lam = _VELOCITY_M_S / f_max
        if self.sheet_dimension_m > lam / 20.0:
            warnings.warn(
                f"sheet dimension {self.sheet_dimension_m:.3g} m exceeds lambda/20 "
                f"({lam / 20.0:.3g} m) at {f_max:.4g} Hz; lumped analysis degrades",
                ElectricalSizeWarning,
                stacklevel=3,
            )

    @property
    def master_index(self) -> int:
        return next(i for i, n in enumerate(self.nodes) if n.role == "master")

    def line_carrier(self, line: str) -> CarrierSpec:
        for c in self.carriers:
            if c.line == line:
                return c
        raise TopologyError(f"no carrier drives line {line!r}")


def _cap_admittance(z: complex, cap: float) -> complex:
    """Admittance of a node load; stopband poles contribute nothing."""
    if is_pole(z) or abs(z) >= cap:
        return 0j
    if z == 0:
        return complex(cap, 0.0)
    return 1.0 / z


def bus_amplitude(
    topology: BusTopology,
    states: Mapping[str, Sequence[str]],
    carrier_index: int,
) -> float:
    """Carrier amplitude on the line for a given set of node pin states.

    ``states`` maps each line name to one 'H'/'L' pin state per node; every
    filter on the bus loads every carrier (off-line filters sit in their
    stopband and contribute next to nothing).
    """
    c = topology.carriers[carrier_index]
    f = c.frequency
    y = 0j
    for line in states:
        topology.line_carrier(line)  # validates the line name
        for node, st in zip(topology.nodes, states[line]):
            z = node.input_impedance(f, line, st)
            if z is not None:
                y += _cap_admittance(z, topology.pole_cap)
    if topology.dc_feed is not None:
        y += _cap_admittance(complex(topology.dc_feed.impedance(f)), topology.pole_cap)
    for other in topology.carriers:
        if other is not c:
            y += _cap_admittance(other.pullup_z(f), topology.pole_cap)
    z_total = 1.0 / y if y != 0 else complex(topology.pole_cap, 0.0)
    z_p = c.pullup_z(f)
    amp = c.amplitude * abs(z_total / (z_p + z_total))
    return amp * 10.0 ** (-topology.attenuation_db / 20.0)


class _DemodState:
    """Streaming detector + slicer, sample by sample (mirrors the kernels)."""

    __slots__ = ("k", "ref_in", "ref_out", "floor", "alpha", "half_h", "ref", "out", "det", "started")

    def __init__(self, detector: DetectorParams, alpha: float, hysteresis: float):
        self.k = detector.slope * 20.0
        self.ref_in = detector.ref_in
        self.ref_out = detector.ref_out
        self.floor = detector.floor_volts
        self.alpha = alpha
        self.half_h = 0.5 * hysteresis
        self.ref = 0.0
        self.out = H
        self.det = 0.0
        self.started = False

    def step(self, x: float) -> int:
        if x < self.floor:
            x = self.floor
        d = self.ref_out + self.k * math.log10(x / self.ref_in)
        if not self.started:
            self.ref = d
            self.started = True
        r = self.ref + self.alpha * (d - self.ref)
        if d > r + self.half_h:
            o = H
        elif d < r - self.half_h:
            o = L
        else:
            o = self.out
        self.ref = r
        self.out = o
        self.det = d
        return o

    @property
    def margin(self) -> float:
        return abs(self.det - self.ref)


@dataclass(frozen=True)
class LinkMetrics:
    """Outcome of one scenario run."""

    bit_errors: dict[str, int]
    bits_checked: dict[str, int]
    eye_margin_v: dict[str, float]
    depth_db: dict[str, float]
    transactions_attempted: int
    transactions_completed: int
    results: tuple[Transaction, ...]
    clock_hz: float
    sim_rate: float
    seed: int
    noise_rms: float
    n_samples: int

    @property
    def error_free(self) -> bool:
        return (
            sum(self.bit_errors.values()) == 0
            and self.transactions_completed == self.transactions_attempted
        )

    def ber(self, line: str) -> float:
        n = self.bits_checked.get(line, 0)
        return self.bit_errors.get(line, 0) / n if n else 0.0

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "clock_hz": self.clock_hz,
            "sim_rate_hz": self.sim_rate,
            "seed": self.seed,
            "noise_rms_v": self.noise_rms,
            "n_samples": self.n_samples,
            "bit_errors": dict(self.bit_errors),
            "bits_checked": dict(self.bits_checked),
            "ber": {line: self.ber(line) for line in sorted(self.bits_checked)},
            "eye_margin_v": {k: self.eye_margin_v[k] for k in sorted(self.eye_margin_v)},
            "depth_db": {k: self.depth_db[k] for k in sorted(self.depth_db)},
            "transactions_attempted": self.transactions_attempted,
            "transactions_completed": self.transactions_completed,
            "error_free": self.error_free,
            "transactions": [t.to_dict() for t in self.results],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"


def run_scenario(
    topology: BusTopology,
    transactions: Sequence[Transaction],
    clock_hz: float,
    sim_rate: float | None = None,
    noise_rms: float = 0.0,
    seed: int = 0,
    detector: DetectorParams | None = None,
    slicer_tau_bits: float = 20.0,
    hysteresis: float = 0.010,
    trace_sink: dict | None = None,
) -> tuple[LinkMetrics, list[Transaction]]:
    """Run an I2C script over the analog link, sample by sample.

    Slaves demodulate their own line voltages and react through the same
    engines as the ideal bus; the master samples its demodulated SDA at
    quarter-bit midpoints.  Deterministic for a fixed seed.  Returns the
    metrics and the decoded transactions; pass a dict as ``trace_sink``
    to capture per-sample detector/reference traces.
    """
    if sim_rate is None:
        sim_rate = 64.0 * clock_hz
    spq = round(sim_rate / (QUARTERS_PER_BIT * clock_hz))
    if spq < MIN_SAMPLES_PER_QUARTER:
        raise ProtocolError(
            f"sim_rate {sim_rate:.4g} Hz gives {spq} samples per quarter bit at "
            f"{clock_hz:.4g} Hz clock; need >= {MIN_SAMPLES_PER_QUARTER}"
        )
    sim_rate = QUARTERS_PER_BIT * clock_hz * spq
    for line in LINES:
        topology.line_carrier(line)
        check_carrier_separation(clock_hz, topology.line_carrier(line).frequency)

    nodes = topology.nodes
    n_nodes = len(nodes)
    mi = topology.master_index
    master = MasterEngine(transactions, clock_hz)
    engines: list[SlaveEngine | None] = [
        SlaveEngine(copy.deepcopy(n.slave)) if n.slave is not None else None for n in nodes
    ]

    det = detector if detector is not None else DetectorParams()
    alpha = SlicerParams(lpf_time_constant=slicer_tau_bits / clock_hz).alpha(sim_rate)
    demods = [[_DemodState(det, alpha, hysteresis) for _ in LINES] for _ in range(n_nodes)]

    n_alloc = master.quarters_upper_bound() * spq
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, noise_rms, size=(n_alloc, 2, n_nodes)) if noise_rms > 0 else None

    amp_cache: dict[tuple[tuple[bool, ...], tuple[bool, ...]], tuple[float, float]] = {}

    def amps_for(scl_drives: tuple[bool, ...], sda_drives: tuple[bool, ...]) -> tuple[float, float]:
        key = (scl_drives, sda_drives)
        hit = amp_cache.get(key)
        if hit is None:
            states = {
                "scl": tuple("L" if d else "H" for d in scl_drives),
                "sda": tuple("L" if d else "H" for d in sda_drives),
            }
            hit = tuple(bus_amplitude(topology, states, j) for j in range(len(topology.carriers)))
            amp_cache[key] = hit
        return hit

    carrier_line_index = {c.line: j for j, c in enumerate(topology.carriers)}
    jscl, jsda = carrier_line_index["scl"], carrier_line_index["sda"]

    bit_errors = {line: 0 for line in LINES}
    bits_checked = {line: 0 for line in LINES}
    eye = {line: math.inf for line in LINES}
    seen_low = {line: False for line in LINES}
    mid = spq // 2

    node_levels = [[H, H] for _ in range(n_nodes)]
    isample = 0

    tracing = trace_sink is not None
    if tracing:
        trace: dict[str, list] = {"time_s": [], "wire_scl": [], "wire_sda": []}
        for ni, node in enumerate(nodes):
            for line in LINES:
                trace[f"det_{node.name}_{line}"] = []
                trace[f"ref_{node.name}_{line}"] = []
                trace[f"out_{node.name}_{line}"] = []

    gen = master.generator()
    intents = next(gen)
    while True:
        scl_i, sda_i = intents
        master_mid_obs = (H, H)
        for si in range(spq):
            scl_drives = tuple(
                (scl_i == L) if i == mi else False for i in range(n_nodes)
            )
            sda_drives = tuple(
                (sda_i == L) if i == mi else (engines[i].sda_drive if engines[i] else False)
                for i in range(n_nodes)
            )
            amps = amps_for(scl_drives, sda_drives)
            wire = (L if any(scl_drives) else H, L if any(sda_drives) else H)
            for li, line in enumerate(LINES):
                if wire[li] == L:
                    seen_low[line] = True
            for ni in range(n_nodes):
                prev_scl, prev_sda = node_levels[ni]
                if noise is not None:
                    x_scl = amps[jscl] + noise[isample, 0, ni]
                    x_sda = amps[jsda] + noise[isample, 1, ni]
                else:
                    x_scl, x_sda = amps[jscl], amps[jsda]
                d_scl = demods[ni][0].step(x_scl)
                d_sda = demods[ni][1].step(x_sda)
                node_levels[ni][0] = d_scl
                node_levels[ni][1] = d_sda
                eng = engines[ni]
                if eng is not None:
                    if d_scl == prev_scl and d_sda != prev_sda:
                        eng.on_sda_edge(d_sda, d_scl)
                    elif d_scl != prev_scl:
                        if d_scl == H:
                            eng.on_scl_rise(d_sda)
                        else:
                            eng.on_scl_fall()
            if tracing:
                trace["time_s"].append(isample / sim_rate)
                trace["wire_scl"].append(wire[0])
                trace["wire_sda"].append(wire[1])
                for ni, node in enumerate(nodes):
                    for li, line in enumerate(LINES):
                        dm = demods[ni][li]
                        trace[f"det_{node.name}_{line}"].append(dm.det)
                        trace[f"ref_{node.name}_{line}"].append(dm.ref)
                        trace[f"out_{node.name}_{line}"].append(node_levels[ni][li])
            if si == mid:
                master_mid_obs = (node_levels[mi][0], node_levels[mi][1])
                for li, line in enumerate(LINES):
                    if not seen_low[line]:
                        continue
                    bits_checked[line] += n_nodes
                    for ni in range(n_nodes):
                        if node_levels[ni][li] != wire[li]:
                            bit_errors[line] += 1
                        m = demods[ni][li].margin
                        if m < eye[line]:
                            eye[line] = m
            isample += 1
        try:
            intents = gen.send(master_mid_obs)
        except StopIteration:
            break

    depth = {}
    for line, j in (("scl", jscl), ("sda", jsda)):
        vals = [a[j] for a in amp_cache.values()]
        hi, lo = max(vals), min(vals)
        depth[line] = 20.0 * math.log10(hi / lo) if lo > 0 else math.inf

    if tracing:
        trace_sink.update({k: np.asarray(v) for k, v in trace.items()})

    results = master.results
    metrics = LinkMetrics(
        bit_errors=bit_errors,
        bits_checked=bits_checked,
        eye_margin_v={k: (v if math.isfinite(v) else 0.0) for k, v in eye.items()},
        depth_db=depth,
        transactions_attempted=len(transactions),
        transactions_completed=sum(1 for t in results if t.completed),
        results=tuple(results),
        clock_hz=clock_hz,
        sim_rate=sim_rate,
        seed=seed,
        noise_rms=noise_rms,
        n_samples=isample,
    )
    return metrics, results


def sweep_node_count(
    topology: BusTopology,
    n_range: Sequence[int],
    min_depth_db: float = 6.0,
) -> list[dict]:
    """Replicate the first slave node to n slaves and report keying depth.

    Depth per line is the all-released amplitude over the amplitude with
    one node pulling that line low, in dB.  A row passes when every line
    clears ``min_depth_db``.
    """
    template = next((n for n in topology.nodes if n.role == "slave"), None)
    if template is None:
        raise TopologyError("need a slave node to replicate")
    master = topology.nodes[topology.master_index]
    rows = []
    for n in n_range:
        nodes = (master,) + tuple(
            NodeSpec(
                name=f"{template.name}_{k}",
                role="slave",
                filters=template.filters,
                loss=template.loss,
                which=template.which,
                slave=None,
                zin_override=template.zin_override,
            )
            for k in range(n)
        )
        topo = BusTopology(
            carriers=topology.carriers,
            nodes=nodes,
            dc_feed=topology.dc_feed,
            attenuation_db=topology.attenuation_db,
            pole_cap=topology.pole_cap,
        )
        total = len(nodes)
        row: dict = {"n": n}
        ok = True
        for j, c in enumerate(topo.carriers):
            all_h = {line: ("H",) * total for line in LINES}
            one_l = {
                line: tuple("L" if (line == c.line and i == total - 1) else "H" for i in range(total))
                for line in LINES
            }
            vh = bus_amplitude(topo, all_h, j)
            vl = bus_amplitude(topo, one_l, j)
            d = 20.0 * math.log10(vh / vl) if vl > 0 else math.inf
            row[f"depth_db_{c.line}"] = d
            ok = ok and d >= min_depth_db
        row["ok"] = ok
        rows.append(row)
    return rows


# -- scenario files ---------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    """A loaded scenario file, ready to run."""

    topology: BusTopology
    transactions: tuple[Transaction, ...]
    clock_hz: float
    sim_rate: float
    seed: int
    noise_rms: float

    def run(
        self,
        seed: int | None = None,
        noise_rms: float | None = None,
        trace_sink: dict | None = None,
    ) -> tuple[LinkMetrics, list[Transaction]]:
        return run_scenario(
            self.topology,
            self.transactions,
            self.clock_hz,
            sim_rate=self.sim_rate,
            noise_rms=self.noise_rms if noise_rms is None else noise_rms,
            seed=self.seed if seed is None else seed,
            trace_sink=trace_sink,
        )


def _element_from_text(text: str) -> Network:
    for unit, make in (("H", inductor), ("F", capacitor), ("ohm", resistor)):
        try:
            return make(parse_quantity(text, unit))
        except UnitError:
            continue
    raise UnitError(f"cannot read element {text!r}: expected an H, F, or ohm quantity")


def _network_from_list(items: Sequence[str]) -> Network:
    if not items:
        raise UnitError("empty element list")
    return series(*[_element_from_text(str(x)) for x in items])


def _filter_from_dict(d: Mapping, eseries: str) -> FilterSpec:
    spec_kwargs: dict = {
        "f_mod": parse_quantity(str(d["f_mod"]), "Hz"),
        "f_stop": parse_quantity(str(d["f_stop"]), "Hz"),
        "c_io": parse_quantity(str(d["c_io"]), "F"),
        "eseries": d.get("eseries", eseries),
    }
    if "shunt_c" in d:
        spec_kwargs["shunt_c"] = parse_quantity(str(d["shunt_c"]), "F")
    if "xm" in d:
        text = str(d["xm"])
        try:
            spec_kwargs["xm_inductance"] = parse_quantity(text, "H")
        except UnitError:
            spec_kwargs["xm_capacitance"] = parse_quantity(text, "F")
    return FilterSpec(**spec_kwargs)


def load_scenario(path: str | Path) -> Scenario:
    """Load a YAML scenario: carriers, pull-ups, nodes, script, run settings.

    All physical values carry unit suffixes (``20MHz``, ``4.7uH``,
    ``2kohm``); the script is a path relative to the scenario file or an
    inline list of script lines.
    """
    path = Path(path)
    raw = yaml.safe_load(path.read_text())
    if not isinstance(raw, dict):
        raise TopologyError(f"{path}: scenario must be a mapping")
    version = raw.get("schema_version", 1)
    if version != 1:
        raise TopologyError(f"{path}: unsupported schema_version {version}")

    clock = parse_quantity(str(raw["clock"]), "Hz")
    sim_rate = parse_quantity(str(raw["sim_rate"]), "Hz") if "sim_rate" in raw else 64.0 * clock
    seed = int(raw.get("seed", 0))
    noise_rms = parse_quantity(str(raw["noise_rms"]), "V") if "noise_rms" in raw else 0.0

    loss_cfg = raw.get("loss", {})
    if loss_cfg.get("inductor_q") is None and "inductor_q" in loss_cfg:
        loss = LOSSLESS
    elif loss_cfg:
        loss = LossModel(
            inductor_q=float(loss_cfg.get("inductor_q", LossModel().inductor_q)),
            q_ref_hz=parse_quantity(str(loss_cfg["q_ref"]), "Hz")
            if "q_ref" in loss_cfg
            else LossModel().q_ref_hz,
        )
    else:
        loss = LossModel()
    which = raw.get("which", "snapped")
    eseries = raw.get("eseries", "E12")

    pullups = raw.get("pullups", {})
    carriers = []
    for c in raw["carriers"]:
        line = c["line"]
        elems = c.get("pullup", pullups.get(line))
        if elems is None:
            raise TopologyError(f"no pull-up network given for line {line!r}")
        carriers.append(
            CarrierSpec(
                line=line,
                frequency=parse_quantity(str(c["frequency"]), "Hz"),
                amplitude=parse_quantity(str(c["amplitude"]), "V"),
                pullup=_network_from_list(elems),
            )
        )

    dc_feed = _network_from_list(raw["dc_feed"]) if "dc_feed" in raw else None

    defaults = {
        line: _filter_from_dict(cfg, eseries)
        for line, cfg in raw.get("filter_defaults", {}).items()
    }
    design_cache: dict[FilterSpec, FilterDesign] = {}

    def design_for(spec: FilterSpec) -> FilterDesign:
        if spec not in design_cache:
            design_cache[spec] = synthesize(spec)
        return design_cache[spec]

    nodes = []
    for ncfg in raw["nodes"]:
        specs = dict(defaults)
        for line, fcfg in ncfg.get("filters", {}).items():
            specs[line] = _filter_from_dict(fcfg, eseries)
        filters = {line: design_for(s) for line, s in specs.items()}
        slave = None
        if ncfg.get("role", "slave") == "slave" and "address" in ncfg:
            regs = {int(k): int(v) for k, v in ncfg.get("registers", {}).items()}
            widths = {int(k): int(v) for k, v in ncfg.get("widths", {}).items()}
            slave = SlaveModel(address=int(ncfg["address"]), registers=regs, widths=widths)
        nodes.append(
            NodeSpec(
                name=str(ncfg.get("name", f"node{len(nodes)}")),
                role=ncfg.get("role", "slave"),
                filters=filters,
                loss=loss,
                which=which,
                slave=slave,
            )
        )

    topo = BusTopology(
        carriers=tuple(carriers),
        nodes=tuple(nodes),
        dc_feed=dc_feed,
        attenuation_db=float(raw.get("attenuation_db", 0.0)),
    )

    script = raw["script"]
    if isinstance(script, list):
        txns = parse_script("\n".join(str(s) for s in script))
    else:
        txns = parse_script((path.parent / str(script)).read_text())

    return Scenario(
        topology=topo,
        transactions=tuple(txns),
        clock_hz=clock,
        sim_rate=sim_rate,
        seed=seed,
        noise_rms=noise_rms,
    )
