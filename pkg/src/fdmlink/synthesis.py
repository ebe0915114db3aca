"""Closed-form synthesis of the passive-modulation T-filter.

A node modulates one carrier (f_mod) by switching its open-drain pin between
a high-impedance and a low-impedance state, while leaving the other carrier
(f_stop) untouched in both states.  The filter is a T of reactances: series
x1, shunt x_m, series x2.  Requiring an ideal open in the high state and an
ideal short in the low state at f_mod, plus an open at f_stop in both
states, fixes everything except the shunt reactance x_m, which is the one
free design choice:

    x2 = X_IO_H - x_m
    x1 = -(x_m / X_IO_H) * x2

where X_IO_H = 1/(w_mod * C_H) is the pin's capacitive reactance magnitude
in the high state.  The x1 branch is realized as an L1 || C1 resonator whose
pole sits at f_stop, with the element values fixed by the required x1 at
f_mod (alpha = w_mod/w_stop picks the inductive or capacitive side).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import eseries
from .elements import (
    Network,
    POLE_CLAMP,
    TwoPortZ,
    capacitor,
    find_poles_zeros,
    inductor,
    input_impedance,
    is_pole,
    short_circuit,
    t_network,
)
from .loss import LOSSLESS, LossModel

__all__ = [
    "ConfigKind",
    "FilterSpec",
    "FilterDesign",
    "VerificationReport",
    "InfeasibleConfigError",
    "SynthesisError",
    "classify",
    "synthesize",
    "verify_design",
    "default_xm_inductance",
    "design_to_dict",
    "design_from_dict",
]

DEFAULT_POLE_CAP = 1e9  # finite stand-in for pole-flagged impedances in ratios

# relative tolerance for "x_m equals X_IO_H" (the D boundary)
_D_TOL = 1e-9

# a capacitor below this is snapped to the integer-picofarad grid instead of
# the E-series: small ceramic values are sold on that grid
_SMALL_CAP_F = 10e-12


class InfeasibleConfigError(ValueError):
    """The x_m choice and frequency order do not form a usable configuration."""


class SynthesisError(ValueError):
    """Synthesis produced an unrealizable element value."""


class ConfigKind(enum.Enum):
    """Minimal filter configurations by the sign and size of x_m.

    A: inductive x_m > X_IO_H (needs f_stop > f_mod)
    B: inductive 0 < x_m < X_IO_H (needs f_stop < f_mod)
    C: capacitive x_m (needs f_stop > f_mod); same equations, unexercised by
       the reference design, marked experimental in reports
    D1/D2: x_m = X_IO_H exactly, x2 degenerates to a short; the x1 branch
       gets an extra series element cancelling its reactance at f_mod
    (x_m = 0 would couple no signal at all - that is configuration (e),
    which is rejected, not represented.)
    """

    A = "A"
    B = "B"
    C = "C"
    D1 = "D1"
    D2 = "D2"


@dataclass(frozen=True)
class FilterSpec:
    """Design inputs: the two carriers, the pin capacitance, and the x_m choice.

    Exactly one of ``xm_inductance`` / ``xm_capacitance`` may be given; with
    neither, synthesis picks an inductance that puts the high-state zero at
    the geometric mean of the two carriers.  ``shunt_c`` is an external
    capacitor added at the pin (raising C_H lowers the required shunt
    inductance into the commercially available range).
    """

    f_mod: float
    f_stop: float
    c_io: float
    shunt_c: float = 0.0
    xm_inductance: float | None = None
    xm_capacitance: float | None = None
    eseries: str = "E12"

    def __post_init__(self) -> None:
        if self.f_mod <= 0.0 or self.f_stop <= 0.0:
            raise ValueError("carrier frequencies must be positive")
        if self.f_mod == self.f_stop:
            raise ValueError("f_mod and f_stop must differ")
        if self.c_io <= 0.0:
            raise ValueError("c_io must be positive")
        if self.shunt_c < 0.0:
            raise ValueError("shunt_c must be >= 0")
        if self.xm_inductance is not None and self.xm_capacitance is not None:
            raise ValueError("give x_m as an inductance or a capacitance, not both")
        if self.eseries not in eseries.ESERIES:
            raise ValueError(f"unknown E-series {self.eseries!r}")

    @property
    def c_total(self) -> float:
        return self.c_io + self.shunt_c

    @property
    def x_io_h(self) -> float:
        """Magnitude of the pin reactance at f_mod in the high state."""
        return 1.0 / (2.0 * math.pi * self.f_mod * self.c_total)

    @property
    def alpha(self) -> float:
        return self.f_mod / self.f_stop

    def xm_value(self) -> float:
        """Signed shunt reactance at f_mod implied by the x_m choice."""
        w = 2.0 * math.pi * self.f_mod
        if self.xm_inductance is not None:
            return w * self.xm_inductance
        if self.xm_capacitance is not None:
            if self.xm_capacitance <= 0.0:
                raise ValueError("xm_capacitance must be positive")
            return -1.0 / (w * self.xm_capacitance)
        return w * default_xm_inductance(self.f_mod, self.f_stop, self.c_total)


def classify(spec: FilterSpec) -> ConfigKind:
    """Pick the configuration implied by the x_m choice, or reject it."""
    x = spec.x_io_h
    xm = spec.xm_value()
    if xm == 0.0:
        raise InfeasibleConfigError(
            "x_m = 0 collapses the shunt branch and couples no signal to the "
            "secondary port; configuration (e) is rejected"
        )
    if abs(xm - x) <= _D_TOL * x:
        return ConfigKind.D1 if spec.f_stop > spec.f_mod else ConfigKind.D2
    if xm > x:
        if spec.f_stop <= spec.f_mod:
            raise InfeasibleConfigError(
                f"inductive x_m={xm:.4g} ohm > X_IO_H={x:.4g} ohm selects "
                f"configuration (a), which requires f_stop > f_mod"
            )
        return ConfigKind.A
    if xm > 0.0:
        if spec.f_stop >= spec.f_mod:
            raise InfeasibleConfigError(
                f"inductive x_m={xm:.4g} ohm < X_IO_H={x:.4g} ohm selects "
                f"configuration (b), which requires f_stop < f_mod"
            )
        return ConfigKind.B
    # capacitive shunt
    if spec.f_stop <= spec.f_mod:
        raise InfeasibleConfigError(
            f"capacitive x_m={xm:.4g} ohm selects configuration (c), "
            f"which requires f_stop > f_mod"
        )
    return ConfigKind.C


def _snap_policy(name: str, value: float, series: str) -> float:
    """Component sourcing policy for realized values.

    Inductors round down to the E-series (rounding up would push the
    stopband resonator into the passband); capacitors snap to the nearest
    member, except sub-10 pF parts which go to the integer-picofarad grid.
    """
    if name.startswith("l"):
        return eseries.snap_floor(value, series)
    if value < _SMALL_CAP_F:
        return max(1.0, round(value * 1e12)) * 1e-12
    return eseries.snap_eseries(value, series)


@dataclass(frozen=True)
class FilterDesign:
    """A realized T-filter: exact element values plus E-series snapped ones.

    Element keys: ``l_m``/``c_m`` (shunt), ``l_1``+``c_1`` (parallel
    resonator, series arm 1), ``c_2``/``l_2`` (series arm 2; absent for D),
    ``c_ser``/``l_ser`` (extra series element in arm 1, D only).  ``dcb``
    lists the branches that need a DC-block capacitor for the three ports to
    be DC-isolated; DCBs are chosen large enough to be transparent at the
    carriers and are excluded from impedance evaluation.
    """

    spec: FilterSpec
    config: ConfigKind
    alpha: float
    x_io_h: float
    x_m: float
    x1: float
    x2: float
    exact: dict[str, float]
    snapped: dict[str, float]
    dcb: tuple[str, ...]

    @property
    def f_mod(self) -> float:
        return self.spec.f_mod

    @property
    def f_stop(self) -> float:
        return self.spec.f_stop

    @property
    def c_total(self) -> float:
        return self.spec.c_total

    def values(self, which: str = "exact") -> dict[str, float]:
        if which == "exact":
            return dict(self.exact)
        if which == "snapped":
            return dict(self.snapped)
        raise ValueError("values() takes 'exact' or 'snapped'")

    def branch_networks(
        self, which: str = "exact", loss: LossModel = LOSSLESS
    ) -> tuple[Network, Network, Network]:
        """(x1, x2, xm) one-ports with the chosen values and loss model."""
        v = self.values(which)
        mk_l = loss.make_inductor

        x1 = mk_l(v["l_1"]) | capacitor(v["c_1"])
        if "c_ser" in v:
            x1 = x1 + capacitor(v["c_ser"])
        elif "l_ser" in v:
            x1 = x1 + mk_l(v["l_ser"])

        if "c_2" in v:
            x2: Network = capacitor(v["c_2"])
        elif "l_2" in v:
            x2 = mk_l(v["l_2"])
        else:
            x2 = short_circuit()

        xm = mk_l(v["l_m"]) if "l_m" in v else capacitor(v["c_m"])
        return x1, x2, xm

    def two_port(self, which: str = "exact", loss: LossModel = LOSSLESS) -> TwoPortZ:
        x1, x2, xm = self.branch_networks(which, loss)
        return t_network(x1, x2, xm)

    def input_impedance(
        self,
        f,
        state: str,
        which: str = "exact",
        loss: LossModel = LOSSLESS,
    ):
        """Bus-side input impedance with the pin in logic state 'H' or 'L'."""
        tp = self.two_port(which, loss)
        z_load = loss.load(self.c_total, state).impedance(f)
        return input_impedance(tp, z_load, f)


def _realize(spec: FilterSpec, config: ConfigKind) -> dict[str, float]:
    w_mod = 2.0 * math.pi * spec.f_mod
    w_stop = 2.0 * math.pi * spec.f_stop
    x = spec.x_io_h
    xm = spec.xm_value()
    alpha = spec.alpha
    if config in (ConfigKind.D1, ConfigKind.D2):
        x2 = 0.0
        x1 = 0.0
    else:
        x2 = x - xm
        x1 = -(xm / x) * x2

    v: dict[str, float] = {}
    # shunt branch
    if xm > 0.0:
        v["l_m"] = spec.xm_inductance if spec.xm_inductance is not None else xm / w_mod
    else:
        v["c_m"] = (
            spec.xm_capacitance
            if spec.xm_capacitance is not None
            else 1.0 / (w_mod * -xm)
        )

    # series arm 2
    if config not in (ConfigKind.D1, ConfigKind.D2):
        if x2 > 0.0:
            v["l_2"] = x2 / w_mod
        else:
            v["c_2"] = 1.0 / (w_mod * -x2)

    # series arm 1: parallel resonator at f_stop presenting x1 at f_mod; for
    # D the required x1 is 0, so the resonator keeps the design's natural
    # reactance scale X_IO_H and a series element cancels it at f_mod
    x1_scale = x1 if config not in (ConfigKind.D1, ConfigKind.D2) else (
        x if config is ConfigKind.D1 else -x
    )
    if alpha < 1.0:
        if x1_scale <= 0.0:
            raise SynthesisError(
                f"x1={x1_scale:.4g} ohm must be inductive when f_stop > f_mod"
            )
        l_1 = x1_scale * (1.0 - alpha**2) / (alpha * w_stop)
        c_1 = 1.0 / (w_stop**2 * l_1)
    else:
        if x1_scale >= 0.0:
            raise SynthesisError(
                f"x1={x1_scale:.4g} ohm must be capacitive when f_stop < f_mod"
            )
        c_1 = alpha / ((alpha**2 - 1.0) * w_stop * abs(x1_scale))
        l_1 = 1.0 / (w_stop**2 * c_1)
    v["l_1"] = l_1
    v["c_1"] = c_1

    if config is ConfigKind.D1:
        v["c_ser"] = 1.0 / (w_mod * x)
    elif config is ConfigKind.D2:
        v["l_ser"] = x / w_mod

    for name, val in v.items():
        if not (val > 0.0 and math.isfinite(val)):
            raise SynthesisError(f"derived {name} = {val:.4g} is not realizable")
    return v


def _dcb_branches(exact: dict[str, float]) -> tuple[str, ...]:
    """Branches needing a DC block so all three ports are DC-isolated."""
    x1_conducts = "c_ser" not in exact  # the L1 path conducts unless capped
    x2_conducts = "l_2" in exact or ("c_2" not in exact)  # short or inductor
    xm_conducts = "l_m" in exact

    dcb: list[str] = []
    port1_return = x1_conducts and xm_conducts
    port2_return = x2_conducts and xm_conducts
    if port1_return or port2_return:
        dcb.append("shunt")
        xm_conducts = False
    if x1_conducts and x2_conducts:
        dcb.append("port2")  # block the secondary series arm by convention
    return tuple(dcb)


def synthesize(spec: FilterSpec) -> FilterDesign:
    """Solve the design equations and realize both branches.

    Returns exact element values and the E-series snapped set side by side;
    snapped designs must be re-verified, never assumed ideal.
    """
    if spec.xm_inductance is None and spec.xm_capacitance is None:
        import dataclasses

        l_m = default_xm_inductance(spec.f_mod, spec.f_stop, spec.c_total)
        spec = dataclasses.replace(spec, xm_inductance=l_m)
    config = classify(spec)
    x = spec.x_io_h
    xm = spec.xm_value()
    if config in (ConfigKind.D1, ConfigKind.D2):
        x1 = x2 = 0.0
    else:
        x2 = x - xm
        x1 = -(xm / x) * x2
    exact = _realize(spec, config)
    snapped = {k: _snap_policy(k, val, spec.eseries) for k, val in exact.items()}
    return FilterDesign(
        spec=spec,
        config=config,
        alpha=spec.alpha,
        x_io_h=x,
        x_m=xm,
        x1=x1,
        x2=x2,
        exact=exact,
        snapped=snapped,
        dcb=_dcb_branches(exact),
    )


def default_xm_inductance(
    f_mod: float, f_stop: float, c_total: float, zero_target: float | None = None
) -> float:
    """Shunt inductance placing the high-state zero at ``zero_target``.

    Default target is the geometric mean of the carriers, keeping the zero
    separated from both poles so neither is cancelled.  Solved by a scan
    plus root refinement on the reactance of the high-state input impedance
    at the target frequency.
    """
    if zero_target is None:
        zero_target = math.sqrt(f_mod * f_stop)
    w_mod = 2.0 * math.pi * f_mod
    x = 1.0 / (w_mod * c_total)
    l_boundary = x / w_mod  # x_m = X_IO_H, the D-configuration point

    if f_stop > f_mod:
        lo, hi = l_boundary * (1.0 + 1e-6), l_boundary * 50.0
    else:
        lo, hi = l_boundary * 1e-3, l_boundary * (1.0 - 1e-6)

    def zero_reactance(l_m: float) -> float:
        spec = FilterSpec(f_mod, f_stop, c_total, xm_inductance=l_m)
        d = synthesize(spec)
        z = d.input_impedance(zero_target, "H")
        if is_pole(z):
            return POLE_CLAMP
        return z.imag

    grid = np.geomspace(lo, hi, 200)
    vals = [zero_reactance(l) for l in grid]
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            return float(grid[i])
        if vals[i] * vals[i + 1] < 0.0:
            from scipy.optimize import brentq

            return float(brentq(zero_reactance, grid[i], grid[i + 1], xtol=1e-18))
    raise SynthesisError(
        "no shunt inductance in the scanned range places the high-state zero "
        f"at {zero_target:.4g} Hz; give x_m explicitly"
    )


@dataclass(frozen=True)
class VerificationReport:
    """Point checks of a realized design against its own requirements."""

    which: str
    lossless: bool
    zin_h_fmod: complex
    zin_l_fmod: complex
    zin_h_fstop: complex
    zin_l_fstop: complex
    ratio_fmod: float
    h_poles: tuple[float, ...]
    h_zeros: tuple[float, ...]
    zero_pole_separation: float | None
    cancellation_risk: bool
    checks: dict[str, bool] = field(default_factory=dict)
    experimental: bool = False

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def _capped_abs(z: complex, cap: float = DEFAULT_POLE_CAP) -> float:
    return cap if is_pole(z) else min(abs(z), cap)


def verify_design(
    d: FilterDesign,
    loss: LossModel = LOSSLESS,
    which: str = "exact",
    min_ratio: float = 100.0,
) -> VerificationReport:
    """Evaluate the realized design at both carriers and both pin states.

    Lossless checks demand the ideal open/short pattern; lossy checks demand
    the high/low impedance ratio at f_mod to clear ``min_ratio``.  The
    high-state pole/zero constellation is located numerically and flagged if
    the zero drifts within 5% of either pole (a close zero cancels the pole
    it was meant to separate from).
    """
    zh_fmod = d.input_impedance(d.f_mod, "H", which, loss)
    zl_fmod = d.input_impedance(d.f_mod, "L", which, loss)
    zh_fstop = d.input_impedance(d.f_stop, "H", which, loss)
    zl_fstop = d.input_impedance(d.f_stop, "L", which, loss)
    ratio = _capped_abs(zh_fmod) / max(_capped_abs(zl_fmod), 1e-30)

    f_lo = 0.5 * min(d.f_mod, d.f_stop)
    f_hi = 2.0 * max(d.f_mod, d.f_stop)
    tp = d.two_port(which, loss)

    def h_zin(farr):
        z_load = loss.load(d.c_total, "H").impedance(farr)
        return input_impedance(tp, z_load, farr)

    pz = find_poles_zeros(h_zin, f_lo, f_hi, grid=4001, lossless=loss.lossless)
    poles = tuple(f for f, kind in pz if kind == "pole")
    zeros = tuple(f for f, kind in pz if kind == "zero")

    separation: float | None = None
    risk = False
    if poles and zeros:
        separation = min(abs(z - p) / p for z in zeros for p in poles)
        risk = separation < 0.05

    checks: dict[str, bool] = {}
    if loss.lossless:
        checks["l_state_short_at_f_mod"] = abs(zl_fmod) <= 1e-6
        checks["h_state_open_at_f_mod"] = bool(is_pole(zh_fmod))
        checks["open_at_f_stop_h"] = bool(is_pole(zh_fstop))
        checks["open_at_f_stop_l"] = bool(is_pole(zl_fstop))
    else:
        checks["modulation_ratio_at_f_mod"] = ratio >= min_ratio
    checks["zero_separated_from_poles"] = not risk

    return VerificationReport(
        which=which,
        lossless=loss.lossless,
        zin_h_fmod=zh_fmod,
        zin_l_fmod=zl_fmod,
        zin_h_fstop=zh_fstop,
        zin_l_fstop=zl_fstop,
        ratio_fmod=ratio,
        h_poles=poles,
        h_zeros=zeros,
        zero_pole_separation=separation,
        cancellation_risk=risk,
        checks=checks,
        experimental=d.config is ConfigKind.C,
    )


def design_to_dict(d: FilterDesign) -> dict:
    """JSON-compatible record, SI units, exact and snapped side by side."""
    return {
        "schema_version": 1,
        "config": d.config.value,
        "alpha": d.alpha,
        "f_mod_hz": d.f_mod,
        "f_stop_hz": d.f_stop,
        "c_io_f": d.spec.c_io,
        "shunt_c_f": d.spec.shunt_c,
        "c_total_f": d.c_total,
        "x_io_h_ohm": d.x_io_h,
        "x_m_ohm": d.x_m,
        "x1_ohm": d.x1,
        "x2_ohm": d.x2,
        "eseries": d.spec.eseries,
        "exact": dict(d.exact),
        "snapped": dict(d.snapped),
        "dcb": list(d.dcb),
    }


def design_from_dict(rec: dict) -> FilterDesign:
    if rec.get("schema_version") != 1:
        raise ValueError("unsupported design schema_version")
    xm_l = rec["exact"].get("l_m")
    xm_c = rec["exact"].get("c_m")
    spec = FilterSpec(
        f_mod=rec["f_mod_hz"],
        f_stop=rec["f_stop_hz"],
        c_io=rec["c_io_f"],
        shunt_c=rec.get("shunt_c_f", 0.0),
        xm_inductance=xm_l,
        xm_capacitance=xm_c,
        eseries=rec.get("eseries", "E12"),
    )
    return synthesize(spec)
