"""Complex-impedance algebra for one-port networks and T-type two-ports.

Frequencies are plain Hz at every interface; angular frequency is internal.
Poles (ideal opens, resonance singularities) are ordinary values, not
exceptions: evaluation returns complex infinity and :func:`is_pole` also
treats any magnitude at or above ``POLE_CLAMP`` as a pole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np

__all__ = [
    "POLE",
    "POLE_CLAMP",
    "EPS_POLE",
    "DegenerateNetworkError",
    "is_pole",
    "ReactiveElement",
    "Network",
    "resistor",
    "inductor",
    "capacitor",
    "open_circuit",
    "short_circuit",
    "series",
    "parallel",
    "element_impedance",
    "combine",
    "TwoPortZ",
    "t_network",
    "input_impedance",
    "find_poles_zeros",
]

POLE_CLAMP = 1e12  # ohms; |Z| at or above this is reported as a pole
EPS_POLE = 1e-12  # relative threshold for the input-impedance denominator
POLE = complex(np.inf, 0.0)


class DegenerateNetworkError(ArithmeticError):
    """Evaluation produced an indeterminate (0/0 or inf-inf) form."""


def is_pole(z) -> bool | np.ndarray:
    """True where an impedance value is pole-flagged."""
    arr = np.asarray(z)
    out = ~np.isfinite(arr) | (np.abs(arr) >= POLE_CLAMP)
    return out if out.ndim else bool(out)


def _check_freq(f) -> np.ndarray:
    arr = np.asarray(f, dtype=float)
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise ValueError("frequency must be positive and finite (Hz)")
    return arr


Kind = Literal["resistor", "inductor", "capacitor", "open", "short"]


@dataclass(frozen=True)
class ReactiveElement:
    """A single R, L, C, open or short.

    ``loss`` is a series resistance for inductors and a parallel resistance
    for the other kinds (0 means ideal).
    """

    kind: Kind
    value: float = 0.0
    loss: float = 0.0

    def __post_init__(self) -> None:
        if self.kind in ("resistor", "inductor", "capacitor"):
            if not (self.value > 0.0 and math.isfinite(self.value)):
                raise ValueError(f"{self.kind} value must be positive, got {self.value}")
        elif self.value:
            raise ValueError(f"{self.kind} carries no value")
        if self.loss < 0.0:
            raise ValueError("loss resistance must be >= 0")

    def impedance(self, f) -> complex | np.ndarray:
        return element_impedance(self, f)


def element_impedance(e: ReactiveElement, f) -> complex | np.ndarray:
    """Impedance of one element at frequency ``f`` (Hz, scalar or array)."""
    farr = _check_freq(f)
    w = 2.0 * math.pi * farr
    if e.kind == "resistor":
        z = np.broadcast_to(complex(e.value, 0.0), farr.shape).copy()
    elif e.kind == "inductor":
        z = e.loss + 1j * w * e.value
    elif e.kind == "capacitor":
        z = -1j / (w * e.value)
        if e.loss > 0.0:
            z = z * e.loss / (z + e.loss)
    elif e.kind == "short":
        z = np.broadcast_to(0.0 + 0.0j, farr.shape).copy()
    elif e.kind == "open":
        if e.loss > 0.0:
            z = np.broadcast_to(complex(e.loss, 0.0), farr.shape).copy()
        else:
            z = np.broadcast_to(POLE, farr.shape).copy()
    else:  # pragma: no cover - kinds are closed
        raise ValueError(f"unknown element kind {e.kind!r}")
    return z if np.ndim(f) else complex(np.asarray(z)[()])


@dataclass(frozen=True)
class Network:
    """A one-port built from elements composed in series and parallel.

    Compose with ``a + b`` (series) and ``a | b`` (parallel), or the
    :func:`series` / :func:`parallel` helpers.
    """

    op: Literal["leaf", "series", "parallel"]
    element: ReactiveElement | None = None
    children: tuple["Network", ...] = ()

    @staticmethod
    def of(element: ReactiveElement) -> "Network":
        return Network("leaf", element=element)

    def __add__(self, other: "Network") -> "Network":
        return series(self, other)

    def __or__(self, other: "Network") -> "Network":
        return parallel(self, other)

    def impedance(self, f) -> complex | np.ndarray:
        farr = _check_freq(f)
        z = self._eval(farr)
        if np.any(np.isnan(z)):
            raise DegenerateNetworkError("network evaluates to an indeterminate form")
        return z if np.ndim(f) else complex(z[()])

    def _eval(self, farr: np.ndarray) -> np.ndarray:
        if self.op == "leaf":
            assert self.element is not None
            z = element_impedance(self.element, farr)
            return np.atleast_1d(np.asarray(z)) if farr.ndim else np.asarray(z)
        zs = [c._eval(farr) for c in self.children]
        if self.op == "series":
            total = np.zeros(farr.shape, dtype=complex)
            open_mask = np.zeros(farr.shape, dtype=bool)
            for z in zs:
                pm = ~np.isfinite(z)
                open_mask |= pm
                total = total + np.where(pm, 0.0, z)
            return np.where(open_mask, POLE, total)
        # parallel: work in admittance, opens contribute zero
        short_mask = np.zeros(farr.shape, dtype=bool)
        y = np.zeros(farr.shape, dtype=complex)
        for z in zs:
            zero = z == 0.0
            short_mask |= zero
            safe = np.where(zero | ~np.isfinite(z), 1.0, z)
            y = y + np.where(~np.isfinite(z), 0.0, 1.0 / safe) * np.where(zero, 0.0, 1.0)
        y_zero = y == 0.0
        safe_y = np.where(y_zero, 1.0, y)
        out = np.where(y_zero, POLE, 1.0 / safe_y)
        return np.where(short_mask, 0.0 + 0.0j, out)

    def conducts_dc(self) -> bool:
        """Whether the one-port passes direct current end to end."""
        if self.op == "leaf":
            assert self.element is not None
            return self.element.kind in ("resistor", "inductor", "short")
        if self.op == "series":
            return all(c.conducts_dc() for c in self.children)
        return any(c.conducts_dc() for c in self.children)


def resistor(ohms: float, loss: float = 0.0) -> Network:
    return Network.of(ReactiveElement("resistor", ohms, loss))


def inductor(henries: float, loss: float = 0.0) -> Network:
    return Network.of(ReactiveElement("inductor", henries, loss))


def capacitor(farads: float, loss: float = 0.0) -> Network:
    return Network.of(ReactiveElement("capacitor", farads, loss))


def open_circuit() -> Network:
    return Network.of(ReactiveElement("open"))


def short_circuit() -> Network:
    return Network.of(ReactiveElement("short"))


def _flatten(op: str, nets: Sequence[Network]) -> tuple[Network, ...]:
    out: list[Network] = []
    for n in nets:
        if n.op == op:
            out.extend(n.children)
        else:
            out.append(n)
    return tuple(out)


def series(*nets: Network) -> Network:
    if not nets:
        raise ValueError("series() needs at least one network")
    if len(nets) == 1:
        return nets[0]
    return Network("series", children=_flatten("series", nets))


def parallel(*nets: Network) -> Network:
    if not nets:
        raise ValueError("parallel() needs at least one network")
    if len(nets) == 1:
        return nets[0]
    return Network("parallel", children=_flatten("parallel", nets))


def combine(net: Network, f) -> complex | np.ndarray:
    """Evaluate a composed network at ``f``; pole flags propagate as values."""
    return net.impedance(f)


@dataclass(frozen=True)
class TwoPortZ:
    """Impedance-matrix view of a reciprocal two-port.

    ``z11``, ``zm``, ``z22`` are frequency evaluators (Hz in, complex ohms
    out, vectorized).  Reciprocity is structural: there is a single mutual
    term.  ``branches`` keeps the realizing one-ports when built from a
    T-network.
    """

    z11: Callable[[np.ndarray], np.ndarray]
    zm: Callable[[np.ndarray], np.ndarray]
    z22: Callable[[np.ndarray], np.ndarray]
    branches: tuple[Network, Network, Network] | None = None  # (x1, x2, xm)

    def swapped(self) -> "TwoPortZ":
        """The same two-port with port labels exchanged."""
        br = None
        if self.branches is not None:
            x1, x2, xm = self.branches
            br = (x2, x1, xm)
        return TwoPortZ(self.z22, self.zm, self.z11, br)


def t_network(x1: Network, x2: Network, xm: Network) -> TwoPortZ:
    """Two-port of a T: series branch x1, shunt xm, series branch x2.

    z11 = Z(x1)+Z(xm), z22 = Z(x2)+Z(xm), zm = Z(xm); loss resistances in the
    branches carry through as real parts.
    """
    sx1 = series(x1, xm)
    sx2 = series(x2, xm)
    return TwoPortZ(
        z11=sx1.impedance,
        zm=xm.impedance,
        z22=sx2.impedance,
        branches=(x1, x2, xm),
    )


def input_impedance(z: TwoPortZ, z_load, f) -> complex | np.ndarray:
    """Impedance into port 1 with ``z_load`` across port 2.

    Zin = z11 - zm^2/(z_load + z22).  When the denominator vanishes
    (relative to |zm|^2) the result is the intended ideal open and comes
    back pole-flagged rather than raising.
    """
    farr = _check_freq(f)
    z11 = np.asarray(z.z11(farr), dtype=complex)
    zm = np.asarray(z.zm(farr), dtype=complex)
    z22 = np.asarray(z.z22(farr), dtype=complex)
    zl = np.asarray(z_load, dtype=complex)
    den = zl + z22

    with np.errstate(all="ignore"):
        out = z11 - zm * zm / den
    # an open-ish denominator decouples port 2 entirely
    den_open = ~np.isfinite(den) | (np.abs(den) >= POLE_CLAMP)
    out = np.where(den_open, z11, out)
    zm2 = np.abs(zm) ** 2
    out = np.where(~den_open & (np.abs(den) < EPS_POLE * zm2), POLE, out)
    out = np.where(~np.isfinite(z11), POLE, out)
    if np.any(np.isnan(out)):
        raise DegenerateNetworkError("input impedance is indeterminate (0/0)")
    return out if np.ndim(f) else complex(np.asarray(out)[()])


def _eval_scalar(net_fn: Callable, f: float) -> complex:
    z = net_fn(np.asarray([f]))
    return complex(np.asarray(z).ravel()[0])


def _bisect_pole(net_fn: Callable, a: float, b: float, iters: int = 80) -> float:
    """Locate a reactance jump (pole) by sign bisection on Im(Z)."""
    sa = np.sign(_eval_scalar(net_fn, a).imag)
    for _ in range(iters):
        m = math.sqrt(a * b)
        zm_ = _eval_scalar(net_fn, m)
        if is_pole(zm_):
            return m
        sm = np.sign(zm_.imag)
        if sm == sa:
            a = m
        else:
            b = m
        if b / a - 1.0 < 1e-15:
            break
    return math.sqrt(a * b)


def find_poles_zeros(
    net_fn: Callable,
    f_lo: float,
    f_hi: float,
    grid: int = 2001,
    lossless: bool | None = None,
) -> list[tuple[float, str]]:
    """Locate impedance poles and zeros of ``net_fn`` on [f_lo, f_hi].

    The scan grid is log-spaced.  For lossless (purely reactive) one-ports
    the classification is exact: a continuous upward crossing of the
    reactance is a zero (refined by root finding), a downward jump is a pole
    (refined by bisection on the sign).  Lossy networks fall back to |Z|
    local extrema with at least a decade of prominence.  Returns
    ``[(frequency, "pole"|"zero"), ...]`` sorted by frequency; no crossings
    means an empty list.
    """
    if not (f_lo < f_hi):
        raise ValueError("need f_lo < f_hi")
    if grid < 100:
        raise ValueError("grid must be at least 100 points")
    fs = np.geomspace(f_lo, f_hi, grid)
    z = np.asarray(net_fn(fs), dtype=complex)
    pole_grid = is_pole(z)

    if lossless is None:
        finite = ~pole_grid
        if not np.any(finite):
            lossless = True
        else:
            scale = float(np.max(np.abs(z[finite])))
            lossless = float(np.max(np.abs(z[finite].real))) <= 1e-9 * max(scale, 1.0)

    found: list[tuple[float, str]] = []
    if lossless:
        x = z.imag
        exact_zero = (~pole_grid) & (x == 0.0)
        for i in np.nonzero(pole_grid)[0]:
            found.append((float(fs[i]), "pole"))
        for i in np.nonzero(exact_zero)[0]:
            found.append((float(fs[i]), "zero"))
        skip = pole_grid | exact_zero
        for i in range(grid - 1):
            if skip[i] or skip[i + 1]:
                continue
            a, b = float(fs[i]), float(fs[i + 1])
            if x[i] < 0.0 < x[i + 1]:
                from scipy.optimize import brentq

                f0 = brentq(lambda f: _eval_scalar(net_fn, f).imag, a, b, xtol=1e-6)
                found.append((float(f0), "zero"))
            elif x[i] > 0.0 > x[i + 1]:
                found.append((_bisect_pole(net_fn, a, b), "pole"))
    else:
        from scipy.signal import find_peaks

        mag = np.abs(z)
        mag = np.clip(mag, 1e-30, POLE_CLAMP)
        logm = np.log10(mag)
        peaks, _ = find_peaks(logm, prominence=1.0)
        dips, _ = find_peaks(-logm, prominence=1.0)
        found.extend((float(fs[i]), "pole") for i in peaks)
        found.extend((float(fs[i]), "zero") for i in dips)

    found.sort(key=lambda t: t[0])
    return found
