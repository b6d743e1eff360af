"""Delta-mirror scatterers, tabulated transmission, and complex-plane pole analysis.

Both delta variants are written as ``t(k) = N(k) / E(k)`` with ``E`` entire, so
the poles of ``t`` are exactly the zeros of ``E``:

* single mirror: ``t = k/(k + a)``, ``E = k + a``;
* mirror pair: ``t = (1+R)/(1 - R^2 e^{2ikb}) = (k + a)/E`` with
  ``E = k + 2a - 2 i b a^2 expm1(2ikb)/(2ikb)``,

where ``a = i*Omega/2`` and ``R = -a/(k + a)``.  Dividing the double-mirror
denominator by ``k`` removes its harmless zero at ``k = 0`` and keeps ``t(0)``
finite (``t(0) = 1/(2 + Omega b)``).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np


class DomainError(ValueError):
    """Evaluation at a singular point (pole) of an amplitude."""


class UnsupportedOperation(NotImplementedError):
    """The requested analysis is not defined for this model variant."""


class PoleSearchError(RuntimeError):
    """The contour count or root polishing failed."""


def _as_complex(k):
    return np.asarray(k, dtype=complex)


def _scalar_or_array(value, like):
    return complex(value) if np.ndim(like) == 0 else value


def reflection_delta(omega: float, k):
    """Single-mirror reflection ``-i Omega/(2k + i Omega)``."""
    kk = _as_complex(k)
    if omega == 0:
        return _scalar_or_array(np.zeros_like(kk), k)
    denom = 2.0 * kk + 1j * omega
    if np.any(np.abs(denom) <= 1e-300 + 1e-15 * abs(omega)):
        raise DomainError(f"reflection amplitude evaluated at its pole k = {-0.5j * omega}")
    return _scalar_or_array(-1j * omega / denom, k)


def _phi(z):
    """expm1(z)/z, equal to 1 at z = 0."""
    z = np.asarray(z, dtype=complex)
    out = np.ones_like(z)
    nz = z != 0
    out[nz] = np.expm1(z[nz]) / z[nz]
    return out


def _dphi(z):
    """Derivative of expm1(z)/z."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < 1e-3
    zs = z[small]
    out[small] = 0.5 + zs / 3.0 + zs**2 / 8.0 + zs**3 / 30.0
    zb = z[~small]
    out[~small] = (zb * np.exp(zb) - np.expm1(zb)) / zb**2
    return out


class BarrierModel:
    """Common interface: ``transmission(k)`` for real (and, if analytic, complex) k."""

    kind: str = "abstract"
    analytic: bool = False

    def transmission(self, k):
        raise NotImplementedError

    def describe(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class SingleDelta(BarrierModel):
    """One delta mirror of strength ``omega`` (1/b units); ``omega < 0`` binds."""

    omega: float

    kind = "single_delta"
    analytic = True

    @property
    def a(self) -> complex:
        return 0.5j * self.omega

    def reflection(self, k):
        return reflection_delta(self.omega, k)

    def numerator(self, k):
        return _as_complex(k)

    def denominator(self, k):
        return _as_complex(k) + self.a

    def denominator_derivative(self, k):
        return np.ones_like(_as_complex(k))

    def transmission(self, k):
        kk = _as_complex(k)
        if self.omega == 0:
            return _scalar_or_array(np.ones_like(kk), k)
        den = self.denominator(kk)
        if np.any(np.abs(den) <= 1e-15 * abs(self.a)):
            raise DomainError(f"transmission evaluated at its pole k = {-self.a}")
        return _scalar_or_array(kk / den, k)

    def describe(self) -> dict:
        return {"kind": self.kind, "omega_b": float(self.omega)}


@dataclass(frozen=True)
class DoubleDelta(BarrierModel):
    """Two identical delta mirrors of strength ``omega`` a distance ``b`` apart."""

    omega: float
    b: float = 1.0

    kind = "double_delta"
    analytic = True

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError(f"mirror spacing b must be positive, got {self.b}")

    @property
    def a(self) -> complex:
        return 0.5j * self.omega

    def reflection(self, k):
        return reflection_delta(self.omega, k)

    def numerator(self, k):
        return _as_complex(k) + self.a

    def denominator(self, k):
        kk = _as_complex(k)
        a, b = self.a, self.b
        return kk + 2.0 * a - 2j * b * a * a * _phi(2j * kk * b)

    def denominator_derivative(self, k):
        kk = _as_complex(k)
        a, b = self.a, self.b
        return 1.0 + 4.0 * b * b * a * a * _dphi(2j * kk * b)

    def transmission(self, k):
        kk = _as_complex(k)
        if self.omega == 0:
            return _scalar_or_array(np.ones_like(kk), k)
        den = self.denominator(kk)
        num = self.numerator(kk)
        if np.any(np.abs(den) <= 1e-14 * np.maximum(1.0, np.abs(num))):
            raise DomainError("transmission evaluated at a pole")
        return _scalar_or_array(num / den, k)

    def round_trip(self, k):
        """``q = R^2 e^{2ikb}``, the ratio of consecutive path-mode terms."""
        r = self.reflection(k)
        return r * r * np.exp(2j * _as_complex(k) * self.b)

    def mode_term(self, k, m: int):
        """``T^(m)(k) = (1+R) R^{2m} e^{2imkb}``."""
        kk = _as_complex(k)
        r = self.reflection(kk)
        out = (1.0 + r) * r ** (2 * m) * np.exp(2j * m * kk * self.b)
        return _scalar_or_array(out, k)

    def describe(self) -> dict:
        return {"kind": self.kind, "omega_b": float(self.omega * self.b), "b": float(self.b)}


class Tabulated(BarrierModel):
    """Transmission sampled on a strictly increasing real k grid.

    Values between samples are interpolated linearly in Re and Im; outside
    the table the edge values are held.
    """

    kind = "tabulated"
    analytic = False

    def __init__(self, k, t, *, source: str | None = None):
        k = np.asarray(k, dtype=float)
        t = np.asarray(t, dtype=complex)
        if k.ndim != 1 or k.shape != t.shape or k.size < 2:
            raise ValueError("tabulated model needs matching 1-D k and t arrays with >= 2 rows")
        if np.any(np.diff(k) <= 0):
            raise ValueError("tabulated k values must be strictly increasing")
        if not np.all(np.isfinite(t)):
            raise ValueError("tabulated t contains NaN or Inf")
        excess = np.abs(t) - 1.0
        if np.any(excess > 1e-12):
            warnings.warn(
                f"tabulated |t| exceeds 1 by up to {excess.max():.3g} (not passive)",
                stacklevel=2,
            )
        self.k = k
        self.t = t
        self.source = source

    def transmission(self, k):
        kk = np.asarray(k)
        if np.iscomplexobj(kk) and np.any(np.imag(kk) != 0):
            raise UnsupportedOperation("tabulated models are defined on the real axis only")
        kr = np.real(kk).astype(float)
        out = np.interp(kr, self.k, self.t.real) + 1j * np.interp(kr, self.k, self.t.imag)
        return _scalar_or_array(out, k)

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "rows": int(self.k.size),
            "k_min": float(self.k[0]),
            "k_max": float(self.k[-1]),
            "source": self.source,
        }


def load_tabulated(path: str | Path) -> Tabulated:
    """Read ``k, Re t, Im t`` rows (comma separated, ``#`` comments allowed)."""
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if data.shape[1] != 3:
        raise ValueError(f"{path}: expected 3 columns (k, Re t, Im t), found {data.shape[1]}")
    return Tabulated(data[:, 0], data[:, 1] + 1j * data[:, 2], source=str(path))


def _require_double(model) -> DoubleDelta:
    if not isinstance(model, DoubleDelta):
        raise TypeError(f"operation needs a double_delta model, got {type(model).__name__}")
    return model


def transmission_series(model: DoubleDelta, k, M: int):
    """Partial sum of the path-mode expansion up to ``m = M``.

    Returns ``(total, terms)`` with ``terms[m]`` equal to ``T^(m)(k)``.
    """
    model = _require_double(model)
    if M < 0:
        raise ValueError("M must be >= 0")
    kk = _as_complex(k)
    r = model.reflection(kk)
    first = 1.0 + r
    step = r * r * np.exp(2j * kk * model.b)
    terms = np.empty((M + 1,) + kk.shape, dtype=complex)
    terms[0] = first
    for m in range(1, M + 1):
        terms[m] = terms[m - 1] * step
    total = terms.sum(axis=0)
    if np.ndim(k) == 0:
        return complex(total), [complex(v) for v in terms]
    return total, terms


def transmission_closed(model: DoubleDelta, k):
    """Closed geometric sum ``(1+R)/(1 - R^2 e^{2ikb})``."""
    return _require_double(model).transmission(k)


@dataclass(frozen=True)
class PathMode:
    """One term of the multiple-scattering expansion."""

    m: int
    amplitude_fn: Callable
    delay: float

    def __call__(self, k):
        return self.amplitude_fn(k)


def path_modes(model: BarrierModel, m_max: int, v0: float = 1.0) -> list[PathMode]:
    """Path modes ``m = 0..m_max``; a single mirror has only ``m = 0``."""
    if isinstance(model, DoubleDelta):
        return [
            PathMode(m, (lambda k, m=m: model.mode_term(k, m)), 2.0 * m * model.b / v0)
            for m in range(m_max + 1)
        ]
    if isinstance(model, SingleDelta):
        return [PathMode(0, model.transmission, 0.0)]
    raise UnsupportedOperation(f"{model.kind} has no path-mode expansion")


# --------------------------------------------------------------------------
# poles


@dataclass(frozen=True)
class ComplexBox:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_max > self.re_min and self.im_max > self.im_min):
            raise ValueError(f"degenerate search box {self}")

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        return (
            self.re_min - slack <= z.real <= self.re_max + slack
            and self.im_min - slack <= z.imag <= self.im_max + slack
        )

    @property
    def corners(self) -> list[complex]:
        return [
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        ]

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))


@dataclass(frozen=True)
class ScatteringPole:
    k_n: complex
    residue: complex
    kind: str

    def __post_init__(self):
        if self.kind not in ("bound", "resonance"):
            raise ValueError(f"unknown pole kind {self.kind!r}")
        if not abs(self.residue) > 0:
            raise ValueError("pole residue must be nonzero")


class PoleList(list):
    """List of poles plus the contour count and any polishing failures."""

    def __init__(self, poles=(), argument_count: int = 0, failures=()):
        super().__init__(poles)
        self.argument_count = argument_count
        self.failures = list(failures)


class _ZeroOnContour(Exception):
    pass


def _edge_phase(func, z0: complex, z1: complex, density: float) -> float:
    """Continuous change of arg(func) along the segment z0 -> z1."""
    length = abs(z1 - z0)
    n0 = max(17, int(math.ceil(length * density)) + 1)
    s = np.linspace(0.0, 1.0, n0)
    vals = func(z0 + (z1 - z0) * s)
    for _ in range(60):
        if np.any(~np.isfinite(vals)) or np.any(vals == 0):
            raise _ZeroOnContour
        dphi = np.angle(vals[1:] / vals[:-1])
        bad = np.abs(dphi) > np.pi / 4
        if not np.any(bad):
            return float(dphi.sum())
        idx = np.nonzero(bad)[0]
        if np.min(s[idx + 1] - s[idx]) * length < 1e-13:
            raise _ZeroOnContour
        mids = 0.5 * (s[idx] + s[idx + 1])
        new_vals = func(z0 + (z1 - z0) * mids)
        s = np.insert(s, idx + 1, mids)
        vals = np.insert(vals, idx + 1, new_vals)
    raise _ZeroOnContour


def argument_principle_count(func, box: ComplexBox, density: float = 16.0) -> int:
    """Number of zeros of an analytic ``func`` inside ``box`` (winding of its phase)."""
    c = box.corners
    total = sum(_edge_phase(func, c[i], c[(i + 1) % 4], density) for i in range(4))
    winding = total / (2.0 * np.pi)
    count = int(round(winding))
    if abs(winding - count) > 1e-6:
        raise _ZeroOnContour
    return count


def _newton(func, dfunc, z0: complex, tol: float, max_iter: int = 100):
    def ev(f, z):
        return complex(f(np.array([z]))[0])

    z = complex(z0)
    with np.errstate(all="ignore"):
        fz = ev(func, z)
        for it in range(max_iter):
            fp = ev(dfunc, z)
            if not (np.isfinite(fz) and np.isfinite(fp)) or fp == 0:
                return z, False, it
            step = fz / fp
            lam = 1.0
            while True:
                z_new = z - lam * step
                f_new = ev(func, z_new)
                if (np.isfinite(f_new) and abs(f_new) < abs(fz)) or lam < 1e-6:
                    break
                lam *= 0.5
            if not np.isfinite(f_new):
                return z, False, it
            z, fz = z_new, f_new
            if abs(lam * step) <= tol:
                return z, True, it + 1
    return z, False, max_iter


def _split(box: ComplexBox, frac: float) -> tuple[ComplexBox, ComplexBox]:
    if (box.re_max - box.re_min) >= (box.im_max - box.im_min):
        cut = box.re_min + frac * (box.re_max - box.re_min)
        return (
            ComplexBox(box.re_min, cut, box.im_min, box.im_max),
            ComplexBox(cut, box.re_max, box.im_min, box.im_max),
        )
    cut = box.im_min + frac * (box.im_max - box.im_min)
    return (
        ComplexBox(box.re_min, box.re_max, box.im_min, cut),
        ComplexBox(box.re_min, box.re_max, cut, box.im_max),
    )


def _classify(k_n: complex, tol: float) -> str:
    if k_n.imag < 0:
        return "resonance"
    if k_n.imag > 0 and abs(k_n.real) <= max(tol, 1e-9 * abs(k_n)):
        return "bound"
    raise PoleSearchError(f"pole at {k_n} lies off the imaginary axis in the upper half-plane")


def find_poles(model: BarrierModel, search_box: ComplexBox, tol: float = 1e-10) -> PoleList:
    """All poles of ``t`` inside ``search_box``.

    The box is bisected until each piece holds one zero of the denominator
    (by the argument principle), then damped Newton polishes a start at the
    piece's midpoint.  The returned list carries ``argument_count`` (the
    count on the full box) and ``failures`` (pieces whose root could not be
    polished).
    """
    if not getattr(model, "analytic", False) or not hasattr(model, "denominator"):
        raise UnsupportedOperation(f"pole search is not supported for {model.kind} models")
    func, dfunc = model.denominator, model.denominator_derivative
    if getattr(model, "omega", 1.0) == 0:
        return PoleList([], 0)

    def count(bx: ComplexBox) -> int:
        return argument_principle_count(func, bx)

    try:
        total = count(search_box)
    except _ZeroOnContour as exc:
        raise PoleSearchError(f"a pole lies on the boundary of {search_box}") from exc

    roots: list[complex] = []
    failures: list[dict] = []
    stack = [(search_box, total, 0)]
    while stack:
        bx, n, depth = stack.pop()
        if n == 0:
            continue
        if n == 1:
            z, ok, iters = _newton(func, dfunc, bx.center, tol)
            slack = 1e-9 * max(1.0, abs(z))
            if ok and bx.contains(z, slack):
                roots.append(z)
                continue
        if depth > 60:
            failures.append({"box": bx, "count": n, "last_iterate": bx.center})
            continue
        for frac in (0.5, 0.4637, 0.5381, 0.3719, 0.6173):
            left, right = _split(bx, frac)
            try:
                nl = count(left)
                nr = count(right)
            except _ZeroOnContour:
                continue
            if nl + nr == n:
                break
        else:
            failures.append({"box": bx, "count": n, "reason": "split failed"})
            continue
        stack.append((left, nl, depth + 1))
        stack.append((right, nr, depth + 1))

    roots.sort(key=lambda z: (round(z.real, 9), z.imag))
    poles = [ScatteringPole(z, residue_at(model, z), _classify(z, tol)) for z in roots]
    return PoleList(poles, total, failures)


def mirror_poles(poles) -> list[ScatteringPole]:
    """Add the partners ``-conj(k_n)`` implied by ``t(-k*) = t(k)*`` (real strengths)."""
    out = list(poles)
    for p in poles:
        if abs(p.k_n.real) > 1e-12:
            out.append(ScatteringPole(-p.k_n.conjugate(), -p.residue.conjugate(), p.kind))
    return out


def contour_residue(func, k_n: complex, radius: float, n: int = 256) -> complex:
    """``(2 pi i)^-1`` times the circle integral of ``func`` around ``k_n`` (trapezoid rule)."""
    theta = 2.0 * np.pi * np.arange(n) / n
    dz = radius * np.exp(1j * theta)
    return complex(np.mean(func(k_n + dz) * dz))


def residue_at(model: BarrierModel, k_n: complex, method: str = "analytic", radius: float | None = None) -> complex:
    """Residue of ``t`` at a simple pole ``k_n``.

    ``method="analytic"`` uses ``N(k_n)/E'(k_n)``; ``"contour"`` integrates
    around a small circle.  A point that is not a pole raises ``DomainError``.
    """
    k_n = complex(k_n)
    if not getattr(model, "analytic", False):
        raise UnsupportedOperation(f"residues are not available for {model.kind} models")
    if method == "contour" or not hasattr(model, "denominator"):
        r = radius if radius is not None else 0.25
        res = contour_residue(model.transmission, k_n, r)
        scale = float(np.max(np.abs(model.transmission(k_n + r * np.exp(2j * np.pi * np.arange(64) / 64)))))
        if abs(res) <= 1e-10 * r * scale:
            raise DomainError(f"k = {k_n} is not a pole (residue below threshold)")
        return res
    if method != "analytic":
        raise ValueError(f"unknown residue method {method!r}")
    e = complex(model.denominator(np.array([k_n]))[0])
    de = complex(model.denominator_derivative(np.array([k_n]))[0])
    if de == 0 or abs(e / de) > 1e-6 * max(1.0, abs(k_n)):
        raise DomainError(f"k = {k_n} is not a pole (residue below threshold)")
    return complex(model.numerator(np.array([k_n]))[0]) / de


def ringing_length(model: BarrierModel, k, weight, eps: float = 1e-12) -> float:
    """Length (in units of ``v0 * tau``) after which resonant ringing falls below ``eps``.

    ``weight`` is the spectral weight driving each real wavenumber in ``k``.
    Each resonance near ``k`` decays by ``|R|^2`` per round trip ``2b`` and
    starts at roughly ``weight |1+R| / (2b |R|^2)``.
    """
    k = np.asarray(k, dtype=float)
    weight = np.broadcast_to(np.asarray(weight, dtype=float), k.shape)
    if isinstance(model, DoubleDelta) and model.omega != 0:
        kk = k[k != 0]
        ww = weight[k != 0]
        r = model.reflection(kk)
        r2 = np.clip(np.abs(r) ** 2, 1e-300, 1.0 - 1e-16)
        ell = 2.0 * model.b / -np.log(r2)
        amp = ww * np.abs(1.0 + r) / (2.0 * model.b * r2)
        live = amp > eps
        return float(np.max(ell[live] * np.log(amp[live] / eps))) if np.any(live) else 0.0
    if isinstance(model, SingleDelta) and model.omega != 0:
        amp = float(np.max(weight)) * abs(model.omega) / 2.0
        return 2.0 / abs(model.omega) * math.log(amp / eps) if amp > eps else 0.0
    return 0.0
