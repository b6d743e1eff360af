"""Observables read off transmitted fields: delay estimates, regime, causal boundary, information arrival.

Delays are measured in the free frame: a transmitted feature found at ``x``
corresponds to ``tau = (x_free - x)/v0``, so a reading ahead of the free
pulse is a negative delay.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy import signal

from .propagation import FieldProfile

WEAK = "weak"
STRONG = "strong"


class AnalysisError(ValueError):
    """Raised when a field cannot support the requested observable."""


class _Indistinguishable:
    """Sentinel returned when two fields never differ above threshold on the grid."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INDISTINGUISHABLE"

    def __bool__(self):
        return False


INDISTINGUISHABLE = _Indistinguishable()


@dataclass(frozen=True)
class DelayEstimate:
    tau_est: float
    method: str
    resolution: float
    regime: str
    x_transmitted: float
    x_free: float
    multimodal: bool = False

    def __post_init__(self):
        if not np.isfinite(self.tau_est):
            raise AnalysisError("delay estimate is not finite")
        if not self.resolution > 0:
            raise AnalysisError("resolution must be positive")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BoundaryReport:
    x_B: float
    max_beyond: float
    verdict: str
    tol: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Lobe:
    x: float
    tau: float
    height: float


def classify_regime(dx: float, b: float) -> str:
    """``"weak"`` iff the pulse is wider than the barrier (``dx > b``); a tie counts as strong."""
    if not (dx > 0 and b > 0):
        raise AnalysisError(f"dx and b must be positive, got dx={dx}, b={b}")
    return WEAK if dx > b else STRONG


def _same_grid(a: FieldProfile, b: FieldProfile) -> None:
    if a.grid != b.grid:
        raise AnalysisError("fields are on different grids")
    if not np.isclose(a.t_obs, b.t_obs, rtol=0, atol=1e-12 * max(1.0, abs(a.t_obs))):
        raise AnalysisError(f"fields observed at different times ({a.t_obs} vs {b.t_obs})")


def _peak_position(x: np.ndarray, intensity: np.ndarray) -> float:
    """Vertex of the parabola through the discrete maximum and its neighbours."""
    j = int(np.argmax(intensity))
    if j == 0 or j == x.size - 1:
        return float(x[j])
    left, mid, right = intensity[j - 1], intensity[j], intensity[j + 1]
    curvature = left - 2.0 * mid + right
    if curvature >= 0:
        return float(x[j])
    offset = 0.5 * (left - right) / curvature
    return float(x[j] + offset * (x[1] - x[0]))


def _main_lobe_centroid(x: np.ndarray, intensity: np.ndarray) -> float:
    j = int(np.argmax(intensity))
    half = 0.5 * intensity[j]
    lo = j
    while lo > 0 and intensity[lo - 1] >= half:
        lo -= 1
    hi = j
    while hi < x.size - 1 and intensity[hi + 1] >= half:
        hi += 1
    w = intensity[lo : hi + 1]
    return float(np.sum(w * x[lo : hi + 1]) / np.sum(w))


def find_lobes(psi: FieldProfile, rel_height: float = 0.05, min_separation: float | None = None) -> list[Lobe]:
    """Local maxima of ``|psi|^2`` above ``rel_height`` of the global maximum, ordered by ``x``.

    ``min_separation`` (in x units) defaults to a quarter of the pulse width
    recorded in the field metadata, or four grid cells.
    """
    intensity = np.abs(psi.values) ** 2
    top = float(intensity.max())
    if top == 0:
        return []
    step = psi.grid.spacing
    if min_separation is None:
        width = psi.meta.get("pulse", {}).get("dx")
        min_separation = 0.25 * width if width else 4 * step
    distance = max(1, int(round(min_separation / step)))
    idx, _ = signal.find_peaks(intensity, height=rel_height * top, distance=distance,
                               prominence=rel_height * top)
    if idx.size == 0:
        idx = np.array([int(np.argmax(intensity))])
    x = psi.x
    tau = psi.tau() if "x_free" in psi.meta else np.full(x.shape, np.nan)
    return [Lobe(float(x[i]), float(tau[i]), float(intensity[i] / top)) for i in idx]


def estimate_delay(psi_F: FieldProfile, psi_free: FieldProfile, v0: float, method: str = "peak",
                   dx: float | None = None, b: float = 1.0) -> DelayEstimate:
    """Delay read from where the transmitted pulse sits relative to the free one.

    ``peak`` uses the quadratically interpolated maximum of ``|psi|^2``;
    ``centroid`` the ``|psi|^2``-weighted mean over the main lobe (above
    half its maximum).  The pulse width ``dx`` (for the resolution and the
    regime) defaults to the value recorded in ``psi_free.meta``.
    """
    _same_grid(psi_F, psi_free)
    if not v0 > 0:
        raise AnalysisError("v0 must be positive")
    if dx is None:
        dx = psi_free.meta.get("pulse", {}).get("dx")
        if dx is None:
            raise AnalysisError("pulse width dx not given and not recorded in metadata")
    x = psi_F.x
    i_F = np.abs(psi_F.values) ** 2
    i_free = np.abs(psi_free.values) ** 2
    if method == "peak":
        x_F, x_0 = _peak_position(x, i_F), _peak_position(x, i_free)
    elif method == "centroid":
        x_F, x_0 = _main_lobe_centroid(x, i_F), _main_lobe_centroid(x, i_free)
    else:
        raise AnalysisError(f"unknown method {method!r}")
    multimodal = len(find_lobes(psi_F, rel_height=0.1)) > 1
    tau = (x_0 - x_F) / v0
    return DelayEstimate(float(tau), method, float(dx / v0), classify_regime(dx, b), x_F, x_0, multimodal)


def causal_boundary_check(psi_F: FieldProfile, x_I: float, c: float, t_obs: float, tol: float = 1e-6,
                          dx: float | None = None) -> BoundaryReport:
    """Compare ``max |psi_F|`` over ``x > x_B = c t_obs + x_I`` with ``tol`` times the field peak.

    The grid must reach at least five pulse widths ``dx`` past ``x_B``.
    """
    x_B = c * t_obs + x_I
    if dx is None:
        dx = psi_F.meta.get("pulse", {}).get("dx", psi_F.grid.spacing)
    x = psi_F.x
    if x[-1] < x_B + 5.0 * dx:
        raise AnalysisError(
            f"grid ends at x={x[-1]:.6g}, needs to reach x_B + 5 dx = {x_B + 5.0 * dx:.6g}"
        )
    mag = np.abs(psi_F.values)
    peak = float(mag.max()) or 1.0
    beyond = x > x_B + 1e-12 * max(1.0, abs(x_B))
    max_beyond = float(mag[beyond].max() / peak) if np.any(beyond) else 0.0
    verdict = "respected" if max_beyond <= tol else "violated"
    return BoundaryReport(float(x_B), max_beyond, verdict, tol)


def information_arrival(psi_full: FieldProfile, psi_cut: FieldProfile, threshold: float = 1e-3):
    """Largest ``x`` where the two fields differ by more than ``threshold`` times the full field's peak.

    The scan runs from the right edge inward.  Returns
    :data:`INDISTINGUISHABLE` if the fields never differ that much.
    """
    _same_grid(psi_full, psi_cut)
    peak = float(np.abs(psi_full.values).max()) or 1.0
    gap = np.abs(psi_full.values - psi_cut.values)
    above = np.nonzero(gap[::-1] > threshold * peak)[0]
    if above.size == 0:
        return INDISTINGUISHABLE
    return float(psi_full.x[psi_full.grid.n - 1 - above[0]])
