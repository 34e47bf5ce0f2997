"""Distance sweeps, finite-difference sensitivities and crossover search.

The sensitivity of a metric along a family is the derivative of its
distance-from-reference with respect to the swept parameter. Where two
metrics' sensitivities have equal magnitude, the better discriminating
metric changes; :func:`sensitivity_crossover` brackets and bisects for
that point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConfigurationError
from .metrics import METRICS, Distances, DistanceKind, all_distances
from .states import StateFamily, mix, regenerate, singlet

REL_STEP = 1e-6
BISECT_RTOL = 1e-10
DEFAULT_POINTS = 500
X_UPPER = 1.0 - 1e-6


def evaluate(family: StateFamily, theta: float) -> Distances:
    """All three distances between the family's reference and its state at ``theta``."""
    return all_distances(family.reference, family(theta))


def fd_step(theta: float) -> float:
    return max(REL_STEP, REL_STEP * abs(theta))


@dataclass(frozen=True)
class Gradient:
    values: Distances
    scheme: str  # "central", "forward" or "backward"
    step: float


def gradients(family: StateFamily, theta: float) -> Gradient:
    """d(distance)/d(theta) for all three metrics.

    Central differences in the interior; within one step of a domain edge
    the second-order one-sided stencil is used instead.
    """
    family.check_domain(theta)
    h = fd_step(theta)
    lo, hi = family.domain
    if theta - h >= lo and theta + h <= hi:
        dp, dm = evaluate(family, theta + h), evaluate(family, theta - h)
        vals = [(p - m) / (2 * h) for p, m in zip(dp, dm)]
        scheme = "central"
    elif theta + 2 * h <= hi:
        d0, d1, d2 = (evaluate(family, theta + k * h) for k in (0, 1, 2))
        vals = [(-3 * a + 4 * b - c) / (2 * h) for a, b, c in zip(d0, d1, d2)]
        scheme = "forward"
    elif theta - 2 * h >= lo:
        d0, d1, d2 = (evaluate(family, theta - k * h) for k in (0, 1, 2))
        vals = [(3 * a - 4 * b + c) / (2 * h) for a, b, c in zip(d0, d1, d2)]
        scheme = "backward"
    else:
        raise ConfigurationError(f"domain {family.domain} too narrow for step {h:g}")
    return Gradient(Distances(*vals), scheme, h)


def sensitivity(family: StateFamily, metric, theta: float) -> float:
    """Signed derivative of one metric's distance curve at ``theta``."""
    return gradients(family, theta).values[DistanceKind.parse(metric)]


def _check_grid(family: StateFamily, grid) -> np.ndarray:
    theta = np.asarray(grid, dtype=float)
    if theta.ndim != 1 or theta.size < 2:
        raise ConfigurationError("grid needs at least 2 points")
    if not np.all(np.diff(theta) > 0):
        raise ConfigurationError("grid must be strictly increasing")
    for th in (theta[0], theta[-1]):
        family.check_domain(float(th))
    return theta


@dataclass
class SweepResult:
    family: str
    kind: str
    parameter_name: str
    theta: np.ndarray
    distances: dict[DistanceKind, np.ndarray]
    gradients: dict[DistanceKind, np.ndarray] | None = None
    one_sided: tuple[float, ...] = ()

    def __post_init__(self):
        if not np.all(np.diff(self.theta) > 0):
            raise ValueError("theta must be strictly increasing")
        for k, col in self.distances.items():
            if not np.all(np.isfinite(col)) or np.any(col < 0):
                raise ValueError(f"{k} distances must be finite and non-negative")

    def __len__(self):
        return len(self.theta)

    def table(self, metrics: Sequence = METRICS) -> tuple[list[str], list[list[float]]]:
        metrics = [DistanceKind.parse(m) for m in metrics]
        metrics = [m for m in METRICS if m in metrics]
        header = ["theta"] + [f"d_{m}" for m in metrics]
        cols = [self.theta] + [self.distances[m] for m in metrics]
        if self.gradients is not None:
            header += [f"g_{m}" for m in metrics]
            cols += [self.gradients[m] for m in metrics]
        return header, [list(map(float, row)) for row in zip(*cols)]


def sweep(family: StateFamily, grid: Iterable[float], *, with_gradients: bool = False) -> SweepResult:
    """Distances (and optionally gradients) from the reference at every grid point."""
    theta = _check_grid(family, list(grid))
    rows = [evaluate(family, float(th)) for th in theta]
    dist = {m: np.array([r[i] for r in rows]) for i, m in enumerate(METRICS)}
    grads = None
    one_sided: list[float] = []
    if with_gradients:
        gs = [gradients(family, float(th)) for th in theta]
        grads = {m: np.array([g.values[i] for g in gs]) for i, m in enumerate(METRICS)}
        one_sided = [float(th) for th, g in zip(theta, gs) if g.scheme != "central"]
    return SweepResult(
        family.describe(), str(family.kind), family.parameter_name,
        theta, dist, grads, tuple(one_sided),
    )


@dataclass
class DifferenceCurve:
    family: str
    parameter_name: str
    metric_a: DistanceKind
    metric_b: DistanceKind
    theta: np.ndarray
    diff: np.ndarray

    @property
    def column(self) -> str:
        return f"diff_{self.metric_a}_{self.metric_b}"


def difference_curve(family: StateFamily, metric_a, metric_b, grid) -> DifferenceCurve:
    """D_A - D_B along the family."""
    a, b = DistanceKind.parse(metric_a), DistanceKind.parse(metric_b)
    res = sweep(family, grid)
    return DifferenceCurve(
        res.family, res.parameter_name, a, b, res.theta, res.distances[a] - res.distances[b]
    )


@dataclass
class CrossoverReport:
    """Outcome of a sensitivity-crossover search.

    When ``found`` is false the bracket showed no sign change and
    ``theta_star`` / ``residual`` are ``None``; the dominant labels then
    name the metric with the larger gradient magnitude at each end.
    """

    metric_a: DistanceKind
    metric_b: DistanceKind
    bracket: tuple[float, float]
    found: bool
    theta_star: float | None
    residual: float | None
    dominant_low_side: DistanceKind
    dominant_high_side: DistanceKind
    iterations: int = 0
    scale: float | None = None  # max(|S_A|, |S_B|) at theta_star

    def to_json(self) -> dict:
        out = {
            "theta_star": self.theta_star,
            "bracket": list(self.bracket),
            "residual": self.residual,
            "dominant_low_side": str(self.dominant_low_side),
            "dominant_high_side": str(self.dominant_high_side),
            "crossover_found": self.found,
            "metrics": [str(self.metric_a), str(self.metric_b)],
            "iterations": self.iterations,
        }
        return out


def sensitivity_crossover(
    family: StateFamily,
    metric_a,
    metric_b,
    bracket: tuple[float, float],
    *,
    rtol: float = BISECT_RTOL,
) -> CrossoverReport:
    """Bisect g = |S_A| - |S_B| for a sign change inside ``bracket``.

    ``rtol`` is the final bracket width relative to the initial one.
    A bracket without a sign change yields ``found=False`` rather than
    raising: several scenarios have a uniformly dominant metric.
    """
    a, b = DistanceKind.parse(metric_a), DistanceKind.parse(metric_b)
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise ConfigurationError(f"bracket must satisfy lo < hi, got {bracket}")
    family.check_domain(lo)
    family.check_domain(hi)

    def g(theta: float) -> tuple[float, float, float]:
        vals = gradients(family, theta).values
        sa, sb = abs(vals[a]), abs(vals[b])
        return sa - sb, sa, sb

    g_lo, g_hi = g(lo)[0], g(hi)[0]
    label = lambda v: a if v > 0 else b  # noqa: E731
    if not g_lo * g_hi < 0:
        return CrossoverReport(a, b, (lo, hi), False, None, None, label(g_lo), label(g_hi))

    x0, x1, s0 = lo, hi, math.copysign(1.0, g_lo)
    width = rtol * (hi - lo)
    it = 0
    while x1 - x0 > width:
        mid = 0.5 * (x0 + x1)
        gm = g(mid)[0]
        it += 1
        if gm == 0.0:
            x0 = x1 = mid
            break
        if math.copysign(1.0, gm) == s0:
            x0 = mid
        else:
            x1 = mid
    star = 0.5 * (x0 + x1)
    gs, sa, sb = g(star)
    return CrossoverReport(
        a, b, (lo, hi), True, star, abs(gs), label(g_lo), label(g_hi),
        iterations=it, scale=max(sa, sb),
    )


def linear_grid(lo: float, hi: float, steps: int) -> np.ndarray:
    """``steps`` equal intervals, i.e. steps + 1 points."""
    return np.linspace(lo, hi, steps + 1)


def log_grid(lo: float, hi: float, steps: int) -> np.ndarray:
    return np.geomspace(lo, hi, steps + 1)


def default_grid(family: StateFamily, steps: int = DEFAULT_POINTS) -> np.ndarray:
    """t over [0, 5 tau] or x over [0, 1 - 1e-6]."""
    if family.parameter_name == "t":
        return linear_grid(0.0, 5.0 * family.metadata["tau"], steps)
    return linear_grid(0.0, X_UPPER, steps)


@dataclass
class GridResult:
    """D_A - D_B on an (f1, f2) grid; ``diff[i, j]`` belongs to ``f1[i]``, ``f2[j]``."""

    f1: np.ndarray
    f2: np.ndarray
    diff: np.ndarray
    x_fixed: float
    f1_phase: float = 0.0
    f2_phase: float = 0.0

    def rows(self):
        for i, a in enumerate(self.f1):
            for j, b in enumerate(self.f2):
                yield float(a), float(b), float(self.diff[i, j])

    def inversion_points(self) -> np.ndarray:
        """For each f1, the |f2| where the slope of the difference along f2 changes sign.

        Linear interpolation of the discrete slope between neighbouring
        f2 samples; NaN where the slope keeps one sign.
        """
        out = np.full(len(self.f1), np.nan)
        mids = np.sqrt(self.f2[1:] * self.f2[:-1])
        for i in range(len(self.f1)):
            slope = np.diff(self.diff[i]) / np.diff(self.f2)
            flips = np.nonzero(np.sign(slope[:-1]) * np.sign(slope[1:]) < 0)[0]
            if flips.size:
                k = flips[0]
                s0, s1 = slope[k], slope[k + 1]
                out[i] = mids[k] + (mids[k + 1] - mids[k]) * s0 / (s0 - s1)
        return out


def sweep_2d(
    f1_values: Sequence[float],
    f2_values: Sequence[float],
    x_fixed: float = 0.5,
    *,
    f1_phase: float = 0.0,
    f2_phase: float = 0.0,
    metric_a=DistanceKind.BURES,
    metric_b=DistanceKind.HS,
    builder: Callable[[complex, complex], StateFamily] | None = None,
) -> GridResult:
    """Map D_A - D_B between U(f1) rho_S U(f1)^dagger and the two-slab mixture at ``x_fixed``.

    Grid values are moduli in (0, 1); the phases are applied on top.
    ``builder`` swaps in another (f1, f2) -> StateFamily construction; by
    default the regenerated singlets are built once per axis value.
    """
    f1_arr = np.asarray(f1_values, dtype=float)
    f2_arr = np.asarray(f2_values, dtype=float)
    for name, arr in (("f1", f1_arr), ("f2", f2_arr)):
        if arr.size == 0 or np.any(arr <= 0) or np.any(arr >= 1):
            raise ConfigurationError(f"{name} grid values must lie in (0, 1)")
    if not 0.0 <= x_fixed <= 1.0:
        raise ConfigurationError(f"x_fixed must lie in [0, 1], got {x_fixed!r}")
    a, b = DistanceKind.parse(metric_a), DistanceKind.parse(metric_b)
    ph1 = complex(math.cos(f1_phase), math.sin(f1_phase))
    ph2 = complex(math.cos(f2_phase), math.sin(f2_phase))
    diff = np.empty((f1_arr.size, f2_arr.size))
    if builder is None:
        rho_s = singlet()
        regen1 = [regenerate(rho_s, m * ph1) for m in f1_arr]
        regen2 = [regenerate(rho_s, m * ph2) for m in f2_arr]
    for i, m1 in enumerate(f1_arr):
        for j, m2 in enumerate(f2_arr):
            if builder is None:
                ref = regen1[i]
                d = all_distances(ref, mix([(x_fixed, ref), (1.0 - x_fixed, regen2[j])]))
            else:
                d = evaluate(builder(m1 * ph1, m2 * ph2), x_fixed)
            diff[i, j] = d[a] - d[b]
    return GridResult(f1_arr, f2_arr, diff, float(x_fixed), f1_phase, f2_phase)
