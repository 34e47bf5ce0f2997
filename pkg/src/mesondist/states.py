"""Two-meson density matrices and the one-parameter scenario families built from them.

Basis ordering is fixed as (LL, LS, SL, SS), where L and S are the
long- and short-lived neutral kaon states, K_L = (1, 0) and K_S = (0, 1).
For B mesons the same code applies with L/S relabelled as the two mass
eigenstates.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from . import linalg
from .errors import ConfigurationError, DimensionError, UnphysicalStateError
from .linalg import ComplexMatrix

TRACE_TOL = 1e-10
WEIGHT_TOL = 1e-12
RESCALE_TOL = 1e-12
ACCESSIBLE_F = 0.1


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated quantum state.

    Construction checks Hermiticity and unit trace to 1e-10 and that the
    smallest eigenvalue is no lower than -1e-10. ``renormalized`` is set by
    :func:`regenerate` when the trace had to be rescaled by more than 1e-12.
    """

    mat: ComplexMatrix
    renormalized: bool = field(default=False, compare=False)

    def __post_init__(self):
        m = linalg.as_matrix(self.mat)
        object.__setattr__(self, "mat", m)
        if not linalg.is_hermitian(m, linalg.HERMITIAN_TOL):
            raise UnphysicalStateError("density matrix is not Hermitian within 1e-10")
        tr = linalg.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise UnphysicalStateError(f"density matrix trace {tr.real:.12g} is not 1")
        lowest = float(linalg.eigvalsh(m)[-1])
        if lowest < -linalg.NEGATIVE_EIG_TOL:
            raise UnphysicalStateError(f"density matrix has negative eigenvalue {lowest:.3e}")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return linalg.eigvalsh(self.mat)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.mat, dtype=dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


def as_density(state) -> DensityMatrix:
    return state if isinstance(state, DensityMatrix) else DensityMatrix(state)


def pure(vector) -> DensityMatrix:
    """|psi><psi| for a (not necessarily normalized) state vector."""
    psi = np.asarray(vector, dtype=np.complex128)
    psi = psi / np.linalg.norm(psi)
    return DensityMatrix(np.outer(psi, psi.conj()))


def maximally_mixed(n: int = 4) -> DensityMatrix:
    return DensityMatrix(linalg.identity(n) / n)


def singlet() -> DensityMatrix:
    """(|K_L K_S> - |K_S K_L>)/sqrt(2) as a density matrix."""
    m = np.zeros((4, 4), dtype=np.complex128)
    m[1, 1] = m[2, 2] = 0.5
    m[1, 2] = m[2, 1] = -0.5
    return DensityMatrix(m)


@dataclass(frozen=True)
class RegenerationParams:
    """Regeneration amplitude ``f`` of a material slab (dimensionless, complex)."""

    f: complex

    def __post_init__(self):
        object.__setattr__(self, "f", linalg.as_scalar(self.f))

    @classmethod
    def polar(cls, modulus: float, phase: float = 0.0) -> "RegenerationParams":
        return cls(modulus * complex(math.cos(phase), math.sin(phase)))

    @property
    def in_accessible_zone(self) -> bool:
        return abs(self.f) < ACCESSIBLE_F


@dataclass(frozen=True)
class DecoherenceParams:
    """Decoherence rate ``l``; ``tau = 1/l`` is the characteristic time."""

    l: float

    def __post_init__(self):
        l = float(self.l)
        if not (math.isfinite(l) and l > 0):
            raise ConfigurationError(f"decoherence rate l must be finite and > 0, got {self.l!r}")
        object.__setattr__(self, "l", l)

    @property
    def tau(self) -> float:
        return 1.0 / self.l


def _regen_params(p) -> RegenerationParams:
    return p if isinstance(p, RegenerationParams) else RegenerationParams(p)


def regeneration_operator(p) -> ComplexMatrix:
    """Slab regeneration acting on the second meson: I ⊗ [[1, f], [f, 1]] / sqrt(1 + |f|^2).

    Not unitary unless ``f`` is purely imaginary.
    """
    f = _regen_params(p).f
    block = np.array([[1.0, f], [f, 1.0]], dtype=np.complex128)
    u = np.kron(np.eye(2), block) / math.sqrt(1.0 + abs(f) ** 2)
    return linalg.as_matrix(u)


def regenerate(rho, p) -> DensityMatrix:
    """U rho U^dagger rescaled to unit trace.

    For the singlet the trace is preserved exactly and no rescaling happens.
    """
    rho = as_density(rho)
    if rho.dim != 4:
        raise DimensionError(f"regeneration acts on 4x4 states, got dim {rho.dim}")
    u = regeneration_operator(p)
    out = u @ rho.mat @ np.conj(u.T)
    tr = linalg.trace(out).real
    if tr < 1e-12:
        raise UnphysicalStateError(f"regenerated state has degenerate trace {tr:.3e}")
    out = 0.5 * (out + np.conj(out.T)) / tr
    return DensityMatrix(out, renormalized=abs(tr - 1.0) > RESCALE_TOL)


def decohered_singlet(t: float, d) -> DensityMatrix:
    """Singlet whose LS/SL coherences have decayed by exp(-l t)."""
    d = d if isinstance(d, DecoherenceParams) else DecoherenceParams(d)
    if t < 0:
        raise ConfigurationError(f"time t must be >= 0, got {t!r}")
    m = np.zeros((4, 4), dtype=np.complex128)
    m[1, 1] = m[2, 2] = 0.5
    m[1, 2] = m[2, 1] = -0.5 * math.exp(-d.l * t)
    return DensityMatrix(m)


def mix(components: Iterable[tuple[float, object]]) -> DensityMatrix:
    """Convex combination sum_i w_i rho_i; weights must be >= 0 and sum to 1."""
    components = [(float(w), as_density(s)) for w, s in components]
    if not components:
        raise ConfigurationError("mix needs at least one component")
    weights = [w for w, _ in components]
    if any(w < 0 for w in weights):
        raise ConfigurationError(f"mixing weights must be non-negative, got {weights}")
    if abs(math.fsum(weights) - 1.0) > WEIGHT_TOL:
        raise ConfigurationError(f"mixing weights sum to {math.fsum(weights)!r}, not 1")
    dims = {s.dim for _, s in components}
    if len(dims) != 1:
        raise DimensionError(f"cannot mix states of dimensions {sorted(dims)}")
    out = sum(w * s.mat for w, s in components)
    return DensityMatrix(out)


def depolarize(rho, x: float) -> DensityMatrix:
    """x rho + (1 - x) I/4."""
    rho = as_density(rho)
    if rho.dim != 4:
        raise DimensionError(f"depolarize acts on 4x4 states, got dim {rho.dim}")
    if not 0.0 <= x <= 1.0:
        raise ConfigurationError(f"depolarizing fraction x must lie in [0, 1], got {x!r}")
    return DensityMatrix(x * rho.mat + (1.0 - x) * np.eye(4) / 4.0)


class ScenarioKind(str, enum.Enum):
    DECOHERED = "decohered"
    DECOHERED_BG = "decohered-bg"
    SINGLET_REGEN_MIX = "singlet-regen-mix"
    TWO_SLAB_MIX = "two-slab-mix"
    DEPOLARIZED = "depolarized"
    REGEN_DEPOLARIZED = "regen-depolarized"

    def __str__(self):
        return self.value


# parameter names each kind requires, and the symbol it sweeps
_REQUIRED = {
    ScenarioKind.DECOHERED: ("l",),
    ScenarioKind.DECOHERED_BG: ("l", "bg"),
    ScenarioKind.SINGLET_REGEN_MIX: ("f",),
    ScenarioKind.TWO_SLAB_MIX: ("f1", "f2"),
    ScenarioKind.DEPOLARIZED: (),
    ScenarioKind.REGEN_DEPOLARIZED: ("f",),
}
_DEFAULTS = {"l": 1.0}
T_SPAN_IN_TAU = 10.0


@dataclass(frozen=True, eq=False)
class StateFamily:
    """A named curve theta -> DensityMatrix plus the reference state distances are taken from."""

    kind: ScenarioKind
    params: Mapping[str, complex | float]
    parameter_name: str
    domain: tuple[float, float]
    reference: DensityMatrix
    map: Callable[[float], DensityMatrix] = field(repr=False)
    metadata: Mapping[str, object] = field(default_factory=dict)

    def check_domain(self, theta: float) -> None:
        lo, hi = self.domain
        if not (math.isfinite(theta) and lo <= theta <= hi):
            raise ConfigurationError(
                f"{self.parameter_name}={theta!r} outside the {self.kind} domain [{lo}, {hi}]"
            )

    def __call__(self, theta: float) -> DensityMatrix:
        self.check_domain(theta)
        return self.map(theta)

    def describe(self) -> str:
        body = ", ".join(f"{k}={_fmt_param(v)}" for k, v in self.params.items())
        return f"{self.kind}({body})"


def _fmt_param(v) -> str:
    if isinstance(v, complex):
        return f"{v.real:g}" if v.imag == 0 else f"{v:g}"
    return f"{v:g}"


def _parse_kind(kind) -> ScenarioKind:
    try:
        return ScenarioKind(kind)
    except ValueError:
        tokens = ", ".join(k.value for k in ScenarioKind)
        raise ConfigurationError(f"unknown scenario kind {kind!r}; expected one of {tokens}") from None


def _checked_f(name: str, value) -> RegenerationParams:
    try:
        p = RegenerationParams(value)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"parameter {name}: {exc}") from None
    if abs(p.f) >= 1.0:
        raise ConfigurationError(f"parameter {name}: |f| must be < 1, got {abs(p.f):g}")
    return p


def make_family(kind, params: Mapping[str, object] | None = None, **kwargs) -> StateFamily:
    """Build one of the six scenario families.

    ``params`` and keyword arguments are merged; unknown keys are rejected.
    ``l`` defaults to 1, so times are in units of tau.
    """
    kind = _parse_kind(kind)
    given = {**(params or {}), **kwargs}
    required = _REQUIRED[kind]
    extra = set(given) - set(required)
    if extra:
        raise ConfigurationError(f"{kind} does not take parameter(s) {sorted(extra)}")
    values = {k: given.get(k, _DEFAULTS.get(k)) for k in required}
    missing = [k for k, v in values.items() if v is None]
    if missing:
        raise ConfigurationError(f"{kind} requires parameter(s) {missing}")

    rho_s = singlet()
    meta: dict[str, object] = {}

    if kind in (ScenarioKind.DECOHERED, ScenarioKind.DECOHERED_BG):
        try:
            dec = DecoherenceParams(values["l"])
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"parameter l: {exc}") from None
        clean = {"l": dec.l}
        bg = 0.0
        if kind is ScenarioKind.DECOHERED_BG:
            bg = float(values["bg"])
            if not 0.0 <= bg <= 1.0:
                raise ConfigurationError(f"parameter bg must lie in [0, 1], got {bg!r}")
            clean["bg"] = bg

        def fmap(t, dec=dec, bg=bg):
            sigma = decohered_singlet(t, dec)
            return depolarize(sigma, 1.0 - bg) if bg else sigma

        meta["tau"] = dec.tau
        return StateFamily(kind, clean, "t", (0.0, T_SPAN_IN_TAU * dec.tau), rho_s, fmap, meta)

    if kind is ScenarioKind.DEPOLARIZED:
        return StateFamily(kind, {}, "x", (0.0, 1.0), rho_s, lambda x: depolarize(rho_s, x), meta)

    if kind is ScenarioKind.TWO_SLAB_MIX:
        p1, p2 = _checked_f("f1", values["f1"]), _checked_f("f2", values["f2"])
        r1, r2 = regenerate(rho_s, p1), regenerate(rho_s, p2)
        meta["accessible_zone"] = p1.in_accessible_zone and p2.in_accessible_zone
        return StateFamily(
            kind, {"f1": p1.f, "f2": p2.f}, "x", (0.0, 1.0), r1,
            lambda x: mix([(x, r1), (1.0 - x, r2)]), meta,
        )

    p = _checked_f("f", values["f"])
    regen = regenerate(rho_s, p)
    meta["accessible_zone"] = p.in_accessible_zone
    if kind is ScenarioKind.SINGLET_REGEN_MIX:
        fmap = lambda x: mix([(x, rho_s), (1.0 - x, regen)])  # noqa: E731
        return StateFamily(kind, {"f": p.f}, "x", (0.0, 1.0), rho_s, fmap, meta)
    # regen-depolarized
    return StateFamily(
        kind, {"f": p.f}, "x", (0.0, 1.0), regen, lambda x: depolarize(regen, x), meta
    )
