"""Closed-form load-deflection model for tilted V-beam flexures.

A V-beam is a straight slender flexure of length L, in-plane thickness T and
out-of-plane width W, inclined at angle theta to the direction normal to the
shuttle travel.  One end is clamped; the other (guided) end translates with
the shuttle, rotation suppressed.  For a shuttle travel dy the guided-end
deflections and loads are expressed through the non-dimensional quantities

    x_o = -2 dy sin(theta) / L      (axial deflection)
    y_o = -2 dy cos(theta) / L      (transverse deflection)
    t   =  2 T / L
    f_o =  F_o L^2 / (4 E I),  p_o = P_o L^2 / (4 E I),  m_o = M_o L / (2 E I)

with I = W T^3 / 12.  A necessary (not sufficient) condition for a second
stable equilibrium at travel dy is

    d1 = -4.652 cos^2(theta)/L^2 dy + 6.514 sin(theta)/L dy - 21.46 T^2/L^2 >= 0.

On the d1 >= 0 branch the loads are f_o = -4.8618 y_o, p_o = -9.8837 (the
constant is the fixed-guided buckling scale, ~pi^2).  Otherwise p_o is the
real root, continuous with p_o = 0 at dy = 0, of a cubic in p with
coefficients k1..k4 built from (t, x_o, y_o), and f_o follows from a rational
expression in that root.  The shuttle-direction actuation force is

    F = -(4 E I f_o / L^2 cos(theta) + 4 E I p_o / L^2 sin(theta)).

All lengths are mm, forces N, moduli MPa (= N/mm^2); angles are radians
internally and degrees only at interface boundaries.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Tuple, Union

import numpy as np

from .errors import NumericalError, SingularityError, ValidationError

log = logging.getLogger(__name__)

BISTABLE_FO_SLOPE = -4.8618
BISTABLE_PO = -9.8837

# Continuation steps used when solving the cubic branch for a single state.
_HOMOTOPY_STEPS = 64

# Default number of sweep samples; resolves the ~1.1 mm branch crossover of
# Table-scale geometry at 0.01 mm resolution over a 5 mm travel.
DEFAULT_CURVE_SAMPLES = 500


class Branch(Enum):
    """Which load-deflection branch produced a state."""

    BISTABLE = "Bistable"
    MONOSTABLE = "Monostable"


@dataclass(frozen=True)
class VBeamGeometry:
    """Tilted flexure dimensions.  Angle stored in radians."""

    length_L: float
    thickness_T: float
    width_W: float
    tilt_theta: float

    def __post_init__(self):
        if not self.length_L > 0:
            raise ValidationError("length_L must be positive")
        if not self.thickness_T > 0:
            raise ValidationError("thickness_T must be positive")
        if not self.width_W > 0:
            raise ValidationError("width_W must be positive")
        if not (0 <= self.tilt_theta < math.pi / 2):
            raise ValidationError("tilt_theta must lie in [0, pi/2)")
        if not self.thickness_T < self.length_L:
            raise ValidationError(
                "thickness_T must be smaller than length_L (slender beam)")

    @classmethod
    def from_degrees(cls, length_L, thickness_T, width_W, tilt_deg):
        return cls(length_L, thickness_T, width_W, math.radians(tilt_deg))

    @property
    def second_moment(self) -> float:
        """In-plane bending second moment of area, W T^3 / 12 [mm^4]."""
        return self.width_W * self.thickness_T ** 3 / 12.0

    @property
    def area(self) -> float:
        """Cross-section area W T [mm^2]."""
        return self.width_W * self.thickness_T


@dataclass(frozen=True)
class MaterialModel:
    """Linear elastic material; Poisson ratio is carried for the FE solver."""

    youngs_modulus_E: float
    poisson_ratio: float = 0.3

    def __post_init__(self):
        if not self.youngs_modulus_E > 0:
            raise ValidationError("youngs_modulus_E must be positive")
        if not (0 <= self.poisson_ratio < 0.5):
            raise ValidationError("poisson_ratio must lie in [0, 0.5)")


@dataclass(frozen=True)
class NormalizedDeflection:
    """Non-dimensional guided-end deflections for a travel delta_y."""

    x_o: float
    y_o: float
    t: float
    delta_y: float


@dataclass(frozen=True)
class MonostableIntermediates:
    """Cubic coefficients and closed-form root data for the d1 < 0 branch.

    k1..k4 are the cubic coefficients in p; c1, c2 the nested radicals of the
    closed-form (Cardano) solution; p1 the closed-form real root that the
    force expression consumes.  c2 is complex when the cubic has three real
    roots (the casus irreducibilis); p1 is always the real root on the branch.
    The generating state (t, x_o, y_o) is kept so the continuation solver can
    rescale the deflection.
    """

    k1: float
    k2: float
    k3: float
    k4: float
    c1: float
    c2: Union[float, complex]
    p1: float
    t: float = 0.0
    x_o: float = 0.0
    y_o: float = 0.0

    def __post_init__(self):
        if not self.k1 > 0:
            raise ValidationError("k1 must be positive")

    def cubic(self, p: float) -> float:
        return ((self.k1 * p + self.k2) * p + self.k3) * p + self.k4


@dataclass(frozen=True)
class BeamLoadState:
    """Normalized guided-end loads at one travel.

    m_o is never produced by the load model and stays None rather than being
    given an invented value.
    """

    f_o: float
    p_o: float
    branch: Branch
    d1_value: float
    m_o: Optional[float] = None


class CurveSample(NamedTuple):
    delta_y: float
    force: float
    branch: Branch
    f_o: float
    p_o: float


@dataclass(frozen=True, eq=False)
class ForceDisplacementCurve:
    """Sampled (travel, force) path with branch annotations.

    Forces are the symmetric double V-beam values of the closed-form model;
    per-beam and ring-level aggregation live in the mechanism layer.  Arrays
    are read-only; delta_y is strictly increasing and starts above zero.
    """

    delta_y: np.ndarray
    force: np.ndarray
    f_o: np.ndarray
    p_o: np.ndarray
    branches: Tuple[Branch, ...]
    geometry: VBeamGeometry
    material: MaterialModel

    def __post_init__(self):
        for name in ("delta_y", "force", "f_o", "p_o"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.delta_y.size == 0:
            raise ValidationError("curve must contain at least one sample")
        if not np.all(np.diff(self.delta_y) > 0):
            raise ValidationError("delta_y samples must be strictly increasing")
        if not self.delta_y[0] > 0:
            raise ValidationError("first sample must be at delta_y > 0")
        n = self.delta_y.size
        if not (self.force.size == self.f_o.size == self.p_o.size ==
                len(self.branches) == n):
            raise ValidationError("curve arrays must share one length")

    def __len__(self):
        return int(self.delta_y.size)

    @property
    def samples(self) -> Tuple[CurveSample, ...]:
        return tuple(
            CurveSample(float(d), float(f), b, float(fo), float(po))
            for d, f, b, fo, po in zip(
                self.delta_y, self.force, self.branches, self.f_o, self.p_o))

    def with_force(self, force: np.ndarray) -> "ForceDisplacementCurve":
        """Copy of the curve with a replaced force array (same grid)."""
        return ForceDisplacementCurve(
            self.delta_y.copy(), np.asarray(force, dtype=float),
            self.f_o.copy(), self.p_o.copy(), self.branches,
            self.geometry, self.material)


def normalize_deflection(geom: VBeamGeometry, delta_y: float) -> NormalizedDeflection:
    """Convert a shuttle travel into the non-dimensional deflection state."""
    if delta_y < 0:
        raise ValidationError("delta_y must be non-negative")
    return NormalizedDeflection(
        x_o=-2.0 * delta_y * math.sin(geom.tilt_theta) / geom.length_L,
        y_o=-2.0 * delta_y * math.cos(geom.tilt_theta) / geom.length_L,
        t=2.0 * geom.thickness_T / geom.length_L,
        delta_y=delta_y,
    )


def bistability_margin(geom: VBeamGeometry, delta_y: float) -> Tuple[float, bool]:
    """Evaluate the necessary bistability criterion d1 at a travel.

    Returns (d1, satisfied) with satisfied <=> d1 >= 0.  d1 is affine in
    delta_y with a strictly negative value at delta_y = 0.
    """
    if delta_y < 0:
        raise ValidationError("delta_y must be non-negative")
    L = geom.length_L
    th = geom.tilt_theta
    d1 = (-4.652 * math.cos(th) ** 2 / L ** 2 * delta_y
          + 6.514 * math.sin(th) / L * delta_y
          - 21.46 * geom.thickness_T ** 2 / L ** 2)
    return d1, d1 >= 0.0


def bistable_crossover(geom: VBeamGeometry) -> float:
    """Travel at which d1 changes sign; inf when d1 stays negative.

    d1(dy) = a dy + b with b < 0, so the crossover is -b/a when the slope a
    is positive and never occurs otherwise.
    """
    L = geom.length_L
    th = geom.tilt_theta
    a = -4.652 * math.cos(th) ** 2 / L ** 2 + 6.514 * math.sin(th) / L
    b = -21.46 * geom.thickness_T ** 2 / L ** 2
    if a <= 0:
        return math.inf
    return -b / a


def _k_coefficients(t: float, x_o: float, y_o: float):
    k1 = 4.0 * t ** 2 / 675.0 + y_o ** 2 / 42000.0
    k2 = 16.0 * t ** 2 / 45.0 - 17.0 * y_o ** 2 / 2100.0 - 8.0 * x_o / 225.0
    k3 = 16.0 * t ** 2 / 3.0 - 96.0 * y_o ** 2 / 175.0 - 32.0 * x_o / 15.0
    k4 = -48.0 * y_o ** 2 / 5.0 - 32.0 * x_o
    return k1, k2, k3, k4


def _cardano_root(k1, k2, k3, k4):
    """Closed-form real root of the cubic, plus the nested radicals (c1, c2).

    Uses the resolvent c1 = -k2^2 + 3 k1 k3 and the cube-root term
    c2 = cbrt(-2 k2^3 + 9 k1 k2 k3 - 27 k1^2 k4 + sqrt(4 c1^3 + (...)^2));
    the root is -k2/(3 k1) - cbrt(2) c1 / (3 k1 c2) + c2 / (3 cbrt(2) k1).
    When the inner square root turns negative (three real roots) c2 is
    complex and the expression is evaluated in complex arithmetic; its real
    part is then an exact real root.
    """
    c1 = -k2 ** 2 + 3.0 * k1 * k3
    inner = -2.0 * k2 ** 3 + 9.0 * k1 * k2 * k3 - 27.0 * k1 ** 2 * k4
    rad = 4.0 * c1 ** 3 + inner ** 2
    cbrt2 = 2.0 ** (1.0 / 3.0)
    if rad >= 0.0:
        c2 = float(np.cbrt(inner + math.sqrt(rad)))
        if c2 == 0.0:
            # c1 = inner = 0: triple root.
            return -k2 / (3.0 * k1), c1, c2
        root = -k2 / (3.0 * k1) - cbrt2 * c1 / (3.0 * k1 * c2) \
            + c2 / (3.0 * cbrt2 * k1)
        return root, c1, c2
    c2 = (inner + complex(0.0, math.sqrt(-rad))) ** (1.0 / 3.0)
    root = (-k2 / (3.0 * k1) - cbrt2 * c1 / (3.0 * k1 * c2)
            + c2 / (3.0 * cbrt2 * k1))
    return root.real, c1, c2


def _real_cubic_roots(k1, k2, k3, k4):
    """All real roots of k1 p^3 + k2 p^2 + k3 p + k4, k1 != 0."""
    b = k2 / k1
    c = k3 / k1
    d = k4 / k1
    # depressed form q^3 + pp q + qq with p = q - b/3
    pp = c - b * b / 3.0
    qq = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    shift = -b / 3.0
    disc = (qq / 2.0) ** 2 + (pp / 3.0) ** 3
    if disc > 0.0:
        s = math.sqrt(disc)
        u = np.cbrt(-qq / 2.0 + s)
        v = np.cbrt(-qq / 2.0 - s)
        return [float(u + v + shift)]
    if pp == 0.0:
        return [float(np.cbrt(-qq) + shift)]
    m = 2.0 * math.sqrt(-pp / 3.0)
    arg = 3.0 * qq / (pp * m)
    arg = min(1.0, max(-1.0, arg))
    phi = math.acos(arg) / 3.0
    return sorted(
        float(m * math.cos(phi - 2.0 * math.pi * k / 3.0) + shift)
        for k in range(3))


def monostable_intermediates(nd: NormalizedDeflection) -> MonostableIntermediates:
    """Build the cubic coefficients and closed-form root data for a state."""
    k1, k2, k3, k4 = _k_coefficients(nd.t, nd.x_o, nd.y_o)
    p1, c1, c2 = _cardano_root(k1, k2, k3, k4)
    return MonostableIntermediates(
        k1=k1, k2=k2, k3=k3, k4=k4, c1=c1, c2=c2, p1=p1,
        t=nd.t, x_o=nd.x_o, y_o=nd.y_o)


def _consistent_with_state(inter: MonostableIntermediates) -> bool:
    ks = _k_coefficients(inter.t, inter.x_o, inter.y_o)
    ref = max(1.0, abs(inter.k4))
    return all(abs(a - b) <= 1e-12 * ref
               for a, b in zip(ks, (inter.k1, inter.k2, inter.k3, inter.k4)))


def solve_monostable_cubic(inter: MonostableIntermediates) -> float:
    """Real root of the cubic on the branch continuous with p = 0 at rest.

    The branch is tracked by continuation: the deflection (x_o, y_o) is
    scaled from zero to its target in small steps and at each step the real
    root nearest the previous one is kept.  For intermediates built by hand
    (no generating state) the constant term k4 is ramped instead; both ramps
    start at the p = 0 root.  The result is checked against the closed-form
    root p1; a disagreement above 1e-6 relative is logged as a warning.

    In the physically reachable monostable domain the cubic has exactly one
    real root, so the tracking never faces an ambiguous choice there.
    """
    if inter.x_o == 0.0 and inter.y_o == 0.0 and inter.k4 == 0.0:
        return 0.0

    p = 0.0
    if _consistent_with_state(inter):
        for i in range(1, _HOMOTOPY_STEPS + 1):
            s = i / _HOMOTOPY_STEPS
            ks = _k_coefficients(inter.t, s * inter.x_o, s * inter.y_o)
            roots = _real_cubic_roots(*ks)
            p = min(roots, key=lambda r: abs(r - p))
    else:
        for i in range(1, _HOMOTOPY_STEPS + 1):
            s = i / _HOMOTOPY_STEPS
            roots = _real_cubic_roots(inter.k1, inter.k2, inter.k3, s * inter.k4)
            p = min(roots, key=lambda r: abs(r - p))

    # one Newton polish on the exact coefficients
    deriv = (3.0 * inter.k1 * p + 2.0 * inter.k2) * p + inter.k3
    if deriv != 0.0:
        p -= inter.cubic(p) / deriv

    bound = 1e-9 * max(1.0, abs(inter.k4))
    if abs(inter.cubic(p)) >= bound:
        raise NumericalError(
            f"cubic residual {inter.cubic(p):.3e} exceeds bound {bound:.3e}")

    scale = max(abs(p), abs(inter.p1))
    if scale > 1e-9 and abs(p - inter.p1) > 1e-6 * scale:
        log.warning(
            "closed-form cubic root %.9g disagrees with continuation root %.9g",
            inter.p1, p)
    return p


def _rational_fo(y_o: float, p1: float) -> float:
    """Transverse load from the axial root on the cubic branch."""
    den = 4.0 + 2.0 * p1 / 15.0 - 11.0 * p1 ** 2 / 6300.0
    if abs(den) < 1e-9:
        raise SingularityError(
            f"force expression denominator {den:.3e} is numerically singular")
    num = (-6.0 - p1 / 10.0 + p1 ** 2 / 1400.0) ** 2
    return y_o / 2.0 * ((12.0 + 6.0 * p1 / 5.0 + p1 ** 2 / 700.0) - num / den)


def branch_loads(geom: VBeamGeometry, delta_y: float) -> BeamLoadState:
    """Guided-end normalized loads at a travel, with branch selection."""
    d1, satisfied = bistability_margin(geom, delta_y)
    if delta_y == 0.0:
        return BeamLoadState(f_o=0.0, p_o=0.0, branch=Branch.MONOSTABLE,
                             d1_value=d1)
    nd = normalize_deflection(geom, delta_y)
    if satisfied:
        return BeamLoadState(f_o=BISTABLE_FO_SLOPE * nd.y_o, p_o=BISTABLE_PO,
                             branch=Branch.BISTABLE, d1_value=d1)
    inter = monostable_intermediates(nd)
    p_o = solve_monostable_cubic(inter)
    return BeamLoadState(f_o=_rational_fo(nd.y_o, p_o), p_o=p_o,
                         branch=Branch.MONOSTABLE, d1_value=d1)


def actuation_force(geom: VBeamGeometry, mat: MaterialModel,
                    delta_y: float) -> float:
    """Shuttle-direction force of the symmetric double V-beam at a travel [N]."""
    state = branch_loads(geom, delta_y)
    stiff = 4.0 * mat.youngs_modulus_E * geom.second_moment / geom.length_L ** 2
    return -(stiff * state.f_o * math.cos(geom.tilt_theta)
             + stiff * state.p_o * math.sin(geom.tilt_theta))


def force_curve(geom: VBeamGeometry, mat: MaterialModel, travel_max: float,
                n_samples: int = DEFAULT_CURVE_SAMPLES) -> ForceDisplacementCurve:
    """Uniformly sampled force-displacement curve over (0, travel_max].

    The cubic-branch root is tracked across the ascending samples, which for
    a fixed geometry follows the same scaled-deflection path as the per-state
    continuation and therefore yields identical roots.
    """
    if not travel_max > 0:
        raise ValidationError("travel_max must be positive")
    if n_samples < 2:
        raise ValidationError("n_samples must be at least 2")

    th = geom.tilt_theta
    L = geom.length_L
    stiff = 4.0 * mat.youngs_modulus_E * geom.second_moment / L ** 2
    cos_t, sin_t = math.cos(th), math.sin(th)
    t = 2.0 * geom.thickness_T / L

    dys = travel_max * np.arange(1, n_samples + 1) / n_samples
    f_o = np.empty(n_samples)
    p_o = np.empty(n_samples)
    branches = []
    p_prev = 0.0
    worst_cardano = 0.0
    for i, dy in enumerate(dys):
        d1, satisfied = bistability_margin(geom, float(dy))
        x_o = -2.0 * dy * sin_t / L
        y_o = -2.0 * dy * cos_t / L
        if satisfied:
            f_o[i] = BISTABLE_FO_SLOPE * y_o
            p_o[i] = BISTABLE_PO
            branches.append(Branch.BISTABLE)
        else:
            ks = _k_coefficients(t, x_o, y_o)
            roots = _real_cubic_roots(*ks)
            p_prev = min(roots, key=lambda r: abs(r - p_prev))
            closed, _, _ = _cardano_root(*ks)
            scale = max(abs(p_prev), abs(closed))
            if scale > 1e-9:
                worst_cardano = max(worst_cardano,
                                    abs(p_prev - closed) / scale)
            f_o[i] = _rational_fo(y_o, p_prev)
            p_o[i] = p_prev
            branches.append(Branch.MONOSTABLE)
    if worst_cardano > 1e-6:
        log.warning(
            "closed-form cubic roots deviate from the tracked branch by up "
            "to %.3g relative over the sweep", worst_cardano)
    force = -(stiff * f_o * cos_t + stiff * p_o * sin_t)
    return ForceDisplacementCurve(
        delta_y=dys, force=force, f_o=f_o, p_o=p_o,
        branches=tuple(branches), geometry=geom, material=mat)


def peak_force(curve: ForceDisplacementCurve) -> Tuple[float, float]:
    """(delta_y, force) of the maximal-force sample; ties take the smaller travel."""
    if len(curve) == 0:
        raise ValidationError("curve is empty")
    i = int(np.argmax(curve.force))
    return float(curve.delta_y[i]), float(curve.force[i])
