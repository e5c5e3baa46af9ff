"""Whole-grasper behavior assembled from single-beam results.

The closed-form model reports the symmetric double V-beam force; the device
uses single V-beams, so the per-beam force is taken as half of that value and
the ring-level force as the halved force times the beam count.  This halving
is the device-level approximation the finite-element oracle is meant to
falsify, and it is kept in this one place so it stays testable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import numpy as np

from .beam import (ForceDisplacementCurve, MaterialModel, VBeamGeometry,
                   actuation_force)
from .errors import NumericalError, ValidationError

# Finite-difference step for the single-beam tangent stiffness [mm].
STIFFNESS_FD_STEP = 1e-3

# Fraction of the latch travel over which the engagement ramp acts.
LATCH_RAMP_SPAN = 0.05


@dataclass(frozen=True)
class CantileverSection:
    """Rectangular jaw cross-section and cantilever length."""

    out_of_plane_b: float
    in_plane_h: float
    jaw_length: float

    def __post_init__(self):
        if not self.out_of_plane_b > 0:
            raise ValidationError("out_of_plane_b must be positive")
        if not self.in_plane_h > 0:
            raise ValidationError("in_plane_h must be positive")
        if not self.jaw_length > 0:
            raise ValidationError("jaw_length must be positive")


class LatchPhase(Enum):
    UNSTRESSED = "Unstressed"
    STRESSED_LATCHED = "StressedLatched"


@dataclass(frozen=True)
class LatchState:
    phase: LatchPhase
    ring_displacement: float


@dataclass(frozen=True)
class PullRing:
    """Pull the actuation ring proximally by d mm."""

    d: float


@dataclass(frozen=True)
class PressTrigger:
    """Press the trigger, releasing the latch."""


LatchEvent = Union[PullRing, PressTrigger]


@dataclass(frozen=True)
class MechanismConfig:
    """Whole-grasper description.

    jaw_calibration anchors map trigger (ring) displacement to jaw opening
    and implicitly include (0, 0); series_stiffness_ks lumps the handle and
    ring compliance between the ring and the beam shuttle.  The default ks of
    10 N/mm is an uncalibrated placeholder: quantitative transfer claims need
    a measured value.  latch_ramp_factor scales the ring force at full latch
    engagement; only the existence of the stiffening is documented, not its
    magnitude.
    """

    beam_geometry: VBeamGeometry
    n_beams: int
    material: MaterialModel
    latch_travel: float
    jaw_calibration: Tuple[Tuple[float, float], ...]
    jaw_section: CantileverSection
    series_stiffness_ks: float = 10.0
    overall_length_budget: float = 200.0
    latch_ramp_factor: float = 1.5

    def __post_init__(self):
        if self.n_beams < 1:
            raise ValidationError("n_beams must be at least 1")
        if not self.latch_travel > 0:
            raise ValidationError("latch_travel must be positive")
        if not self.series_stiffness_ks > 0:
            raise ValidationError("series_stiffness_ks must be positive")
        if not self.overall_length_budget > 0:
            raise ValidationError("overall_length_budget must be positive")
        if self.latch_ramp_factor < 1.0:
            raise ValidationError("latch_ramp_factor must be at least 1")
        anchors = tuple((float(t), float(j)) for t, j in self.jaw_calibration)
        object.__setattr__(self, "jaw_calibration", anchors)
        prev = (0.0, 0.0)
        if not anchors:
            raise ValidationError("jaw_calibration needs at least one anchor")
        for t, j in anchors:
            if not (t > prev[0] and j > prev[1]):
                raise ValidationError(
                    "jaw_calibration anchors must increase strictly in both "
                    "coordinates starting from the implicit (0, 0)")
            prev = (t, j)


@dataclass(frozen=True)
class GrasperResponse:
    ring_force: float
    shuttle_displacement: float
    jaw_opening: float
    latch: LatchState
    jaw_root_stress: float

    def __post_init__(self):
        values = (self.ring_force, self.shuttle_displacement,
                  self.jaw_opening, self.jaw_root_stress)
        if not all(math.isfinite(v) for v in values):
            raise ValidationError("response magnitudes must be finite")
        if self.jaw_opening < 0:
            raise ValidationError("jaw_opening must be non-negative")


def aggregate_ring_force(double_beam_curve: ForceDisplacementCurve,
                         n_beams: int) -> ForceDisplacementCurve:
    """Ring-level curve: halve the double-beam force, times the beam count."""
    if n_beams < 1:
        raise ValidationError("n_beams must be at least 1")
    if len(double_beam_curve) == 0:
        raise ValidationError("curve is empty")
    return double_beam_curve.with_force(
        double_beam_curve.force / 2.0 * n_beams)


def single_beam_force(geom: VBeamGeometry, mat: MaterialModel,
                      delta_y: float) -> float:
    """Per-beam shuttle-direction force, half the double V-beam value [N]."""
    return actuation_force(geom, mat, delta_y) / 2.0


def beam_tangent_stiffness(config: MechanismConfig, delta_y: float) -> float:
    """Single-beam tangent stiffness dF/d(dy), clamped to >= 0 [N/mm].

    Central finite difference with a fixed step; the lower point is clamped
    at zero travel.  Negative tangents (the snap region) count as zero
    resistance for displacement-transfer purposes.
    """
    h = STIFFNESS_FD_STEP
    lo = max(0.0, delta_y - h)
    hi = delta_y + h
    f_lo = single_beam_force(config.beam_geometry, config.material, lo)
    f_hi = single_beam_force(config.beam_geometry, config.material, hi)
    k = (f_hi - f_lo) / (hi - lo)
    if not math.isfinite(k):
        raise NumericalError("tangent stiffness is not finite")
    return max(0.0, k)


def shuttle_transfer_ratio(config: MechanismConfig, delta_y: float) -> float:
    """Fraction of ring displacement reaching the shuttle, in (0, 1].

    Series-spring split: ratio = ks / (ks + n k_b) with k_b the clamped
    per-beam tangent stiffness at the given travel.
    """
    k_b = beam_tangent_stiffness(config, delta_y)
    ks = config.series_stiffness_ks
    return ks / (ks + config.n_beams * k_b)


def jaw_opening(config: MechanismConfig, trigger_disp: float) -> float:
    """Jaw opening from trigger displacement by calibrated interpolation [mm].

    Piecewise linear through (0, 0) and the calibration anchors; evaluation
    outside the calibrated span is refused because the device diverges from
    any calibration there.
    """
    t_max = config.jaw_calibration[-1][0]
    if not (0.0 <= trigger_disp <= t_max):
        raise ValidationError(
            f"trigger_disp {trigger_disp:g} outside the calibrated span "
            f"[0, {t_max:g}] mm")
    ts = [0.0] + [t for t, _ in config.jaw_calibration]
    js = [0.0] + [j for _, j in config.jaw_calibration]
    return float(np.interp(trigger_disp, ts, js))


def cantilever_stress(moment: float, section: CantileverSection) -> float:
    """Peak bending stress of a rectangular section, 6 M / (b h^2) [MPa]."""
    return 6.0 * moment / (section.out_of_plane_b * section.in_plane_h ** 2)


def latch_step(state: LatchState, event: LatchEvent,
               latch_travel: float) -> LatchState:
    """Advance the two-phase latch state machine by one event.

    Pulling past the latch travel engages the notch; pulls short of it
    return elastically (modeled as staying unlatched at the pulled position);
    pressing the trigger releases a latched mechanism and is a no-op on an
    unlatched one.
    """
    if isinstance(event, PullRing):
        if event.d < 0:
            raise ValidationError("ring displacement must be non-negative")
        if state.phase is LatchPhase.UNSTRESSED:
            if event.d >= latch_travel:
                return LatchState(LatchPhase.STRESSED_LATCHED, event.d)
            return LatchState(LatchPhase.UNSTRESSED, event.d)
        return LatchState(LatchPhase.STRESSED_LATCHED,
                          max(event.d, latch_travel))
    if isinstance(event, PressTrigger):
        if state.phase is LatchPhase.STRESSED_LATCHED:
            return LatchState(LatchPhase.UNSTRESSED, 0.0)
        return state
    raise ValidationError(f"unknown latch event {event!r}")


def _latch_ramp(config: MechanismConfig, ring_disp: float) -> float:
    """Smooth force multiplier over the final span of the latch travel."""
    start = (1.0 - LATCH_RAMP_SPAN) * config.latch_travel
    z = (ring_disp - start) / (LATCH_RAMP_SPAN * config.latch_travel)
    z = min(1.0, max(0.0, z))
    smooth = z * z * (3.0 - 2.0 * z)
    return 1.0 + (config.latch_ramp_factor - 1.0) * smooth


def grasper_response(config: MechanismConfig, ring_disp: float) -> GrasperResponse:
    """Full response of the grasper at one ring displacement.

    The ring displacement splits between beam travel and handle compliance
    through the transfer ratio evaluated at the ring displacement itself; the
    exact split is not pinned down by the device description, so this is a
    declared simplification.  The jaw responds to the ring displacement per
    the calibration, and the jaw root stress follows from the linear
    cantilever tip relation (small-deflection only).
    """
    if ring_disp < 0:
        raise ValidationError("ring_disp must be non-negative")
    if ring_disp == 0.0:
        return GrasperResponse(
            ring_force=0.0, shuttle_displacement=0.0, jaw_opening=0.0,
            latch=LatchState(LatchPhase.UNSTRESSED, 0.0), jaw_root_stress=0.0)

    ratio = shuttle_transfer_ratio(config, ring_disp)
    shuttle = ratio * ring_disp
    base = config.n_beams * single_beam_force(
        config.beam_geometry, config.material, shuttle)
    ring_force = base * _latch_ramp(config, ring_disp)

    opening = jaw_opening(config, ring_disp)
    latch = latch_step(LatchState(LatchPhase.UNSTRESSED, 0.0),
                       PullRing(ring_disp), config.latch_travel)

    sec = config.jaw_section
    i_jaw = sec.out_of_plane_b * sec.in_plane_h ** 3 / 12.0
    tip_force = (3.0 * config.material.youngs_modulus_E * i_jaw * opening
                 / sec.jaw_length ** 3)
    stress = cantilever_stress(tip_force * sec.jaw_length, sec)

    return GrasperResponse(
        ring_force=ring_force, shuttle_displacement=shuttle,
        jaw_opening=opening, latch=latch, jaw_root_stress=stress)
