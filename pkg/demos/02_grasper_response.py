"""Whole-grasper behavior: aggregation, shuttle transfer, latch and jaws.

Run from the repository root:

    python demos/02_grasper_response.py
"""

from dataclasses import replace

import numpy as np

from graspsynth import (CantileverSection, LatchState, LatchPhase,
                        MaterialModel, MechanismConfig, PressTrigger,
                        PullRing, VBeamGeometry, aggregate_ring_force,
                        force_curve, grasper_response, latch_step,
                        peak_force, shuttle_transfer_ratio)

geom = VBeamGeometry.from_degrees(40, 1.2, 5, 7)
mat = MaterialModel(youngs_modulus_E=1800)
config = MechanismConfig(
    beam_geometry=geom, n_beams=12, material=mat, latch_travel=8.0,
    jaw_calibration=((3.2, 7.13), (6.4, 15.99), (8.0, 20.52)),
    jaw_section=CantileverSection(out_of_plane_b=3.0, in_plane_h=1.5,
                                  jaw_length=45.0),
    series_stiffness_ks=10.0)

print("== ring-level force from the per-beam curve ==")
curve = force_curve(geom, mat, travel_max=5.0)
for n in (6, 10, 12):
    dy_pk, f_pk = peak_force(aggregate_ring_force(curve, n))
    print(f"n = {n:2d} beams: peak ring force {f_pk:6.2f} N at {dy_pk:.2f} mm")

print("\n== displacement transfer: more beams, stiffer array ==")
for n in (6, 10, 12, 16):
    ratio = shuttle_transfer_ratio(replace(config, n_beams=n), 1.0)
    print(f"n = {n:2d}: shuttle receives {100 * ratio:5.1f}% of ring motion")

print("\n== latch walk-through ==")
state = LatchState(LatchPhase.UNSTRESSED, 0.0)
for event in (PullRing(4.0), PullRing(8.0), PullRing(6.0), PressTrigger()):
    state = latch_step(state, event, config.latch_travel)
    print(f"after {event}: {state.phase.value} at ring {state.ring_displacement} mm")

print("\n== response table over ring displacement ==")
print("ring[mm]  force[N]  shuttle[mm]  jaw[mm]  stress[MPa]  latch")
for d in np.linspace(1.0, 8.0, 8):
    r = grasper_response(config, float(d))
    print(f"{d:7.2f} {r.ring_force:9.3f} {r.shuttle_displacement:11.3f} "
          f"{r.jaw_opening:8.2f} {r.jaw_root_stress:11.2f}  {r.latch.phase.value}")
