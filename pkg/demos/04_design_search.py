"""Geometry synthesis: grid search plus pattern refinement to a force target.

Run from the repository root:

    python demos/04_design_search.py
"""

import math

from graspsynth import (DesignSpec, MaterialModel, evaluate_candidate,
                        grid_search, refine, VBeamGeometry)

mat = MaterialModel(youngs_modulus_E=1800)
spec = DesignSpec(
    target_force=20.0,
    target_travel=5.0,
    bounds={
        "length_L": (36.0, 44.0),
        "thickness_T": (1.0, 1.4),
        "width_W": (4.0, 6.0),
        "tilt_theta": (math.radians(5.0), math.radians(9.0)),
        "n_beams": (10, 14),
    },
    material=mat,
    stress_limit=120.0,
    length_budget=200.0,
)

print("== scoring the reference geometry against a 20 N target ==")
ref = evaluate_candidate(spec, VBeamGeometry.from_degrees(40, 1.2, 5, 7), 12)
print(f"peak ring force {ref.peak_force:.2f} N, objective {ref.objective:.4f}, "
      f"violations {ref.violations or 'none'}")

print("\n== coarse grid search ==")
density = {"length_L": 3, "thickness_T": 3, "width_W": 3,
           "tilt_theta": 3, "n_beams": 3}
ranked = grid_search(spec, density)
print(f"{len(ranked)} candidates; top three:")
for c in ranked[:3]:
    g = c.geometry
    print(f"  L={g.length_L:5.1f} T={g.thickness_T:.2f} W={g.width_W:.1f} "
          f"theta={math.degrees(g.tilt_theta):.1f} n={c.n_beams} "
          f"peak={c.peak_force:6.2f} N objective={c.objective:.4f}")

print("\n== pattern refinement of the best grid point ==")
best = refine(spec, ranked[0], max_evals=150)
g = best.geometry
print(f"refined: L={g.length_L:.2f} T={g.thickness_T:.3f} W={g.width_W:.2f} "
      f"theta={math.degrees(g.tilt_theta):.2f} n={best.n_beams}")
print(f"peak {best.peak_force:.3f} N, objective {best.objective:.5f}, "
      f"budget exhausted: {best.exhausted}")
