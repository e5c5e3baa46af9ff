"""Single V-beam walk-through: normalization, bistability margin, force curve.

Run from the repository root:

    python demos/01_beam_force_curve.py
"""

import numpy as np

from graspsynth import (MaterialModel, VBeamGeometry, actuation_force,
                        bistability_margin, bistable_crossover, branch_loads,
                        force_curve, normalize_deflection, peak_force)

# Reference flexure: 40 mm long, 1.2 mm thick, 5 mm wide, tilted 7 degrees.
geom = VBeamGeometry.from_degrees(40, 1.2, 5, 7)
mat = MaterialModel(youngs_modulus_E=1800)

print("== normalized deflection at 5 mm travel ==")
nd = normalize_deflection(geom, 5.0)
print(f"x_o = {nd.x_o:.6f}, y_o = {nd.y_o:.6f}, t = {nd.t:.3f}")

print("\n== bistability margin over travel ==")
for dy in (0.0, 0.5, 1.0, 1.5, 2.0, 5.0):
    d1, ok = bistability_margin(geom, dy)
    print(f"dy = {dy:4.1f} mm  d1 = {d1:+.5f}  second stable state possible: {ok}")
print(f"margin changes sign at {bistable_crossover(geom):.4f} mm")

print("\n== branch loads and actuation force ==")
for dy in (0.5, 1.0, 2.0, 3.5, 5.0):
    st = branch_loads(geom, dy)
    F = actuation_force(geom, mat, dy)
    print(f"dy = {dy:4.1f} mm  branch = {st.branch.value:<10} "
          f"f_o = {st.f_o:+.4f}  p_o = {st.p_o:+.4f}  F = {F:+.4f} N")

print("\n== sampled curve and its peak ==")
curve = force_curve(geom, mat, travel_max=5.0, n_samples=500)
dy_pk, f_pk = peak_force(curve)
print(f"{len(curve)} samples; peak {f_pk:.3f} N at {dy_pk:.3f} mm travel")
flip = int(np.argmax([b.value == "Bistable" for b in curve.branches]))
print(f"branch flips to Bistable at sample {flip} (dy = {curve.delta_y[flip]:.3f} mm)")
print("force declines toward zero at full travel:",
      f"F(5.0) = {curve.force[-1]:.4f} N")
