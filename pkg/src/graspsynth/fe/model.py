"""Planar frame models for the geometrically nonlinear solver.

Node coordinates are mm; each node carries (u_x, u_y, rotation) freedoms.
The shuttle travels along -Y, so the direction normal to shuttle travel is
+X and a V-beam tilted by theta runs along (cos theta, sin theta).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from ..beam import VBeamGeometry
from ..errors import ValidationError
from ..mechanism import MechanismConfig

UX, UY, ROT = 0, 1, 2

DEFAULT_ELEMENTS_PER_BEAM = 16


@dataclass(frozen=True)
class BeamElement:
    node_i: int
    node_j: int
    E: float
    A: float
    I: float


@dataclass
class FrameModel:
    """Mesh, constraints and drive pattern of a planar frame.

    fixed marks constrained freedoms per node; prescribed maps (node, dof)
    to the displacement applied per unit of the control parameter; ties make
    a slave freedom share the equation of a master freedom; point_springs
    couple two freedoms through a linear spring.
    """

    nodes: np.ndarray
    elements: List[BeamElement]
    fixed: np.ndarray
    prescribed: Dict[Tuple[int, int], float] = field(default_factory=dict)
    ties: List[Tuple[Tuple[int, int], Tuple[int, int]]] = field(default_factory=list)
    point_springs: List[Tuple[int, int, int, int, float]] = field(default_factory=list)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.fixed = np.asarray(self.fixed, dtype=bool)
        n = self.nodes.shape[0]
        if self.nodes.ndim != 2 or self.nodes.shape[1] != 2:
            raise ValidationError("nodes must be an (n, 2) coordinate array")
        if self.fixed.shape != (n, 3):
            raise ValidationError("fixed flags must be an (n, 3) bool array")
        for el in self.elements:
            if not (0 <= el.node_i < n and 0 <= el.node_j < n):
                raise ValidationError(
                    f"element ({el.node_i}, {el.node_j}) references a missing node")
            length = float(np.hypot(*(self.nodes[el.node_j] - self.nodes[el.node_i])))
            if length < 1e-12:
                raise ValidationError(
                    f"element ({el.node_i}, {el.node_j}) has zero length")
        if not np.any(self.fixed.all(axis=1)):
            raise ValidationError(
                "at least one node must be fully constrained (rigid-body modes)")
        for (node, dof) in self.prescribed:
            if not (0 <= node < n and dof in (UX, UY, ROT)):
                raise ValidationError(f"prescribed freedom ({node}, {dof}) is invalid")
            if self.fixed[node, dof]:
                raise ValidationError(
                    f"freedom ({node}, {dof}) cannot be both fixed and prescribed")

    @property
    def n_nodes(self) -> int:
        return int(self.nodes.shape[0])


def build_vbeam_mesh(geom: VBeamGeometry,
                     n_elements: int = DEFAULT_ELEMENTS_PER_BEAM,
                     youngs_modulus_E: float = 1.0) -> FrameModel:
    """Mesh one V-beam: clamped at the origin, guided end driven along -Y.

    The guided end keeps rotation and cross-shuttle translation fixed and is
    flagged for unit prescribed motion along the shuttle axis.  Elements get
    a unit modulus unless youngs_modulus_E is given (reactions scale linearly
    with it; see also with_material).
    """
    if n_elements < 4:
        raise ValidationError("n_elements must be at least 4")
    n_nodes = n_elements + 1
    s = np.linspace(0.0, geom.length_L, n_nodes)
    direction = np.array([np.cos(geom.tilt_theta), np.sin(geom.tilt_theta)])
    nodes = np.outer(s, direction)

    elements = [BeamElement(i, i + 1, youngs_modulus_E, geom.area,
                            geom.second_moment)
                for i in range(n_elements)]

    fixed = np.zeros((n_nodes, 3), dtype=bool)
    fixed[0, :] = True
    guided = n_nodes - 1
    fixed[guided, UX] = True
    fixed[guided, ROT] = True
    prescribed = {(guided, UY): -1.0}
    return FrameModel(nodes=nodes, elements=elements, fixed=fixed,
                      prescribed=prescribed)


def with_material(model: FrameModel, youngs_modulus: float) -> FrameModel:
    """Copy of the model with every element's modulus replaced."""
    elements = [BeamElement(e.node_i, e.node_j, youngs_modulus, e.A, e.I)
                for e in model.elements]
    return FrameModel(nodes=model.nodes.copy(), elements=elements,
                      fixed=model.fixed.copy(),
                      prescribed=dict(model.prescribed),
                      ties=list(model.ties),
                      point_springs=list(model.point_springs))


def build_multibeam_assembly(config: MechanismConfig,
                             n_elements: int = DEFAULT_ELEMENTS_PER_BEAM) -> FrameModel:
    """N beams in parallel on a common shuttle, driven through a series spring.

    Every beam's guided end is tied to the first beam's guided freedom along
    the shuttle axis (the shuttle), and a separate ring node connects to the
    shuttle through the series stiffness.  The ring freedom carries the unit
    prescribed motion.
    """
    geom = config.beam_geometry
    E = config.material.youngs_modulus_E
    n_per = n_elements + 1
    spacing = geom.length_L * np.cos(geom.tilt_theta) + 10.0

    nodes = []
    elements = []
    direction = np.array([np.cos(geom.tilt_theta), np.sin(geom.tilt_theta)])
    s = np.linspace(0.0, geom.length_L, n_per)
    for b in range(config.n_beams):
        offset = np.array([b * spacing, 0.0])
        base = b * n_per
        nodes.append(np.outer(s, direction) + offset)
        elements.extend(
            BeamElement(base + i, base + i + 1, E, geom.area, geom.second_moment)
            for i in range(n_elements))
    nodes = np.vstack(nodes)

    ring = nodes.shape[0]
    nodes = np.vstack([nodes, [[-spacing, 0.0]]])

    n_total = nodes.shape[0]
    fixed = np.zeros((n_total, 3), dtype=bool)
    ties = []
    shuttle_dof = None
    for b in range(config.n_beams):
        base = b * n_per
        guided = base + n_per - 1
        fixed[base, :] = True
        fixed[guided, UX] = True
        fixed[guided, ROT] = True
        if shuttle_dof is None:
            shuttle_dof = (guided, UY)
        else:
            ties.append(((guided, UY), shuttle_dof))
    fixed[ring, UX] = True
    fixed[ring, ROT] = True

    springs = [(ring, UY, shuttle_dof[0], shuttle_dof[1],
                config.series_stiffness_ks)]
    prescribed = {(ring, UY): -1.0}
    return FrameModel(nodes=nodes, elements=elements, fixed=fixed,
                      prescribed=prescribed, ties=ties, point_springs=springs)
