import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

logger = logging.getLogger(__name__)

COARSE_RINGS = 4
RING_NODES = 6


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Triangulation of a disk of radius `radius` centred at the origin.

    `elems` are counter-clockwise node triples, `boundary_edges` run
    counter-clockwise around the rim with each edge starting where the
    previous one ended. After refinement, `parents[i]` holds the two coarse
    nodes whose edge midpoint produced fine node i (twice the same index for
    inherited nodes).
    """
    nodes: np.ndarray = field(repr=False)
    elems: np.ndarray = field(repr=False)
    boundary_edges: np.ndarray = field(repr=False)
    radius: float
    level: int = 0
    parents: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if np.any(self.signed_areas <= 0):
            bad = int(np.argmin(self.signed_areas))
            raise ValueError(f'element {bad} of level {self.level} is not counter-clockwise '
                             f'(signed area {self.signed_areas[bad]:.3e})')

    @property
    def num_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def num_elems(self) -> int:
        return self.elems.shape[0]

    @property
    def signed_areas(self) -> np.ndarray:
        p = self.nodes[self.elems]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    @property
    def area(self) -> float:
        return float(self.signed_areas.sum())

    @property
    def edges(self) -> np.ndarray:
        """Unique undirected edges, each as a sorted node pair, in lexicographic order."""
        pairs = self.elems[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
        return np.unique(np.sort(pairs, axis=1), axis=0)

    @property
    def h_max(self) -> float:
        e = self.edges
        return float(np.linalg.norm(self.nodes[e[:, 1]] - self.nodes[e[:, 0]], axis=1).max())

    @property
    def boundary_nodes(self) -> np.ndarray:
        return self.boundary_edges[:, 0]

    def area_deficit(self) -> float:
        """pi R^2 minus the area of the inscribed boundary polygon (closed form)."""
        n = self.boundary_edges.shape[0]
        return math.pi * self.radius ** 2 - 0.5 * n * self.radius ** 2 * math.sin(2.0 * math.pi / n)

    def save(self, prefix: str, values: Optional[np.ndarray] = None):
        """Plain-text node/element tables, plus nodal values when given."""
        np.savetxt(f'{prefix}_nodes.txt', self.nodes, fmt='%.17g', header='x y')
        np.savetxt(f'{prefix}_elems.txt', self.elems, fmt='%d', header='n0 n1 n2')
        if values is not None:
            np.savetxt(f'{prefix}_values.txt', values, fmt='%.17g', header='value')


def _orient(nodes: np.ndarray, elems: np.ndarray) -> np.ndarray:
    p = nodes[elems]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    clockwise = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0] < 0
    elems = elems.copy()
    elems[clockwise] = elems[clockwise][:, [0, 2, 1]]
    return elems


def _stitch(inner: List[int], outer: List[int]) -> List[List[int]]:
    """Triangulate the annulus between two rings by merging their angular orders."""
    n_in, n_out = len(inner), len(outer)
    i = k = 0
    triangles = []
    while i < n_in or k < n_out:
        # compare the next angles 2pi(k+1)/n_out and 2pi(i+1)/n_in in exact integers
        if k < n_out and (i == n_in or (k + 1) * n_in <= (i + 1) * n_out):
            triangles.append([inner[i % n_in], outer[k], outer[(k + 1) % n_out]])
            k += 1
        else:
            triangles.append([inner[i], outer[k % n_out], inner[(i + 1) % n_in]])
            i += 1
    return triangles


def coarse_disk_mesh(radius: float, rings: int = COARSE_RINGS) -> TriMesh:
    """Centre node plus `rings` concentric rings, ring j holding 6j equally spaced nodes."""
    if radius <= 0:
        raise ValueError(f'radius must be positive, got {radius}')
    if rings < 1:
        raise ValueError(f'need at least one ring, got {rings}')

    nodes = [(0.0, 0.0)]
    ring_ids = [[0]]
    for j in range(1, rings + 1):
        count = RING_NODES * j
        angles = 2.0 * math.pi * np.arange(count) / count
        start = len(nodes)
        nodes.extend(zip(j * radius / rings * np.cos(angles), j * radius / rings * np.sin(angles)))
        ring_ids.append(list(range(start, start + count)))

    triangles = []
    centre, first = ring_ids[0][0], ring_ids[1]
    for k in range(len(first)):
        triangles.append([centre, first[k], first[(k + 1) % len(first)]])
    for inner, outer in zip(ring_ids[1:-1], ring_ids[2:]):
        triangles.extend(_stitch(inner, outer))

    nodes = np.asarray(nodes, dtype=np.float64)
    rim = ring_ids[-1]
    boundary = np.array([[rim[k], rim[(k + 1) % len(rim)]] for k in range(len(rim))], dtype=np.int64)
    elems = _orient(nodes, np.asarray(triangles, dtype=np.int64))
    return TriMesh(nodes=nodes, elems=elems, boundary_edges=boundary, radius=radius, level=0)


def refine(mesh: TriMesh) -> TriMesh:
    """Uniform 1 -> 4 split; midpoints of rim edges are pushed out radially onto the circle."""
    edges = mesh.edges
    n = mesh.num_nodes
    midpoint_id = {(int(a), int(b)): n + i for i, (a, b) in enumerate(edges)}

    nodes = np.concatenate([mesh.nodes, 0.5 * (mesh.nodes[edges[:, 0]] + mesh.nodes[edges[:, 1]])])
    parents = np.concatenate([np.repeat(np.arange(n)[:, None], 2, axis=1), edges])

    def mid(a, b):
        return midpoint_id[(a, b) if a < b else (b, a)]

    boundary = []
    for a, b in mesh.boundary_edges.tolist():
        m = mid(a, b)
        nodes[m] *= mesh.radius / np.linalg.norm(nodes[m])
        boundary.extend([[a, m], [m, b]])

    elems = []
    for a, b, c in mesh.elems.tolist():
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        elems.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]])

    return TriMesh(nodes=nodes,
                   elems=np.asarray(elems, dtype=np.int64),
                   boundary_edges=np.asarray(boundary, dtype=np.int64),
                   radius=mesh.radius,
                   level=mesh.level + 1,
                   parents=parents)


def build_mesh_hierarchy(radius: float, levels: int) -> List[TriMesh]:
    if levels < 2:
        raise ValueError(f'a mesh hierarchy needs at least 2 levels, got {levels}')
    hierarchy = [coarse_disk_mesh(radius)]
    for _ in range(levels - 1):
        hierarchy.append(refine(hierarchy[-1]))
    for mesh in hierarchy:
        logger.debug(f'level {mesh.level}: {mesh.num_nodes} nodes, {mesh.num_elems} elems, h_max={mesh.h_max:.3e}')
    return hierarchy
