"""Cell-centred finite-volume geometry on (masked) Cartesian grids.

Zero-flux boundaries are exact: a mesh carries interior faces only, so no
flux can leave the domain.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

_ids = itertools.count()


@dataclass(frozen=True, eq=False)
class Mesh:
    """Immutable cell/face arrays.

    ``owner``/``neighbor`` index the two cells of each interior face; the
    unit ``normal`` points from owner to neighbor.
    """
    dim: int
    centers: np.ndarray      # (ncells, dim)
    volumes: np.ndarray      # (ncells,)
    owner: np.ndarray        # (nfaces,)
    neighbor: np.ndarray     # (nfaces,)
    areas: np.ndarray        # (nfaces,)
    normals: np.ndarray      # (nfaces, dim)
    dists: np.ndarray        # (nfaces,)
    spacing: np.ndarray      # (dim,) Cartesian cell widths
    h: float
    mesh_id: int = field(default_factory=lambda: next(_ids))

    @property
    def n_cells(self) -> int:
        return len(self.volumes)

    @property
    def n_faces(self) -> int:
        return len(self.areas)

    @property
    def domain_volume(self) -> float:
        return float(self.volumes.sum())

    def summary(self) -> str:
        return (f"cells={self.n_cells} faces={self.n_faces} h={self.h:.6g} "
                f"domain_volume={self.domain_volume:.6g}")


def _from_mask(mask: np.ndarray, lower: np.ndarray, spacing: np.ndarray) -> Mesh:
    dim = mask.ndim
    index = -np.ones(mask.shape, dtype=np.int64)
    index[mask] = np.arange(int(mask.sum()))
    grid = np.nonzero(mask)
    centers = np.stack([lower[a] + (grid[a] + 0.5) * spacing[a] for a in range(dim)], axis=1)
    volumes = np.full(len(centers), float(np.prod(spacing)))

    owners, neighbors, areas, normals, dists = [], [], [], [], []
    for axis in range(dim):
        lo = [slice(None)] * dim
        hi = [slice(None)] * dim
        lo[axis] = slice(0, -1)
        hi[axis] = slice(1, None)
        a, b = index[tuple(lo)], index[tuple(hi)]
        keep = (a >= 0) & (b >= 0)
        a, b = a[keep], b[keep]
        owners.append(a)
        neighbors.append(b)
        areas.append(np.full(len(a), np.prod(np.delete(spacing, axis)) if dim > 1 else 1.0))
        nrm = np.zeros((len(a), dim))
        nrm[:, axis] = 1.0
        normals.append(nrm)
        dists.append(np.full(len(a), spacing[axis]))

    owner = np.concatenate(owners)
    order = np.lexsort((np.concatenate(neighbors), owner))
    return Mesh(
        dim=dim,
        centers=centers,
        volumes=volumes,
        owner=owner[order],
        neighbor=np.concatenate(neighbors)[order],
        areas=np.concatenate(areas)[order].astype(float),
        normals=np.concatenate(normals)[order],
        dists=np.concatenate(dists)[order].astype(float),
        spacing=spacing.astype(float),
        h=float(spacing.max()),
    )


def build_box_mesh(dim: int, lengths, cells_per_axis) -> Mesh:
    """Uniform Cartesian mesh of ``[0, L_1] x ... x [0, L_dim]``."""
    if dim not in (1, 2, 3):
        raise ValueError(f"dim must be 1, 2 or 3, got {dim}")
    lengths = np.broadcast_to(np.asarray(lengths, dtype=float), (dim,))
    counts = np.broadcast_to(np.asarray(cells_per_axis), (dim,))
    if np.any(lengths <= 0):
        raise ValueError("box lengths must be positive")
    if np.any(counts < 1) or np.any(counts != np.round(counts)):
        raise ValueError("cell counts must be positive integers")
    if np.any(counts < 2):
        raise ValueError("need at least 2 cells per axis")
    counts = counts.astype(int)
    mask = np.ones(tuple(counts), dtype=bool)
    return _from_mask(mask, np.zeros(dim), lengths / counts)


def build_ball_mesh(dim: int, radius: float, h_target: float) -> Mesh:
    """Staircase approximation of the open ball of given radius about the origin.

    An odd number of cells per axis puts one cell centre at the origin.
    """
    if dim not in (2, 3):
        raise ValueError(f"ball meshes are 2D or 3D, got dim={dim}")
    if radius <= 0 or h_target <= 0:
        raise ValueError("radius and h_target must be positive")
    if h_target >= radius / 4:
        raise ValueError(f"h_target={h_target} too coarse for radius {radius} (need < radius/4)")
    n = math.ceil(2 * radius / h_target)
    if n % 2 == 0:
        n += 1
    width = 2 * radius / n
    c = -radius + (np.arange(n) + 0.5) * width
    r2 = sum(np.meshgrid(*([c ** 2] * dim), indexing="ij"))
    mask = r2 < radius ** 2
    if mask.sum() < 25:
        raise ValueError("h_target too coarse: fewer than 25 cells inside the ball")
    return _from_mask(mask, np.full(dim, -radius), np.full(dim, width))


def cell_vertices(mesh: Mesh) -> tuple[np.ndarray, np.ndarray]:
    """Points and per-cell connectivity for voxel/pixel/line output.

    Vertex order follows the VTK_VOXEL (3D), VTK_PIXEL (2D) and VTK_LINE
    (1D) conventions: x varies fastest, then y, then z.
    """
    half = mesh.spacing / 2
    corners = np.array(list(itertools.product(*([(-1, 1)] * mesh.dim))))[:, ::-1]
    pts = mesh.centers[:, None, :] + corners[None, :, :] * half
    flat = np.round(pts.reshape(-1, mesh.dim) / half, 6)
    uniq, inverse = np.unique(flat, axis=0, return_inverse=True)
    conn = inverse.reshape(mesh.n_cells, len(corners))
    return uniq * half, conn
