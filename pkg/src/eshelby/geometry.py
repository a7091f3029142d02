"""Polyhedral meshes, generators, and transformed-coordinate machinery.

A field point x, its projection on a face plane, and one edge of that
face define a local orthonormal triad (xi0, lam0, eta0) and three signed
distances (a, b, l+-).  Every series-form tensor in this library is a
sum over (face, edge) pairs of functions of these quantities, so this
module also provides the flattened per-edge arrays the kernels consume.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GeometryError, MeshTopologyError

__all__ = [
    "Material",
    "Polyhedron",
    "TransformedCoords",
    "EdgeArrays",
    "load_mesh",
    "tessellate_sphere",
    "make_cuboid",
    "transformed_coords",
    "edge_arrays",
    "triangulate",
]

#: Points closer than this to an edge line are nudged off it (meters).
EDGE_NUDGE = 1e-9


@dataclass(frozen=True)
class Material:
    """Homogeneous isotropic conductor.

    Parameters
    ----------
    K : float
        Thermal conductivity, W/(m K).
    Cp : float
        Volumetric heat capacity, J/(m^3 K).
    alpha : float, optional
        Diffusivity K/Cp, m^2/s.  Derived when omitted; when supplied it
        must be consistent with K and Cp.
    """

    K: float
    Cp: float
    alpha: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if not (self.K > 0 and self.Cp > 0):
            raise DomainError("Material requires K > 0 and Cp > 0")
        if self.alpha is None:
            object.__setattr__(self, "alpha", self.K / self.Cp)
        elif abs(self.alpha * self.Cp - self.K) > 1e-12 * self.K:
            raise DomainError("alpha * Cp must equal K")


@dataclass(frozen=True)
class TransformedCoords:
    """Signed distances and triad for one (face, edge, field point)."""

    a: float          #: field point to face plane (positive on outward side)
    b: float          #: projection point to edge line, along lam0
    l_plus: float     #: along-edge distance to vertex v+
    l_minus: float    #: along-edge distance to vertex v-
    xi0: np.ndarray   #: unit outward face normal
    lam0: np.ndarray  #: in-plane edge normal, xi0 x eta0
    eta0: np.ndarray  #: unit edge direction v- -> v+


class Polyhedron:
    """Watertight closed polygonal surface mesh with outward-oriented faces.

    Parameters
    ----------
    vertices : (n, 3) array_like
    faces : sequence of vertex-index loops, counter-clockwise from outside.
    """

    def __init__(self, vertices, faces):
        self.vertices = np.asarray(vertices, dtype=float)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise GeometryError("vertices must be an (n, 3) array")
        self.faces = [list(map(int, f)) for f in faces]
        self._check_watertight()
        self.normals = self._compute_normals()
        self._check_planarity()
        vol = self.signed_volume()
        if vol <= 0:
            raise GeometryError(f"signed volume must be > 0, got {vol:g}")
        self.volume = vol

    # -- validation -------------------------------------------------------

    def _check_watertight(self):
        seen: dict[tuple[int, int], int] = {}
        for f in self.faces:
            if len(f) < 3:
                raise MeshTopologyError(f"degenerate face {f}")
            for i in range(len(f)):
                e = (f[i], f[(i + 1) % len(f)])
                if e[0] == e[1]:
                    raise MeshTopologyError(f"zero-length edge in face {f}")
                seen[e] = seen.get(e, 0) + 1
        bad = [e for e in seen
               if seen[e] != 1 or seen.get((e[1], e[0]), 0) != 1]
        if bad:
            raise MeshTopologyError(
                f"mesh is not watertight/consistently oriented; offending "
                f"edges (up to 10): {sorted(bad)[:10]}"
            )

    def _compute_normals(self):
        normals = np.empty((len(self.faces), 3))
        for i, f in enumerate(self.faces):
            pts = self.vertices[f]
            # Newell's method: robust for any planar polygon.
            n = np.zeros(3)
            for j in range(len(f)):
                u, v = pts[j], pts[(j + 1) % len(f)]
                n += np.cross(u, v)
            norm = np.linalg.norm(n)
            if norm == 0:
                raise GeometryError(f"face {i} has zero area")
            normals[i] = n / norm
        return normals

    def _check_planarity(self):
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        tol = 1e-9 * float(np.linalg.norm(hi - lo))
        for i, f in enumerate(self.faces):
            pts = self.vertices[f]
            d = (pts - pts[0]) @ self.normals[i]
            if np.max(np.abs(d)) > tol:
                raise GeometryError(
                    f"face {i} is non-planar by {np.max(np.abs(d)):g} "
                    f"(tolerance {tol:g})"
                )

    # -- queries ----------------------------------------------------------

    def signed_volume(self) -> float:
        vol = 0.0
        for f in self.faces:
            pts = self.vertices[f]
            for j in range(1, len(f) - 1):
                vol += np.dot(pts[0], np.cross(pts[j], pts[j + 1]))
        return vol / 6.0

    def circumradius(self, center=None) -> float:
        c = np.zeros(3) if center is None else np.asarray(center, float)
        return float(np.max(np.linalg.norm(self.vertices - c, axis=1)))

    @property
    def n_faces(self) -> int:
        return len(self.faces)


def load_mesh(path) -> Polyhedron:
    """Read an OFF-format mesh: "OFF" / "nV nF 0" / vertices / faces.

    Faces are re-oriented outward when the signed volume is negative.
    """
    with open(path) as fh:
        tokens = []
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                tokens.extend(line.split())
    if not tokens or tokens[0] != "OFF":
        raise MeshTopologyError(f"{path}: not an OFF file (missing header)")
    nv, nf = int(tokens[1]), int(tokens[2])
    pos = 4
    verts = np.array(tokens[pos:pos + 3 * nv], dtype=float).reshape(nv, 3)
    pos += 3 * nv
    faces = []
    for _ in range(nf):
        k = int(tokens[pos])
        faces.append([int(t) for t in tokens[pos + 1:pos + 1 + k]])
        pos += 1 + k
    # Probe orientation before full validation.
    probe = sum(
        np.dot(verts[f[0]], np.cross(verts[f[j]], verts[f[j + 1]]))
        for f in faces for j in range(1, len(f) - 1)
    )
    if probe < 0:
        faces = [f[::-1] for f in faces]
    return Polyhedron(verts, faces)


def make_cuboid(lx: float, ly: float, lz: float, center=(0.0, 0.0, 0.0)) -> Polyhedron:
    """Axis-aligned cuboid of dimensions lx x ly x lz about ``center``."""
    if not (lx > 0 and ly > 0 and lz > 0):
        raise DomainError("cuboid dimensions must be positive")
    c = np.asarray(center, float)
    hx, hy, hz = lx / 2, ly / 2, lz / 2
    verts = np.array([
        [-hx, -hy, -hz], [hx, -hy, -hz], [hx, hy, -hz], [-hx, hy, -hz],
        [-hx, -hy, hz], [hx, -hy, hz], [hx, hy, hz], [-hx, hy, hz],
    ]) + c
    faces = [
        [0, 3, 2, 1],  # bottom, outward -z
        [4, 5, 6, 7],  # top, outward +z
        [0, 1, 5, 4],  # -y
        [2, 3, 7, 6],  # +y
        [1, 2, 6, 5],  # +x
        [3, 0, 4, 7],  # -x
    ]
    return Polyhedron(verts, faces)


def tessellate_sphere(radius: float, refinement: int, center=(0.0, 0.0, 0.0)) -> Polyhedron:
    """Triangulated sphere: octahedron subdivided ``refinement`` times.

    All vertices lie exactly at distance ``radius`` from ``center``; the
    face count is 8 * 4**refinement.
    """
    if radius <= 0:
        raise DomainError("radius must be positive")
    if refinement < 0:
        raise DomainError("refinement must be >= 0")
    verts = [np.array(v, float) for v in
             [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]]
    faces = [(0, 2, 4), (2, 1, 4), (1, 3, 4), (3, 0, 4),
             (2, 0, 5), (1, 2, 5), (3, 1, 5), (0, 3, 5)]
    for _ in range(refinement):
        cache: dict[tuple[int, int], int] = {}

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        new_faces = []
        for (i, j, k) in faces:
            a, b, c = midpoint(i, j), midpoint(j, k), midpoint(k, i)
            new_faces += [(i, a, c), (a, j, b), (c, b, k), (a, b, c)]
        faces = new_faces
    v = np.array([u / np.linalg.norm(u) * radius for u in verts])
    return Polyhedron(v + np.asarray(center, float), [list(f) for f in faces])


def triangulate(poly: Polyhedron) -> Polyhedron:
    """Fan-triangulate every face; tensor values must be unchanged."""
    faces = []
    for f in poly.faces:
        for j in range(1, len(f) - 1):
            faces.append([f[0], f[j], f[j + 1]])
    return Polyhedron(poly.vertices, faces)


def transformed_coords(poly: Polyhedron, face: int, edge: int, x) -> TransformedCoords:
    """Transformed coordinates of field point ``x`` for one (face, edge).

    a = (x - v+) . xi0,  b = (x - v+) . lam0,  l+- = (x - v+-) . eta0,
    with xi0 the outward face normal, eta0 the edge direction, and
    lam0 = xi0 x eta0.
    """
    x = np.asarray(x, float)
    f = poly.faces[face]
    xi0 = poly.normals[face]
    vm = poly.vertices[f[edge]]
    vp = poly.vertices[f[(edge + 1) % len(f)]]
    eta0 = vp - vm
    eta0 = eta0 / np.linalg.norm(eta0)
    lam0 = np.cross(xi0, eta0)
    return TransformedCoords(
        a=float(np.dot(x - vp, xi0)),
        b=float(np.dot(x - vp, lam0)),
        l_plus=float(np.dot(x - vp, eta0)),
        l_minus=float(np.dot(x - vm, eta0)),
        xi0=xi0, lam0=lam0, eta0=eta0,
    )


@dataclass
class EdgeArrays:
    """Flattened per-edge transformed coordinates for one field point.

    Edges are grouped by face: edges of face i occupy the slice
    ``offsets[i]:offsets[i+1]`` in each per-edge array.
    """

    a: np.ndarray        #: (ne,) face-plane distance (repeated per edge)
    b: np.ndarray        #: (ne,)
    lp: np.ndarray       #: (ne,)
    lm: np.ndarray       #: (ne,)
    offsets: np.ndarray  #: (nf + 1,) int
    normals: np.ndarray  #: (nf, 3)
    face_of_edge: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.face_of_edge is None:
            counts = np.diff(self.offsets)
            self.face_of_edge = np.repeat(np.arange(len(counts)), counts)


class _EdgeTopology:
    """Per-polyhedron cached edge topology (field-point independent)."""

    def __init__(self, poly: Polyhedron):
        vm_idx, vp_idx, counts = [], [], []
        for f in poly.faces:
            counts.append(len(f))
            for j in range(len(f)):
                vm_idx.append(f[j])
                vp_idx.append(f[(j + 1) % len(f)])
        self.vm = poly.vertices[vm_idx]
        self.vp = poly.vertices[vp_idx]
        eta = self.vp - self.vm
        self.eta = eta / np.linalg.norm(eta, axis=1, keepdims=True)
        self.offsets = np.concatenate([[0], np.cumsum(counts)])
        self.face_of_edge = np.repeat(np.arange(len(counts)), counts)
        self.xi = poly.normals[self.face_of_edge]
        self.lam = np.cross(self.xi, self.eta)


def _topology(poly: Polyhedron) -> _EdgeTopology:
    topo = getattr(poly, "_edge_topology", None)
    if topo is None:
        topo = _EdgeTopology(poly)
        poly._edge_topology = topo
    return topo


def edge_arrays(poly: Polyhedron, x) -> EdgeArrays:
    """All transformed coordinates of ``x``, flattened over (face, edge).

    Points within EDGE_NUDGE meters of an edge line are nudged off it
    along lam0 (with a warning): the arctangent limits remain finite but
    lose accuracy exactly on the line.
    """
    topo = _topology(poly)
    x = np.asarray(x, float)
    d = x - topo.vp
    a = np.einsum("ij,ij->i", d, topo.xi)
    b = np.einsum("ij,ij->i", d, topo.lam)
    lp = np.einsum("ij,ij->i", d, topo.eta)
    lm = np.einsum("ij,ij->i", x - topo.vm, topo.eta)
    on_edge = a * a + b * b < EDGE_NUDGE**2
    if np.any(on_edge):
        warnings.warn(
            "field point within 1e-9 m of an edge line; nudged along lam0",
            RuntimeWarning, stacklevel=2,
        )
        b = np.where(on_edge, b + EDGE_NUDGE, b)
    return EdgeArrays(a=a, b=b, lp=lp, lm=lm,
                      offsets=topo.offsets, normals=poly.normals,
                      face_of_edge=topo.face_of_edge)
