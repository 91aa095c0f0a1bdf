#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#
"""Simply connected open triangular meshes."""

from dataclasses import dataclass
import numpy as np
from pathlib import Path
from scipy import sparse
from sebaubuntu_libs.liblogging import LOGD, LOGW
from typing import List, Optional, Union
import warnings

from balanceparam.utils.errors import (
	DegenerateFaceError,
	ParseError,
	ShapeError,
	TopologyError,
	ValidationWarning,
)

# Relative threshold below which an edge or a face counts as degenerate
DEGENERACY_THRESHOLD = 1e-14

MESH_FORMATS = ("obj", "off")

@dataclass(frozen=True, eq=False)
class TriMesh:
	"""Immutable disk-topology triangle mesh with cached areas."""
	vertices: np.ndarray
	faces: np.ndarray
	boundary_loop: np.ndarray
	interior_indices: np.ndarray
	face_areas: np.ndarray
	total_area: float

	@classmethod
	def from_arrays(cls, vertices, faces, strict: bool = True) -> "TriMesh":
		"""
		Validate the arrays and build a mesh.

		With strict=False degenerate faces are logged instead of raising,
		used for meshes rebuilt from sampled data.
		"""
		vertices = np.array(vertices, dtype=float)
		faces = np.array(faces, dtype=np.int64)

		if vertices.ndim != 2 or vertices.shape[1] not in (2, 3):
			raise ShapeError(f"Vertices must be an n x 3 array, got {vertices.shape}")
		if vertices.shape[1] == 2:
			vertices = np.column_stack([vertices, np.zeros(len(vertices))])
		if faces.ndim != 2 or faces.shape[1] != 3 or len(faces) == 0:
			raise ShapeError(f"Faces must be a non-empty m x 3 array, got {faces.shape}")
		if not np.all(np.isfinite(vertices)):
			raise ParseError("Vertex positions must be finite")

		n = len(vertices)
		if faces.min() < 0 or faces.max() >= n:
			raise ParseError(f"Face index out of range [0, {n})")

		repeated = (
			(faces[:, 0] == faces[:, 1])
			| (faces[:, 1] == faces[:, 2])
			| (faces[:, 2] == faces[:, 0])
		)
		if np.any(repeated):
			raise DegenerateFaceError(f"Face {int(np.argmax(repeated))} repeats a vertex")

		face_areas = triangle_areas(vertices, faces)
		diagonal = bounding_box_diagonal(vertices)
		degenerate = face_areas <= DEGENERACY_THRESHOLD * diagonal ** 2
		if np.any(degenerate):
			if strict:
				raise DegenerateFaceError(
					f"Face {int(np.argmax(degenerate))} has (near) zero area"
				)
			LOGW(f"{int(degenerate.sum())} degenerate faces kept")

		loop = boundary_loop(faces, n)

		is_boundary = np.zeros(n, dtype=bool)
		is_boundary[loop] = True
		interior_indices = np.flatnonzero(~is_boundary)

		all_boundary = is_boundary[faces].all(axis=1)
		if np.any(all_boundary):
			message = f"{int(all_boundary.sum())} faces have no interior vertex"
			LOGW(message)
			warnings.warn(message, ValidationWarning, stacklevel=2)

		for array in (vertices, faces, loop, interior_indices, face_areas):
			array.setflags(write=False)

		LOGD(f"Mesh: {n} vertices, {len(faces)} faces, {len(loop)} boundary vertices")

		return cls(
			vertices=vertices,
			faces=faces,
			boundary_loop=loop,
			interior_indices=interior_indices,
			face_areas=face_areas,
			total_area=float(face_areas.sum()),
		)

	@property
	def n_vertices(self):
		return len(self.vertices)

	@property
	def n_faces(self):
		return len(self.faces)

	@property
	def n_boundary(self):
		return len(self.boundary_loop)

	@property
	def n_interior(self):
		return len(self.interior_indices)

	@property
	def bbox_diagonal(self):
		return bounding_box_diagonal(self.vertices)

	def scaled(self, factor: float) -> "TriMesh":
		"""Return a copy with every position multiplied by factor."""
		return TriMesh.from_arrays(self.vertices * factor, self.faces)

def bounding_box_diagonal(positions: np.ndarray) -> float:
	extent = positions.max(axis=0) - positions.min(axis=0)
	return float(np.linalg.norm(extent))

def triangle_areas(vertices: np.ndarray, faces: np.ndarray) -> np.ndarray:
	"""Unsigned area of every face, 1/2 |(v_j - v_i) x (v_k - v_i)|."""
	e1 = vertices[faces[:, 1]] - vertices[faces[:, 0]]
	e2 = vertices[faces[:, 2]] - vertices[faces[:, 0]]
	if vertices.shape[1] == 2:
		return 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
	return 0.5 * np.linalg.norm(np.cross(e1, e2), axis=1)

def signed_areas(positions: np.ndarray, faces: np.ndarray) -> np.ndarray:
	"""Signed area of every image triangle, positive for counterclockwise ones."""
	e1 = positions[faces[:, 1]] - positions[faces[:, 0]]
	e2 = positions[faces[:, 2]] - positions[faces[:, 0]]
	return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

def corner_angles(positions: np.ndarray, faces: np.ndarray) -> np.ndarray:
	"""
	Interior angles of the given faces, one per corner, in radians.

	faces may be a single triple or an m x 3 array; the result has the same
	leading shape. Angles come from the arccosine of normalized edge-vector
	dot products.
	"""
	positions = np.asarray(positions, dtype=float)
	faces = np.asarray(faces)
	single = faces.ndim == 1
	faces = np.atleast_2d(faces)

	p = positions[faces]
	edges = [p[:, (c + 1) % 3] - p[:, c] for c in range(3)]
	lengths = np.stack([np.linalg.norm(edge, axis=1) for edge in edges], axis=1)

	threshold = DEGENERACY_THRESHOLD * bounding_box_diagonal(positions)
	if np.any(lengths < threshold) or not np.all(lengths > 0):
		raise DegenerateFaceError("Face has an edge of (near) zero length")

	angles = np.empty((len(faces), 3))
	for c in range(3):
		outgoing = edges[c] / lengths[:, [c]]
		incoming = -edges[(c + 2) % 3] / lengths[:, [(c + 2) % 3]]
		cosine = np.einsum("ij,ij->i", outgoing, incoming)
		angles[:, c] = np.arccos(np.clip(cosine, -1.0, 1.0))

	return angles[0] if single else angles

def _directed_adjacency(faces: np.ndarray, n: int):
	rows = faces.ravel()
	cols = faces[:, [1, 2, 0]].ravel()
	return sparse.csr_matrix(
		(np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(n, n)
	)

def boundary_loops(faces: np.ndarray, n: Optional[int] = None) -> List[np.ndarray]:
	"""
	Find every boundary loop of an oriented triangle mesh.

	Each loop is counterclockwise with respect to the face orientation and
	starts at its smallest vertex index.
	"""
	faces = np.asarray(faces, dtype=np.int64)
	if n is None:
		n = int(faces.max()) + 1

	adj_dir = _directed_adjacency(faces, n)
	if adj_dir.data.max() > 1:
		raise TopologyError("Inconsistent face orientation (directed edge used twice)")

	adj_sym = adj_dir + adj_dir.T
	if adj_sym.data.max() > 2:
		raise TopologyError("Non-manifold edge (shared by more than two faces)")

	# Half-edges whose twin is missing
	boundary = (adj_dir - adj_dir.multiply(adj_dir.T)).tocsr()
	boundary.eliminate_zeros()

	out_degree = np.diff(boundary.indptr)
	if out_degree.max(initial=0) > 1:
		raise TopologyError("Non-manifold boundary vertex")

	next_vertex = {
		int(vertex): int(boundary.indices[boundary.indptr[vertex]])
		for vertex in np.flatnonzero(out_degree)
	}

	loops = []
	while next_vertex:
		start = min(next_vertex)
		loop = [start]
		vertex = next_vertex.pop(start)
		while vertex != start:
			if vertex not in next_vertex:
				raise TopologyError("Boundary half-edges do not close into a loop")
			loop.append(vertex)
			vertex = next_vertex.pop(vertex)
		loops.append(np.array(loop, dtype=np.int64))

	return loops

def boundary_loop(mesh_or_faces: Union[TriMesh, np.ndarray], n: Optional[int] = None) -> np.ndarray:
	"""The single boundary loop of a disk-topology mesh."""
	if isinstance(mesh_or_faces, TriMesh):
		return mesh_or_faces.boundary_loop

	faces = np.asarray(mesh_or_faces, dtype=np.int64)
	if n is None:
		n = int(faces.max()) + 1

	referenced = np.zeros(n, dtype=bool)
	referenced[faces.ravel()] = True
	if not referenced.all():
		raise TopologyError(f"{int((~referenced).sum())} vertices are not used by any face")

	loops = boundary_loops(faces, n)
	if not loops:
		raise TopologyError("Closed surface: no boundary loop")
	if len(loops) > 1:
		raise TopologyError(f"Expected a single boundary loop, found {len(loops)}")

	adj_dir = _directed_adjacency(faces, n)
	n_edges = (adj_dir + adj_dir.T).nnz // 2
	euler = n - n_edges + len(faces)
	if euler != 1:
		raise TopologyError(f"Not a topological disk (Euler characteristic {euler})")

	return loops[0]

def load_mesh(path: Path, format: Optional[str] = None) -> TriMesh:
	"""Load an OBJ or OFF mesh and validate it."""
	path = Path(path)
	if format is None:
		format = path.suffix.lstrip(".").lower()
	format = format.lower()
	if format not in MESH_FORMATS:
		raise ParseError(f"Unsupported mesh format: {format}")

	text = path.read_text()
	if format == "obj":
		vertices, faces = _parse_obj(text)
	else:
		vertices, faces = _parse_off(text)

	LOGD(f"Loaded {path.name}: {len(vertices)} vertices, {len(faces)} faces")

	return TriMesh.from_arrays(vertices, faces)

def _parse_obj(text: str):
	vertices = []
	faces = []
	for lineno, line in enumerate(text.splitlines(), start=1):
		tokens = line.split("#", 1)[0].split()
		if not tokens:
			continue

		try:
			if tokens[0] == "v":
				vertices.append([float(value) for value in tokens[1:4]])
				if len(vertices[-1]) != 3:
					raise ValueError("vertex needs three coordinates")
			elif tokens[0] == "f":
				indices = [int(token.split("/")[0]) for token in tokens[1:]]
				if len(indices) != 3:
					raise ValueError("only triangular faces are supported")
				faces.append([
					index - 1 if index > 0 else len(vertices) + index
					for index in indices
				])
		except ValueError as e:
			raise ParseError(f"OBJ line {lineno}: {e}") from e

	if not vertices or not faces:
		raise ParseError("OBJ file has no vertices or no faces")

	return np.array(vertices), np.array(faces)

def _parse_off(text: str):
	lines = [
		line.split("#", 1)[0].split()
		for line in text.splitlines()
	]
	lines = [tokens for tokens in lines if tokens]
	if not lines or not lines[0][0].endswith("OFF"):
		raise ParseError("Missing OFF header")

	try:
		header = lines[0][1:] or lines[1]
		body = lines[1:] if lines[0][1:] else lines[2:]
		n_vertices, n_faces = int(header[0]), int(header[1])

		vertices = np.array([
			[float(value) for value in tokens[:3]]
			for tokens in body[:n_vertices]
		])
		faces = []
		for tokens in body[n_vertices:n_vertices + n_faces]:
			if int(tokens[0]) != 3:
				raise ValueError("only triangular faces are supported")
			faces.append([int(value) for value in tokens[1:4]])
	except (IndexError, ValueError) as e:
		raise ParseError(f"Malformed OFF file: {e}") from e

	if vertices.shape != (n_vertices, 3) or len(faces) != n_faces:
		raise ParseError("OFF file is truncated")

	return vertices, np.array(faces)

def write_obj(path: Path, positions: np.ndarray, faces: np.ndarray):
	"""Write positions (n x 2 planar or n x 3) and faces as an OBJ file."""
	positions = np.asarray(positions, dtype=float)
	if positions.shape[1] == 2:
		positions = np.column_stack([positions, np.zeros(len(positions))])

	lines = [f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in positions]
	lines += [f"f {i + 1} {j + 1} {k + 1}" for i, j, k in np.asarray(faces)]
	Path(path).write_text("\n".join(lines) + "\n")

def load_planar_map(path: Path, n_vertices: int) -> np.ndarray:
	"""Read the image coordinates of a planar OBJ written by write_obj."""
	vertices, _ = _parse_obj(Path(path).read_text())
	if len(vertices) != n_vertices:
		raise ShapeError(
			f"Map has {len(vertices)} vertices, mesh has {n_vertices}"
		)

	return vertices[:, :2].copy()
