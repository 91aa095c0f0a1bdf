#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#
"""Cotangent and stretch Laplacians."""

from dataclasses import dataclass
import numpy as np
from scipy import sparse
from typing import Optional

from balanceparam.utils.errors import (
	DegenerateImageFaceError,
	LambdaOutOfRange,
	NonPositiveImageArea,
	ShapeError,
)
from balanceparam.utils.mesh import DEGENERACY_THRESHOLD, TriMesh, signed_areas

BLEND_MODES = ("augmented", "fixed_point")

@dataclass(frozen=True, eq=False)
class CotWeights:
	"""Per-corner half-cotangents and, for image weights, the per-face stretch factor."""
	half_cotangents: np.ndarray
	stretch: Optional[np.ndarray] = None

	@property
	def edge_weights(self) -> np.ndarray:
		if self.stretch is None:
			return self.half_cotangents
		return self.half_cotangents / self.stretch[:, None]

def half_cotangents(positions: np.ndarray, faces: np.ndarray) -> np.ndarray:
	"""1/2 cot of every corner angle, from dot / |cross| of the corner edges."""
	p = positions[faces]
	result = np.empty(faces.shape)
	for c in range(3):
		u = p[:, (c + 1) % 3] - p[:, c]
		v = p[:, (c + 2) % 3] - p[:, c]
		dot = np.einsum("ij,ij->i", u, v)
		if positions.shape[1] == 2:
			cross = np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
		else:
			cross = np.linalg.norm(np.cross(u, v), axis=1)
		result[:, c] = 0.5 * dot / cross

	return result

def _assemble(weights: np.ndarray, faces: np.ndarray, n: int) -> sparse.csr_matrix:
	# The weight of corner c belongs to the opposite edge
	rows = faces[:, [1, 2, 0]].ravel()
	cols = faces[:, [2, 0, 1]].ravel()
	w = weights.ravel()

	I = np.concatenate([rows, cols, rows, cols])
	J = np.concatenate([cols, rows, rows, cols])
	V = np.concatenate([-w, -w, w, w])

	return sparse.coo_matrix((V, (I, J)), shape=(n, n)).tocsr()

def cotangent_weights(mesh: TriMesh) -> CotWeights:
	return CotWeights(half_cotangents(mesh.vertices, mesh.faces))

def stretch_weights(mesh: TriMesh, fmap: np.ndarray) -> CotWeights:
	"""
	Image half-cotangents plus the stretch factor |tau| / |f(tau)|.

	The stretch factor uses the signed image area, so it is negative on
	flipped triangles.
	"""
	fmap = np.asarray(fmap, dtype=float)
	if fmap.shape != (mesh.n_vertices, 2):
		raise ShapeError(f"Map must be {mesh.n_vertices} x 2, got {fmap.shape}")

	image_areas = signed_areas(fmap, mesh.faces)
	extent = fmap.max(axis=0) - fmap.min(axis=0)
	threshold = DEGENERACY_THRESHOLD * float(extent[0] * extent[1])
	degenerate = np.abs(image_areas) <= threshold
	if np.any(degenerate):
		raise DegenerateImageFaceError(
			f"Image of face {int(np.argmax(degenerate))} has (near) zero area"
		)

	return CotWeights(
		half_cotangents(fmap, mesh.faces),
		mesh.face_areas / image_areas,
	)

def build_LD(mesh: TriMesh) -> sparse.csr_matrix:
	"""Cotangent Laplacian of the surface."""
	return _assemble(cotangent_weights(mesh).edge_weights, mesh.faces, mesh.n_vertices)

def build_LS(mesh: TriMesh, fmap: np.ndarray) -> sparse.csr_matrix:
	"""Stretch Laplacian of the planar map fmap (n x 2)."""
	return _assemble(stretch_weights(mesh, fmap).edge_weights, mesh.faces, mesh.n_vertices)

def blend_Llambda(
	L_D: sparse.spmatrix,
	L_S: sparse.spmatrix,
	lam: float,
	total_area: float,
	image_area: float,
	mode: str = "augmented",
	mu: float = 1.0,
) -> sparse.csr_matrix:
	"""
	Linear combination of L_D and L_S.

	augmented: (1 - lam) L_D + (2 |M| lam mu / A) L_S
	fixed_point: (1 - lam) L_D + 2 lam L_S
	"""
	if not 0.0 <= lam <= 1.0:
		raise LambdaOutOfRange(f"lambda = {lam} is outside [0, 1]")
	if mode not in BLEND_MODES:
		raise ValueError(f"Unknown blend mode {mode}")

	if mode == "fixed_point":
		coefficient = 2.0 * lam
	else:
		if not image_area > 0:
			raise NonPositiveImageArea(f"Image area {image_area} is not positive")
		coefficient = 2.0 * total_area * lam * mu / image_area

	return ((1.0 - lam) * L_D + coefficient * L_S).tocsr()
