#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#
"""Boundary conditions and the fixed-point initializer."""

from dataclasses import dataclass, field
import numpy as np
from sebaubuntu_libs.liblogging import LOGD, LOGW
from typing import Dict, List, Optional, Sequence

from balanceparam.utils.energy import dirichlet_energy, image_area, stretch_energy
from balanceparam.utils.errors import (
	ConfigError,
	CornerOrderError,
	DegenerateImageFaceError,
	NotPositiveDefinite,
	SingularSystem,
)
from balanceparam.utils.laplacian import blend_Llambda, build_LD, build_LS
from balanceparam.utils.linalg import factorize, solve, submatrix
from balanceparam.utils.mesh import TriMesh

SQUARE_CORNERS = np.array([
	[0.0, 0.0],
	[1.0, 0.0],
	[1.0, 1.0],
	[0.0, 1.0],
])

def arc_length_parameters(mesh: TriMesh) -> np.ndarray:
	"""Normalized cumulative boundary length at each loop vertex, starting from 0."""
	points = mesh.vertices[mesh.boundary_loop]
	lengths = np.linalg.norm(np.roll(points, -1, axis=0) - points, axis=1)
	cumulative = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])

	return cumulative / lengths.sum()

def circle_boundary(mesh: TriMesh) -> np.ndarray:
	"""Arc-length parameterization of the boundary onto the unit circle (loop order)."""
	angles = 2 * np.pi * arc_length_parameters(mesh)
	return np.column_stack([np.cos(angles), np.sin(angles)])

@dataclass(frozen=True, eq=False)
class BoundaryPartition:
	"""
	Four corners splitting the boundary into the sides of the unit square.

	The loop is read from the first corner: bottom (second coordinate 0),
	right (first coordinate 1), top (second coordinate 1) and left (first
	coordinate 0). Neighbouring sides share their corner.
	"""
	corners: np.ndarray
	loop: np.ndarray
	positions: np.ndarray
	segments: Dict[str, np.ndarray]
	free_first: np.ndarray
	free_second: np.ndarray

	@classmethod
	def from_corners(cls, mesh: TriMesh, corners: Sequence[int]) -> "BoundaryPartition":
		loop = mesh.boundary_loop
		n_B = len(loop)
		if n_B < 4:
			raise CornerOrderError(f"Square maps need at least 4 boundary vertices, got {n_B}")

		corners = np.asarray(corners, dtype=np.int64)
		if corners.shape != (4,) or len(np.unique(corners)) != 4:
			raise CornerOrderError(f"Need 4 distinct corners, got {corners.tolist()}")

		where = {int(vertex): position for position, vertex in enumerate(loop)}
		missing = [int(c) for c in corners if int(c) not in where]
		if missing:
			raise CornerOrderError(f"Corners {missing} are not boundary vertices")

		start = where[int(corners[0])]
		positions = np.array([(where[int(c)] - start) % n_B for c in corners])
		if not np.all(np.diff(positions) > 0):
			raise CornerOrderError(
				f"Corners {corners.tolist()} are not in counterclockwise loop order"
			)

		rotated = np.roll(loop, -start)
		c2, c3, c4 = positions[1:]
		segments = {
			"Y0": rotated[:c2 + 1],
			"X1": rotated[c2:c3 + 1],
			"Y1": rotated[c3:c4 + 1],
			"X0": np.append(rotated[c4:], rotated[0]),
		}

		all_vertices = np.arange(mesh.n_vertices)
		free_first = np.setdiff1d(all_vertices, np.union1d(segments["X0"], segments["X1"]))
		free_second = np.setdiff1d(all_vertices, np.union1d(segments["Y0"], segments["Y1"]))

		return cls(corners, rotated, positions, segments, free_first, free_second)

	@classmethod
	def auto(cls, mesh: TriMesh) -> "BoundaryPartition":
		"""Corners at the boundary vertices nearest the arc-length quartiles."""
		if mesh.n_boundary < 4:
			raise CornerOrderError(
				f"Square maps need at least 4 boundary vertices, got {mesh.n_boundary}"
			)

		t = arc_length_parameters(mesh)
		corners = []
		for quartile in (0.0, 0.25, 0.5, 0.75):
			distance = np.abs(t - quartile)
			distance = np.minimum(distance, 1.0 - distance)
			corners.append(int(mesh.boundary_loop[np.argmin(distance)]))

		LOGD(f"Automatic square corners: {corners}")

		return cls.from_corners(mesh, corners)

	def square_boundary(self, mesh: TriMesh) -> np.ndarray:
		"""
		Arc-length parameterization of the boundary onto the square sides.

		Rows follow mesh.boundary_loop.
		"""
		points = mesh.vertices[self.loop]
		lengths = np.linalg.norm(np.roll(points, -1, axis=0) - points, axis=1)
		cumulative = np.concatenate([[0.0], np.cumsum(lengths)])

		ends = np.append(self.positions, len(self.loop))
		image = np.empty((len(self.loop), 2))
		for side in range(4):
			begin, end = ends[side], ends[side + 1]
			t = (cumulative[begin:end] - cumulative[begin]) / (cumulative[end] - cumulative[begin])
			start_point, end_point = SQUARE_CORNERS[side], SQUARE_CORNERS[(side + 1) % 4]
			image[begin:end] = start_point + t[:, None] * (end_point - start_point)

		result = np.empty_like(image)
		where = {int(vertex): position for position, vertex in enumerate(mesh.boundary_loop)}
		order = np.array([where[int(vertex)] for vertex in self.loop])
		result[order] = image

		return result

def _harmonic_solve(L, mesh: TriMesh, boundary: np.ndarray) -> np.ndarray:
	I, B = mesh.interior_indices, mesh.boundary_loop
	fmap = np.zeros((mesh.n_vertices, 2))
	fmap[B] = boundary
	if len(I) == 0:
		return fmap

	factor = factorize(submatrix(L, I, I))
	fmap[I] = solve(factor, -(submatrix(L, I, B) @ boundary))

	return fmap

@dataclass
class FixedPointResult:
	fmap: np.ndarray
	iterations: int
	# Blended energy (1 - lam) E_D + lam |M| / A E_S after every solve, harmonic map first
	energies: List[float] = field(default_factory=list)
	converged: bool = False

	@property
	def deficit(self) -> float:
		"""Relative energy change of the last iteration."""
		if len(self.energies) < 2:
			return np.inf
		return abs(self.energies[-2] - self.energies[-1]) / abs(self.energies[-1])

def _blended_energy(mesh: TriMesh, L_D, fmap: np.ndarray, lam: float) -> float:
	area = image_area(fmap, mesh.faces)
	E_D = dirichlet_energy(L_D, fmap)
	E_S = stretch_energy(build_LS(mesh, fmap), fmap)
	return (1.0 - lam) * E_D + lam * mesh.total_area / area * E_S

def fixed_point(
	mesh: TriMesh,
	lam: float = 0.4,
	iterations: int = 5,
	boundary: Optional[np.ndarray] = None,
	tolerance: Optional[float] = None,
) -> FixedPointResult:
	"""
	Fixed-point iterations on the blended Laplacian with a fixed boundary.

	The first map is the cotangent harmonic map. Each of the following
	iterations re-solves the interior with (1 - lam) L_D + 2 lam L_S,
	where L_S is measured on the previous map with the image area
	normalized to the surface area. boundary defaults to the arc-length
	circle, given in boundary loop order.

	Runs at most iterations solves after the harmonic one. With a
	tolerance, stops as soon as the relative energy deficit falls below it.
	"""
	if tolerance is not None and not tolerance > 0:
		raise ConfigError(f"Fixed-point tolerance must be positive, got {tolerance}")
	if boundary is None:
		boundary = circle_boundary(mesh)

	L_D = build_LD(mesh)
	try:
		fmap = _harmonic_solve(L_D, mesh, boundary)
	except NotPositiveDefinite as e:
		raise SingularSystem(f"Cotangent Laplacian interior block is singular: {e}") from e

	result = FixedPointResult(fmap, 0)
	if tolerance is not None:
		result.energies.append(_blended_energy(mesh, L_D, fmap, lam))

	for iteration in range(1, iterations + 1):
		try:
			area = image_area(fmap, mesh.faces)
			L_S = build_LS(mesh, fmap) * (mesh.total_area / area)
			L = blend_Llambda(L_D, L_S, lam, mesh.total_area, area, mode="fixed_point")
			fmap = _harmonic_solve(L, mesh, boundary)
			if tolerance is not None:
				result.energies.append(_blended_energy(mesh, L_D, fmap, lam))
		except (DegenerateImageFaceError, NotPositiveDefinite) as e:
			LOGW(f"Fixed-point iteration {iteration} stopped: {e}")
			break

		result.fmap, result.iterations = fmap, iteration
		LOGD(f"Fixed-point iteration {iteration}: image area {image_area(fmap, mesh.faces):.6f}")

		if tolerance is not None and result.deficit < tolerance:
			result.converged = True
			LOGD(f"Fixed-point energy deficit {result.deficit:.3e} below {tolerance:.3e}")
			break

	return result

def fixed_point_init(
	mesh: TriMesh,
	lam: float = 0.4,
	iterations: int = 5,
	boundary: Optional[np.ndarray] = None,
) -> np.ndarray:
	"""Map after a fixed number of fixed-point iterations."""
	return fixed_point(mesh, lam, iterations, boundary).fmap
