#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#
"""Point location in planar triangulations through a uniform grid."""

import numpy as np
from typing import Dict, List, Optional, Tuple

from balanceparam.utils.errors import PointLocationFailure

# Points this close to the triangulation snap onto it
SNAP_DISTANCE = 1e-9
INSIDE_TOLERANCE = 1e-12

class TriangleLocator:
	def __init__(self, points: np.ndarray, faces: np.ndarray, resolution: Optional[int] = None):
		self.points = points
		self.faces = faces

		triangles = points[faces]
		self.a = triangles[:, 0]
		self.ab = triangles[:, 1] - self.a
		self.ac = triangles[:, 2] - self.a
		self.det = self.ab[:, 0] * self.ac[:, 1] - self.ab[:, 1] * self.ac[:, 0]

		self.origin = points.min(axis=0)
		extent = points.max(axis=0) - self.origin
		self.resolution = resolution or max(1, int(np.ceil(np.sqrt(len(faces)))))
		self.cell_size = np.where(extent > 0, extent, 1.0) / self.resolution

		low = self._cells(triangles.min(axis=1))
		high = self._cells(triangles.max(axis=1))
		self.buckets: Dict[int, List[int]] = {}
		for face, (lo, hi) in enumerate(zip(low, high)):
			for i in range(lo[0], hi[0] + 1):
				for j in range(lo[1], hi[1] + 1):
					self.buckets.setdefault(i * self.resolution + j, []).append(face)

	def _cells(self, points: np.ndarray) -> np.ndarray:
		cells = np.floor((points - self.origin) / self.cell_size).astype(np.int64)
		return np.clip(cells, 0, self.resolution - 1)

	def barycentric(self, points: np.ndarray, faces: np.ndarray) -> np.ndarray:
		"""Barycentric coordinates of every point in every face, k x c x 3."""
		offset = points[:, None, :] - self.a[None, faces]
		ab, ac = self.ab[faces], self.ac[faces]
		det = self.det[faces]
		l1 = (offset[..., 0] * ac[:, 1] - offset[..., 1] * ac[:, 0]) / det
		l2 = (ab[:, 0] * offset[..., 1] - ab[:, 1] * offset[..., 0]) / det
		return np.stack([1.0 - l1 - l2, l1, l2], axis=-1)

	def locate(self, queries: np.ndarray, allow_outside: bool = False) -> Tuple[np.ndarray, np.ndarray]:
		"""
		Containing face and barycentric weights of every query point.

		Points outside every face snap to the nearest one when within
		SNAP_DISTANCE. Otherwise they raise PointLocationFailure, or get
		face -1 with allow_outside.
		"""
		faces = np.full(len(queries), -1, dtype=np.int64)
		weights = np.zeros((len(queries), 3))

		flat = self._cells(queries) @ np.array([self.resolution, 1])
		order = np.argsort(flat, kind="stable")
		boundaries = np.flatnonzero(np.diff(flat[order])) + 1
		for group in np.split(order, boundaries):
			candidates = np.array(self.buckets.get(int(flat[group[0]]), []), dtype=np.int64)
			if not len(candidates):
				continue

			coordinates = self.barycentric(queries[group], candidates)
			inside = coordinates.min(axis=2) >= -INSIDE_TOLERANCE
			hit = inside.any(axis=1)
			first = np.argmax(inside, axis=1)

			rows = group[hit]
			faces[rows] = candidates[first[hit]]
			weights[rows] = coordinates[np.flatnonzero(hit), first[hit]]

		for index in np.flatnonzero(faces < 0):
			face, distance, closest = self.nearest(queries[index])
			if distance <= SNAP_DISTANCE:
				faces[index] = face
				coordinates = np.clip(self.barycentric(closest[None], np.array([face]))[0, 0], 0.0, None)
				weights[index] = coordinates / coordinates.sum()
			elif not allow_outside:
				raise PointLocationFailure(
					f"Point {queries[index].tolist()} is {distance:.3e} away from the triangulation"
				)

		return faces, weights

	def nearest(self, point: np.ndarray) -> Tuple[int, float, np.ndarray]:
		"""Nearest face, its distance and the closest point on its edges."""
		best_distance = np.full(len(self.faces), np.inf)
		best_point = np.zeros((len(self.faces), 2))
		for start, edge in ((self.a, self.ab), (self.a, self.ac), (self.a + self.ab, self.ac - self.ab)):
			t = np.einsum("ij,ij->i", point - start, edge) / np.einsum("ij,ij->i", edge, edge)
			closest = start + np.clip(t, 0.0, 1.0)[:, None] * edge
			distance = np.linalg.norm(closest - point, axis=1)
			better = distance < best_distance
			best_distance[better] = distance[better]
			best_point[better] = closest[better]

		face = int(np.argmin(best_distance))
		return face, float(best_distance[face]), best_point[face]
