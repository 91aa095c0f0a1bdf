#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#
"""Deterministic synthetic test meshes."""

import numpy as np
from typing import Tuple

from balanceparam.utils.mesh import TriMesh

def square_fan() -> TriMesh:
	"""Unit square split into 4 triangles around its center."""
	vertices = [
		[0.0, 0.0, 0.0],
		[1.0, 0.0, 0.0],
		[1.0, 1.0, 0.0],
		[0.0, 1.0, 0.0],
		[0.5, 0.5, 0.0],
	]
	faces = [
		[0, 1, 4],
		[1, 2, 4],
		[2, 3, 4],
		[3, 0, 4],
	]

	return TriMesh.from_arrays(vertices, faces)

def square_grid(k: int) -> TriMesh:
	"""
	Unit square with k x k cells, each cut into 2 triangles.

	Diagonals point towards the square corners, so every corner cell is cut
	through its corner and no face is made of boundary vertices only.
	"""
	if k < 1:
		raise ValueError("Grid needs at least one cell per side")

	ticks = np.linspace(0.0, 1.0, k + 1)
	x, y = np.meshgrid(ticks, ticks)
	vertices = np.column_stack([x.ravel(), y.ravel(), np.zeros(x.size)])

	half = k / 2
	faces = []
	for j in range(k):
		for i in range(k):
			a = j * (k + 1) + i
			b = a + 1
			c = b + k + 1
			d = a + k + 1
			if (i < half) == (j < half):
				faces += [[a, b, c], [a, c, d]]
			else:
				faces += [[a, b, d], [b, c, d]]

	return TriMesh.from_arrays(vertices, faces)

def _ring_start(ring: int) -> int:
	return 1 + 3 * ring * (ring - 1)

def disk_triangulation(rings: int) -> Tuple[np.ndarray, np.ndarray]:
	"""
	Concentric hexagonal rings on the unit disk.

	Returns polar coordinates (radius, angle) for each vertex and the faces.
	Ring r holds 6r vertices at angles 2 pi k / 6r and radius r / rings;
	vertex 0 is the center.
	"""
	if rings < 1:
		raise ValueError("Disk needs at least one ring")

	polar = [(0.0, 0.0)]
	for ring in range(1, rings + 1):
		count = 6 * ring
		polar += [(ring / rings, 2 * np.pi * k / count) for k in range(count)]

	faces = [[0, 1 + k, 1 + (k + 1) % 6] for k in range(6)]
	for ring in range(2, rings + 1):
		n_in, n_out = 6 * (ring - 1), 6 * ring
		start_in, start_out = _ring_start(ring - 1), _ring_start(ring)

		i = j = 0
		while i < n_in or j < n_out:
			inner = start_in + i % n_in
			outer = start_out + j % n_out
			# Compare the next angles (j + 1) / n_out and (i + 1) / n_in exactly
			advance_outer = i == n_in or (
				j < n_out and (j + 1) * (ring - 1) <= (i + 1) * ring
			)
			if advance_outer:
				faces.append([inner, outer, start_out + (j + 1) % n_out])
				j += 1
			else:
				faces.append([inner, outer, start_in + (i + 1) % n_in])
				i += 1

	return np.array(polar), np.array(faces)

def planar_disk(rings: int = 10) -> TriMesh:
	"""Flat disk triangulation with its boundary on the unit circle."""
	polar, faces = disk_triangulation(rings)
	radius, angle = polar[:, 0], polar[:, 1]
	vertices = np.column_stack([
		radius * np.cos(angle), radius * np.sin(angle), np.zeros(len(polar))
	])

	return TriMesh.from_arrays(vertices, faces)

def bumpy_hemisphere(rings: int = 25, amplitude: float = 0.1, lobes: int = 5) -> TriMesh:
	"""
	Unit hemisphere with a radial bump pattern.

	The boundary ring lies exactly in the plane z = 0. The default has 1951
	vertices.
	"""
	polar, faces = disk_triangulation(rings)
	theta = polar[:, 1]
	phi = polar[:, 0] * np.pi / 2

	scale = 1.0 + amplitude * np.cos(lobes * theta) * np.sin(2 * phi) ** 2
	vertices = np.column_stack([
		scale * np.sin(phi) * np.cos(theta),
		scale * np.sin(phi) * np.sin(theta),
		scale * np.cos(phi),
	])
	vertices[_ring_start(rings):, 2] = 0.0

	return TriMesh.from_arrays(vertices, faces)

def finger(rings: int = 25, height: float = 1.0, width: float = 0.15) -> TriMesh:
	"""Unit disk lifted by a narrow Gaussian protrusion at its center."""
	polar, faces = disk_triangulation(rings)
	radius, angle = polar[:, 0], polar[:, 1]
	vertices = np.column_stack([
		radius * np.cos(angle),
		radius * np.sin(angle),
		height * np.exp(-radius ** 2 / (2 * width ** 2)),
	])

	return TriMesh.from_arrays(vertices, faces)
