#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#

import numpy as np
import pytest

from balanceparam.utils.errors import (
	DegenerateFaceError,
	ParseError,
	ShapeError,
	TopologyError,
	ValidationWarning,
)
from balanceparam.utils.mesh import (
	TriMesh,
	boundary_loop,
	corner_angles,
	load_mesh,
	load_planar_map,
	write_obj,
)
from balanceparam.utils.synthetic import planar_disk, square_grid

FAN_OBJ = """# unit square
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0.5 0.5 0
vt 0 0
f 1/1 2 5
f 2 3 5
f 3 4 5
f -2 -5 -1
"""

FAN_OFF = """OFF
5 4 0
0 0 0
1 0 0
1 1 0
0 1 0
0.5 0.5 0
3 0 1 4
3 1 2 4
3 2 3 4
3 3 0 4
"""

def test_square_fan(fan):
	assert fan.n_vertices == 5
	assert fan.n_boundary == 4
	assert fan.n_interior == 1
	assert fan.total_area == pytest.approx(1.0)
	assert fan.boundary_loop.tolist() == [0, 1, 2, 3]
	assert fan.interior_indices.tolist() == [4]

def test_mesh_is_immutable(fan):
	with pytest.raises(ValueError):
		fan.vertices[0, 0] = 1.0

def test_single_triangle_warns():
	with pytest.warns(ValidationWarning):
		mesh = TriMesh.from_arrays([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]])

	assert mesh.n_interior == 0
	assert mesh.boundary_loop.tolist() == [0, 1, 2]

def test_closed_tetrahedron():
	vertices = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]
	faces = [[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]]
	with pytest.raises(TopologyError):
		TriMesh.from_arrays(vertices, faces)

def test_annulus():
	outer = [[np.cos(a), np.sin(a), 0] for a in np.linspace(0, 2 * np.pi, 6, endpoint=False)]
	inner = [[0.5 * x, 0.5 * y, 0] for x, y, _ in outer]
	faces = []
	for k in range(6):
		o0, o1 = k, (k + 1) % 6
		i0, i1 = 6 + k, 6 + (k + 1) % 6
		faces += [[o0, o1, i1], [o0, i1, i0]]

	with pytest.raises(TopologyError):
		TriMesh.from_arrays(outer + inner, faces)

def test_inconsistent_orientation(fan):
	faces = fan.faces.copy()
	faces[0] = faces[0][::-1]
	with pytest.raises(TopologyError):
		TriMesh.from_arrays(fan.vertices, faces)

def test_unreferenced_vertex(fan):
	vertices = np.vstack([fan.vertices, [[2.0, 2.0, 0.0]]])
	with pytest.raises(TopologyError):
		TriMesh.from_arrays(vertices, fan.faces)

def test_index_out_of_range(fan):
	faces = fan.faces.copy()
	faces[0, 0] = 7
	with pytest.raises(ParseError):
		TriMesh.from_arrays(fan.vertices, faces)

def test_degenerate_face():
	vertices = [[0, 0, 0], [1, 0, 0], [2, 0, 0], [1, 1, 0]]
	faces = [[0, 1, 3], [1, 2, 3], [0, 2, 1]]
	with pytest.raises((DegenerateFaceError, TopologyError)):
		TriMesh.from_arrays(vertices, faces)

	with pytest.raises(DegenerateFaceError):
		TriMesh.from_arrays([[0, 0, 0], [1, 0, 0], [2, 0, 0]], [[0, 1, 2]])

def test_bad_shape():
	with pytest.raises(ShapeError):
		TriMesh.from_arrays([[0, 0, 0, 0]], [[0, 0, 0]])

def test_hemisphere_boundary(hemisphere):
	on_plane = np.count_nonzero(hemisphere.vertices[:, 2] == 0.0)
	assert hemisphere.n_boundary == on_plane
	assert hemisphere.n_vertices == 1951

	# Brute force: edges used by a single face
	edges = {}
	for face in hemisphere.faces:
		for c in range(3):
			key = tuple(sorted((face[c], face[(c + 1) % 3])))
			edges[key] = edges.get(key, 0) + 1
	boundary_vertices = {v for edge, count in edges.items() if count == 1 for v in edge}
	assert boundary_vertices == set(hemisphere.boundary_loop.tolist())

def test_boundary_loop_is_counterclockwise(disk):
	points = disk.vertices[disk.boundary_loop, :2]
	x, y = points[:, 0], points[:, 1]
	assert np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y) > 0
	assert disk.boundary_loop[0] == disk.boundary_loop.min()

def test_boundary_loop_face_order_invariant(grid):
	rng = np.random.default_rng(3)
	shuffled = grid.faces[rng.permutation(grid.n_faces)]
	assert boundary_loop(shuffled).tolist() == grid.boundary_loop.tolist()
	assert boundary_loop(grid) is grid.boundary_loop

def test_total_area(hemisphere):
	total = 0.0
	for i, j, k in hemisphere.faces:
		v = hemisphere.vertices
		total += 0.5 * np.linalg.norm(np.cross(v[j] - v[i], v[k] - v[i]))
	assert hemisphere.total_area == pytest.approx(total, rel=1e-12)

def test_corner_angles_examples():
	right = corner_angles(np.array([[0, 0], [1, 0], [0, 1]]), np.array([0, 1, 2]))
	np.testing.assert_allclose(right, [np.pi / 2, np.pi / 4, np.pi / 4], atol=1e-15)

	equilateral = np.array([[0, 0], [1, 0], [0.5, np.sqrt(3) / 2]])
	np.testing.assert_allclose(corner_angles(equilateral, np.array([0, 1, 2])), [np.pi / 3] * 3)

	points = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 1.0]])
	a, b, c = np.sqrt(2), np.sqrt(2), 2.0
	expected = [
		np.arccos((b ** 2 + c ** 2 - a ** 2) / (2 * b * c)),
		np.arccos((a ** 2 + c ** 2 - b ** 2) / (2 * a * c)),
		np.arccos((a ** 2 + b ** 2 - c ** 2) / (2 * a * b)),
	]
	np.testing.assert_allclose(corner_angles(points, np.array([0, 1, 2])), expected)

def test_corner_angles_properties(hemisphere):
	angles = corner_angles(hemisphere.vertices, hemisphere.faces)
	np.testing.assert_allclose(angles.sum(axis=1), np.pi, atol=1e-9)
	assert np.all((angles > 0) & (angles < np.pi))

	p = hemisphere.vertices[hemisphere.faces]
	opposite = np.stack([
		np.linalg.norm(p[:, 2] - p[:, 1], axis=1),
		np.linalg.norm(p[:, 0] - p[:, 2], axis=1),
		np.linalg.norm(p[:, 1] - p[:, 0], axis=1),
	], axis=1)
	assert np.all(np.argmax(angles, axis=1) == np.argmax(opposite, axis=1))

def test_corner_angles_degenerate():
	with pytest.raises(DegenerateFaceError):
		corner_angles(np.array([[0, 0], [1, 0], [1, 0]]), np.array([0, 1, 2]))

def test_load_obj(tmp_path):
	path = tmp_path / "fan.obj"
	path.write_text(FAN_OBJ)
	mesh = load_mesh(path)
	assert mesh.n_vertices == 5
	assert mesh.faces[-1].tolist() == [3, 0, 4]
	assert mesh.total_area == pytest.approx(1.0)

def test_load_off(tmp_path):
	path = tmp_path / "fan.off"
	path.write_text(FAN_OFF)
	mesh = load_mesh(path)
	assert mesh.boundary_loop.tolist() == [0, 1, 2, 3]

def test_load_errors(tmp_path):
	quad = tmp_path / "quad.obj"
	quad.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
	with pytest.raises(ParseError):
		load_mesh(quad)

	garbage = tmp_path / "garbage.obj"
	garbage.write_text("v 0 zero 0\n")
	with pytest.raises(ParseError):
		load_mesh(garbage)

	with pytest.raises(ParseError):
		load_mesh(tmp_path / "mesh.stl")

	with pytest.raises(OSError):
		load_mesh(tmp_path / "missing.obj")

def test_write_obj_round_trip(tmp_path):
	mesh = square_grid(3)
	fmap = mesh.vertices[:, :2] * 0.5 + 0.1
	path = tmp_path / "map.obj"
	write_obj(path, fmap, mesh.faces)

	np.testing.assert_array_equal(load_planar_map(path, mesh.n_vertices), fmap)
	assert load_mesh(path).faces.tolist() == mesh.faces.tolist()

	with pytest.raises(ShapeError):
		load_planar_map(path, mesh.n_vertices + 1)

def test_synthetic_counts():
	for rings in (1, 2, 5):
		mesh = planar_disk(rings)
		assert mesh.n_faces == 6 * rings ** 2
		assert mesh.n_vertices == 1 + 3 * rings * (rings + 1)
		assert mesh.n_boundary == 6 * rings

	grid = square_grid(5)
	assert grid.n_faces == 50
	assert grid.n_boundary == 20

def test_finger(finger_mesh):
	assert finger_mesh.n_boundary == 6 * 16
	assert np.abs(finger_mesh.vertices[finger_mesh.boundary_loop, 2]).max() <= 1e-5
	assert finger_mesh.vertices[:, 2].argmax() == 0
	assert finger_mesh.vertices[0, 2] == pytest.approx(1.0)
