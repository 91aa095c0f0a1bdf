#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#
"""Distortion measures, fold detection and histograms."""

import csv
from dataclasses import dataclass
import numpy as np
from pathlib import Path
from scipy.spatial import cKDTree
from typing import Dict, List, Optional, Tuple

from balanceparam.utils.errors import (
	DegenerateFaceError,
	DegenerateImageFaceError,
	EmptyInput,
	NonPositiveImageArea,
	ShapeError,
)
from balanceparam.utils.mesh import TriMesh, corner_angles, signed_areas

HISTOGRAM_FIELDS = ("bin_start", "bin_end", "count")

def summarize(values: np.ndarray) -> Tuple[float, float]:
	"""Mean and population standard deviation."""
	values = np.asarray(values, dtype=float).ravel()
	if values.size == 0:
		raise EmptyInput("No values to summarize")
	return float(values.mean()), float(values.std())

def _check_map(mesh: TriMesh, fmap: np.ndarray) -> np.ndarray:
	fmap = np.asarray(fmap, dtype=float)
	if fmap.shape != (mesh.n_vertices, 2):
		raise ShapeError(f"Map must be {mesh.n_vertices} x 2, got {fmap.shape}")
	return fmap

def angular_distortion(mesh: TriMesh, fmap: np.ndarray) -> np.ndarray:
	"""|image angle - surface angle| / surface angle, one value per corner (m x 3)."""
	fmap = _check_map(mesh, fmap)
	try:
		image_angles = corner_angles(fmap, mesh.faces)
	except DegenerateFaceError as e:
		raise DegenerateImageFaceError(str(e)) from e

	surface_angles = corner_angles(mesh.vertices, mesh.faces)

	return np.abs(image_angles - surface_angles) / surface_angles

def area_distortion(mesh: TriMesh, fmap: np.ndarray) -> np.ndarray:
	"""Relative deviation of each face's share of the image area from its share of the surface."""
	fmap = _check_map(mesh, fmap)
	image_areas = signed_areas(fmap, mesh.faces)
	image_total = image_areas.sum()
	if not image_total > 0:
		raise NonPositiveImageArea(f"Image area {image_total:.3e} is not positive")

	surface_share = mesh.face_areas / mesh.total_area

	return np.abs(image_areas / image_total - surface_share) / surface_share

def fold_count(mesh: TriMesh, fmap: np.ndarray) -> int:
	"""Number of image triangles with non-positive signed area."""
	return int(np.count_nonzero(signed_areas(_check_map(mesh, fmap), mesh.faces) <= 0))

@dataclass(frozen=True, eq=False)
class DistortionReport:
	angle: np.ndarray
	area: np.ndarray
	folds: int

	@property
	def angle_stats(self):
		return summarize(self.angle)

	@property
	def area_stats(self):
		return summarize(self.area)

	def to_dict(self) -> Dict[str, float]:
		angle_mean, angle_sd = self.angle_stats
		area_mean, area_sd = self.area_stats
		return {
			"angle_mean": angle_mean,
			"angle_sd": angle_sd,
			"area_mean": area_mean,
			"area_sd": area_sd,
			"folds": self.folds,
			"corners": int(self.angle.size),
			"faces": int(self.area.size),
			# Angular statistics pool every corner of every face
			"angle_pooling": "all-corners",
		}

def distortion_report(mesh: TriMesh, fmap: np.ndarray) -> DistortionReport:
	return DistortionReport(
		angle=angular_distortion(mesh, fmap).ravel(),
		area=area_distortion(mesh, fmap),
		folds=fold_count(mesh, fmap),
	)

@dataclass(frozen=True, eq=False)
class ReconstructionReport:
	"""d_angle in degrees (per corner) and d_area (per face) of a reconstructed mesh."""
	d_angle: np.ndarray
	d_area: np.ndarray

	def to_dict(self) -> Dict[str, float]:
		d_angle_mean, d_angle_sd = summarize(self.d_angle)
		d_area_mean, d_area_sd = summarize(self.d_area)
		return {
			"d_angle_mean": d_angle_mean,
			"d_angle_sd": d_angle_sd,
			"d_area_mean": d_area_mean,
			"d_area_sd": d_area_sd,
		}

def reconstruction_metrics(mesh: TriMesh) -> ReconstructionReport:
	angles = np.degrees(corner_angles(mesh.vertices, mesh.faces)).ravel()
	d_angle = np.minimum(np.abs(angles - 45.0), np.abs(angles - 90.0))

	mean_area = mesh.face_areas.mean()
	d_area = np.abs(mesh.face_areas - mean_area) / mean_area

	return ReconstructionReport(d_angle, d_area)

def histogram(values: np.ndarray, bins: int, value_range: Optional[Tuple[float, float]] = None) -> List[Dict[str, float]]:
	"""Bin values into rows of (bin_start, bin_end, count)."""
	values = np.asarray(values, dtype=float).ravel()
	if values.size == 0:
		raise EmptyInput("Cannot build a histogram of nothing")
	if bins < 1:
		raise ValueError(f"Need at least one bin, got {bins}")

	counts, edges = np.histogram(values, bins=bins, range=value_range)

	return [
		{"bin_start": float(start), "bin_end": float(end), "count": int(count)}
		for start, end, count in zip(edges[:-1], edges[1:], counts)
	]

def write_histogram(path: Path, rows: List[Dict[str, float]]):
	with open(path, "w", newline="") as f:
		writer = csv.DictWriter(f, fieldnames=HISTOGRAM_FIELDS)
		writer.writeheader()
		writer.writerows(rows)

def sample_surface(mesh: TriMesh, samples: int, seed: int = 0) -> np.ndarray:
	"""Area-weighted random points on the surface, plus every vertex."""
	rng = np.random.default_rng(seed)
	faces = rng.choice(mesh.n_faces, size=samples, p=mesh.face_areas / mesh.total_area)
	r1 = np.sqrt(rng.random(samples))
	r2 = rng.random(samples)
	p = mesh.vertices[mesh.faces[faces]]
	points = (
		(1 - r1)[:, None] * p[:, 0]
		+ (r1 * (1 - r2))[:, None] * p[:, 1]
		+ (r1 * r2)[:, None] * p[:, 2]
	)

	return np.concatenate([points, mesh.vertices])

def sampled_hausdorff(a: TriMesh, b: TriMesh, samples: int = 20000, seed: int = 0) -> float:
	"""Symmetric Hausdorff distance between two surfaces, approximated on point samples."""
	points_a = sample_surface(a, samples, seed)
	points_b = sample_surface(b, samples, seed + 1)

	a_to_b, _ = cKDTree(points_b).query(points_a)
	b_to_a, _ = cKDTree(points_a).query(points_b)

	return float(max(a_to_b.max(), b_to_a.max()))
