#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#
"""Geometry images of square parameterized surfaces."""

import cv2
from dataclasses import dataclass
import json
import numpy as np
from pathlib import Path
from sebaubuntu_libs.liblogging import LOGD, LOGI
from typing import Optional

from balanceparam.lib.libgeomimage.locator import TriangleLocator
from balanceparam.utils.errors import (
	FoldedMapError,
	GeometryImageIOError,
	MissingSidecar,
	ShapeError,
)
from balanceparam.utils.mesh import TriMesh
from balanceparam.utils.metrics import fold_count

QUANTIZATION_LEVELS = 65535

@dataclass(frozen=True, eq=False)
class GeometryImage:
	"""H x W grid of 3D surface samples over the unit square."""
	samples: np.ndarray
	mask: np.ndarray
	bbox_min: np.ndarray
	bbox_max: np.ndarray

	@classmethod
	def from_samples(cls, samples: np.ndarray, mask: Optional[np.ndarray] = None) -> "GeometryImage":
		samples = np.asarray(samples, dtype=float)
		if samples.ndim != 3 or samples.shape[2] != 3:
			raise ShapeError(f"Samples must be H x W x 3, got {samples.shape}")
		if samples.shape[0] < 2 or samples.shape[1] < 2:
			raise ShapeError(f"Geometry images need at least 2 x 2 pixels, got {samples.shape[:2]}")

		if mask is None:
			mask = np.ones(samples.shape[:2], dtype=bool)
		mask = np.asarray(mask, dtype=bool)
		if mask.shape != samples.shape[:2]:
			raise ShapeError(f"Mask of shape {mask.shape} for {samples.shape[:2]} samples")

		valid = samples[mask] if mask.any() else np.zeros((1, 3))

		return cls(samples, mask, valid.min(axis=0), valid.max(axis=0))

	@property
	def width(self):
		return self.samples.shape[1]

	@property
	def height(self):
		return self.samples.shape[0]

def encode(
	mesh: TriMesh,
	fmap: np.ndarray,
	width: int,
	height: int,
	allow_outside: bool = False,
) -> GeometryImage:
	"""
	Sample the surface on a width x height lattice of the parameter domain.

	Pixel (i, j) samples u = i / (W - 1), v = j / (H - 1). With
	allow_outside pixels outside the map are masked out instead of
	raising PointLocationFailure.
	"""
	if width < 2 or height < 2:
		raise ShapeError(f"Geometry images need at least 2 x 2 pixels, got {width} x {height}")

	folds = fold_count(mesh, fmap)
	if folds:
		raise FoldedMapError(f"Map has {folds} folded triangles")

	u, v = np.meshgrid(np.linspace(0.0, 1.0, width), np.linspace(0.0, 1.0, height))
	queries = np.column_stack([u.ravel(), v.ravel()])

	locator = TriangleLocator(np.asarray(fmap, dtype=float), mesh.faces)
	faces, weights = locator.locate(queries, allow_outside)
	found = faces >= 0

	corners = mesh.vertices[mesh.faces[np.where(found, faces, 0)]]
	samples = np.einsum("ik,ikj->ij", weights, corners)
	samples[~found] = 0.0

	LOGD(f"Encoded {width} x {height} geometry image, {int((~found).sum())} pixels outside")

	return GeometryImage.from_samples(
		samples.reshape(height, width, 3), found.reshape(height, width)
	)

def reconstruct(img: GeometryImage) -> TriMesh:
	"""
	Triangulate the pixel grid, adding a center vertex to every quad.

	The center takes the average of the 4 corner samples. Only quads with
	all 4 corners inside the mask are kept.
	"""
	H, W = img.height, img.width
	grid = np.arange(H * W).reshape(H, W)
	centers = H * W + np.arange((H - 1) * (W - 1)).reshape(H - 1, W - 1)

	a = grid[:-1, :-1]
	b = grid[:-1, 1:]
	c = grid[1:, 1:]
	d = grid[1:, :-1]

	positions = img.samples.reshape(-1, 3)
	center_positions = 0.25 * (positions[a] + positions[b] + positions[c] + positions[d])
	vertices = np.concatenate([positions, center_positions.reshape(-1, 3)])

	keep = (img.mask[:-1, :-1] & img.mask[:-1, 1:] & img.mask[1:, 1:] & img.mask[1:, :-1]).ravel()
	a, b, c, d, e = (array.ravel()[keep] for array in (a, b, c, d, centers))
	faces = np.concatenate([
		np.column_stack([a, b, e]),
		np.column_stack([b, c, e]),
		np.column_stack([c, d, e]),
		np.column_stack([d, a, e]),
	])

	used, faces = np.unique(faces, return_inverse=True)
	faces = faces.reshape(-1, 3)

	return TriMesh.from_arrays(vertices[used], faces, strict=False)

def sidecar_path(path: Path) -> Path:
	path = Path(path)
	return path.with_name(f"{path.stem}.gi.json")

def write_image(img: GeometryImage, path: Path):
	"""Write a 16-bit RGB PNG (x, y, z in R, G, B) and its JSON sidecar."""
	path = Path(path)
	extent = img.bbox_max - img.bbox_min
	scale = np.where(extent > 0, extent, 1.0)
	quantized = np.rint((img.samples - img.bbox_min) / scale * QUANTIZATION_LEVELS)
	quantized = np.clip(quantized, 0, QUANTIZATION_LEVELS).astype(np.uint16)
	quantized[~img.mask] = 0

	path.parent.mkdir(parents=True, exist_ok=True)
	# OpenCV stores channels as BGR
	if not cv2.imwrite(str(path), quantized[:, :, ::-1]):
		raise GeometryImageIOError(f"Failed to write {path}")

	sidecar = {
		"bbox_min": img.bbox_min.tolist(),
		"bbox_max": img.bbox_max.tolist(),
		"width": img.width,
		"height": img.height,
		"mask": img.mask.astype(int).tolist(),
	}
	sidecar_path(path).write_text(json.dumps(sidecar))

	LOGI(f"Wrote {img.width} x {img.height} geometry image to {path}")

def read_image(path: Path) -> GeometryImage:
	path = Path(path)
	sidecar_file = sidecar_path(path)
	if not sidecar_file.is_file():
		raise MissingSidecar(f"Missing sidecar {sidecar_file}")

	try:
		sidecar = json.loads(sidecar_file.read_text())
		bbox_min = np.array(sidecar["bbox_min"], dtype=float)
		bbox_max = np.array(sidecar["bbox_max"], dtype=float)
		width, height = int(sidecar["width"]), int(sidecar["height"])
	except (KeyError, TypeError, ValueError) as e:
		raise GeometryImageIOError(f"Malformed sidecar {sidecar_file}: {e}") from e

	raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
	if raw is None:
		raise GeometryImageIOError(f"Failed to read {path}")
	if raw.dtype != np.uint16 or raw.shape != (height, width, 3):
		raise GeometryImageIOError(
			f"{path} is {raw.dtype} {raw.shape}, expected uint16 ({height}, {width}, 3)"
		)

	mask = sidecar.get("mask")
	mask = np.ones((height, width), dtype=bool) if mask is None else np.array(mask, dtype=bool)

	extent = bbox_max - bbox_min
	samples = bbox_min + raw[:, :, ::-1].astype(float) / QUANTIZATION_LEVELS * extent

	return GeometryImage(samples, mask, bbox_min, bbox_max)
