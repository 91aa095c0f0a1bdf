#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#
"""
Conformal, authalic and augmented Lagrangian energies.

Maps are handled in two forms: a planar n x 2 matrix of image
coordinates, and a flat variable vector. For the disk the vector stacks
both interior coordinate columns and the boundary angles. For the square
it stacks the free first coordinates and the free second coordinates.
"""

from dataclasses import asdict, dataclass
from functools import lru_cache
import numpy as np
from scipy import sparse
from typing import Dict, List, Tuple

from balanceparam.utils.errors import (
	BoundaryOffCircle,
	NonPositiveImageArea,
	ShapeError,
)
from balanceparam.utils.laplacian import build_LD, build_LS
from balanceparam.utils.mesh import TriMesh, signed_areas

# Allowed distance of boundary image points from the unit circle
CIRCLE_TOLERANCE = 1e-6

@dataclass(frozen=True)
class EnergyReport:
	"""Energies of one map. residual is E_A - E_C."""
	E_D: float
	E_S: float
	E_C: float
	E_A: float
	area: float
	residual: float

	def to_dict(self) -> Dict[str, float]:
		return asdict(self)

def cyclic_difference(x: np.ndarray) -> np.ndarray:
	"""(D x)_i = x_{i+1} - x_{i-1}, indices taken cyclically."""
	return np.roll(x, -1) - np.roll(x, 1)

def image_area_polar(theta: np.ndarray) -> float:
	"""Signed area of the polygon inscribed in the unit circle at angles theta."""
	theta = np.asarray(theta, dtype=float)
	return 0.5 * float(np.sum(np.sin(np.roll(theta, -1) - theta)))

def grad_area_polar(theta: np.ndarray) -> np.ndarray:
	theta = np.asarray(theta, dtype=float)
	c, s = np.cos(theta), np.sin(theta)
	return -0.5 * (c * cyclic_difference(c) + s * cyclic_difference(s))

def shoelace_area(points: np.ndarray) -> float:
	"""Signed area of a closed polygon given by its vertices in order."""
	x, y = points[:, 0], points[:, 1]
	return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

def grad_shoelace_area(points: np.ndarray) -> np.ndarray:
	x, y = points[:, 0], points[:, 1]
	return 0.5 * np.column_stack([
		np.roll(y, -1) - np.roll(y, 1),
		np.roll(x, 1) - np.roll(x, -1),
	])

def image_area(fmap: np.ndarray, faces: np.ndarray) -> float:
	"""Total signed image area of a planar map."""
	return float(np.sum(signed_areas(fmap, faces)))

def _quadratic_energy(L: sparse.spmatrix, fmap: np.ndarray) -> float:
	fmap = np.asarray(fmap, dtype=float)
	if fmap.ndim != 2 or fmap.shape[0] != L.shape[0]:
		raise ShapeError(f"Map of shape {fmap.shape} for a {L.shape} operator")

	return 0.5 * float(np.sum(fmap * (L @ fmap)))

def dirichlet_energy(L_D: sparse.spmatrix, fmap: np.ndarray) -> float:
	"""1/2 sum_s f^s^T L_D f^s."""
	return _quadratic_energy(L_D, fmap)

def stretch_energy(L_S: sparse.spmatrix, fmap: np.ndarray) -> float:
	"""1/2 sum_s f^s^T L_S f^s."""
	return _quadratic_energy(L_S, fmap)

def to_polar(mesh: TriMesh, fmap: np.ndarray) -> np.ndarray:
	"""Stack interior coordinates and boundary angles of a disk map."""
	fmap = np.asarray(fmap, dtype=float)
	if fmap.shape != (mesh.n_vertices, 2):
		raise ShapeError(f"Map must be {mesh.n_vertices} x 2, got {fmap.shape}")

	boundary = fmap[mesh.boundary_loop]
	distance = np.abs(np.linalg.norm(boundary, axis=1) - 1.0)
	if distance.max() > CIRCLE_TOLERANCE:
		raise BoundaryOffCircle(
			f"Boundary vertex {int(mesh.boundary_loop[np.argmax(distance)])} "
			f"is {distance.max():.3e} away from the unit circle"
		)

	interior = fmap[mesh.interior_indices]
	theta = np.arctan2(boundary[:, 1], boundary[:, 0])

	return np.concatenate([interior[:, 0], interior[:, 1], theta])

def from_polar(mesh: TriMesh, x: np.ndarray) -> np.ndarray:
	"""Planar map of a stacked disk variable vector."""
	n_I = mesh.n_interior
	x = np.asarray(x, dtype=float)
	if x.shape != (2 * n_I + mesh.n_boundary,):
		raise ShapeError(f"Polar vector has shape {x.shape}")

	fmap = np.empty((mesh.n_vertices, 2))
	fmap[mesh.interior_indices, 0] = x[:n_I]
	fmap[mesh.interior_indices, 1] = x[n_I:2 * n_I]
	theta = x[2 * n_I:]
	fmap[mesh.boundary_loop, 0] = np.cos(theta)
	fmap[mesh.boundary_loop, 1] = np.sin(theta)

	return fmap

@dataclass(frozen=True, eq=False)
class Evaluation:
	"""Everything computed at one point of the variable space."""
	x: np.ndarray
	fmap: np.ndarray
	L_S: sparse.csr_matrix
	report: EnergyReport
	grad_conformal: np.ndarray
	grad_authalic: np.ndarray

	def residual(self, mu: float = 1.0) -> float:
		"""mu E_A - E_C."""
		return mu * self.report.E_A - self.report.E_C

	def auglag_value(self, lam: float, rho: float, mu: float = 1.0) -> float:
		r = self.residual(mu)
		return self.report.E_C + lam * r + 0.5 * rho * r * r

	def auglag_grad(self, lam: float, rho: float, mu: float = 1.0) -> np.ndarray:
		r = self.residual(mu)
		return self.grad_conformal + (lam + rho * r) * (
			mu * self.grad_authalic - self.grad_conformal
		)

class MapEnergy:
	"""
	Energies of a mesh map, expressed in a flat variable vector.

	Subclasses define the variables: how they become a planar map, how a
	planar gradient pulls back onto them and how the image area depends
	on them.
	"""
	shape = ""

	def __init__(self, mesh: TriMesh):
		self.mesh = mesh
		self.L_D = build_LD(mesh)

	@property
	def dimension(self) -> int:
		raise NotImplementedError

	def to_planar(self, x: np.ndarray) -> np.ndarray:
		raise NotImplementedError

	def from_planar(self, fmap: np.ndarray) -> np.ndarray:
		raise NotImplementedError

	def pullback(self, grad: np.ndarray, x: np.ndarray) -> np.ndarray:
		raise NotImplementedError

	def area(self, x: np.ndarray, fmap: np.ndarray) -> Tuple[float, np.ndarray]:
		raise NotImplementedError

	def blocks(self) -> List[Tuple[slice, np.ndarray]]:
		"""(variable slice, vertex indices) pairs that share one Laplacian block."""
		raise NotImplementedError

	def evaluate(self, x: np.ndarray) -> Evaluation:
		x = np.asarray(x, dtype=float)
		if x.shape != (self.dimension,):
			raise ShapeError(f"Variable vector has shape {x.shape}, expected ({self.dimension},)")

		fmap = self.to_planar(x)
		area, grad_area = self.area(x, fmap)
		if not area > 0:
			raise NonPositiveImageArea(f"Image area {area:.3e} is not positive")

		L_S = build_LS(self.mesh, fmap)
		LDf = self.L_D @ fmap
		LSf = L_S @ fmap
		E_D = 0.5 * float(np.sum(fmap * LDf))
		E_S = 0.5 * float(np.sum(fmap * LSf))

		ratio = self.mesh.total_area / area
		E_C = E_D - area
		E_A = ratio * E_S - area

		grad_conformal = self.pullback(LDf, x) - grad_area
		grad_authalic = (
			ratio * self.pullback(2.0 * LSf, x)
			- (ratio * E_S / area + 1.0) * grad_area
		)

		report = EnergyReport(
			E_D=E_D, E_S=E_S, E_C=E_C, E_A=E_A, area=area, residual=E_A - E_C,
		)

		return Evaluation(x, fmap, L_S, report, grad_conformal, grad_authalic)

class DiskEnergy(MapEnergy):
	"""Disk maps: variables are (f_I^1; f_I^2; theta)."""
	shape = "disk"

	@property
	def dimension(self):
		return 2 * self.mesh.n_interior + self.mesh.n_boundary

	def to_planar(self, x):
		return from_polar(self.mesh, x)

	def from_planar(self, fmap):
		return to_polar(self.mesh, fmap)

	def theta(self, x: np.ndarray) -> np.ndarray:
		return x[2 * self.mesh.n_interior:]

	def pullback(self, grad, x):
		theta = self.theta(x)
		G_B = grad[self.mesh.boundary_loop]
		return np.concatenate([
			grad[self.mesh.interior_indices, 0],
			grad[self.mesh.interior_indices, 1],
			-np.sin(theta) * G_B[:, 0] + np.cos(theta) * G_B[:, 1],
		])

	def area(self, x, fmap):
		theta = self.theta(x)
		grad = np.zeros(self.dimension)
		grad[2 * self.mesh.n_interior:] = grad_area_polar(theta)
		return image_area_polar(theta), grad

	def blocks(self):
		n_I = self.mesh.n_interior
		return [
			(slice(0, n_I), self.mesh.interior_indices),
			(slice(n_I, 2 * n_I), self.mesh.interior_indices),
			(slice(2 * n_I, self.dimension), self.mesh.boundary_loop),
		]

class SquareEnergy(MapEnergy):
	"""
	Square maps: variables are the free first and free second coordinates.

	Coordinates fixed by the boundary partition come from template.
	"""
	shape = "square"

	def __init__(self, mesh: TriMesh, template: np.ndarray, free_first: np.ndarray, free_second: np.ndarray):
		super().__init__(mesh)
		template = np.array(template, dtype=float)
		if template.shape != (mesh.n_vertices, 2):
			raise ShapeError(f"Template must be {mesh.n_vertices} x 2, got {template.shape}")

		self.template = template
		self.free_first = np.asarray(free_first, dtype=np.int64)
		self.free_second = np.asarray(free_second, dtype=np.int64)

	@property
	def dimension(self):
		return len(self.free_first) + len(self.free_second)

	def to_planar(self, x):
		k = len(self.free_first)
		fmap = self.template.copy()
		fmap[self.free_first, 0] = x[:k]
		fmap[self.free_second, 1] = x[k:]
		return fmap

	def from_planar(self, fmap):
		fmap = np.asarray(fmap, dtype=float)
		return np.concatenate([fmap[self.free_first, 0], fmap[self.free_second, 1]])

	def pullback(self, grad, x):
		return np.concatenate([grad[self.free_first, 0], grad[self.free_second, 1]])

	def area(self, x, fmap):
		loop = self.mesh.boundary_loop
		planar = np.zeros_like(fmap)
		planar[loop] = grad_shoelace_area(fmap[loop])
		return shoelace_area(fmap[loop]), self.pullback(planar, x)

	def blocks(self):
		k = len(self.free_first)
		return [
			(slice(0, k), self.free_first),
			(slice(k, self.dimension), self.free_second),
		]

@lru_cache(maxsize=8)
def _disk_energy(mesh: TriMesh) -> DiskEnergy:
	return DiskEnergy(mesh)

def conformal_energy(mesh: TriMesh, x: np.ndarray) -> float:
	"""E_C = E_D - A of a disk map in polar form."""
	return _disk_energy(mesh).evaluate(x).report.E_C

def authalic_energy(mesh: TriMesh, x: np.ndarray) -> float:
	"""E_A = (|M| / A) E_S - A of a disk map in polar form."""
	return _disk_energy(mesh).evaluate(x).report.E_A

def grad_conformal(mesh: TriMesh, x: np.ndarray) -> np.ndarray:
	return _disk_energy(mesh).evaluate(x).grad_conformal

def grad_authalic(mesh: TriMesh, x: np.ndarray) -> np.ndarray:
	return _disk_energy(mesh).evaluate(x).grad_authalic

def auglag_value(mesh: TriMesh, x: np.ndarray, lam: float, rho: float, mu: float = 1.0) -> float:
	"""E_C + lam r + rho / 2 r^2 with r = mu E_A - E_C."""
	if rho < 0:
		raise ValueError(f"Penalty rho = {rho} must not be negative")
	return _disk_energy(mesh).evaluate(x).auglag_value(lam, rho, mu)

def auglag_grad(mesh: TriMesh, x: np.ndarray, lam: float, rho: float, mu: float = 1.0) -> np.ndarray:
	if rho < 0:
		raise ValueError(f"Penalty rho = {rho} must not be negative")
	return _disk_energy(mesh).evaluate(x).auglag_grad(lam, rho, mu)
