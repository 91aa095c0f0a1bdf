#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#
"""Preconditioned nonlinear conjugate gradient at fixed multiplier and penalty."""

import csv
from dataclasses import dataclass, field
import numpy as np
from pathlib import Path
from scipy import sparse
from sebaubuntu_libs.liblogging import LOGD, LOGW
from typing import Callable, Dict, List, Optional, Tuple

from balanceparam.utils.energy import Evaluation, MapEnergy
from balanceparam.utils.errors import (
	ConfigError,
	DegenerateImageFaceError,
	LineSearchFailure,
	NonPositiveImageArea,
)
from balanceparam.utils.laplacian import blend_Llambda
from balanceparam.utils.linalg import CholeskyFactor, factorize, solve, submatrix

TRACE_FIELDS = ("iteration", "E_C", "E_A", "grad_norm", "alpha")

@dataclass(frozen=True)
class PCGConfig:
	tolerance: float = 1e-2
	max_iterations: int = 500
	initial_step: float = 0.1
	c1: float = 1e-4
	max_retries: int = 10
	max_halvings: int = 20
	# Interpolated steps below this fall back to halving
	min_step: float = 1e-12
	strict_wolfe: bool = False
	c2: float = 0.4
	# Steepest descent restart period, 2 x dimension when unset
	restart_every: Optional[int] = None
	ordering: str = "minimum_degree"

	def __post_init__(self):
		if not self.tolerance > 0:
			raise ConfigError(f"PCG tolerance must be positive, got {self.tolerance}")
		if not self.initial_step > 0:
			raise ConfigError(f"Initial step must be positive, got {self.initial_step}")
		if not 0 < self.min_step < self.initial_step:
			raise ConfigError(f"min_step must lie in (0, initial_step), got {self.min_step}")
		if self.max_iterations < 0:
			raise ConfigError("max_iterations must not be negative")
		if not 0 < self.c1 < self.c2 < 1:
			raise ConfigError("Line search constants must satisfy 0 < c1 < c2 < 1")

class Preconditioner:
	"""
	Block diagonal SPD preconditioner.

	Every block pairs a slice of the variable vector with the Cholesky
	factor of the matching principal block of the blended Laplacian.
	"""
	def __init__(self, blocks: List[Tuple[slice, CholeskyFactor, sparse.csr_matrix]]):
		self.blocks = blocks

	def apply(self, r: np.ndarray) -> np.ndarray:
		"""Solve M h = r blockwise."""
		h = np.empty_like(r, dtype=float)
		for index, factor, _ in self.blocks:
			h[index] = solve(factor, r[index])
		return h

	def matvec(self, x: np.ndarray) -> np.ndarray:
		y = np.empty_like(x, dtype=float)
		for index, _, matrix in self.blocks:
			y[index] = matrix @ x[index]
		return y

def build_preconditioner(
	energy: MapEnergy,
	x0: np.ndarray,
	lam: float,
	mu: float = 1.0,
	ordering: str = "minimum_degree",
) -> Preconditioner:
	"""Factor the blocks of (1 - lam) L_D + (2 |M| lam mu / A) L_S at x0."""
	evaluation = energy.evaluate(x0)
	L = blend_Llambda(
		energy.L_D, evaluation.L_S, lam,
		energy.mesh.total_area, evaluation.report.area, mu=mu,
	)

	factors: Dict[bytes, Tuple[CholeskyFactor, sparse.csr_matrix]] = {}
	blocks = []
	for index, vertices in energy.blocks():
		key = vertices.tobytes()
		if key not in factors:
			block = submatrix(L, vertices, vertices)
			factors[key] = (factorize(block, ordering), block)
		factor, block = factors[key]
		blocks.append((index, factor, block))

	LOGD(f"Preconditioner: {len(factors)} factors, lambda={lam:.4f}")

	return Preconditioner(blocks)

def line_search(
	phi: Callable[[float], float],
	phi0: float,
	dphi0: float,
	alpha_prev: float,
	config: PCGConfig = PCGConfig(),
	dphi: Optional[Callable[[float], float]] = None,
) -> Tuple[float, float]:
	"""
	Quadratic interpolation line search with an Armijo safeguard.

	phi returns +inf for rejected trial points. Returns the step and
	phi at that step.
	"""
	if dphi0 == 0:
		return 0.0, phi0
	if dphi0 > 0:
		raise LineSearchFailure(f"Not a descent direction (slope {dphi0:.3e})")

	def acceptable(alpha, value):
		if not np.isfinite(value) or value > phi0 + config.c1 * alpha * dphi0:
			return False
		if config.strict_wolfe and dphi is not None:
			return abs(dphi(alpha)) <= config.c2 * abs(dphi0)
		return True

	trial = alpha_prev
	value = phi(trial)
	for _ in range(config.max_retries):
		if trial < config.min_step:
			break
		if not np.isfinite(value):
			trial /= 2
			value = phi(trial)
			continue

		a = (value - phi0 - trial * dphi0) / trial ** 2
		if not np.isfinite(a) or a <= 0:
			break

		alpha = -dphi0 / (2 * a)
		if not alpha >= config.min_step:
			break

		alpha_value = phi(alpha)
		if acceptable(alpha, alpha_value):
			return alpha, alpha_value

		trial, value = alpha, alpha_value

	alpha = alpha_prev
	for _ in range(config.max_halvings):
		value = phi(alpha)
		if acceptable(alpha, value):
			return alpha, value
		alpha /= 2

	raise LineSearchFailure(f"No acceptable step after {config.max_halvings} halvings")

@dataclass
class PCGResult:
	x: np.ndarray
	evaluation: Evaluation
	iterations: int
	converged: bool
	grad_norm: float
	line_search_failed: bool = False
	trace: List[Dict[str, float]] = field(default_factory=list)

	@property
	def report(self):
		return self.evaluation.report

def minimize(
	energy: MapEnergy,
	x_init: np.ndarray,
	lam: float,
	rho: float,
	config: PCGConfig = PCGConfig(),
	mu: float = 1.0,
	preconditioner: Optional[Preconditioner] = None,
) -> PCGResult:
	"""Minimize the augmented Lagrangian E_C + lam r + rho / 2 r^2 from x_init."""
	if rho < 0:
		raise ConfigError(f"Penalty rho = {rho} must not be negative")

	x = np.array(x_init, dtype=float)
	if preconditioner is None:
		preconditioner = build_preconditioner(energy, x, lam, mu, config.ordering)

	evaluation = energy.evaluate(x)
	value = evaluation.auglag_value(lam, rho, mu)
	g = evaluation.auglag_grad(lam, rho, mu)
	grad_norm = float(np.linalg.norm(g))

	trace = [_trace_row(0, evaluation, grad_norm, 0.0)]
	result = PCGResult(x, evaluation, 0, grad_norm <= config.tolerance, grad_norm, trace=trace)
	if result.converged:
		return result

	restart_every = config.restart_every or 2 * energy.dimension
	h = preconditioner.apply(g)
	p = -h
	alpha = config.initial_step

	for iteration in range(1, config.max_iterations + 1):
		if p @ g >= 0:
			p = -h

		trials: Dict[float, Evaluation] = {}

		def phi(step):
			try:
				trials[step] = energy.evaluate(x + step * p)
			except (NonPositiveImageArea, DegenerateImageFaceError):
				return np.inf
			return trials[step].auglag_value(lam, rho, mu)

		def dphi(step):
			if step not in trials and not np.isfinite(phi(step)):
				return np.inf
			return float(trials[step].auglag_grad(lam, rho, mu) @ p)

		try:
			alpha, value = line_search(phi, value, float(p @ g), alpha, config, dphi)
		except LineSearchFailure as e:
			LOGW(f"Line search failed at inner iteration {iteration}: {e}")
			result.line_search_failed = True
			break

		if alpha == 0:
			break

		x = x + alpha * p
		evaluation = trials[alpha]

		gamma = h @ g
		g = evaluation.auglag_grad(lam, rho, mu)
		h = preconditioner.apply(g)
		beta = max(float(h @ g) / gamma, 0.0)
		p = -h + beta * p
		if iteration % restart_every == 0:
			p = -h

		grad_norm = float(np.linalg.norm(g))
		trace.append(_trace_row(iteration, evaluation, grad_norm, alpha))

		result.x, result.evaluation = x, evaluation
		result.iterations, result.grad_norm = iteration, grad_norm
		if grad_norm <= config.tolerance:
			result.converged = True
			break

	LOGD(
		f"PCG: {result.iterations} iterations, |g|={result.grad_norm:.3e}, "
		f"converged={result.converged}"
	)

	return result

def _trace_row(iteration: int, evaluation: Evaluation, grad_norm: float, alpha: float):
	return {
		"iteration": iteration,
		"E_C": evaluation.report.E_C,
		"E_A": evaluation.report.E_A,
		"grad_norm": grad_norm,
		"alpha": alpha,
	}

def write_trace(path: Path, rows: List[Dict[str, float]]):
	"""Write trace rows as CSV, extra keys become extra columns."""
	fieldnames = list(TRACE_FIELDS)
	for row in rows:
		fieldnames += [key for key in row if key not in fieldnames]

	with open(path, "w", newline="") as f:
		writer = csv.DictWriter(f, fieldnames=fieldnames)
		writer.writeheader()
		writer.writerows(rows)
