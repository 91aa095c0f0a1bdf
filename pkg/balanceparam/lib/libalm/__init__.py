#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#
"""Augmented Lagrangian method balancing conformal and authalic energies."""

from dataclasses import dataclass, field, replace
import numpy as np
from sebaubuntu_libs.liblogging import LOGD, LOGI, LOGW
from time import perf_counter
from typing import Dict, List, Optional, Sequence

from balanceparam.lib.libalm.boundary import BoundaryPartition, FixedPointResult, fixed_point
from balanceparam.lib.libpcg import PCGConfig, minimize
from balanceparam.utils.energy import DiskEnergy, EnergyReport, Evaluation, MapEnergy, SquareEnergy
from balanceparam.utils.errors import ConfigError, MaxOuterIterations
from balanceparam.utils.metrics import fold_count
from balanceparam.utils.mesh import TriMesh

SHAPES = ("disk", "square")

HISTORY_FIELDS = (
	"k", "lambda", "rho", "omega", "eta", "E_C", "E_A", "residual",
	"grad_norm", "inner_iterations", "branch", "seconds",
)

@dataclass(frozen=True)
class ALMConfig:
	tau: float = 5.0
	rho0: float = 0.1
	# Inner tolerance at start and as the base of penalty-branch resets
	omega_init: float = 0.01
	omega_base: float = 0.1
	eta_init: float = 0.01
	eta_base: float = 0.01
	t_omega: float = 1.0
	v_omega: float = 1.0
	t_eta: float = 0.9
	v_eta: float = 0.5
	gamma: float = 0.1
	eta_final: float = 1e-5
	# sqrt(dimension) * 1e-4 when unset
	omega_final: Optional[float] = None
	max_outer: int = 50
	mu: float = 1.0
	lambda0: float = 0.4
	init_lambda: float = 0.4
	init_iterations: int = 5
	# Relative energy deficit that ends the fixed-point iterations early
	init_tolerance: Optional[float] = None
	pcg: PCGConfig = PCGConfig()

	def __post_init__(self):
		if not self.tau > 1:
			raise ConfigError(f"tau must be greater than 1, got {self.tau}")
		if not self.mu > 0:
			raise ConfigError(f"mu must be positive, got {self.mu}")
		if not 0 <= self.lambda0 <= 1 or not 0 <= self.init_lambda <= 1:
			raise ConfigError("Multipliers must start inside [0, 1]")
		tolerances = (self.rho0, self.omega_init, self.omega_base, self.eta_init, self.eta_base, self.eta_final)
		if not all(value > 0 for value in tolerances):
			raise ConfigError("Penalty and tolerances must be positive")
		if self.omega_final is not None and not self.omega_final > 0:
			raise ConfigError("omega_final must be positive")
		if self.init_tolerance is not None and not self.init_tolerance > 0:
			raise ConfigError("init_tolerance must be positive")
		if self.max_outer < 1 or self.init_iterations < 0:
			raise ConfigError("Iteration counts out of range")

	@classmethod
	def from_prose(cls, **kwargs) -> "ALMConfig":
		"""Schedule with gamma = omega0 = 0.1."""
		kwargs.setdefault("gamma", 0.1)
		kwargs.setdefault("omega_init", 0.1)
		kwargs.setdefault("omega_base", 0.1)
		return cls(**kwargs)

	def final_omega(self, dimension: int) -> float:
		if self.omega_final is not None:
			return self.omega_final
		return float(np.sqrt(dimension)) * 1e-4

@dataclass(frozen=True)
class ALMState:
	lam: float
	rho: float
	omega: float
	eta: float
	k: int = 0
	branch: str = ""
	clamp_events: int = 0

	@classmethod
	def initial(cls, config: ALMConfig) -> "ALMState":
		return cls(config.lambda0, config.rho0, config.omega_init, config.eta_init)

	def tight_bound(self) -> float:
		"""min(eta, (1 - lambda) / rho, lambda / rho)."""
		if self.rho == 0:
			return self.eta
		return min(self.eta, (1.0 - self.lam) / self.rho, self.lam / self.rho)

def update_state(state: ALMState, r: float, config: ALMConfig) -> ALMState:
	"""Multiplier update when |r| passes the tight test, penalty increase otherwise."""
	if abs(r) <= state.tight_bound():
		lam = state.lam + state.rho * r
		rho = state.rho
		u = min(1.0 / rho, config.gamma)
		omega = state.omega * u ** config.t_omega
		eta = state.eta * u ** config.t_eta
		branch = "multiplier"
	else:
		lam = state.lam
		rho = config.tau * state.rho
		u = min(1.0 / rho, config.gamma)
		omega = config.omega_base * u ** config.v_omega
		eta = config.eta_base * u ** config.v_eta
		branch = "penalty"

	clamp_events = state.clamp_events
	if not 0.0 <= lam <= 1.0:
		LOGW(f"Multiplier {lam:.6f} clamped to [0, 1]")
		lam = min(max(lam, 0.0), 1.0)
		clamp_events += 1

	return ALMState(lam, rho, omega, eta, state.k + 1, branch, clamp_events)

@dataclass
class ALMResult:
	"""Outcome of a solve: final map, state, energies and per-iteration records."""
	shape: str
	fmap: np.ndarray
	x: np.ndarray
	evaluation: Evaluation
	state: ALMState
	converged: bool
	folds: int
	mu: float = 1.0
	outer_iterations: int = 0
	history: List[Dict[str, float]] = field(default_factory=list)
	trace: List[Dict[str, float]] = field(default_factory=list)
	partition: Optional[BoundaryPartition] = None
	error: Optional[MaxOuterIterations] = None
	init_iterations: int = 0

	@property
	def report(self) -> EnergyReport:
		return self.evaluation.report

	@property
	def residual(self) -> float:
		return self.evaluation.residual(self.mu)

def initial_map(mesh: TriMesh, shape: str, config: ALMConfig, corners=None):
	"""Variables of the fixed-point start map, with its energy and square partition."""
	if shape == "disk":
		start = fixed_point(mesh, config.init_lambda, config.init_iterations, tolerance=config.init_tolerance)
		energy = DiskEnergy(mesh)
		return energy, energy.from_planar(start.fmap), None, start

	if shape != "square":
		raise ConfigError(f"Unknown shape {shape}, expected one of {SHAPES}")

	if corners is None:
		partition = BoundaryPartition.auto(mesh)
	else:
		partition = BoundaryPartition.from_corners(mesh, corners)

	start = fixed_point(
		mesh, config.init_lambda, config.init_iterations,
		boundary=partition.square_boundary(mesh), tolerance=config.init_tolerance,
	)
	energy = SquareEnergy(mesh, start.fmap, partition.free_first, partition.free_second)

	return energy, energy.from_planar(start.fmap), partition, start

def _run(
	energy: MapEnergy,
	x: np.ndarray,
	config: ALMConfig,
	partition: Optional[BoundaryPartition] = None,
	start: Optional[FixedPointResult] = None,
) -> ALMResult:
	mesh = energy.mesh
	mu = config.mu
	omega_final = config.final_omega(energy.dimension)
	state = ALMState.initial(config)
	started = perf_counter()

	history = []
	trace = []
	best = None
	converged = False

	for k in range(1, config.max_outer + 1):
		pcg_config = replace(config.pcg, tolerance=max(state.omega, omega_final))
		inner = minimize(energy, x, state.lam, state.rho, pcg_config, mu)
		x = inner.x
		if inner.iterations <= 1:
			LOGD(
				f"Outer iteration {k}: {inner.iterations} inner iterations, "
				f"|g|={inner.grad_norm:.3e} against tolerance {pcg_config.tolerance:.3e}"
			)
		r = inner.evaluation.residual(mu)

		history.append({
			"k": k,
			"lambda": state.lam,
			"rho": state.rho,
			"omega": state.omega,
			"eta": state.eta,
			"E_C": inner.report.E_C,
			"E_A": inner.report.E_A,
			"residual": r,
			"grad_norm": inner.grad_norm,
			"inner_iterations": inner.iterations,
			"branch": "",
			# Wall time since the first outer iteration started
			"seconds": perf_counter() - started,
		})
		trace += [dict(row, outer=k) for row in inner.trace]

		LOGI(
			f"Outer iteration {k}: lambda={state.lam:.6f}, rho={state.rho:.3g}, "
			f"E_C={inner.report.E_C:.6e}, r={r:.3e}, inner={inner.iterations}"
		)

		if best is None or abs(r) < abs(best[1].evaluation.residual(mu)):
			best = (state, inner, k)

		if inner.grad_norm <= omega_final and abs(r) < config.eta_final:
			converged = True
			best = (state, inner, k)
			break

		state = update_state(state, r, config)
		history[-1]["branch"] = state.branch

	error = None
	if not converged:
		error = MaxOuterIterations(f"No convergence after {config.max_outer} outer iterations")
		LOGW(f"{error}, returning the iterate with the smallest residual")

	final_state, final_inner, _ = best
	fmap = energy.to_planar(final_inner.x)

	return ALMResult(
		shape=energy.shape,
		fmap=fmap,
		x=final_inner.x,
		evaluation=final_inner.evaluation,
		state=final_state,
		converged=converged,
		folds=fold_count(mesh, fmap),
		mu=mu,
		outer_iterations=len(history),
		history=history,
		trace=trace,
		partition=partition,
		init_iterations=start.iterations if start else 0,
		error=error,
	)

def solve_disk(mesh: TriMesh, config: ALMConfig = ALMConfig()) -> ALMResult:
	"""Distortion-balancing map onto the unit disk."""
	energy, x, _, start = initial_map(mesh, "disk", config)
	return _run(energy, x, config, start=start)

def solve_square(
	mesh: TriMesh,
	corners: Optional[Sequence[int]] = None,
	config: ALMConfig = ALMConfig(),
) -> ALMResult:
	"""
	Distortion-balancing map onto the unit square.

	corners are 4 boundary vertices in counterclockwise order, mapped to
	(0,0), (1,0), (1,1) and (0,1). None picks them by arc length.
	"""
	energy, x, partition, start = initial_map(mesh, "square", config, corners)
	return _run(energy, x, config, partition, start)

def solve_weighted(
	mesh: TriMesh,
	mu: float,
	shape: str = "disk",
	config: ALMConfig = ALMConfig(),
	corners: Optional[Sequence[int]] = None,
) -> ALMResult:
	"""Balance E_C against mu E_A."""
	config = replace(config, mu=mu)
	if shape == "disk":
		return solve_disk(mesh, config)
	if shape == "square":
		return solve_square(mesh, corners, config)

	raise ConfigError(f"Unknown shape {shape}, expected one of {SHAPES}")

def solve_pinned(
	mesh: TriMesh,
	lam: float,
	shape: str = "disk",
	config: ALMConfig = ALMConfig(),
	corners: Optional[Sequence[int]] = None,
) -> ALMResult:
	"""
	Minimize (1 - lam) E_C + lam mu E_A without penalty.

	lam = 0 gives the conformal map and lam = 1 the authalic one.
	"""
	if not 0.0 <= lam <= 1.0:
		raise ConfigError(f"Pinned lambda must lie in [0, 1], got {lam}")

	energy, x, partition, start = initial_map(mesh, shape, config, corners)
	omega_final = config.final_omega(energy.dimension)
	pcg_config = replace(config.pcg, tolerance=omega_final)

	inner = minimize(energy, x, lam, 0.0, pcg_config, config.mu)
	if not inner.converged:
		LOGW(f"Pinned solve stopped at |g|={inner.grad_norm:.3e} after {inner.iterations} iterations")

	fmap = energy.to_planar(inner.x)
	state = ALMState(lam, 0.0, omega_final, config.eta_final)
	LOGD(f"Pinned lambda={lam}: E_C={inner.report.E_C:.6e}, E_A={inner.report.E_A:.6e}")

	return ALMResult(
		shape=energy.shape,
		fmap=fmap,
		x=inner.x,
		evaluation=inner.evaluation,
		state=state,
		converged=inner.converged,
		folds=fold_count(mesh, fmap),
		mu=config.mu,
		outer_iterations=0,
		history=[],
		trace=[dict(row, outer=0) for row in inner.trace],
		partition=partition,
		init_iterations=start.iterations,
	)

def solve_fixed_point(
	mesh: TriMesh,
	shape: str = "disk",
	config: ALMConfig = ALMConfig(),
	corners: Optional[Sequence[int]] = None,
) -> ALMResult:
	"""
	The fixed-point initializer alone, evaluated like a solve.

	Converged unless config.init_tolerance is set and the energy deficit
	stayed above it for all config.init_iterations iterations.
	"""
	energy, x, partition, start = initial_map(mesh, shape, config, corners)
	evaluation = energy.evaluate(x)
	fmap = energy.to_planar(x)
	state = ALMState(config.init_lambda, 0.0, config.final_omega(energy.dimension), config.eta_final)

	converged = config.init_tolerance is None or start.converged
	if not converged:
		LOGW(
			f"Fixed-point deficit {start.deficit:.3e} still above {config.init_tolerance:.3e} "
			f"after {start.iterations} iterations"
		)

	return ALMResult(
		shape=energy.shape,
		fmap=fmap,
		x=x,
		evaluation=evaluation,
		state=state,
		converged=converged,
		folds=fold_count(mesh, fmap),
		mu=config.mu,
		partition=partition,
		init_iterations=start.iterations,
	)
