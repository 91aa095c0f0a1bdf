#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#

import logging
import numpy as np
from os import environ
from pathlib import Path
import pytest
from time import perf_counter

from balanceparam.balanceparam import parameterize
from balanceparam.lib.libalm import (
	ALMConfig,
	ALMState,
	solve_disk,
	solve_fixed_point,
	solve_pinned,
	solve_square,
	solve_weighted,
	update_state,
)
from balanceparam.lib.libalm.boundary import (
	BoundaryPartition,
	arc_length_parameters,
	circle_boundary,
	fixed_point,
	fixed_point_init,
)
from balanceparam.utils.errors import ConfigError, CornerOrderError
from balanceparam.utils.laplacian import build_LD
from balanceparam.utils.mesh import load_mesh
from balanceparam.utils.metrics import distortion_report

def grid_corners(k):
	return [0, k, (k + 1) ** 2 - 1, k * (k + 1)]

def test_multiplier_branch():
	state = ALMState(lam=0.4, rho=0.1, omega=0.01, eta=0.1)
	new = update_state(state, 0.05, ALMConfig())

	assert new.branch == "multiplier"
	assert new.lam == pytest.approx(0.405)
	assert new.rho == 0.1
	assert new.omega == pytest.approx(0.01 * 0.1)
	assert new.eta == pytest.approx(0.1 * 0.1 ** 0.9)
	assert new.k == 1

def test_penalty_branch():
	state = ALMState(lam=0.4, rho=0.1, omega=0.01, eta=0.1)
	new = update_state(state, 10.0, ALMConfig())

	assert new.branch == "penalty"
	assert new.lam == 0.4
	assert new.rho == pytest.approx(0.5)
	assert new.omega == pytest.approx(0.1 * 0.1)
	assert new.eta == pytest.approx(0.01 * 0.1 ** 0.5)

def test_zero_residual_tightens():
	state = ALMState.initial(ALMConfig())
	new = update_state(state, 0.0, ALMConfig())
	assert new.lam == state.lam
	assert new.omega < state.omega
	assert new.eta < state.eta

def test_tight_bound():
	state = ALMState(lam=0.9, rho=1.0, omega=0.01, eta=0.5)
	assert state.tight_bound() == pytest.approx(0.1)
	assert ALMState(lam=0.9, rho=0.0, omega=0.01, eta=0.5).tight_bound() == 0.5

def test_multiplier_stays_in_range():
	rng = np.random.default_rng(0)
	state = ALMState.initial(ALMConfig())
	for _ in range(50):
		state = update_state(state, float(rng.normal(scale=0.5)), ALMConfig())
		assert 0.0 <= state.lam <= 1.0

def test_config():
	with pytest.raises(ConfigError):
		ALMConfig(tau=1.0)
	with pytest.raises(ConfigError):
		ALMConfig(mu=0.0)
	with pytest.raises(ConfigError):
		ALMConfig(lambda0=1.5)

	prose = ALMConfig.from_prose()
	assert (prose.gamma, prose.omega_init, prose.omega_base) == (0.1, 0.1, 0.1)
	assert ALMConfig().final_omega(100) == pytest.approx(1e-3)
	assert ALMConfig(omega_final=0.5).final_omega(100) == 0.5

def test_arc_length(disk):
	t = arc_length_parameters(disk)
	assert t[0] == 0.0
	assert np.all(np.diff(t) > 0)
	np.testing.assert_allclose(circle_boundary(disk), disk.vertices[disk.boundary_loop, :2], atol=1e-12)

def test_partition_auto(grid):
	partition = BoundaryPartition.auto(grid)
	assert partition.corners.tolist() == grid_corners(8)
	np.testing.assert_allclose(
		partition.square_boundary(grid), grid.vertices[grid.boundary_loop, :2], atol=1e-12
	)

	assert partition.segments["Y0"][0] == partition.segments["X0"][-1] == 0
	assert partition.segments["Y0"][-1] == partition.segments["X1"][0] == 8
	assert len(partition.free_first) == grid.n_vertices - 18
	assert len(partition.free_second) == grid.n_vertices - 18

def test_partition_auto_quartiles(disk):
	partition = BoundaryPartition.auto(disk)
	t = arc_length_parameters(disk)
	loop = disk.boundary_loop.tolist()
	for corner, quartile in zip(partition.corners, (0.0, 0.25, 0.5, 0.75)):
		distance = abs(t[loop.index(int(corner))] - quartile)
		assert min(distance, 1.0 - distance) <= 0.5 / disk.n_boundary + 1e-12

def test_partition_errors(grid, fan):
	corners = grid_corners(8)
	with pytest.raises(CornerOrderError):
		BoundaryPartition.from_corners(grid, corners[::-1])
	with pytest.raises(CornerOrderError):
		BoundaryPartition.from_corners(grid, [0, 0, 80, 72])
	with pytest.raises(CornerOrderError):
		BoundaryPartition.from_corners(grid, [0, 8, 40, 72])
	with pytest.raises(CornerOrderError):
		BoundaryPartition.from_corners(grid, corners[:3])

	# The fan has exactly four boundary vertices
	assert BoundaryPartition.auto(fan).corners.tolist() == [0, 1, 2, 3]

def test_harmonic_initializer(small_hemisphere):
	mesh = small_hemisphere
	fmap = fixed_point_init(mesh, lam=0.0, iterations=3)

	L = build_LD(mesh).tocsr()
	I = mesh.interior_indices
	residual = (L @ fmap)[I]
	assert np.abs(residual).max() <= 1e-10
	np.testing.assert_allclose(fmap[mesh.boundary_loop], circle_boundary(mesh))

def test_fixed_point_stops_on_converged_input(disk):
	# The planar disk is its own fixed point, so the first deficit is zero
	result = fixed_point(disk, lam=0.5, iterations=50, tolerance=1e-6)

	assert result.converged
	assert result.iterations == 1
	assert result.deficit < 1e-6
	np.testing.assert_allclose(result.fmap, disk.vertices[:, :2], atol=1e-10)

def test_fixed_point_iteration_cap(small_hemisphere):
	capped = fixed_point(small_hemisphere, lam=0.5, iterations=3)
	assert capped.iterations == 3
	assert not capped.converged
	assert capped.energies == []

	loose = fixed_point(small_hemisphere, lam=0.5, iterations=3, tolerance=1.0)
	assert loose.converged
	assert loose.iterations == 1
	assert len(loose.energies) == 2

	np.testing.assert_array_equal(capped.fmap, fixed_point_init(small_hemisphere, 0.5, 3))

	with pytest.raises(ConfigError):
		fixed_point(small_hemisphere, tolerance=0.0)
	with pytest.raises(ConfigError):
		ALMConfig(init_tolerance=-1.0)

def test_fixed_point_reference_run(disk, small_hemisphere):
	config = ALMConfig(init_lambda=0.5, init_iterations=50, init_tolerance=1e-6)
	result = solve_fixed_point(disk, config=config)
	assert result.converged
	assert result.init_iterations == 1

	stalled = solve_fixed_point(small_hemisphere, config=ALMConfig(init_iterations=1, init_tolerance=1e-300))
	assert not stalled.converged
	assert stalled.init_iterations == 1

def test_planar_disk_converges_at_once(disk):
	result = solve_disk(disk)

	assert result.converged
	assert result.outer_iterations == 1
	assert result.report.E_C == pytest.approx(0.0, abs=1e-10)
	assert abs(result.residual) <= 1e-10
	assert result.folds == 0
	np.testing.assert_allclose(result.fmap, disk.vertices[:, :2], atol=1e-8)
	assert result.history[0]["inner_iterations"] == 0
	assert result.history[0]["seconds"] >= 0.0

def test_idle_inner_solve_is_logged(disk, caplog):
	with caplog.at_level(logging.DEBUG):
		solve_disk(disk)
	assert any("Outer iteration 1: 0 inner iterations" in message for message in caplog.messages)

def test_unit_square_identity(grid):
	result = solve_square(grid, corners=grid_corners(8))

	assert result.converged
	assert result.report.E_C == pytest.approx(0.0, abs=1e-10)
	assert result.report.E_A == pytest.approx(0.0, abs=1e-10)
	np.testing.assert_allclose(result.fmap, grid.vertices[:, :2], atol=1e-8)
	assert result.partition.corners.tolist() == grid_corners(8)

def test_weighted_records_mu(disk):
	result = solve_weighted(disk, 2.0)
	assert result.mu == 2.0
	with pytest.raises(ConfigError):
		solve_weighted(disk, 2.0, shape="sphere")

def test_pinned_range(disk):
	with pytest.raises(ConfigError):
		solve_pinned(disk, 1.5)

def test_parameterize_modes(disk):
	with pytest.raises(ConfigError):
		parameterize(disk, mode="stretch")
	with pytest.raises(ConfigError):
		parameterize(disk, mode="conformal", config=ALMConfig(mu=2.0))

	reference = parameterize(disk, mode="fixed-point")
	assert reference.outer_iterations == 0
	assert reference.folds == 0

@pytest.mark.slow
def test_hemisphere_disk(hemisphere):
	start = perf_counter()
	result = solve_disk(hemisphere)
	elapsed = perf_counter() - start

	assert result.converged
	assert result.outer_iterations <= 50
	assert elapsed < 60.0
	assert abs(result.report.E_A - result.report.E_C) <= 1e-5
	assert result.history[-1]["grad_norm"] <= np.sqrt(result.x.size) * 1e-4
	assert result.folds == 0

	seconds = [row["seconds"] for row in result.history]
	assert all(b >= a for a, b in zip(seconds, seconds[1:]))
	assert seconds[-1] <= elapsed

	lambdas = [row["lambda"] for row in result.history] + [result.state.lam]
	assert all(0.0 <= lam <= 1.0 for lam in lambdas)
	rhos = [row["rho"] for row in result.history]
	assert all(b >= a for a, b in zip(rhos, rhos[1:]))

	residuals = [abs(row["residual"]) for row in result.history]
	if len(residuals) > 3:
		assert max(residuals[-3:]) < max(residuals[:3])

@pytest.mark.slow
def test_hemisphere_square(hemisphere):
	result = solve_square(hemisphere)

	assert result.folds == 0
	assert abs(result.residual) <= 1e-5
	corners = result.fmap[result.partition.corners]
	np.testing.assert_allclose(corners, [[0, 0], [1, 0], [1, 1], [0, 1]], atol=1e-12)

@pytest.mark.slow
@pytest.mark.parametrize("mesh_name", ["small_hemisphere", "hemisphere"])
def test_mode_ordering(mesh_name, request):
	mesh = request.getfixturevalue(mesh_name)
	reports = {}
	for mode in ("conformal", "balanced", "authalic"):
		result = parameterize(mesh, mode)
		assert result.folds == 0
		reports[mode] = distortion_report(mesh, result.fmap)

	angle = {mode: report.angle_stats[0] for mode, report in reports.items()}
	area = {mode: report.area_stats[0] for mode, report in reports.items()}

	assert angle["conformal"] <= angle["balanced"] + 1e-9
	assert angle["balanced"] <= angle["authalic"] + 1e-9
	assert area["authalic"] <= area["balanced"] + 1e-9
	assert area["balanced"] <= area["conformal"] + 1e-9

@pytest.mark.slow
@pytest.mark.skipif("BALANCEPARAM_LION_MESH" not in environ, reason="benchmark mesh not available")
def test_lion_benchmark():
	mesh = load_mesh(Path(environ["BALANCEPARAM_LION_MESH"]))
	result = solve_disk(mesh)

	assert result.folds == 0
	assert result.state.lam == pytest.approx(0.38, abs=0.1)
	assert abs(result.outer_iterations - 9) <= 5
	assert result.report.E_C == pytest.approx(0.475, rel=0.25)
	assert abs(result.report.E_A - result.report.E_C) <= 1e-5

@pytest.mark.slow
def test_weighting_trades_angle_for_area(finger_mesh):
	plain = solve_weighted(finger_mesh, 1.0)
	weighted = solve_weighted(finger_mesh, 15.0)

	assert weighted.report.E_A < plain.report.E_A
	plain_area = distortion_report(finger_mesh, plain.fmap).area_stats[0]
	weighted_area = distortion_report(finger_mesh, weighted.fmap).area_stats[0]
	assert weighted_area < plain_area

	assert weighted.folds == 0
	assert abs(weighted.residual) <= 1e-5
