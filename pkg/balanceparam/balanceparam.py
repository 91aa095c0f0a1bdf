#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#

from sebaubuntu_libs.liblogging import LOGI
from typing import Optional, Sequence

from balanceparam.lib.libalm import (
	ALMConfig,
	ALMResult,
	solve_fixed_point,
	solve_pinned,
	solve_weighted,
)
from balanceparam.utils.errors import ConfigError
from balanceparam.utils.mesh import TriMesh

MODES = ("balanced", "conformal", "authalic", "fixed-point")

def parameterize(
	mesh: TriMesh,
	mode: str = "balanced",
	shape: str = "disk",
	config: ALMConfig = ALMConfig(),
	corners: Optional[Sequence[int]] = None,
) -> ALMResult:
	"""Parameterize a disk-topology mesh onto the unit disk or the unit square."""
	if mode not in MODES:
		raise ConfigError(f"Unknown mode {mode}, expected one of {MODES}")
	if mode != "balanced" and config.mu != 1.0:
		raise ConfigError("mu only applies to balanced runs")

	LOGI(f"Computing {mode} {shape} map of {mesh.n_vertices} vertices")

	if mode == "balanced":
		return solve_weighted(mesh, config.mu, shape, config, corners)
	if mode == "conformal":
		return solve_pinned(mesh, 0.0, shape, config, corners)
	if mode == "authalic":
		return solve_pinned(mesh, 1.0, shape, config, corners)

	return solve_fixed_point(mesh, shape, config, corners)
