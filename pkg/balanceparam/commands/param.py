#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#
"""
param subcommand.

This command will parameterize a mesh and write the planar map with a
solve summary.
"""

import csv
from dataclasses import asdict
import json
from pathlib import Path
from sebaubuntu_libs.liblogging import LOGI
from time import perf_counter
from typing import Dict

from balanceparam.balanceparam import parameterize
from balanceparam.commands import RunConfig
from balanceparam.lib.libalm import ALMResult, HISTORY_FIELDS
from balanceparam.lib.libpcg import write_trace
from balanceparam.utils.laplacian import blend_Llambda, build_LD
from balanceparam.utils.linalg import export_matrix_market, submatrix
from balanceparam.utils.mesh import TriMesh, load_mesh, write_obj
from balanceparam.utils.metrics import distortion_report

MAP_FILENAME = "map.obj"
SUMMARY_FILENAME = "summary.json"
TIMING_FILENAME = "timing.json"

# Columns of the text summary, in order
SUMMARY_COLUMNS = (
	"mode", "shape", "mu", "E_C", "residual_abs", "lambda", "outer_iterations",
	"folds", "angle_mean", "angle_sd", "area_mean", "area_sd", "converged",
)

def build_summary(config: RunConfig, mesh: TriMesh, result: ALMResult) -> Dict:
	report = result.report
	distortion = distortion_report(mesh, result.fmap).to_dict()

	summary = {
		"input": config.input.stem,
		"n_vertices": mesh.n_vertices,
		"n_faces": mesh.n_faces,
		"n_boundary": mesh.n_boundary,
		"mode": config.mode,
		"shape": config.shape,
		"mu": config.mu,
		"seed": config.seed,
		"lambda": result.state.lam,
		"rho": result.state.rho,
		"outer_iterations": result.outer_iterations,
		"init_iterations": result.init_iterations,
		"converged": result.converged,
		"termination": result.error.category if result.error else "converged",
		"clamp_events": result.state.clamp_events,
		"residual_abs": abs(report.E_A - report.E_C),
		"weighted_residual": result.residual,
		"config": asdict(config.alm),
	}
	summary.update(report.to_dict())
	summary.update(distortion)
	if result.partition is not None:
		summary["corners"] = result.partition.corners.tolist()

	return summary

def format_summary(summary: Dict) -> str:
	"""Aligned two-column text table."""
	width = max(len(key) for key in SUMMARY_COLUMNS)
	lines = []
	for key in SUMMARY_COLUMNS:
		value = summary[key]
		if isinstance(value, float):
			value = f"{value:.6g}"
		lines.append(f"{key.ljust(width)}  {value}")

	return "\n".join(lines) + "\n"

def write_history(path: Path, history):
	with open(path, "w", newline="") as f:
		writer = csv.DictWriter(f, fieldnames=HISTORY_FIELDS)
		writer.writeheader()
		writer.writerows(history)

def export_operators(directory: Path, mesh: TriMesh, result: ALMResult):
	"""Dump L_D, the final L_S and the blended Laplacian blocks as MatrixMarket files."""
	L_D = build_LD(mesh)
	L_S = result.evaluation.L_S
	L = blend_Llambda(
		L_D, L_S, result.state.lam, mesh.total_area, result.report.area, mu=result.mu,
	)
	I, B = mesh.interior_indices, mesh.boundary_loop

	operators = {
		"L_D": L_D,
		"L_S": L_S,
		"L_lambda": L,
		"L_lambda_II": submatrix(L, I, I),
		"L_lambda_IB": submatrix(L, I, B),
		"L_lambda_BB": submatrix(L, B, B),
	}
	for name, matrix in operators.items():
		export_matrix_market(directory / f"{name}.mtx", matrix, comment=name)

	LOGI(f"Exported {len(operators)} operators to {directory}")

def cmd_param(config: RunConfig) -> int:
	output = config.output
	output.mkdir(parents=True, exist_ok=True)

	LOGI("Step 1 - Loading mesh")
	mesh = load_mesh(config.input)

	LOGI("Step 2 - Solving")
	start = perf_counter()
	result = parameterize(mesh, config.mode, config.shape, config.alm, config.corners)
	elapsed = perf_counter() - start

	LOGI("Step 3 - Writing results")
	write_obj(output / MAP_FILENAME, result.fmap, mesh.faces)

	summary = build_summary(config, mesh, result)
	(output / SUMMARY_FILENAME).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
	(output / "summary.txt").write_text(format_summary(summary))
	(output / TIMING_FILENAME).write_text(json.dumps({"time_seconds": elapsed}) + "\n")

	if result.history:
		write_history(output / "history.csv", result.history)

	if config.trace is not None:
		write_trace(config.trace, result.trace)

	if config.export_operators is not None:
		export_operators(config.export_operators, mesh, result)

	LOGI(
		f"E_C={result.report.E_C:.6e}, |E_A - E_C|={summary['residual_abs']:.3e}, "
		f"lambda={result.state.lam:.4f}, folds={result.folds}, {elapsed:.2f}s"
	)

	return 0
