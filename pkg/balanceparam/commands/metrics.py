#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#
"""
metrics subcommand.

This command will measure the distortion of a planar map, or the
regularity of a reconstructed mesh.
"""

import json
from sebaubuntu_libs.liblogging import LOGI

from balanceparam.commands import RunConfig
from balanceparam.utils.errors import ConfigError
from balanceparam.utils.mesh import load_mesh, load_planar_map
from balanceparam.utils.metrics import (
	distortion_report,
	histogram,
	reconstruction_metrics,
	sampled_hausdorff,
	write_histogram,
)

def cmd_metrics(config: RunConfig) -> int:
	output = config.output
	output.mkdir(parents=True, exist_ok=True)

	mesh = load_mesh(config.input)

	if config.reconstruction:
		report = reconstruction_metrics(mesh)
		summary = report.to_dict()
		histograms = {"d_angle": report.d_angle, "d_area": report.d_area}
		if config.reference is not None:
			reference = load_mesh(config.reference)
			summary["hausdorff"] = sampled_hausdorff(mesh, reference, seed=config.seed)
			summary["reference_bbox_diagonal"] = reference.bbox_diagonal
	else:
		if config.map is None:
			raise ConfigError("metrics needs a planar map unless --reconstruction is given")
		fmap = load_planar_map(config.map, mesh.n_vertices)
		report = distortion_report(mesh, fmap)
		summary = report.to_dict()
		histograms = {"angle": report.angle, "area": report.area}

	for name, values in histograms.items():
		write_histogram(output / f"{name}_histogram.csv", histogram(values, config.bins))

	(output / "metrics.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")

	for key, value in sorted(summary.items()):
		LOGI(f"{key}: {value}")

	return 0
