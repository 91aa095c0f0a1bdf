#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#
"""
geomimage subcommand.

encode samples a square parameterized mesh into a 16-bit PNG,
reconstruct turns such an image back into a mesh.
"""

from sebaubuntu_libs.liblogging import LOGI

from balanceparam.commands import RunConfig
from balanceparam.lib.libgeomimage import encode, read_image, reconstruct, write_image
from balanceparam.utils.errors import ConfigError
from balanceparam.utils.mesh import load_mesh, load_planar_map, write_obj
from balanceparam.utils.metrics import reconstruction_metrics

def cmd_geomimage_encode(config: RunConfig) -> int:
	if config.map is None:
		raise ConfigError("geomimage encode needs a square planar map")

	mesh = load_mesh(config.input)
	fmap = load_planar_map(config.map, mesh.n_vertices)
	img = encode(mesh, fmap, config.width, config.height)
	write_image(img, config.output)

	return 0

def cmd_geomimage_reconstruct(config: RunConfig) -> int:
	img = read_image(config.input)
	mesh = reconstruct(img)
	config.output.parent.mkdir(parents=True, exist_ok=True)
	write_obj(config.output, mesh.vertices, mesh.faces)

	metrics = reconstruction_metrics(mesh).to_dict()
	LOGI(
		f"Reconstructed {mesh.n_vertices} vertices, {mesh.n_faces} faces: "
		f"d_angle={metrics['d_angle_mean']:.3f}, d_area={metrics['d_area_mean']:.3f}"
	)

	return 0
