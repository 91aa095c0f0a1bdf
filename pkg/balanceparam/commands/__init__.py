#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#
"""Subcommands of the command line front end."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from balanceparam.balanceparam import MODES
from balanceparam.lib.libalm import ALMConfig, SHAPES
from balanceparam.utils.errors import ConfigError

@dataclass(frozen=True)
class RunConfig:
	"""Everything a subcommand needs, as parsed from the command line."""
	command: str
	input: Optional[Path] = None
	output: Optional[Path] = None
	map: Optional[Path] = None
	mode: str = "balanced"
	shape: str = "disk"
	mu: float = 1.0
	corners: Optional[List[int]] = None
	alm: ALMConfig = ALMConfig()
	trace: Optional[Path] = None
	export_operators: Optional[Path] = None
	seed: int = 0
	bins: int = 20
	width: int = 256
	height: int = 256
	reconstruction: bool = False
	reference: Optional[Path] = None
	runs: List[Path] = field(default_factory=list)
	baseline: List[Path] = field(default_factory=list)

	def __post_init__(self):
		if self.mode not in MODES:
			raise ConfigError(f"Unknown mode {self.mode}, expected one of {MODES}")
		if self.shape not in SHAPES:
			raise ConfigError(f"Unknown shape {self.shape}, expected one of {SHAPES}")
		if self.mu != 1.0 and self.mode != "balanced":
			raise ConfigError("--mu other than 1 requires --mode balanced")
		if not self.mu > 0:
			raise ConfigError(f"mu must be positive, got {self.mu}")
		if self.corners is not None:
			if self.shape != "square":
				raise ConfigError("--corners requires --shape square")
			if len(self.corners) != 4:
				raise ConfigError(f"--corners needs 4 vertex indices, got {len(self.corners)}")
		if self.bins < 1:
			raise ConfigError(f"--bins must be at least 1, got {self.bins}")
		if self.width < 2 or self.height < 2:
			raise ConfigError(f"Geometry images need at least 2 x 2 pixels, got {self.width} x {self.height}")
