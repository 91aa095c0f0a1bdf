#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#
"""Balanceparam library."""

from pathlib import Path

__version__ = "0.1.0"

module_path = Path(__file__).parent
current_path = Path.cwd()
