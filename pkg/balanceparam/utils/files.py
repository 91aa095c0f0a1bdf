#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#

from os import walk
from pathlib import Path
from sebaubuntu_libs.libreorder import strcoll_files_key
from typing import List

def find_named_files(root: Path, name: str) -> List[Path]:
	"""
	Every file called name below root, root included.

	Nested run folders are walked too, so a directory of experiments
	yields one summary per run. Paths come back in strcoll order.
	"""
	matches = [
		Path(currentpath) / name
		for currentpath, _, files in walk(root)
		if name in files
	]

	return sorted(matches, key=strcoll_files_key)
