#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#

from balanceparam.utils.files import find_named_files

def test_nested_run_summaries(tmp_path):
	for run in ("balanced", "sweep/mu_2", "sweep/mu_15"):
		(tmp_path / run).mkdir(parents=True)
		(tmp_path / run / "summary.json").write_text("{}")
	(tmp_path / "balanced" / "summary.json.bak").write_text("{}")
	(tmp_path / "sweep" / "notes.txt").write_text("")
	# A directory with the same name is not a match
	(tmp_path / "stray" / "summary.json").mkdir(parents=True)

	found = find_named_files(tmp_path, "summary.json")
	assert sorted(path.relative_to(tmp_path).as_posix() for path in found) == [
		"balanced/summary.json", "sweep/mu_15/summary.json", "sweep/mu_2/summary.json",
	]
	assert found == find_named_files(tmp_path, "summary.json")

def test_root_summary(tmp_path):
	(tmp_path / "summary.json").write_text("{}")
	assert find_named_files(tmp_path, "summary.json") == [tmp_path / "summary.json"]

def test_missing_root(tmp_path):
	assert find_named_files(tmp_path / "missing", "summary.json") == []
