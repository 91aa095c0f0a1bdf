#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#
"""
report subcommand.

This command will collect the summaries of param runs into a single
table, and compare them against baseline runs.
"""

import csv
import json
from pathlib import Path
from sebaubuntu_libs.liblogging import LOGI
from typing import Dict, List

from balanceparam.commands import RunConfig
from balanceparam.commands.param import SUMMARY_FILENAME, TIMING_FILENAME
from balanceparam.utils.errors import EmptyInput
from balanceparam.utils.files import find_named_files

REPORT_COLUMNS = (
	"run", "mode", "shape", "time_seconds", "E_C", "residual_abs", "lambda",
	"outer_iterations", "folds", "angle_mean", "angle_sd", "area_mean", "area_sd",
)

RATIO_METRICS = ("angle_mean", "angle_sd", "area_mean", "area_sd")

def collect_summaries(directories: List[Path]) -> List[Dict]:
	"""Load every summary found under the given run directories."""
	summaries = []
	for directory in directories:
		for file in find_named_files(directory, SUMMARY_FILENAME):
			summary = json.loads(file.read_text())
			run = file.parent.relative_to(directory)
			summary["run"] = str(Path(directory.name) / run) if str(run) != "." else directory.name

			timing = file.parent / TIMING_FILENAME
			summary["time_seconds"] = (
				json.loads(timing.read_text())["time_seconds"] if timing.is_file() else float("nan")
			)
			summaries.append(summary)

	return summaries

def ratio(value: float, reference: float) -> float:
	if reference == 0:
		return 1.0 if value == 0 else float("inf")
	return value / reference

def ratio_rows(runs: List[Dict], baseline: List[Dict]) -> List[Dict]:
	"""Metric ratios of every run against the baseline run on the same input and shape."""
	references = {(summary["input"], summary["shape"]): summary for summary in baseline}
	rows = []
	for summary in runs:
		reference = references.get((summary["input"], summary["shape"]))
		if reference is None:
			continue

		row = {"run": summary["run"], "baseline": reference["run"]}
		for metric in RATIO_METRICS:
			row[metric] = ratio(summary[metric], reference[metric])
		rows.append(row)

	return rows

def format_table(rows: List[Dict], columns) -> str:
	cells = [[str(column) for column in columns]]
	for row in rows:
		cells.append([
			f"{row[column]:.6g}" if isinstance(row[column], float) else str(row[column])
			for column in columns
		])

	widths = [max(len(line[i]) for line in cells) for i in range(len(columns))]
	return "\n".join(
		"  ".join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip()
		for line in cells
	) + "\n"

def write_csv(path: Path, rows: List[Dict], columns):
	with open(path, "w", newline="") as f:
		writer = csv.DictWriter(f, fieldnames=columns, extrasaction="ignore")
		writer.writeheader()
		writer.writerows(rows)

def cmd_report(config: RunConfig) -> int:
	runs = collect_summaries(config.runs)
	if not runs:
		raise EmptyInput(f"No {SUMMARY_FILENAME} found under {[str(run) for run in config.runs]}")

	output = config.output
	output.mkdir(parents=True, exist_ok=True)

	table = format_table(runs, REPORT_COLUMNS)
	(output / "report.txt").write_text(table)
	write_csv(output / "report.csv", runs, REPORT_COLUMNS)
	LOGI(f"Collected {len(runs)} runs\n{table}")

	if config.baseline:
		baseline = collect_summaries(config.baseline)
		if not baseline:
			raise EmptyInput(f"No {SUMMARY_FILENAME} found in the baseline runs")

		rows = ratio_rows(runs, baseline)
		ratio_columns = ("run", "baseline") + RATIO_METRICS
		ratio_table = format_table(rows, ratio_columns)
		(output / "ratios.txt").write_text(ratio_table)
		write_csv(output / "ratios.csv", rows, ratio_columns)
		LOGI(f"Ratios against baseline\n{ratio_table}")

	return 0
