#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#

from argparse import ArgumentParser, Namespace
from balanceparam import __version__ as version, current_path
from balanceparam.balanceparam import MODES
from balanceparam.commands import RunConfig
from balanceparam.commands.geomimage import cmd_geomimage_encode, cmd_geomimage_reconstruct
from balanceparam.commands.metrics import cmd_metrics
from balanceparam.commands.param import cmd_param
from balanceparam.commands.report import cmd_report
from balanceparam.lib.libalm import ALMConfig, SHAPES
from balanceparam.lib.libpcg import PCGConfig
from balanceparam.utils.errors import BalanceParamError
from dataclasses import replace
from os import environ
from pathlib import Path
from sebaubuntu_libs.libexception import format_exception
from sebaubuntu_libs.liblocale import setup_locale
from sebaubuntu_libs.liblogging import LOGE, setup_logging
import sys
from typing import List, Optional

COMMANDS = {
	"param": cmd_param,
	"metrics": cmd_metrics,
	"encode": cmd_geomimage_encode,
	"reconstruct": cmd_geomimage_reconstruct,
	"report": cmd_report,
}

def build_parser() -> ArgumentParser:
	parser = ArgumentParser(prog='python3 -m balanceparam')

	# Optional arguments
	parser.add_argument("-v", "--verbose", action='store_true',
	                    help="enable verbose output")
	parser.add_argument("-d", "--debug", action='store_true',
	                    help="enable debugging features")

	subparsers = parser.add_subparsers(dest="command", required=True)

	param = subparsers.add_parser("param", help="parameterize a mesh")
	param.add_argument("input", type=Path,
	                   help="input mesh (OBJ or OFF)")
	param.add_argument("output", type=Path, nargs="?", default=None,
	                   help="output folder")
	param.add_argument("--mode", choices=MODES, default="balanced",
	                   help="energy to minimize")
	param.add_argument("--shape", choices=SHAPES, default="disk",
	                   help="target domain")
	param.add_argument("--mu", type=float, default=1.0,
	                   help="weight of the authalic energy in the constraint")
	param.add_argument("--corners", type=int, nargs=4, default=None,
	                   help="square corner vertex indices, counterclockwise")
	param.add_argument("--tau", type=float, default=None,
	                   help="penalty amplification factor")
	param.add_argument("--rho0", type=float, default=None,
	                   help="initial penalty")
	param.add_argument("--omega0", type=float, default=None,
	                   help="initial inner gradient tolerance")
	param.add_argument("--eta0", type=float, default=None,
	                   help="initial constraint tolerance")
	param.add_argument("--max-outer", type=int, default=None,
	                   help="maximum outer iterations")
	param.add_argument("--max-inner", type=int, default=None,
	                   help="maximum inner iterations")
	param.add_argument("--init-lambda", type=float, default=None,
	                   help="multiplier of the fixed-point initializer")
	param.add_argument("--init-iterations", type=int, default=None,
	                   help="maximum iterations of the fixed-point initializer")
	param.add_argument("--init-tolerance", type=float, default=None,
	                   help="stop the fixed-point initializer once the relative energy deficit falls below this")
	param.add_argument("--prose-schedule", action='store_true',
	                   help="use gamma = omega0 = 0.1")
	param.add_argument("--strict-wolfe", action='store_true',
	                   help="require the strong Wolfe curvature condition in the line search")
	param.add_argument("--ordering", choices=("minimum_degree", "natural"), default="minimum_degree",
	                   help="fill-reducing ordering of the Cholesky factors")
	param.add_argument("--trace", type=Path, default=None,
	                   help="write the inner iteration trace to this CSV file")
	param.add_argument("--export-operators", type=Path, default=None,
	                   help="write the final Laplacians as MatrixMarket files to this folder")
	param.add_argument("--seed", type=int, default=0,
	                   help="seed recorded in the summary")

	metrics = subparsers.add_parser("metrics", help="measure distortion")
	metrics.add_argument("input", type=Path,
	                     help="surface mesh")
	metrics.add_argument("map", type=Path, nargs="?", default=None,
	                     help="planar map OBJ written by param")
	metrics.add_argument("-o", "--output", type=Path, default=None,
	                     help="output folder")
	metrics.add_argument("--bins", type=int, default=20,
	                     help="histogram bins")
	metrics.add_argument("--reconstruction", action='store_true',
	                     help="measure a reconstructed mesh instead of a map")
	metrics.add_argument("--reference", type=Path, default=None,
	                     help="original surface for the sampled Hausdorff distance")
	metrics.add_argument("--seed", type=int, default=0,
	                     help="seed of the surface sampling")

	geomimage = subparsers.add_parser("geomimage", help="geometry images")
	geomimage_commands = geomimage.add_subparsers(dest="geomimage_command", required=True)

	encode = geomimage_commands.add_parser("encode", help="sample a square map into a PNG")
	encode.add_argument("input", type=Path,
	                    help="surface mesh")
	encode.add_argument("map", type=Path,
	                    help="square planar map OBJ")
	encode.add_argument("output", type=Path,
	                    help="output PNG")
	encode.add_argument("--width", type=int, default=256,
	                    help="image width")
	encode.add_argument("--height", type=int, default=256,
	                    help="image height")

	reconstruct = geomimage_commands.add_parser("reconstruct", help="rebuild a mesh from a PNG")
	reconstruct.add_argument("input", type=Path,
	                         help="geometry image PNG")
	reconstruct.add_argument("output", type=Path,
	                         help="output OBJ")

	report = subparsers.add_parser("report", help="tabulate param runs")
	report.add_argument("runs", type=Path, nargs="+",
	                    help="run folders")
	report.add_argument("--baseline", type=Path, nargs="+", default=[],
	                    help="run folders to compare against")
	report.add_argument("-o", "--output", type=Path, default=None,
	                    help="output folder")

	return parser

def build_alm_config(args: Namespace) -> ALMConfig:
	overrides = {
		"tau": args.tau,
		"rho0": args.rho0,
		"omega_init": args.omega0,
		"eta_init": args.eta0,
		"max_outer": args.max_outer,
		"init_lambda": args.init_lambda,
		"init_iterations": args.init_iterations,
		"init_tolerance": args.init_tolerance,
	}
	overrides = {key: value for key, value in overrides.items() if value is not None}
	overrides["mu"] = args.mu

	pcg = PCGConfig(strict_wolfe=args.strict_wolfe, ordering=args.ordering)
	if args.max_inner is not None:
		pcg = replace(pcg, max_iterations=args.max_inner)
	overrides["pcg"] = pcg

	if args.prose_schedule:
		return ALMConfig.from_prose(**overrides)
	return ALMConfig(**overrides)

def build_run_config(args: Namespace) -> RunConfig:
	command = args.command
	if command == "geomimage":
		command = args.geomimage_command

	if command == "param":
		return RunConfig(
			command=command,
			input=args.input,
			output=args.output or current_path / args.input.stem,
			mode=args.mode,
			shape=args.shape,
			mu=args.mu,
			corners=args.corners,
			alm=build_alm_config(args),
			trace=args.trace,
			export_operators=args.export_operators,
			seed=args.seed,
		)
	if command == "metrics":
		return RunConfig(
			command=command,
			input=args.input,
			map=args.map,
			output=args.output or current_path / f"{args.input.stem}_metrics",
			bins=args.bins,
			reconstruction=args.reconstruction,
			reference=args.reference,
			seed=args.seed,
		)
	if command == "encode":
		return RunConfig(
			command=command,
			input=args.input,
			map=args.map,
			output=args.output,
			width=args.width,
			height=args.height,
		)
	if command == "reconstruct":
		return RunConfig(command=command, input=args.input, output=args.output)

	return RunConfig(
		command=command,
		output=args.output or current_path / "report",
		runs=args.runs,
		baseline=args.baseline,
	)

def main(argv: Optional[List[str]] = None) -> int:
	print(f"Balanceparam\n"
	      f"Version {version}\n")

	args = build_parser().parse_args(argv)

	setup_locale()

	verbose = args.debug or args.verbose or environ.get("BALANCEPARAM_LOG_LEVEL", "").upper() == "DEBUG"
	setup_logging(verbose)

	try:
		config = build_run_config(args)
		return COMMANDS[config.command](config)
	except (BalanceParamError, OSError) as e:
		category = e.category if isinstance(e, BalanceParamError) else "io"
		if args.debug:
			LOGE(format_exception(e))
		print(f"error: {category}: {e}", file=sys.stderr)
		return 2
	except Exception as e:
		LOGE(format_exception(e))
		print(f"error: internal: {e}", file=sys.stderr)
		return 1
