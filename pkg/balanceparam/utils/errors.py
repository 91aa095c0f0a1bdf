#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#
"""Exceptions raised by balanceparam."""

class BalanceParamError(Exception):
	"""Base class of every error raised by balanceparam."""
	category = "error"

class ParseError(BalanceParamError):
	category = "parse"

class TopologyError(BalanceParamError):
	category = "topology"

class DegenerateFaceError(BalanceParamError):
	category = "degenerate-face"

class DegenerateImageFaceError(DegenerateFaceError):
	category = "degenerate-image-face"

class ShapeError(BalanceParamError, ValueError):
	category = "shape"

class NotPositiveDefinite(BalanceParamError):
	category = "not-positive-definite"

class SingularSystem(BalanceParamError):
	category = "singular-system"

class LambdaOutOfRange(BalanceParamError, ValueError):
	category = "lambda-out-of-range"

class BoundaryOffCircle(BalanceParamError):
	category = "boundary-off-circle"

class NonPositiveImageArea(BalanceParamError):
	category = "non-positive-image-area"

class LineSearchFailure(BalanceParamError):
	category = "line-search"

class CornerOrderError(BalanceParamError):
	category = "corner-order"

class MaxOuterIterations(BalanceParamError):
	category = "max-outer-iterations"

class EmptyInput(BalanceParamError, ValueError):
	category = "empty-input"

class FoldedMapError(BalanceParamError):
	category = "folded-map"

class PointLocationFailure(BalanceParamError):
	category = "point-location"

class GeometryImageIOError(BalanceParamError, OSError):
	category = "io"

class MissingSidecar(GeometryImageIOError):
	category = "missing-sidecar"

class ConfigError(BalanceParamError, ValueError):
	category = "config"

class ValidationWarning(UserWarning):
	"""Non-fatal mesh validation finding."""
