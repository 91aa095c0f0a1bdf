#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#

import numpy as np
import pytest

from balanceparam.utils.synthetic import (
	bumpy_hemisphere,
	finger,
	planar_disk,
	square_fan,
	square_grid,
)

def central_difference(fun, x, h=1e-6):
	"""Gradient of a scalar function by central differences, one coordinate at a time."""
	x = np.asarray(x, dtype=float)
	grad = np.empty_like(x)
	for i in range(len(x)):
		step = np.zeros_like(x)
		step[i] = h
		grad[i] = (fun(x + step) - fun(x - step)) / (2 * h)
	return grad

def relative_error(a, b):
	return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-12)

def directional_error(fun, grad, x, rng, directions=3, h=1e-6):
	"""
	Largest mismatch between grad . d and the central difference of fun along d,
	relative to |grad|, over random unit directions d.
	"""
	worst = 0.0
	for _ in range(directions):
		d = rng.standard_normal(len(x))
		d /= np.linalg.norm(d)
		numeric = (fun(x + h * d) - fun(x - h * d)) / (2 * h)
		worst = max(worst, abs(grad @ d - numeric) / max(np.linalg.norm(grad), 1e-12))
	return worst

@pytest.fixture(scope="session")
def fan():
	return square_fan()

@pytest.fixture(scope="session")
def grid():
	return square_grid(8)

@pytest.fixture(scope="session")
def disk():
	return planar_disk(6)

@pytest.fixture(scope="session")
def hemisphere():
	return bumpy_hemisphere()

@pytest.fixture(scope="session")
def small_hemisphere():
	return bumpy_hemisphere(rings=8)

@pytest.fixture(scope="session")
def finger_mesh():
	return finger(rings=16, height=1.0, width=0.2)
