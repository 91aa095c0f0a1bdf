#!/usr/bin/python3
#
# Copyright (C) 2025 Balanceparam Project
#
# SPDX-License-Identifier: GPL-3.0
#

from balanceparam.main import main
import sys

if __name__ == '__main__':
	sys.exit(main())
