# This file makes src/core a Python package
