# This file makes the benchmark directory a Python package
