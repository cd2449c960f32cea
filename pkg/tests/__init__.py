# dpgraph test suite: unittest.TestCase classes, runnable with pytest or tests/run_tests.py
