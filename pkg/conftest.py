# Reference material under examples/ is not part of the test suite
collect_ignore_glob = ["examples/*"]
