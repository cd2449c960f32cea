class DpGraphError(Exception):
    """Base class for all errors raised by dpgraph and the benchmark harness."""


class GraphValidationError(DpGraphError, ValueError):
    """A graph, path, or edge-list file violates its structural contract."""


class MissingShortcutError(GraphValidationError):
    """A canonical path needs a shortcut edge the given topology does not have."""

    def __init__(self, p, q):
        super().__init__(
            f"Shortcut edge ({p}, {q}) is missing; canonical paths need the augmented topology"
        )
        self.p = p
        self.q = q


class PrivacyParameterError(DpGraphError, ValueError):
    """Invalid epsilon, delta, gamma, or noise scale."""


class ExperimentConfigError(DpGraphError, ValueError):
    """Malformed experiment configuration or grid definition."""


class ResultsIOError(DpGraphError, OSError):
    """Reading or writing a results artifact failed."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = str(path)
