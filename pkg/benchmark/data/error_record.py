from dataclasses import astuple, dataclass

# CSV column order
COLUMNS = ('mechanism', 'n', 'epsilon', 'rep', 'max_abs_error', 'mean_abs_error', 'runtime_ms', 'clamped_count')


@dataclass(frozen=True)
class ErrorRecord:
    """Error of one mechanism run on one generated graph"""
    mechanism: str
    n: int
    epsilon: float
    rep: int
    max_abs_error: float
    mean_abs_error: float
    runtime_ms: float
    clamped_count: int

    def as_row(self) -> tuple:
        return astuple(self)

    def sort_key(self):
        return self.mechanism, self.epsilon, self.n, self.rep
