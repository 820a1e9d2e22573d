import time


class TimeMeasure:
    """Seconds elapsed since construction, read by calling the instance"""

    def __init__(self):
        self._start = time.monotonic()

    def __call__(self) -> float:
        return time.monotonic() - self._start


class Deadline:
    """Wall-clock budget on top of `TimeMeasure`"""

    def __init__(self, budget_seconds: float):
        self._elapsed = TimeMeasure()
        self._budget = budget_seconds

    @property
    def elapsed(self) -> float:
        return self._elapsed()

    @property
    def remaining(self) -> float:
        return max(0.0, self._budget - self._elapsed())

    def expired(self) -> bool:
        return self._elapsed() >= self._budget
