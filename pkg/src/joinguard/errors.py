"""Exception hierarchy shared by every joinguard module."""


class JoinGuardError(Exception):
    """Base class for pipeline failures (CLI exit code 1)."""


class IngestError(JoinGuardError, ValueError):
    pass


class UnknownColumnError(JoinGuardError, LookupError):
    def __init__(self, name, where=""):
        self.name = name
        suffix = f" in {where}" if where else ""
        super().__init__(f"unknown column {name!r}{suffix}")

    def __str__(self):
        return self.args[0]


class MetricError(JoinGuardError, ValueError):
    pass


class JoinError(JoinGuardError, ValueError):
    pass


class JoinExplosionError(JoinError):
    def __init__(self, estimate, cap):
        self.estimate = estimate
        self.cap = cap
        super().__init__(f"join would produce {estimate} rows, exceeding cap of {cap}")


class AssessmentError(JoinGuardError, ValueError):
    pass


class TrainingError(JoinGuardError, ValueError):
    pass


class PersistenceError(JoinGuardError, ValueError):
    pass
