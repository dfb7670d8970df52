"""Exceptions raised throughout the package, and the standard wording of their messages.

Every error derives from `ProcessBOError` so the command line and HTTP layers can catch the whole family in one place.
If the wording of an error should change, change it in `Message` rather than at the raise site.
"""


class ProcessBOError(Exception):
    """Base class of all errors raised by process_bo"""


class InsufficientDataError(ProcessBOError):
    pass


class IllConditionedKernelError(ProcessBOError):
    pass


class DimensionMismatchError(ProcessBOError):
    pass


class EmptyCandidateSetError(ProcessBOError):
    pass


class CandidateCapError(ProcessBOError):
    pass


class NoFeasibleGridPointError(ProcessBOError):
    pass


class OutOfDomainError(ProcessBOError):
    pass


class MeasurementError(ProcessBOError):
    pass


class CalibrationError(ProcessBOError):
    pass


class ConfigError(ProcessBOError):
    pass


class SessionError(ProcessBOError):
    pass


class SessionExistsError(SessionError):
    pass


class SessionLockedError(SessionError):
    pass


class PendingBatchError(SessionError):
    pass


class NoPendingBatchError(SessionError):
    pass


class Message:
    @staticmethod
    def insufficient_data_error(count: int, required: int = 2) -> str:
        """Create a standardized error message for fitting a model on too few points

        Args:
            count (int): the number of points available
            required (int, optional): the number of points needed. Defaults to 2.

        Returns:
            str: the error message
        """
        return f"Insufficient data: {count} point(s) given, at least {required} are required to fit a model."

    @staticmethod
    def ill_conditioned_error(jitter: float) -> str:
        return f"Ill-conditioned kernel: factorization failed even with a diagonal jitter of {jitter:g}."

    @staticmethod
    def dimension_mismatch_error(expected: int, got: int, what: str = "input") -> str:
        return f"Dimension mismatch: expected an {what} of dimension {expected}, got {got}."

    @staticmethod
    def empty_candidates_error() -> str:
        return "The candidate set is empty. Generate a grid or relax the exclusion rules before selecting."

    @staticmethod
    def candidate_cap_error(required: int, cap: int) -> str:
        """Create a standardized error message for a grid that is larger than the configured candidate cap

        Args:
            required (int): the number of grid points the grid spec would produce
            cap (int): the configured cap

        Returns:
            str: the error message
        """
        return f"The grid produces {required} candidates, which exceeds the cap of {cap}. Raise the cap to at least {required} or coarsen the grid."

    @staticmethod
    def no_feasible_grid_point_error(problem: str) -> str:
        return f"No feasible grid point exists for problem {problem}. Use a finer grid."

    @staticmethod
    def out_of_domain_error(x, problem: str) -> str:
        return f"The point {list(x)} lies outside the domain of problem {problem}."

    @staticmethod
    def measurement_count_error(expected: int, got: int) -> str:
        return f"Expected measurements for {expected} candidate(s), got {got}."

    @staticmethod
    def non_finite_measurement_error() -> str:
        return "Measurements must be finite numbers."

    @staticmethod
    def measurement_shape_error(constraint_count: int) -> str:
        return f"Every experiment needs exactly {constraint_count} measurement(s)."

    @staticmethod
    def session_exists_error(path: str) -> str:
        return f"A session already exists at {path}. Pass --force to overwrite it."

    @staticmethod
    def session_missing_error(path: str) -> str:
        return f"No session exists at {path}. Run `campaign init` first."

    @staticmethod
    def session_locked_error(path: str) -> str:
        return f"The session {path} is locked by another command. Remove {path}.lock if no command is running."

    @staticmethod
    def pending_batch_error() -> str:
        return "A batch is already pending. Record its results or abandon it before requesting a new suggestion."

    @staticmethod
    def no_pending_batch_error() -> str:
        return "There is no pending batch. Request a suggestion first."

    @staticmethod
    def status_column_error() -> str:
        return "The dataset has no status measurement column, so the status model cannot be used."

    @staticmethod
    def invalid_number_error(name: str, kind: str = "number") -> str:
        """Create a standardized error message for a request parameter that does not parse

        Args:
            name (str): the name of the parameter
            kind (str, optional): what the parameter should be. Defaults to "number".

        Returns:
            str: the error message
        """
        return f"The given value of {name} is invalid. It must be a{'n' if kind[0] in 'aeiou' else ''} {kind}."

    @staticmethod
    def invalid_measurements_error() -> str:
        return 'The request body must be JSON of the form {"measurements": [[...], ...], "status": [...]}.'
