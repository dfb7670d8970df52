"""JSON envelopes of the campaign HTTP layer

Every body has the form `{"success": bool, "data": ...}`; failures carry `{"error-message": str}` as their data.
"""

from flask import Response, jsonify

from ..exceptions import (
    NoPendingBatchError,
    PendingBatchError,
    ProcessBOError,
    SessionError,
    SessionLockedError,
)

# campaign states that block the request until the user acts
CONFLICTS = (SessionLockedError, PendingBatchError, NoPendingBatchError)


class ResponseFactory:
    """Static class building the responses of the campaign routes.\n
    Use:
    - `ResponseFactory.success` for a request that was carried out
    - `ResponseFactory.error` for a request that was rejected
    - `ResponseFactory.failure` for a request stopped by a `ProcessBOError`
    """

    @staticmethod
    def error(error_message: str, status: int = 400) -> tuple[Response, int]:
        """Creates a response indicating that the request could not be carried out

        Args:
            error_message (str): What went wrong with the request
            status (int, optional): The HTTP status code. Defaults to 400.

        Returns:
            tuple[Response, int]: The flask `Response` and its status code
        """
        return jsonify({"success": False, "data": {"error-message": error_message}}), status

    @staticmethod
    def success(data: list | dict) -> Response:
        return jsonify({"success": True, "data": data})

    @staticmethod
    def failure(err: ProcessBOError) -> tuple[Response, int]:
        """An error response whose status code follows the kind of error: 404 when there is no session,
        409 when the session is locked or its pending batch forbids the request, 400 otherwise
        """
        if isinstance(err, CONFLICTS):
            return ResponseFactory.error(str(err), 409)
        if type(err) is SessionError:
            return ResponseFactory.error(str(err), 404)
        return ResponseFactory.error(str(err))
