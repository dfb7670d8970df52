import logging
from typing import Callable, Optional

from flask import Blueprint, Flask, Response, request

from ..campaign import campaign_abandon, campaign_record, campaign_status, campaign_suggest
from ..config import Config
from ..exceptions import Message, ProcessBOError
from ..utils.decorators import optional_float, optional_int
from .response import ResponseFactory

logger = logging.getLogger(__name__)


class CampaignBlueprint:
    """
    Exposes one campaign session over HTTP. Every route reads or writes the session file through the same locked,
    atomic operations as the command line, so both can be used on the same campaign.
    """

    def __init__(self, import_name: str, session_path: Optional[str] = None, name: str = "campaign") -> None:
        """
        Args:
            import_name (str): The import_name of the blueprint (should just be __name__ for 99% of use cases)
            session_path (Optional[str], optional): The session file. Defaults to `Config.SESSION_PATH` at request time.
            name (str, optional): The name of the blueprint, also its url prefix. Defaults to "campaign".
        """
        self.session_path = session_path
        self.name = name

        self._bp = Blueprint(self.name, import_name)
        self.url = f"/{self.name}"

        self.create_endpoint("/status", "get_status", self.get_status, ["GET"])
        self.create_endpoint(
            "/suggest", "post_suggest", optional_int("n")(optional_float("pi")(self.post_suggest)), ["POST"]
        )
        self.create_endpoint("/record", "post_record", self.post_record, ["POST"])
        self.create_endpoint("/abandon", "post_abandon", self.post_abandon, ["POST"])

    @property
    def path(self) -> str:
        return self.session_path or Config.SESSION_PATH

    def create_endpoint(self, endpoint: str, name: str, func: Callable, methods: list[str]) -> None:
        """Register a route that turns any `ProcessBOError` raised by `func` into an error `Response`

        Args:
            endpoint (str): The endpoint path.
            name (str): The flask endpoint name
            func (Callable): the function to call when the endpoint is visited
            methods (list[str]): the allowed HTTP methods
        """

        def handle_errors(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except ProcessBOError as err:
                logger.info("%s %s failed: %s", request.method, request.path, err)
                return ResponseFactory.failure(err)

        self._bp.add_url_rule(endpoint, name, handle_errors, methods=methods)

    def get_status(self) -> Response:
        return ResponseFactory.success(campaign_status(self.path))

    def post_suggest(self, n: Optional[int] = None, pi: Optional[float] = None) -> Response:
        _, batch = campaign_suggest(self.path, n, pi)
        return ResponseFactory.success(batch.to_dict())

    def post_record(self) -> Response:
        body = request.get_json(silent=True)
        if not isinstance(body, dict) or "measurements" not in body:
            return ResponseFactory.error(Message.invalid_measurements_error())
        try:
            _, report = campaign_record(self.path, body["measurements"], body.get("status"))
        except (TypeError, ValueError):
            return ResponseFactory.error(Message.invalid_measurements_error())
        return ResponseFactory.success(report)

    def post_abandon(self) -> Response:
        state = campaign_abandon(self.path)
        return ResponseFactory.success({"history_length": len(state.history)})

    def register(self, app: Flask) -> None:
        """Registers this blueprint with the given app

        Args:
            app (Flask): Flask app to register the blueprint to
        """
        app.register_blueprint(self._bp, url_prefix=self.url)
