from typing import Optional

from flask import Flask

from ..api import CampaignBlueprint
from ..config import Config


def create_app(session_path: Optional[str] = None) -> Flask:
    """Create the campaign HTTP application

    Args:
        session_path (Optional[str], optional): the session file to serve. Defaults to `Config.SESSION_PATH` at
            request time.

    Returns:
        Flask: the application
    """
    app = Flask(__name__)
    app.config.from_object(Config)
    app.config["TESTING"] = Config.APP_TESTING
    app.config["DEBUG"] = Config.APP_DEBUG

    CampaignBlueprint(__name__, session_path).register(app)
    return app
