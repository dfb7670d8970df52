"""This module contains the classes of the campaign HTTP API.

This includes:
    - `CampaignBlueprint`, the flask blueprint that exposes a campaign session
    - `ResponseFactory`, the factory class that should be used whenever a flask Response should be returned
"""

from .response import ResponseFactory
from .blueprint import CampaignBlueprint

__all__ = ["CampaignBlueprint", "ResponseFactory"]
