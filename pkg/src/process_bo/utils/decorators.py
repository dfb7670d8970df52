"""Useful decorator functions to reduce code duplication in the API codebase"""

import functools
from typing import Callable

from flask import request

from ..exceptions import Message


def _optional_number(arg: str, cast: Callable[[str], float], kind: str) -> Callable:
    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def inner(*args, **kwargs):
            from ..api.response import ResponseFactory

            raw = request.values.get(arg)
            if raw is None or raw == "":
                kwargs[arg] = None
                return func(*args, **kwargs)
            try:
                kwargs[arg] = cast(raw)
            except ValueError:
                return ResponseFactory.error(Message.invalid_number_error(arg, kind))
            return func(*args, **kwargs)

        return inner

    return decorator


def _to_int(raw: str) -> int:
    value = float(raw)
    # Trigger exception return
    if not value.is_integer():
        raise ValueError("Float passed into a parameter requiring an integer")
    return int(value)


def _to_float(raw: str) -> float:
    value = float(raw)
    if value != value or value in (float("inf"), float("-inf")):
        raise ValueError("Non-finite value")
    return value


def optional_int(arg: str) -> Callable:
    """Decorator that reads the query or form value `arg` of the request and passes it to the route as an integer
    keyword argument, or None when it is absent. A value that is not in integer form returns an error response.

    Args:
        arg (str): The request value that should be a valid integer if given
    """
    return _optional_number(arg, _to_int, "integer")


def optional_float(arg: str) -> Callable:
    """Same as `optional_int` for finite floating point values"""
    return _optional_number(arg, _to_float, "finite number")
