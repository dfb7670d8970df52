"""Session files: atomic JSON snapshots guarded by a lock file"""

import contextlib
import json
import logging
import os
import tempfile
from typing import Iterator

from ..exceptions import Message, SessionError, SessionLockedError

logger = logging.getLogger(__name__)


def lock_path(path: str) -> str:
    return f"{path}.lock"


@contextlib.contextmanager
def session_lock(path: str) -> Iterator[None]:
    """Hold the single-writer lock of a session for the duration of the block"""
    try:
        fd = os.open(lock_path(path), os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise SessionLockedError(Message.session_locked_error(path)) from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        with contextlib.suppress(FileNotFoundError):
            os.remove(lock_path(path))


def write_json_atomic(path: str, document: dict) -> None:
    """Write to a temporary file in the same directory, flush it to disk, then rename it over `path`"""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, temp = tempfile.mkstemp(prefix=".session-", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            json.dump(document, f, indent=1)
            f.flush()
            os.fsync(f.fileno())
        os.replace(temp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.remove(temp)
        raise
    logger.debug("Session written to %s", path)


def read_json(path: str) -> dict:
    if not os.path.exists(path):
        raise SessionError(Message.session_missing_error(path))
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)
