"""
Transports for reading repository files over HTTP or from the filesystem.
"""
import logging
from pathlib import Path
from typing import Optional
from urllib.parse import unquote, urlparse

import requests
from django.conf import settings
from tenacity import (
    retry,
    stop_after_attempt,
    wait_exponential,
    retry_if_exception_type,
    before_sleep_log,
)

from core.errors import AcreError

logger = logging.getLogger(__name__)


class FetchFailed(AcreError):
    def __init__(self, location: str, reason: str, transient: bool = False):
        super().__init__(f"could not read {location}: {reason}", "FETCH_FAILED")
        self.location = location
        self.reason = reason
        # timeouts and connection errors
        self.transient = transient


def is_http(location: str) -> bool:
    return urlparse(location).scheme in ("http", "https")


def local_path(location: str) -> Path:
    parsed = urlparse(location)
    if parsed.scheme == "file":
        return Path(unquote(parsed.path))
    return Path(location)


class FileTransport:
    """Reads local paths and file:// URLs."""

    def read(self, location: str) -> str:
        path = local_path(location)
        try:
            return path.read_text(encoding="utf-8")
        except OSError as e:
            raise FetchFailed(location, e.strerror or str(e)) from e


class HttpTransport:
    """Plain GET, no caching headers; transient failures are retried."""

    def __init__(self, timeout: Optional[float] = None, session: Optional[requests.Session] = None):
        self.timeout = timeout if timeout is not None else getattr(settings, "ACRE_FETCH_TIMEOUT", 30)
        self.session = session or requests.Session()

    @retry(
        stop=stop_after_attempt(3),
        wait=wait_exponential(multiplier=2, min=4, max=60),
        retry=retry_if_exception_type((requests.Timeout, requests.ConnectionError)),
        before_sleep=before_sleep_log(logger, logging.WARNING),
        reraise=True,
    )
    def _get(self, url: str) -> requests.Response:
        resp = self.session.get(url, timeout=self.timeout)
        if resp.status_code >= 500:
            logger.warning("Repository server error", extra={"url": url, "status_code": resp.status_code})
            raise requests.ConnectionError(f"Server error ({resp.status_code})")
        return resp

    def read(self, location: str) -> str:
        try:
            resp = self._get(location)
        except (requests.Timeout, requests.ConnectionError) as e:
            raise FetchFailed(location, str(e), transient=True) from e
        if resp.status_code != 200:
            raise FetchFailed(location, f"HTTP {resp.status_code}")
        resp.encoding = resp.encoding or "utf-8"
        return resp.text


class DefaultTransport:
    """Dispatches on the location: http(s) URLs over the network, anything else from disk."""

    def __init__(self, http: Optional[HttpTransport] = None, files: Optional[FileTransport] = None):
        self.http = http or HttpTransport()
        self.files = files or FileTransport()

    def read(self, location: str) -> str:
        if is_http(location):
            return self.http.read(location)
        return self.files.read(location)
