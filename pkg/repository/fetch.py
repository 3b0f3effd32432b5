"""
Protocol Manager: download a repository into a ProtocolStore.

Every protocol listed in the source's repository.xml is downloaded,
flattened against the store and the other listed protocols, validated
and stored. Failures are reported per protocol; one bad file does not
stop the rest.
"""
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional
from urllib.parse import urljoin, urlparse

from django.conf import settings

from core.errors import AcreError
from protocols.definitions import Protocol
from protocols.identifiers import ProtocolId
from protocols.imports import resolve_imports
from protocols.loader import load_protocol
from protocols.validation import validate_protocol

from .descriptor import DESCRIPTOR_NAME, RepositoryDescriptor, parse_descriptor, protocol_url
from .store import ProtocolStore
from .transport import DefaultTransport, local_path

logger = logging.getLogger(__name__)

_URL_SCHEMES = ("http", "https", "file")


@dataclass
class FetchResult:
    source: str
    added: List[ProtocolId] = field(default_factory=list)
    skipped: List[ProtocolId] = field(default_factory=list)
    errors: Dict[ProtocolId, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors

    def as_dict(self) -> dict:
        return {
            "source": self.source,
            "added": [str(pid) for pid in self.added],
            "skipped": [str(pid) for pid in self.skipped],
            "errors": {str(pid): reason for pid, reason in self.errors.items()},
        }


def descriptor_location(source: str) -> str:
    """``source`` names either a repository root or its repository.xml."""
    if source.endswith(".xml"):
        return source
    if urlparse(source).scheme in _URL_SCHEMES:
        return source.rstrip("/") + "/" + DESCRIPTOR_NAME
    return str(Path(source) / DESCRIPTOR_NAME)


def resolve_base(base: str, location: str) -> str:
    """
    Absolute bases (URLs or absolute paths) are used as given; anything
    else is taken relative to the directory holding repository.xml.
    """
    if urlparse(base).scheme in _URL_SCHEMES or Path(base).is_absolute():
        return base
    if urlparse(location).scheme in ("http", "https"):
        return urljoin(location, base or ".")
    return str((local_path(location).parent / base).resolve())


def _download(transport, pid: ProtocolId, url: str) -> Protocol:
    protocol = load_protocol(transport.read(url), source=url)
    if protocol.id != pid:
        raise AcreError(f"{url} declares {protocol.id} but is listed as {pid}", "REPOSITORY_SCHEMA")
    return protocol


def fetch_repository(
    source: str,
    store: ProtocolStore,
    transport=None,
    workers: Optional[int] = None,
) -> FetchResult:
    """
    Download every protocol ``source`` lists into ``store``.

    Raises:
        FetchFailed: repository.xml could not be read.
        RepositorySchemaError: repository.xml is invalid.
    """
    transport = transport or DefaultTransport()
    workers = workers or getattr(settings, "ACRE_FETCH_WORKERS", 4)
    location = descriptor_location(source)
    result = FetchResult(source)

    descriptor: RepositoryDescriptor = parse_descriptor(transport.read(location), source=location)
    base = resolve_base(descriptor.base, location)
    urls = {pid: protocol_url(base, pid) for pid in descriptor.entries}
    logger.info(f"Fetching {len(urls)} protocols", extra={"source": source, "base": base, "workers": workers})

    downloaded: Dict[ProtocolId, Protocol] = {}
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(_download, transport, pid, url): pid for pid, url in urls.items()}
        for future in as_completed(futures):
            pid = futures[future]
            try:
                downloaded[pid] = future.result()
            except AcreError as e:
                result.errors[pid] = str(e)
                logger.warning(f"Could not download {pid}", extra={"protocol": str(pid), "error": str(e)})

    known = store.snapshot()

    def lookup(pid: ProtocolId) -> Optional[Protocol]:
        return downloaded.get(pid) or known.get(pid)

    # descriptor order keeps the store's write order stable
    for pid in descriptor.entries:
        if pid not in downloaded:
            continue
        try:
            resolved = resolve_imports(downloaded[pid], lookup)
        except AcreError as e:
            result.errors[pid] = str(e)
            logger.warning(f"Could not resolve imports of {pid}", extra={"protocol": str(pid), "error": str(e)})
            continue

        report = validate_protocol(resolved)
        if not report.ok:
            result.errors[pid] = "invalid protocol: " + "; ".join(report.errors)
            continue
        for warning in report.warnings:
            logger.warning(f"{pid}: {warning}", extra={"protocol": str(pid)})

        try:
            if store.add(resolved, origin=urls[pid]):
                result.added.append(pid)
            else:
                result.skipped.append(pid)
        except (AcreError, OSError) as e:
            result.errors[pid] = str(e)
            logger.error(f"Could not store {pid}", extra={"protocol": str(pid), "error": str(e)})

    logger.info("Fetch finished", extra={
        "source": source,
        "added": len(result.added),
        "skipped": len(result.skipped),
        "failed": len(result.errors),
    })
    return result
