"""
Protocol identifiers: namespace, name and version.

Patterns follow the protocol schema. Two textual forms exist: the wire
form used in ACL ``:protocol`` parameters (``is.lill.examples.process-documents.1.0``)
and the slash form used by humans and scenario files
(``is.lill.examples/process-documents/1.0``).
"""
import re
from dataclasses import dataclass

from core.errors import AcreError

NAMESPACE_PATTERN = r"[a-z\d]([a-z\d-]*[a-z\d])?(\.[a-z\d]([a-z\d-]*[a-z\d])?)*"
NAME_PATTERN = r"[a-z\d]([a-z\d-]*[a-z\d])?"
VERSION_PATTERN = r"\d+\.\d+"

_NAMESPACE_RE = re.compile(NAMESPACE_PATTERN)
_NAME_RE = re.compile(NAME_PATTERN)
_VERSION_RE = re.compile(VERSION_PATTERN)


class InvalidProtocolId(AcreError):
    def __init__(self, message: str):
        super().__init__(message, "INVALID_PROTOCOL_ID")


@dataclass(frozen=True, order=True)
class ProtocolId:
    namespace: str
    name: str
    version: str

    def __post_init__(self):
        if not _NAMESPACE_RE.fullmatch(self.namespace or ""):
            raise InvalidProtocolId(f"invalid namespace {self.namespace!r}")
        if not _NAME_RE.fullmatch(self.name or ""):
            raise InvalidProtocolId(f"invalid protocol name {self.name!r}")
        if not _VERSION_RE.fullmatch(self.version or ""):
            raise InvalidProtocolId(f"invalid version {self.version!r}")

    @property
    def wire(self) -> str:
        return f"{self.namespace}.{self.name}.{self.version}"

    @property
    def filename(self) -> str:
        """Repository file name, ``namespace_name_version.acr``."""
        return f"{self.namespace}_{self.name}_{self.version}.acr"

    def __str__(self) -> str:
        return f"{self.namespace}/{self.name}/{self.version}"

    @classmethod
    def parse(cls, text: str) -> "ProtocolId":
        """Accept either the slash form or the wire form."""
        text = (text or "").strip()
        if "/" in text:
            parts = text.split("/")
            if len(parts) != 3:
                raise InvalidProtocolId(f"expected namespace/name/version, got {text!r}")
            return cls(*parts)
        return cls.from_wire(text)

    @classmethod
    def from_wire(cls, text: str) -> "ProtocolId":
        # The version is the trailing \d+.\d+ and the name the component before it.
        parts = text.rsplit(".", 3)
        if len(parts) != 4:
            raise InvalidProtocolId(f"expected namespace.name.major.minor, got {text!r}")
        namespace, name, major, minor = parts
        return cls(namespace, name, f"{major}.{minor}")
