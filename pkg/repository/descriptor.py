"""
repository.xml: the descriptor listing a repository's protocols.

A repository is a base location holding ``repository.xml`` and a
``repository/`` directory with one ``namespace_name_version.acr`` file per
protocol.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple
from xml.etree import ElementTree as ET

from core.errors import AcreError
from core.xsd import ACRE_NAMESPACE, describe_parse_error, load_schema, qname, validate_document
from protocols.identifiers import ProtocolId

logger = logging.getLogger(__name__)

REPOSITORY_XSD = Path(__file__).resolve().parent / "schemas" / "repository.xsd"
DESCRIPTOR_NAME = "repository.xml"
PROTOCOL_DIR = "repository"


class RepositorySchemaError(AcreError):
    def __init__(self, errors: List[str], source: str = ""):
        prefix = f"{source}: " if source else ""
        super().__init__(prefix + "; ".join(errors), "REPOSITORY_SCHEMA")
        self.errors = list(errors)


@dataclass(frozen=True)
class RepositoryDescriptor:
    base: str
    entries: Tuple[ProtocolId, ...] = ()


def parse_descriptor(xml: str, source: str = "") -> RepositoryDescriptor:
    """
    Parse and validate a repository descriptor.

    Raises:
        RepositorySchemaError: not well-formed or not valid against the schema.
    """
    try:
        root, errors = validate_document(load_schema(str(REPOSITORY_XSD)), xml)
    except SyntaxError as e:
        raise RepositorySchemaError([describe_parse_error(e)], source) from e
    if errors:
        raise RepositorySchemaError(errors, source)

    base = (root.findtext(qname("base")) or "").strip()
    entries = []
    for ns in root.iterfind(f"{qname('namespaces')}/{qname('namespace')}"):
        for elem in ns.iterfind(qname("protocol")):
            entries.append(ProtocolId(ns.get("name"), elem.get("name"), elem.get("version")))
    logger.debug("Parsed repository descriptor", extra={"source": source, "base": base, "entries": len(entries)})
    return RepositoryDescriptor(base, tuple(entries))


def save_descriptor(descriptor: RepositoryDescriptor, comment: Optional[str] = None) -> str:
    """Namespaces appear in first-seen order, protocols in listing order."""
    ET.register_namespace("", ACRE_NAMESPACE)
    root = ET.Element(qname("repository"))
    ET.SubElement(root, qname("base")).text = descriptor.base
    namespaces = ET.SubElement(root, qname("namespaces"))
    grouped: Dict[str, ET.Element] = {}
    for pid in descriptor.entries:
        if pid.namespace not in grouped:
            grouped[pid.namespace] = ET.SubElement(namespaces, qname("namespace"), {"name": pid.namespace})
        ET.SubElement(grouped[pid.namespace], qname("protocol"), {"name": pid.name, "version": pid.version})
    ET.indent(root, space="  ")
    head = '<?xml version="1.0" encoding="UTF-8"?>\n'
    if comment:
        head += f"<!-- {comment.replace('--', '- -')} -->\n"
    return head + ET.tostring(root, encoding="unicode") + "\n"


def protocol_url(base: str, pid: ProtocolId) -> str:
    """``base/repository/namespace_name_version.acr``."""
    return f"{base.rstrip('/')}/{PROTOCOL_DIR}/{pid.filename}"
