"""
Reading and writing protocol definition files.

Files are validated against ``schemas/protocol.xsd`` before they are
read. Omitted sender, receiver and content attributes default to the
anonymous variable. ``<import>`` elements are recorded on the protocol
and resolved separately.
"""
import logging
from pathlib import Path
from typing import List, Union
from xml.etree import ElementTree as ET

from acl.performatives import UnknownPerformative, parse_performative
from core.errors import AcreError
from core.xsd import ACRE_NAMESPACE, describe_parse_error, load_schema, qname, validate_document
from terms.language import Constant, Variable
from terms.parser import TermSyntaxError, parse_content_pattern, parse_term

from .definitions import Protocol, State, Transition
from .identifiers import ProtocolId

logger = logging.getLogger(__name__)

PROTOCOL_XSD = Path(__file__).resolve().parent / "schemas" / "protocol.xsd"

ANONYMOUS_TEXT = "?"


class ProtocolSchemaError(AcreError):
    """The document is not a valid protocol definition; ``errors`` lists every problem found."""
    def __init__(self, errors: List[str], source: str = ""):
        prefix = f"{source}: " if source else ""
        super().__init__(prefix + "; ".join(errors), "PROTOCOL_SCHEMA")
        self.errors = list(errors)
        self.source = source


class DuplicateState(AcreError):
    def __init__(self, name: str, protocol: ProtocolId):
        super().__init__(f"state {name!r} declared twice in {protocol}", "DUPLICATE_STATE")
        self.name = name


def _text(parent, local: str) -> str:
    elem = parent.find(qname(local))
    return (elem.text or "").strip() if elem is not None else ""


def _party(text: str, attribute: str):
    term = parse_term(text)
    if not isinstance(term, (Constant, Variable)):
        raise TermSyntaxError(f"{attribute} must be an agent name or a variable", text, 0)
    return term


def load_protocol(xml: str, source: str = "") -> Protocol:
    """
    Parse a protocol definition.

    Raises:
        ProtocolSchemaError: not well-formed, schema violations, unknown
            performatives or unparseable terms in attributes.
        DuplicateState: a state name is declared twice.
    """
    try:
        root, errors = validate_document(load_schema(str(PROTOCOL_XSD)), xml)
    except SyntaxError as e:
        raise ProtocolSchemaError([describe_parse_error(e)], source) from e
    if errors:
        logger.info("Protocol failed schema validation", extra={"source": source, "errors": len(errors)})
        raise ProtocolSchemaError(errors, source)

    pid = ProtocolId(_text(root, "namespace"), _text(root, "name"), _text(root, "version"))

    description_elem = root.find(qname("description"))
    description = None
    if description_elem is not None:
        description = " ".join((description_elem.text or "").split())

    imports = tuple(
        ProtocolId(_text(elem, "namespace"), _text(elem, "name"), _text(elem, "version"))
        for elem in root.findall(qname("import"))
    )

    states = []
    seen = set()
    for elem in root.iterfind(f"{qname('states')}/{qname('state')}"):
        name = elem.get("name").strip()
        if name in seen:
            raise DuplicateState(name, pid)
        seen.add(name)
        states.append(State(name, pid))

    transitions = []
    problems = []
    for index, elem in enumerate(root.iterfind(f"{qname('transitions')}/{qname('transition')}"), start=1):
        where = f"transition {index}"
        try:
            transitions.append(Transition(
                protocol=pid,
                from_state=elem.get("from-state").strip(),
                to_state=elem.get("to-state").strip(),
                performative=parse_performative(elem.get("performative")),
                sender=_party(elem.get("sender", ANONYMOUS_TEXT), "sender"),
                receiver=_party(elem.get("receiver", ANONYMOUS_TEXT), "receiver"),
                content=parse_content_pattern(elem.get("content", ANONYMOUS_TEXT)),
            ))
        except (TermSyntaxError, UnknownPerformative) as e:
            problems.append(f"{where}: {e}")
    if problems:
        raise ProtocolSchemaError(problems, source)

    protocol = Protocol(pid, tuple(states), tuple(transitions), description, imports)
    logger.debug(f"Loaded protocol {pid}", extra={
        "protocol": str(pid),
        "states": len(states),
        "transitions": len(transitions),
        "imports": len(imports),
    })
    return protocol


def read_protocol(path: Union[str, Path]) -> Protocol:
    path = Path(path)
    return load_protocol(path.read_text(encoding="utf-8"), source=str(path))


def save_protocol(p: Protocol) -> str:
    """Serialize to protocol XML; every transition attribute is written explicitly."""
    ET.register_namespace("", ACRE_NAMESPACE)
    root = ET.Element(qname("protocol"))
    ET.SubElement(root, qname("namespace")).text = p.id.namespace
    ET.SubElement(root, qname("name")).text = p.id.name
    ET.SubElement(root, qname("version")).text = p.id.version
    if p.description is not None:
        ET.SubElement(root, qname("description")).text = p.description
    for imported in p.imports:
        elem = ET.SubElement(root, qname("import"))
        ET.SubElement(elem, qname("namespace")).text = imported.namespace
        ET.SubElement(elem, qname("name")).text = imported.name
        ET.SubElement(elem, qname("version")).text = imported.version
    states = ET.SubElement(root, qname("states"))
    for state in p.states:
        ET.SubElement(states, qname("state"), {"name": state.name})
    if p.transitions:
        transitions = ET.SubElement(root, qname("transitions"))
        for t in p.transitions:
            ET.SubElement(transitions, qname("transition"), {
                "performative": t.performative.value,
                "from-state": t.from_state,
                "to-state": t.to_state,
                "sender": str(t.sender),
                "receiver": str(t.receiver),
                "content": str(t.content),
            })
    ET.indent(root, space="  ")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def write_protocol(p: Protocol, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(save_protocol(p), encoding="utf-8")
    return path
