# core/xsd.py
"""
XML Schema validation shared by protocol and repository documents.

Validation runs through xmlschema; errors are reported as
"line N: /path: reason" strings. Line numbers come from a separate expat
pass because ElementTree elements do not record them.
"""
import logging
from functools import lru_cache
from pathlib import Path
from typing import List, Tuple
from xml.etree.ElementTree import Element
from xml.parsers import expat

import xmlschema

logger = logging.getLogger(__name__)

ACRE_NAMESPACE = "http://acre.lill.is"


def qname(local: str) -> str:
    return f"{{{ACRE_NAMESPACE}}}{local}"


@lru_cache(maxsize=None)
def load_schema(path: str) -> xmlschema.XMLSchema:
    logger.debug(f"Loading schema {path}")
    return xmlschema.XMLSchema(str(Path(path)))


def _element_lines(text: str) -> List[int]:
    lines: List[int] = []
    parser = expat.ParserCreate()
    parser.StartElementHandler = lambda name, attrs: lines.append(parser.CurrentLineNumber)
    parser.Parse(text, True)
    return lines


def _line_of(root: Element, elem, lines: List[int]):
    if elem is None:
        return None
    for index, candidate in enumerate(root.iter()):
        if candidate is elem:
            return lines[index] if index < len(lines) else None
    return None


def validate_document(schema: xmlschema.XMLSchema, text: str) -> Tuple[Element, List[str]]:
    """
    Parse and validate ``text``.

    Returns the root element and the list of validation errors. Raises
    a SyntaxError subclass when the text is not well-formed.
    """
    resource = xmlschema.XMLResource(text)
    root = resource.root
    try:
        lines = _element_lines(text)
    except expat.ExpatError:
        lines = []
    errors = []
    for error in schema.iter_errors(resource, use_location_hints=False):
        line = getattr(error, "sourceline", None) or _line_of(root, error.elem, lines)
        where = f"line {line}: " if line else ""
        errors.append(f"{where}{error.path or '/'}: {error.reason}")
    return root, errors


def describe_parse_error(error: SyntaxError) -> str:
    position = getattr(error, "position", None)
    if position:
        return f"line {position[0]}, column {position[1]}: not well-formed XML ({error})"
    return f"not well-formed XML ({error})"
