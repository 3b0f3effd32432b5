"""
Graphviz DOT and JSON renderings of a protocol FSM.
"""
import json
import logging
from typing import Iterator, List

from jsonschema import Draft202012Validator

from .definitions import Protocol
from .schema import PROTOCOL_JSON_SCHEMA

logger = logging.getLogger(__name__)

_validator = Draft202012Validator(PROTOCOL_JSON_SCHEMA)


def _gvquote(s: str) -> str:
    return '"{}"'.format(s.replace("\\", "\\\\").replace('"', r"\""))


def _dot_lines(p: Protocol) -> Iterator[str]:
    candidates = p.initial_candidates
    finals = p.final_state_names
    has_imports = any(t.imported_from is not None for t in p.transitions)

    yield f"digraph {_gvquote(str(p.id))} {{"
    yield "  rankdir=LR;"
    yield '  node [shape="circle"];'
    if len(candidates) == 1:
        yield '  "__start" [shape="point" label=""];'
    for name in p.state_names:
        shape = "doublecircle" if name in finals else "circle"
        yield f'  {_gvquote(name)} [shape="{shape}"];'
    if len(candidates) == 1:
        yield f'  "__start" -> {_gvquote(candidates[0])};'
    for t in p.transitions:
        # the protocol's own edges stand out once imported edges are present
        style = ' style="dashed"' if has_imports and t.imported_from is None else ""
        yield f"  {_gvquote(t.from_state)} -> {_gvquote(t.to_state)} [label={_gvquote(t.label())}{style}];"
    yield "}"


def render_dot(p: Protocol) -> str:
    """DOT digraph: entry arrow into the initial state, final states double-circled."""
    return "\n".join(_dot_lines(p)) + "\n"


def protocol_document(p: Protocol) -> dict:
    candidates = p.initial_candidates
    return {
        "id": {"namespace": p.id.namespace, "name": p.id.name, "version": p.id.version},
        "description": p.description,
        "states": list(p.state_names),
        "initial": candidates[0] if len(candidates) == 1 else None,
        "final": sorted(p.final_state_names),
        "transitions": [
            {
                "from": t.from_state,
                "to": t.to_state,
                "performative": t.performative.value,
                "sender": str(t.sender),
                "receiver": str(t.receiver),
                "content": str(t.content),
                "imported_from": str(t.imported_from) if t.imported_from else None,
            }
            for t in p.transitions
        ],
    }


def validate_document(document: dict) -> List[str]:
    errors = []
    for err in _validator.iter_errors(document):
        path = ".".join(str(x) for x in err.path)
        errors.append(f"{path}: {err.message}" if path else err.message)
    return errors


def render_json(p: Protocol) -> str:
    document = protocol_document(p)
    errors = validate_document(document)
    if errors:
        # a rendering that breaks its own schema is a programming error
        raise ValueError("protocol rendering does not match its schema: " + "; ".join(errors))
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"
