"""
JSON Schema for the machine-readable rendering of a protocol.
"""

NAMESPACE_PATTERN = r"^[a-z\d]([a-z\d-]*[a-z\d])?(\.[a-z\d]([a-z\d-]*[a-z\d])?)*$"
NAME_PATTERN = r"^[a-z\d]([a-z\d-]*[a-z\d])?$"
VERSION_PATTERN = r"^\d+\.\d+$"


PROTOCOL_JSON_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["id", "states", "initial", "final", "transitions"],
    "additionalProperties": False,
    "properties": {
        "id": {
            "type": "object",
            "required": ["namespace", "name", "version"],
            "additionalProperties": False,
            "properties": {
                "namespace": {"type": "string", "pattern": NAMESPACE_PATTERN},
                "name": {"type": "string", "pattern": NAME_PATTERN},
                "version": {"type": "string", "pattern": VERSION_PATTERN},
            },
        },
        "description": {"type": ["string", "null"]},
        "states": {
            "type": "array",
            "items": {"type": "string", "minLength": 1},
            "uniqueItems": True,
        },
        "initial": {
            "type": ["string", "null"],
            "description": "The derived initial state, or null when there is not exactly one",
        },
        "final": {
            "type": "array",
            "items": {"type": "string"},
            "uniqueItems": True,
        },
        "transitions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["from", "to", "performative", "sender", "receiver", "content"],
                "additionalProperties": False,
                "properties": {
                    "from": {"type": "string"},
                    "to": {"type": "string"},
                    "performative": {"type": "string"},
                    "sender": {"type": "string"},
                    "receiver": {"type": "string"},
                    "content": {"type": "string"},
                    "imported_from": {"type": ["string", "null"]},
                },
            },
        },
    },
}
