"""
Import resolution.

An imported protocol's states and transitions are incorporated into the
importing protocol under the importer's id. Imported transitions come
first, in the order of the import elements, followed by the importer's
own transitions.
"""
import logging
from collections.abc import Mapping
from dataclasses import replace
from typing import Callable, Optional, Tuple, Union

from core.errors import AcreError

from .definitions import Protocol, State
from .identifiers import ProtocolId

logger = logging.getLogger(__name__)

Lookup = Union[Mapping, Callable[[ProtocolId], Optional[Protocol]]]


class UnresolvedImport(AcreError):
    def __init__(self, missing: ProtocolId, importer: ProtocolId):
        super().__init__(f"{importer} imports {missing}, which is not available", "UNRESOLVED_IMPORT")
        self.missing = missing
        self.importer = importer


class ImportCycle(AcreError):
    def __init__(self, chain: Tuple[ProtocolId, ...]):
        super().__init__("import cycle: " + " -> ".join(str(pid) for pid in chain), "IMPORT_CYCLE")
        self.chain = chain


class StateCollision(AcreError):
    def __init__(self, name: str, importer: ProtocolId, source: ProtocolId):
        super().__init__(f"state {name!r} from {source} already exists in {importer}", "STATE_COLLISION")
        self.name = name


def _fetch(lookup: Lookup, pid: ProtocolId, importer: ProtocolId) -> Protocol:
    get = lookup.get if isinstance(lookup, Mapping) else lookup
    try:
        found = get(pid)
    except KeyError:
        found = None
    if found is None:
        raise UnresolvedImport(pid, importer)
    return found


def _resolve(p: Protocol, lookup: Lookup, chain: Tuple[ProtocolId, ...]) -> Protocol:
    if not p.imports:
        return p

    states = []
    names = {}
    transitions = []
    for pid in p.imports:
        if pid in chain:
            raise ImportCycle(chain + (pid,))
        imported = _resolve(_fetch(lookup, pid, p.id), lookup, chain + (pid,))
        for state in imported.states:
            if state.name in names:
                raise StateCollision(state.name, p.id, pid)
            names[state.name] = pid
            states.append(State(state.name, p.id))
        transitions.extend(
            replace(t, protocol=p.id, imported_from=t.imported_from or pid)
            for t in imported.transitions
        )

    for state in p.states:
        if state.name in names:
            raise StateCollision(state.name, p.id, names[state.name])
        states.append(state)
    transitions.extend(p.transitions)

    logger.debug(f"Resolved imports of {p.id}", extra={
        "protocol": str(p.id),
        "imports": [str(pid) for pid in p.imports],
    })
    return Protocol(p.id, tuple(states), tuple(transitions), p.description, ())


def resolve_imports(p: Protocol, lookup: Lookup) -> Protocol:
    """
    Flatten ``p`` by incorporating everything it imports, recursively.

    ``lookup`` is a mapping or a callable from ProtocolId to Protocol.

    Raises:
        UnresolvedImport: an imported id is not available.
        ImportCycle: protocols import each other, including self-imports.
        StateCollision: a state name exists on both sides of an import.
    """
    return _resolve(p, lookup, (p.id,))
