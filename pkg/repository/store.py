"""
The local Protocol Store.

A store is laid out like a repository: ``repository.xml`` at the root and
one ``.acr`` file per protocol under ``repository/``. Every stored protocol
is flattened (import-free). A store created without a root lives only in
memory, which is what the harness and most tests use.
"""
import logging
import re
import threading
from collections.abc import Mapping
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Union

from core.errors import AcreError
from protocols.definitions import Protocol
from protocols.identifiers import ProtocolId
from protocols.loader import ProtocolSchemaError, DuplicateState, load_protocol, save_protocol

from .descriptor import (
    DESCRIPTOR_NAME,
    PROTOCOL_DIR,
    RepositoryDescriptor,
    RepositorySchemaError,
    parse_descriptor,
    save_descriptor,
)

logger = logging.getLogger(__name__)

Listener = Callable[[ProtocolId], None]

_ORIGINS_RE = re.compile(r"<!--\s*origins\s*\n(.*?)-->", re.DOTALL)


class ProtocolConflict(AcreError):
    def __init__(self, pid: ProtocolId):
        super().__init__(f"{pid} is already stored with different content", "PROTOCOL_CONFLICT")
        self.pid = pid


class StoreCorrupt(AcreError):
    def __init__(self, path: Union[str, Path], reason: str):
        super().__init__(f"{path}: {reason}", "STORE_CORRUPT")
        self.path = str(path)


class ProtocolStore(Mapping):
    """
    Map from ProtocolId to flattened Protocol.

    Reads and writes are serialized by one lock; ``snapshot()`` hands out a
    plain dict that is safe to keep while other threads add protocols.
    """

    def __init__(self, root: Optional[Union[str, Path]] = None):
        self.root = Path(root) if root is not None else None
        self.warnings: List[str] = []
        self._index: Dict[ProtocolId, Protocol] = {}
        self._origins: Dict[ProtocolId, str] = {}
        self._listeners: List[Listener] = []
        self._lock = threading.RLock()

    @classmethod
    def in_memory(cls, protocols=()) -> "ProtocolStore":
        store = cls()
        for p in protocols:
            store.add(p)
        return store

    @property
    def persistent(self) -> bool:
        return self.root is not None

    def __getitem__(self, pid: ProtocolId) -> Protocol:
        with self._lock:
            return self._index[pid]

    def __iter__(self) -> Iterator[ProtocolId]:
        return iter(self.ids())

    def __len__(self) -> int:
        with self._lock:
            return len(self._index)

    def ids(self) -> List[ProtocolId]:
        with self._lock:
            return sorted(self._index)

    def snapshot(self) -> Dict[ProtocolId, Protocol]:
        with self._lock:
            return dict(self._index)

    def origin(self, pid: ProtocolId) -> Optional[str]:
        return self._origins.get(pid)

    def subscribe(self, listener: Listener) -> Callable[[], None]:
        """Call ``listener(pid)`` for every protocol added from now on; returns an unsubscribe function."""
        with self._lock:
            self._listeners.append(listener)

        def unsubscribe():
            with self._lock:
                if listener in self._listeners:
                    self._listeners.remove(listener)
        return unsubscribe

    def add(self, protocol: Protocol, origin: Optional[str] = None) -> bool:
        """
        Store a flattened protocol. Returns False when an identical one is
        already present.

        Raises:
            ProtocolConflict: same id, different content.
            ValueError: the protocol still has imports.
        """
        if protocol.imports:
            raise ValueError(f"{protocol.id} must be flattened before it is stored")
        with self._lock:
            existing = self._index.get(protocol.id)
            if existing is not None:
                if existing == protocol:
                    return False
                raise ProtocolConflict(protocol.id)
            if self.persistent:
                self._write_protocol(protocol)
            self._index[protocol.id] = protocol
            if origin:
                self._origins[protocol.id] = origin
            if self.persistent:
                self._write_descriptor()
            listeners = list(self._listeners)

        logger.info(f"Stored protocol {protocol.id}", extra={"protocol": str(protocol.id), "origin": origin})
        for listener in listeners:
            listener(protocol.id)
        return True

    def descriptor(self) -> RepositoryDescriptor:
        base = self.root.resolve().as_uri() if self.persistent else "."
        return RepositoryDescriptor(base, tuple(self.ids()))

    def _write_protocol(self, protocol: Protocol) -> None:
        directory = self.root / PROTOCOL_DIR
        directory.mkdir(parents=True, exist_ok=True)
        (directory / protocol.id.filename).write_text(save_protocol(protocol), encoding="utf-8")

    def _write_descriptor(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        comment = None
        if self._origins:
            comment = "origins\n" + "".join(
                f"  {pid} {self._origins[pid]}\n" for pid in sorted(self._origins)
            )
        text = save_descriptor(self.descriptor(), comment=comment)
        (self.root / DESCRIPTOR_NAME).write_text(text, encoding="utf-8")


def _read_origins(text: str) -> Dict[ProtocolId, str]:
    found = _ORIGINS_RE.search(text)
    if not found:
        return {}
    origins = {}
    for line in found.group(1).splitlines():
        parts = line.split(None, 1)
        if len(parts) == 2:
            origins[ProtocolId.parse(parts[0])] = parts[1].strip()
    return origins


def load_store(root: Union[str, Path]) -> ProtocolStore:
    """
    Open the store at ``root``, creating an empty one if nothing is there.

    repository.xml decides what is loaded; ``.acr`` files it does not list
    are ignored with a warning.

    Raises:
        StoreCorrupt: unreadable descriptor or protocol file.
    """
    store = ProtocolStore(root)
    descriptor_path = store.root / DESCRIPTOR_NAME
    if not descriptor_path.exists():
        store._write_descriptor()
        logger.info("Created empty protocol store", extra={"root": str(store.root)})
        return store

    try:
        text = descriptor_path.read_text(encoding="utf-8")
        descriptor = parse_descriptor(text, source=str(descriptor_path))
    except OSError as e:
        raise StoreCorrupt(descriptor_path, e.strerror or str(e)) from e
    except RepositorySchemaError as e:
        raise StoreCorrupt(descriptor_path, "; ".join(e.errors)) from e

    for pid in descriptor.entries:
        path = store.root / PROTOCOL_DIR / pid.filename
        try:
            protocol = load_protocol(path.read_text(encoding="utf-8"), source=str(path))
        except OSError as e:
            raise StoreCorrupt(path, e.strerror or str(e)) from e
        except (ProtocolSchemaError, DuplicateState) as e:
            raise StoreCorrupt(path, str(e)) from e
        if protocol.id != pid:
            raise StoreCorrupt(path, f"declares {protocol.id} but is listed as {pid}")
        if protocol.imports:
            raise StoreCorrupt(path, "stored protocols must not have imports")
        store._index[pid] = protocol

    store._origins = {pid: url for pid, url in _read_origins(text).items() if pid in store._index}

    listed = {pid.filename for pid in descriptor.entries}
    protocol_dir = store.root / PROTOCOL_DIR
    if protocol_dir.is_dir():
        for path in sorted(protocol_dir.glob("*.acr")):
            if path.name not in listed:
                message = f"{path.name} is not listed in {DESCRIPTOR_NAME}; ignored"
                store.warnings.append(message)
                logger.warning(message, extra={"root": str(store.root), "file": path.name})

    logger.info("Loaded protocol store", extra={"root": str(store.root), "protocols": len(store)})
    return store
