# repository/tests/test_store.py
import shutil
import tempfile
from dataclasses import replace
from pathlib import Path

from django.conf import settings
from django.test import SimpleTestCase

from protocols.identifiers import ProtocolId
from protocols.imports import resolve_imports
from protocols.loader import read_protocol
from repository.descriptor import parse_descriptor
from repository.store import ProtocolConflict, ProtocolStore, StoreCorrupt, load_store

REPOSITORY = Path(settings.BASE_DIR) / "harness" / "fixtures" / "repository" / "repository"
PROCESS_DOCUMENTS = ProtocolId("is.lill.examples", "process-documents", "1.0")


class ProtocolStoreTests(SimpleTestCase):
    def setUp(self):
        self.root = Path(tempfile.mkdtemp()) / "store"
        self.addCleanup(shutil.rmtree, self.root.parent, ignore_errors=True)
        self.proc_docs = read_protocol(REPOSITORY / PROCESS_DOCUMENTS.filename)

    def test_fresh_store_is_empty(self):
        store = load_store(self.root)
        self.assertEqual(len(store), 0)
        self.assertTrue((self.root / "repository.xml").exists())
        self.assertEqual(parse_descriptor((self.root / "repository.xml").read_text(encoding="utf-8")).entries, ())

    def test_add_writes_layout(self):
        store = load_store(self.root)
        self.assertTrue(store.add(self.proc_docs, origin="http://acre.lill.is/repository/x.acr"))
        self.assertTrue((self.root / "repository" / PROCESS_DOCUMENTS.filename).exists())
        descriptor_text = (self.root / "repository.xml").read_text(encoding="utf-8")
        descriptor = parse_descriptor(descriptor_text)
        self.assertEqual(descriptor.entries, (PROCESS_DOCUMENTS,))
        self.assertTrue(descriptor.base.startswith("file://"))
        self.assertIn("http://acre.lill.is/repository/x.acr", descriptor_text)

    def test_origins_survive_reload(self):
        store = load_store(self.root)
        store.add(self.proc_docs, origin="http://acre.lill.is/repository/x.acr")
        self.assertEqual(load_store(self.root).origin(PROCESS_DOCUMENTS), "http://acre.lill.is/repository/x.acr")

    def test_identical_add_is_skipped(self):
        store = ProtocolStore.in_memory([self.proc_docs])
        self.assertFalse(store.add(read_protocol(REPOSITORY / PROCESS_DOCUMENTS.filename)))

    def test_different_content_conflicts(self):
        store = ProtocolStore.in_memory([self.proc_docs])
        changed = replace(self.proc_docs, transitions=self.proc_docs.transitions[1:])
        with self.assertRaises(ProtocolConflict) as ctx:
            store.add(changed)
        self.assertEqual(ctx.exception.error_code, "PROTOCOL_CONFLICT")
        self.assertIs(store[PROCESS_DOCUMENTS], self.proc_docs)

    def test_imports_must_be_resolved_first(self):
        iterated = read_protocol(REPOSITORY / "is.lill.fipa_fipa-iterated-contract-net_1.0.acr")
        store = ProtocolStore.in_memory()
        with self.assertRaises(ValueError):
            store.add(iterated)
        contract_net = read_protocol(REPOSITORY / "is.lill.fipa_fipa-contract-net_1.0.acr")
        self.assertTrue(store.add(resolve_imports(iterated, {contract_net.id: contract_net})))

    def test_orphan_file_is_ignored_with_warning(self):
        load_store(self.root).add(self.proc_docs)
        shutil.copy(REPOSITORY / "is.lill.examples_status-report_1.0.acr", self.root / "repository")
        store = load_store(self.root)
        self.assertEqual(store.ids(), [PROCESS_DOCUMENTS])
        self.assertEqual(len(store.warnings), 1)
        self.assertIn("is.lill.examples_status-report_1.0.acr", store.warnings[0])

    def test_corrupt_protocol_names_the_file(self):
        load_store(self.root).add(self.proc_docs)
        path = self.root / "repository" / PROCESS_DOCUMENTS.filename
        path.write_text("<protocol>", encoding="utf-8")
        with self.assertRaises(StoreCorrupt) as ctx:
            load_store(self.root)
        self.assertEqual(ctx.exception.path, str(path))

    def test_listed_file_missing(self):
        load_store(self.root).add(self.proc_docs)
        (self.root / "repository" / PROCESS_DOCUMENTS.filename).unlink()
        with self.assertRaises(StoreCorrupt):
            load_store(self.root)

    def test_subscribe_and_unsubscribe(self):
        store = ProtocolStore.in_memory()
        seen = []
        unsubscribe = store.subscribe(seen.append)
        store.add(self.proc_docs)
        unsubscribe()
        store.add(read_protocol(REPOSITORY / "is.lill.examples_status-report_1.0.acr"))
        self.assertEqual(seen, [PROCESS_DOCUMENTS])

    def test_snapshot_is_detached(self):
        store = ProtocolStore.in_memory()
        view = store.snapshot()
        store.add(self.proc_docs)
        self.assertEqual(view, {})
        self.assertIn(PROCESS_DOCUMENTS, store)
