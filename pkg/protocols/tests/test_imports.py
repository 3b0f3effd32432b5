# protocols/tests/test_imports.py
from pathlib import Path

from django.conf import settings
from django.test import SimpleTestCase

from acl.performatives import Performative
from protocols.identifiers import ProtocolId
from protocols.imports import ImportCycle, StateCollision, UnresolvedImport, resolve_imports
from protocols.loader import load_protocol, read_protocol

REPOSITORY = Path(settings.BASE_DIR) / "harness" / "fixtures" / "repository" / "repository"
LOCAL = Path(__file__).resolve().parent / "fixtures"

CONTRACT_NET = ProtocolId("is.lill.fipa", "fipa-contract-net", "1.0")


def load(filename):
    return read_protocol(REPOSITORY / filename)


class ResolveImportsTests(SimpleTestCase):
    def setUp(self):
        self.contract_net = load("is.lill.fipa_fipa-contract-net_1.0.acr")
        self.iterated = load("is.lill.fipa_fipa-iterated-contract-net_1.0.acr")
        self.lookup = {CONTRACT_NET: self.contract_net}

    def test_iterated_contract_net_adds_one_edge(self):
        resolved = resolve_imports(self.iterated, self.lookup)
        self.assertEqual(resolved.id, self.iterated.id)
        self.assertEqual(resolved.imports, ())
        self.assertEqual(set(resolved.state_names), set(self.contract_net.state_names))
        self.assertEqual(len(resolved.transitions), len(self.contract_net.transitions) + 1)
        own = [t for t in resolved.transitions if t.imported_from is None]
        self.assertEqual(len(own), 1)
        self.assertEqual((own[0].from_state, own[0].to_state, own[0].performative),
                         ("proposed", "invited", Performative.CFP))
        self.assertTrue(all(t.protocol == self.iterated.id for t in resolved.transitions))
        self.assertEqual(resolved.initial_state().name, "start")

    def test_imported_transitions_come_first(self):
        resolved = resolve_imports(self.iterated, self.lookup)
        self.assertIsNone(resolved.transitions[-1].imported_from)
        self.assertEqual(resolved.transitions[0].imported_from, CONTRACT_NET)

    def test_import_free_protocol_is_unchanged(self):
        self.assertIs(resolve_imports(self.contract_net, {}), self.contract_net)

    def test_idempotent(self):
        once = resolve_imports(self.iterated, self.lookup)
        self.assertEqual(resolve_imports(once, {}), once)

    def test_callable_lookup(self):
        resolved = resolve_imports(self.iterated, self.lookup.get)
        self.assertEqual(len(resolved.transitions), 8)

    def test_unresolved(self):
        with self.assertRaises(UnresolvedImport) as ctx:
            resolve_imports(self.iterated, {})
        self.assertEqual(ctx.exception.missing, CONTRACT_NET)

    def test_self_import_is_a_cycle(self):
        loop = read_protocol(LOCAL / "self-import.acr")
        with self.assertRaises(ImportCycle):
            resolve_imports(loop, {loop.id: loop})

    def test_state_collision(self):
        clash = load_protocol("""<?xml version="1.0"?>
<protocol xmlns="http://acre.lill.is">
  <namespace>is.lill.tests</namespace><name>clash</name><version>1.0</version>
  <import><namespace>is.lill.fipa</namespace><name>fipa-contract-net</name><version>1.0</version></import>
  <states><state name="invited"/></states>
</protocol>""")
        with self.assertRaises(StateCollision) as ctx:
            resolve_imports(clash, self.lookup)
        self.assertEqual(ctx.exception.name, "invited")
