# groups/tests/test_reasoner.py
import itertools
from pathlib import Path

from django.conf import settings
from django.test import SimpleTestCase

from acl.codec import parse_message
from conversations.entities import ConversationStatus
from groups.monitors import MonitorArity, UnknownMonitor
from groups.reasoner import DuplicateGroup, EmptyGroup, GroupProtocolMismatch, GroupReasoner, UnknownGroup
from manager.engine import ConversationManager, UnknownProtocol
from protocols.identifiers import ProtocolId
from protocols.loader import read_protocol
from repository.store import ProtocolStore

REPOSITORY = Path(settings.BASE_DIR) / "harness" / "fixtures" / "repository" / "repository"
VICKREY = ProtocolId("is.lill.acre", "vickrey-auction", "1.0")
PROC_DOCS = ProtocolId("is.lill.examples", "process-documents", "1.0")
BIDDERS = ["bidder1", "bidder2", "bidder3"]


def reasoner():
    store = ProtocolStore.in_memory(read_protocol(REPOSITORY / pid.filename) for pid in (VICKREY, PROC_DOCS))
    manager = ConversationManager("auctioneer", store, clock=lambda: 1000.0, ids=itertools.count(1))
    return GroupReasoner(manager)


def kinds(events):
    return [e.kind.value for e in events]


class AgentGroupTests(SimpleTestCase):
    def setUp(self):
        self.groups = reasoner()

    def test_new_with_members(self):
        self.groups.new_agent_group("bidders", BIDDERS)
        self.groups.new_agent_group("later")
        self.groups.add_agents("later", BIDDERS)
        self.assertEqual(self.groups.agent_group("bidders").members, self.groups.agent_group("later").members)

    def test_remove_then_readd(self):
        self.groups.new_agent_group("bidders", BIDDERS)
        self.groups.remove_agents("bidders", ["bidder2"])
        self.assertNotIn("bidder2", self.groups.agent_group("bidders").members)
        self.groups.add_agents("bidders", ["bidder2"])
        self.assertIn("bidder2", self.groups.agent_group("bidders").members)

    def test_disband(self):
        self.groups.new_agent_group("bidders", BIDDERS)
        self.groups.disband("bidders")
        with self.assertRaises(UnknownGroup):
            self.groups.add_agents("bidders", ["bidder4"])

    def test_duplicate(self):
        self.groups.new_agent_group("bidders")
        with self.assertRaises(DuplicateGroup):
            self.groups.new_agent_group("bidders")


class ConversationGroupTests(SimpleTestCase):
    def setUp(self):
        self.groups = reasoner()
        self.manager = self.groups.manager
        self.groups.new_agent_group("bidders", BIDDERS)

    def auction(self):
        gid = self.groups.start_group(VICKREY, "bidders", "cfp", "item(lamp)")
        self.manager.run_cycle()
        return gid

    def reply(self, cid, text):
        bidder = self.manager.conversation(cid).other_party("auctioneer")
        self.manager.submit(parse_message(f"({text} :sender {bidder} :receiver auctioneer :conversation-id {cid})"))

    def test_start_group_sends_identical_cfps(self):
        gid = self.groups.start_group(VICKREY, "bidders", "cfp", "item(lamp)")
        sent = self.manager.drain_outbox()
        self.assertEqual(sorted(m.receiver for m in sent), BIDDERS)
        self.assertEqual({(m.performative.value, str(m.content)) for m in sent}, {("cfp", "item(lamp)")})
        self.assertEqual(len({m.conversation_id for m in sent}), 3)

        events = self.manager.run_cycle()
        self.assertEqual(kinds(events).count("started"), 3)
        self.assertEqual([c.current_state for c in self.groups.members(gid)], ["invited"] * 3)

    def test_start_group_without_message(self):
        gid = self.groups.start_group(VICKREY, "bidders")
        self.assertEqual([c.status for c in self.groups.members(gid)], [ConversationStatus.READY] * 3)

    def test_start_group_errors(self):
        self.groups.new_agent_group("nobody")
        with self.assertRaises(EmptyGroup):
            self.groups.start_group(VICKREY, "nobody")
        self.groups.new_agent_group("me", ["auctioneer"])
        with self.assertRaises(EmptyGroup):
            self.groups.start_group(VICKREY, "me")
        with self.assertRaises(UnknownGroup):
            self.groups.start_group(VICKREY, "strangers")
        with self.assertRaises(UnknownProtocol):
            self.groups.start_group("is.lill.acre/english-auction/1.0", "bidders")

    def test_advance_all_partial(self):
        gid = self.auction()
        first, second, third = self.groups.group(gid).members
        self.reply(first, "propose :content bid(lamp,10)")
        self.reply(second, "propose :content bid(lamp,12)")
        self.manager.run_cycle()

        sent = self.groups.advance_all(gid, "reject-proposal")
        self.assertEqual(len(sent), 3)
        events = self.manager.run_cycle()
        self.assertEqual(kinds(events).count("advanced"), 2)
        self.assertEqual(kinds(events).count("unmatched"), 1)
        # the fail phase marks the conversation the message could not advance
        self.assertEqual(self.manager.conversation(third).status, ConversationStatus.FAILED)

    def test_remove_failed_member_lets_all_finished_fire(self):
        gid = self.auction()
        first, second, third = self.groups.group(gid).members
        self.groups.watch(gid, ["AllFinished()"])
        self.reply(first, "propose :content bid(lamp,10)")
        self.reply(second, "refuse :content item(lamp)")
        self.reply(third, "agree")
        self.manager.run_cycle()
        self.assertEqual(self.manager.conversation(third).status, ConversationStatus.FAILED)

        self.groups.advance_all(gid, "accept-proposal")
        self.assertNotIn("groupEvent", kinds(self.manager.run_cycle()))
        self.groups.remove(gid, third)
        events = self.manager.run_cycle()
        self.assertEqual([(e.subject, e.get("monitor")) for e in events], [(gid, "AllFinished()")])

    def test_add_other_protocol(self):
        gid = self.auction()
        cid = self.manager.start_conversation(PROC_DOCS, "bidder1")
        with self.assertRaises(GroupProtocolMismatch):
            self.groups.add(gid, cid)

    def test_watch_and_unwatch(self):
        gid = self.auction()
        self.groups.watch(gid, ["AllInState(invited)", "AllReachedState(invited)", "NoneInState(proposed)"])
        first = self.manager.run_cycle()
        self.assertEqual([e.get("monitor") for e in first],
                         ["AllInState(invited)", "AllReachedState(invited)", "NoneInState(proposed)"])
        second = self.manager.run_cycle()
        self.assertEqual([e.get("monitor") for e in second], ["AllInState(invited)", "NoneInState(proposed)"])

        self.groups.unwatch(gid, ["AllInState(invited)"])
        self.assertEqual([e.get("monitor") for e in self.manager.run_cycle()], ["NoneInState(proposed)"])
        self.groups.unwatch(gid)
        self.assertEqual(self.manager.run_cycle(), [])

    def test_watch_errors_leave_group_unchanged(self):
        gid = self.auction()
        with self.assertRaises(MonitorArity):
            self.groups.watch(gid, ["AllFinished()", "AllInState()"])
        with self.assertRaises(UnknownMonitor):
            self.groups.watch(gid, ["Whatever(x)"])
        self.assertEqual(self.groups.group(gid).monitors, [])

    def test_group_timeout(self):
        gid = self.groups.start_group(VICKREY, "bidders")
        self.groups.set_timeout(gid, 30)
        self.assertEqual({c.timeout_seconds for c in self.groups.members(gid)}, {30})
        sent = self.groups.advance_all(gid, "cfp", "item(lamp)")
        self.assertEqual({m.reply_by for m in sent}, {1030.0})

    def test_group_annotations(self):
        gid = self.auction()
        self.groups.annotate(gid, "lot(1)")
        self.groups.annotate(gid, "reserve(5)")
        self.groups.deannotate(gid, "lot(1)")
        self.assertEqual({str(a) for a in self.groups.group(gid).annotations}, {"reserve(5)"})
        self.groups.deannotate(gid)
        self.assertEqual(self.groups.group(gid).annotations, set())

    def test_record_lines(self):
        gid = self.auction()
        lines = self.groups.record_lines()
        self.assertIn(f"conversationGroup\t{gid}\t{VICKREY}", lines)
        self.assertIn(f"groupSize\t{gid}\t3", lines)
        self.assertEqual(sum(line.startswith("groupMember") for line in lines), 3)
        self.assertIn("agentGroup\tbidders\tbidder1", lines)
