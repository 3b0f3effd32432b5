# acl/tests/test_codec.py
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from acl.codec import (
    MessageSyntaxError,
    UnknownParameter,
    parse_message,
    parse_messages,
    serialize_message,
)
from acl.messages import Message
from acl.performatives import Performative, UnknownPerformative, parse_performative
from protocols.identifiers import ProtocolId
from terms.parser import parse_predicate
from terms.tests.strategies import ground_predicates

PROC_DOCS = ProtocolId("is.lill.examples", "process-documents", "1.0")

M1 = (
    "(inform :sender agent1 :receiver agent2 :content ready "
    ":conversation-id c1 :protocol is.lill.examples.process-documents.1.0)"
)


class PerformativeTests(SimpleTestCase):
    def test_twenty_two_acts(self):
        self.assertEqual(len(Performative), 22)

    def test_pseudo_performatives_are_rejected(self):
        for token in ["inform-done", "inform-result", "inform-t"]:
            with self.assertRaises(UnknownPerformative):
                parse_performative(token)

    def test_case_is_folded(self):
        self.assertIs(parse_performative("Accept-Proposal"), Performative.ACCEPT_PROPOSAL)


class ParseMessageTests(SimpleTestCase):
    def test_fully_specified_message(self):
        m = parse_message(M1)
        self.assertEqual(m.performative, Performative.INFORM)
        self.assertEqual((m.sender, m.receiver), ("agent1", "agent2"))
        self.assertEqual(m.content, parse_predicate("ready"))
        self.assertEqual(m.conversation_id, "c1")
        self.assertEqual(m.protocol_id, PROC_DOCS)

    def test_optional_fields_absent(self):
        m = parse_message("(request :sender agent2 :receiver agent1 :content process(doc123))")
        self.assertIsNone(m.conversation_id)
        self.assertIsNone(m.protocol_id)
        self.assertEqual(str(m.content), "process(doc123)")

    def test_cancel_without_content(self):
        m = parse_message("(cancel :sender a :receiver b :conversation-id c9 :reply-with cancel)")
        self.assertIsNone(m.content)
        self.assertEqual(m.reply_with, "cancel")
        self.assertTrue(m.is_cancel_traffic)

    def test_receiver_list_expands(self):
        messages = parse_messages("(cfp :sender auctioneer :receiver (set b1 b2 b3) :content item(lamp) :x-round 1)")
        self.assertEqual([m.receiver for m in messages], ["b1", "b2", "b3"])
        first = messages[0]
        for other in messages[1:]:
            self.assertEqual(other.with_receiver(first.receiver), first)

    def test_receiver_list_rejected_by_single_parse(self):
        with self.assertRaises(MessageSyntaxError):
            parse_message("(cfp :sender a :receiver (set b c))")

    def test_unknown_performative(self):
        with self.assertRaises(UnknownPerformative):
            parse_message("(shout :sender a :receiver b)")

    def test_unknown_parameter(self):
        with self.assertRaises(UnknownParameter) as ctx:
            parse_message("(inform :sender a :receiver b :colour red)")
        self.assertEqual(ctx.exception.error_code, "UNKNOWN_PARAMETER")

    def test_custom_and_fipa_parameters_are_preserved(self):
        m = parse_message('(inform :sender a :receiver b :x-trace 7 :ontology "trading goods" :language acre)')
        self.assertEqual(m.extras, (("language", "acre"), ("ontology", "trading goods"), ("x-trace", "7")))

    def test_malformed_content(self):
        with self.assertRaises(MessageSyntaxError):
            parse_message("(inform :sender a :receiver b :content process(doc1)))")

    def test_content_with_variables_is_rejected(self):
        with self.assertRaises(MessageSyntaxError):
            parse_message("(inform :sender a :receiver b :content process(?doc))")

    def test_missing_sender(self):
        with self.assertRaises(MessageSyntaxError):
            parse_message("(inform :receiver b)")

    def test_empty_quoted_parties(self):
        for text in ['(inform :sender "" :receiver b)', '(inform :sender a :receiver "")', '(inform :sender a :receiver (set b ""))']:
            with self.subTest(text=text), self.assertRaises(MessageSyntaxError):
                parse_messages(text)

    def test_no_content_marker_cannot_be_sent(self):
        with self.assertRaises(MessageSyntaxError):
            parse_message('(inform :sender a :receiver b :content "⊥content")')


class SerializeMessageTests(SimpleTestCase):
    def test_fixed_key_order(self):
        self.assertEqual(serialize_message(parse_message(M1)), M1)

    def test_all_keys(self):
        m = Message(
            Performative.FAILURE,
            "agent2",
            "agent1",
            conversation_id="agent1-1",
            protocol_id=PROC_DOCS,
            reply_by=110,
            reply_with="r1",
            in_reply_to="cancel",
        )
        self.assertEqual(
            serialize_message(m),
            "(failure :sender agent2 :receiver agent1 :conversation-id agent1-1 "
            ":protocol is.lill.examples.process-documents.1.0 :reply-by 110 "
            ":reply-with r1 :in-reply-to cancel)",
        )

    def test_absent_content_is_not_emitted(self):
        m = parse_message("(cancel :sender a :receiver b)")
        self.assertNotIn(":content", serialize_message(m))

    def test_serialize_of_parse_is_canonical(self):
        text = "( inform  :protocol is.lill.examples.process-documents.1.0 :receiver agent2 :sender agent1 :content ready :conversation-id c1 )"
        once = serialize_message(parse_message(text))
        self.assertEqual(once, M1)
        self.assertEqual(serialize_message(parse_message(once)), once)


agent_names = st.sampled_from(["agent1", "agent2", "auctioneer", "Nile Ltd."])
optional_text = st.one_of(st.none(), st.sampled_from(["c1", "agent1-7", "cancel", "with space"]))

messages = st.builds(
    Message,
    performative=st.sampled_from(list(Performative)),
    sender=agent_names,
    receiver=agent_names,
    content=st.one_of(st.none(), ground_predicates),
    conversation_id=optional_text,
    protocol_id=st.one_of(st.none(), st.just(PROC_DOCS)),
    reply_by=st.one_of(st.none(), st.integers(0, 2 ** 32).map(float), st.just(1000.5)),
    reply_with=optional_text,
    in_reply_to=optional_text,
    extras=st.lists(st.tuples(st.sampled_from(["x-a", "x-b", "ontology"]), st.sampled_from(["v", "two words"])),
                    unique_by=lambda kv: kv[0]).map(tuple),
)


class RoundTripProperties(SimpleTestCase):
    @settings(max_examples=300, deadline=None)
    @given(messages)
    def test_parse_inverts_serialize(self, m):
        self.assertEqual(parse_message(serialize_message(m)), m)
