# acl/tests/test_traces.py
from django.test import SimpleTestCase

from acl.traces import RECV, SEND, TraceSyntaxError, dump_trace, parse_trace

TRACE = """\
# agent1's view of the exchange
(inform :sender agent1 :receiver agent2 :content ready :conversation-id c1)

recv\t(request :sender agent2 :receiver agent1 :content process(doc123))
send\t(inform :sender agent1 :receiver agent2 :content processed(doc123) :conversation-id c1)
"""


class ParseTraceTests(SimpleTestCase):
    def test_comments_and_blank_lines_are_skipped(self):
        entries = parse_trace(TRACE)
        self.assertEqual(len(entries), 3)
        self.assertEqual([e.line_no for e in entries], [2, 4, 5])

    def test_direction_prefix_and_inference(self):
        entries = parse_trace(TRACE)
        self.assertIsNone(entries[0].direction)
        self.assertEqual(entries[0].direction_for("agent1"), SEND)
        self.assertEqual(entries[1].direction_for("agent1"), RECV)
        self.assertEqual(entries[2].direction, SEND)

    def test_empty_trace(self):
        self.assertEqual(parse_trace(""), [])

    def test_bad_line_reports_its_number(self):
        with self.assertRaises(TraceSyntaxError) as ctx:
            parse_trace("# header\n(inform :sender a)\n")
        self.assertEqual(ctx.exception.line_no, 2)
        self.assertEqual(ctx.exception.error_code, "TRACE_SYNTAX")

    def test_empty_receiver_is_a_syntax_error(self):
        with self.assertRaises(TraceSyntaxError) as ctx:
            parse_trace('recv\t(inform :sender agent2 :receiver "")\n')
        self.assertEqual(ctx.exception.line_no, 1)

    def test_receiver_lists_expand_in_place(self):
        entries = parse_trace("(cfp :sender s :receiver (set a b) :content item(x))\n")
        self.assertEqual([e.message.receiver for e in entries], ["a", "b"])

    def test_dump_keeps_explicit_directions(self):
        entries = parse_trace(TRACE)
        dumped = dump_trace(entries)
        self.assertTrue(dumped.splitlines()[1].startswith("recv\t(request"))
        self.assertEqual(parse_trace(dumped), [e.__class__(e.message, i + 1, e.direction) for i, e in enumerate(entries)])
