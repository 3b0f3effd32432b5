# terms/tests/test_parser.py
from django.test import SimpleTestCase

from terms.language import Constant, Context, Function, Predicate, Variable
from terms.parser import (
    TermSyntaxError,
    parse_content_pattern,
    parse_ground_predicate,
    parse_predicate,
    parse_term,
)


class ParsePredicateTests(SimpleTestCase):
    def test_mutable_variable_argument(self):
        pred = parse_predicate("process(??docid)")
        self.assertEqual(pred, Predicate("process", (Variable("docid", Context.MUTABLE),)))

    def test_zero_arity_predicate(self):
        self.assertEqual(parse_predicate("ready"), Predicate("ready"))

    def test_constant_arguments(self):
        pred = parse_predicate("statusOf(router1,up)")
        self.assertEqual(pred, Predicate("statusOf", (Constant("router1"), Constant("up"))))

    def test_whitespace_is_ignored_outside_quotes(self):
        self.assertEqual(parse_predicate(" statusOf( router1 , up ) "), parse_predicate("statusOf(router1,up)"))

    def test_quoted_constant_keeps_spaces_and_doubled_quotes(self):
        pred = parse_predicate('supplier("Nile Ltd.", "say ""hi""")')
        self.assertEqual(pred.args, (Constant("Nile Ltd."), Constant('say "hi"')))

    def test_empty_argument_list_is_a_constant(self):
        self.assertEqual(parse_term("f()"), Constant("f"))

    def test_anonymous_variable(self):
        term = parse_term("?")
        self.assertTrue(term.is_anonymous)

    def test_nested_function(self):
        term = parse_term("g(f(a),?x)")
        self.assertEqual(term, Function("g", (Function("f", (Constant("a"),)), Variable("x"))))

    def test_serialize_then_parse_is_a_fixed_point(self):
        for text in ["process(??docid)", "ready", 'item("Nile Ltd.",100)', "g(f(?),?x,??y)"]:
            pred = parse_predicate(text)
            again = parse_predicate(str(pred))
            self.assertEqual(pred, again)
            self.assertEqual(str(again), str(pred))

    def test_numbers_are_textual_constants(self):
        self.assertNotEqual(parse_term("100"), parse_term("100.0"))


class ParseErrorTests(SimpleTestCase):
    def test_unbalanced_parentheses(self):
        with self.assertRaises(TermSyntaxError) as ctx:
            parse_predicate("process(doc1")
        self.assertEqual(ctx.exception.error_code, "TERM_SYNTAX")

    def test_extra_closing_parenthesis(self):
        with self.assertRaises(TermSyntaxError):
            parse_predicate("process(doc1))")

    def test_empty_functor(self):
        with self.assertRaises(TermSyntaxError) as ctx:
            parse_predicate("(a,b)")
        self.assertEqual(ctx.exception.position, 0)

    def test_bare_double_question_mark_inside_arguments(self):
        with self.assertRaises(TermSyntaxError):
            parse_predicate("process(??)")

    def test_illegal_character(self):
        with self.assertRaises(TermSyntaxError) as ctx:
            parse_predicate("price(£5)")
        self.assertEqual(ctx.exception.position, 6)

    def test_bare_variable_is_not_a_predicate(self):
        with self.assertRaises(TermSyntaxError):
            parse_predicate("?x")

    def test_ground_content_rejects_variables(self):
        with self.assertRaises(TermSyntaxError):
            parse_ground_predicate("process(?docid)")

    def test_ground_content_rejects_the_no_content_marker(self):
        with self.assertRaises(TermSyntaxError):
            parse_ground_predicate('"⊥content"')
        self.assertEqual(parse_ground_predicate('"⊥other"'), Predicate("⊥other"))

    def test_content_pattern_may_be_a_variable(self):
        self.assertEqual(parse_content_pattern("?"), Variable())
        self.assertEqual(parse_content_pattern("?anything"), Variable("anything"))
