# terms/tests/test_matching.py
from django.test import SimpleTestCase

from terms.language import Bindings, Constant, Context, EMPTY_BINDINGS, Variable
from terms.matching import combine, papply, pbind, pmatches, tapply, tbind, tmatches
from terms.parser import parse_predicate, parse_term


def B(**entries):
    return Bindings({k: Constant(v) for k, v in entries.items()})


class TermMatchingTests(SimpleTestCase):
    def test_unbound_variable_matches_agent_name(self):
        self.assertTrue(tmatches(Variable("initiator"), Constant("agent1")))

    def test_different_constants_do_not_match(self):
        self.assertFalse(tmatches(Constant("inform"), Constant("request")))

    def test_identical_constants_match(self):
        self.assertTrue(tmatches(Constant("a"), Constant("a")))

    def test_function_arity_must_agree(self):
        self.assertFalse(tmatches(parse_term("f(?x)"), parse_term("f(a,b)")))

    def test_repeated_immutable_variable_constrains_later_positions(self):
        self.assertTrue(tmatches(parse_term("g(?x,?x)"), parse_term("g(a,a)")))
        self.assertFalse(tmatches(parse_term("g(?x,?x)"), parse_term("g(a,b)")))

    def test_repeated_mutable_variable_is_free(self):
        self.assertTrue(tmatches(parse_term("g(??x,??x)"), parse_term("g(a,b)")))


class PredicateMatchingTests(SimpleTestCase):
    def test_unbound_argument_matches(self):
        self.assertTrue(pmatches(parse_predicate("status(?obj)"), parse_predicate("status(router1)")))

    def test_applied_bindings_then_match(self):
        pattern = papply(parse_predicate("processed(?docid)"), B(docid="doc123"))
        self.assertEqual(str(pattern), "processed(doc123)")
        self.assertTrue(pmatches(pattern, parse_predicate("processed(doc123)")))

    def test_symbol_mismatch(self):
        self.assertFalse(pmatches(parse_predicate("p(a)"), parse_predicate("q(a)")))

    def test_anonymous_argument_matches_anything(self):
        pattern = papply(parse_predicate("statusOf(?obj,?)"), B(obj="router1"))
        self.assertTrue(pmatches(pattern, parse_predicate("statusOf(router1,up)")))
        self.assertFalse(pmatches(pattern, parse_predicate("statusOf(router2,up)")))


class ApplyTests(SimpleTestCase):
    def test_immutable_variable_is_replaced(self):
        self.assertEqual(tapply(Variable("respondent"), B(respondent="agent2")), Constant("agent2"))

    def test_mutable_variable_is_left_alone(self):
        var = Variable("docid", Context.MUTABLE)
        self.assertEqual(tapply(var, B(docid="doc123")), var)

    def test_ground_term_is_fixed(self):
        self.assertEqual(tapply(Constant("x"), B(x="y")), Constant("x"))

    def test_papply_keeps_mutable_occurrence(self):
        pattern = parse_predicate("process(??docid)")
        self.assertEqual(papply(pattern, B(docid="doc123")), pattern)

    def test_papply_on_zero_arity(self):
        self.assertEqual(papply(parse_predicate("ready"), EMPTY_BINDINGS), parse_predicate("ready"))


class BindTests(SimpleTestCase):
    def test_named_variable_binds(self):
        self.assertEqual(tbind(Variable("initiator"), Constant("agent1")), B(initiator="agent1"))

    def test_anonymous_variable_binds_nothing(self):
        self.assertEqual(tbind(Variable(), Constant("up")), EMPTY_BINDINGS)

    def test_constants_bind_nothing(self):
        self.assertEqual(tbind(Constant("a"), Constant("a")), EMPTY_BINDINGS)

    def test_mutable_rebinding(self):
        pattern = papply(parse_predicate("process(??docid)"), B(docid="doc123"))
        self.assertEqual(pbind(pattern, parse_predicate("process(doc234)")), B(docid="doc234"))

    def test_pbind_status(self):
        self.assertEqual(pbind(parse_predicate("status(?obj)"), parse_predicate("status(router1)")), B(obj="router1"))

    def test_mismatch_binds_nothing(self):
        self.assertEqual(pbind(parse_predicate("p(a)"), parse_predicate("p(b)")), EMPTY_BINDINGS)

    def test_nested_binding(self):
        bound = pbind(parse_predicate("bid(item(?i),?price)"), parse_predicate("bid(item(lamp),20)"))
        self.assertEqual(bound, B(i="lamp", price="20"))


class CombineTests(SimpleTestCase):
    def test_newer_overrides(self):
        self.assertEqual(combine(B(docid="doc123"), B(docid="doc234")), B(docid="doc234"))

    def test_identities(self):
        b = B(a="x")
        self.assertEqual(combine(EMPTY_BINDINGS, b), b)
        self.assertEqual(combine(b, EMPTY_BINDINGS), b)

    def test_set_formula(self):
        self.assertEqual(combine(B(a="x", b="y"), B(b="z", c="w")), B(a="x", b="z", c="w"))

    def test_bindings_reject_unground_values(self):
        with self.assertRaises(ValueError):
            Bindings({"x": Variable("y")})

    def test_render_is_sorted(self):
        self.assertEqual(B(respondent="agent2", initiator="agent1").render(), "?initiator=agent1 ?respondent=agent2")
