# terms/tests/strategies.py
"""
Hypothesis strategies over a small term universe: constants a, b, c,
functors f/1 and g/2, depth at most 2, variables ?x, ??x, ?y and ?.
"""
from itertools import product

from hypothesis import strategies as st

from terms.language import (
    Bindings,
    Constant,
    Context,
    Function,
    Predicate,
    Variable,
    variables_of,
)

CONSTANTS = st.sampled_from([Constant("a"), Constant("b"), Constant("c")])
VARIABLES = st.sampled_from([
    Variable("x"),
    Variable("x", Context.MUTABLE),
    Variable("y"),
    Variable(),
])


def _terms(leaf, depth):
    if depth == 0:
        return leaf
    sub = _terms(leaf, depth - 1)
    return st.one_of(
        leaf,
        st.builds(lambda a: Function("f", (a,)), sub),
        st.builds(lambda a, b: Function("g", (a, b)), sub, sub),
    )


ground_terms = _terms(CONSTANTS, 2)
pattern_terms = _terms(st.one_of(CONSTANTS, VARIABLES), 2)

ground_bindings = st.dictionaries(st.sampled_from(["x", "y"]), ground_terms, max_size=2).map(Bindings)

ground_predicates = st.builds(
    Predicate,
    st.sampled_from(["p", "q"]),
    st.lists(ground_terms, max_size=2).map(tuple),
)
pattern_predicates = st.builds(
    Predicate,
    st.sampled_from(["p", "q"]),
    st.lists(pattern_terms, max_size=2).map(tuple),
)


def uses_one_context_per_name(pred: Predicate) -> bool:
    seen = {}
    for arg in pred.args:
        for var in variables_of(arg):
            if var.name is None:
                continue
            if seen.setdefault(var.name, var.context) is not var.context:
                return False
    return True


def subterms(term):
    yield term
    if isinstance(term, Function):
        for arg in term.args:
            yield from subterms(arg)


def _instantiate(term, values):
    if isinstance(term, Variable):
        return next(values)
    if isinstance(term, Function):
        return Function(term.functor, tuple(_instantiate(a, values) for a in term.args))
    return term


def _scoped(term, values, env):
    # Bindings produced by one occurrence-wise assignment, or None when an
    # immutable occurrence disagrees with the value already in scope.
    # Values fixed by earlier siblings at an outer level take precedence.
    if isinstance(term, Variable):
        value = next(values)
        if term.name is None:
            return {}
        if not term.is_mutable and term.name in env:
            return {} if env[term.name] == value else None
        return {term.name: value}
    if isinstance(term, Constant):
        return {}
    produced = {}
    for arg in term.args:
        out = _scoped(arg, values, {**produced, **env})
        if out is None:
            return None
        produced.update(out)
    return produced


def brute_force_matches(pattern, ground) -> bool:
    """Try every assignment of ground subterms to variable occurrences."""
    occurrences = list(variables_of(pattern))
    candidates = list(dict.fromkeys(subterms(ground)))
    for values in product(candidates, repeat=len(occurrences)):
        if _instantiate(pattern, iter(values)) != ground:
            continue
        if _scoped(pattern, iter(values), {}) is not None:
            return True
    return False
