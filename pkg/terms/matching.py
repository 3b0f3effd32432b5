"""
Matching, binding and application over terms and predicates.

One side of every comparison is grounded, so matching is one-way:
variables in the pattern match anything, constants match themselves
and functions match argument-wise. Within an argument list, bindings
picked up at one position are applied before the next position is
compared.
"""
from typing import Sequence

from .language import (
    Bindings,
    Constant,
    EMPTY_BINDINGS,
    Function,
    Predicate,
    Term,
    Variable,
)


def combine(older: Bindings, newer: Bindings) -> Bindings:
    """Union of both sets; entries of ``newer`` win on shared names."""
    if not newer:
        return older
    if not older:
        return newer
    merged = {name: value for name, value in older.items() if name not in newer}
    merged.update(newer.items())
    return Bindings(merged)


def tapply(term: Term, bindings: Bindings) -> Term:
    """Replace bound variables in immutable context by their values."""
    if isinstance(term, Variable):
        if term.name is not None and not term.is_mutable and term.name in bindings:
            return bindings[term.name]
        return term
    if isinstance(term, Function):
        return Function(term.functor, tuple(tapply(a, bindings) for a in term.args))
    return term


def papply(pred: Predicate, bindings: Bindings) -> Predicate:
    if not pred.args:
        return pred
    return Predicate(pred.symbol, tuple(tapply(a, bindings) for a in pred.args))


def _lmatches(patterns: Sequence[Term], grounds: Sequence[Term]) -> bool:
    if len(patterns) != len(grounds):
        return False
    acc = EMPTY_BINDINGS
    for pattern, ground in zip(patterns, grounds):
        pattern = tapply(pattern, acc)
        if not tmatches(pattern, ground):
            return False
        acc = combine(acc, tbind(pattern, ground))
    return True


def _lbind(patterns: Sequence[Term], grounds: Sequence[Term]) -> Bindings:
    acc = EMPTY_BINDINGS
    for pattern, ground in zip(patterns, grounds):
        acc = combine(acc, tbind(tapply(pattern, acc), ground))
    return acc


def tmatches(pattern: Term, ground: Term) -> bool:
    if isinstance(pattern, Variable):
        return True
    if isinstance(pattern, Constant):
        return pattern == ground
    if isinstance(ground, Function) and pattern.functor == ground.functor:
        return _lmatches(pattern.args, ground.args)
    return False


def pmatches(pattern: Predicate, ground: Predicate) -> bool:
    if pattern.symbol != ground.symbol or pattern.arity != ground.arity:
        return False
    return _lmatches(pattern.args, ground.args)


def tbind(pattern: Term, ground: Term) -> Bindings:
    if isinstance(pattern, Variable):
        if pattern.name is None:
            return EMPTY_BINDINGS
        return Bindings({pattern.name: ground})
    if isinstance(pattern, Function) and tmatches(pattern, ground):
        return _lbind(pattern.args, ground.args)
    return EMPTY_BINDINGS


def pbind(pattern: Predicate, ground: Predicate) -> Bindings:
    if not pmatches(pattern, ground):
        return EMPTY_BINDINGS
    return _lbind(pattern.args, ground.args)
