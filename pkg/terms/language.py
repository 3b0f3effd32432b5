"""
Content language: terms, predicates and variable bindings.

A term is a Constant, a Variable (named or anonymous, in mutable or
immutable context) or a Function with at least one argument. Messages
carry grounded predicates; protocol transitions carry patterns.
"""
import re
from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Tuple, Union


TOKEN_RE = re.compile(r"[A-Za-z0-9_.\-]+")


class Context(str, Enum):
    MUTABLE = "mutable"
    IMMUTABLE = "immutable"


@dataclass(frozen=True)
class Constant:
    symbol: str

    def __str__(self) -> str:
        return quote_symbol(self.symbol)


@dataclass(frozen=True)
class Variable:
    name: Optional[str] = None
    context: Context = Context.IMMUTABLE

    def __post_init__(self):
        if self.name is None and self.context is Context.MUTABLE:
            raise ValueError("the anonymous variable has no mutable form")
        if self.name is not None and not TOKEN_RE.fullmatch(self.name):
            raise ValueError(f"invalid variable name: {self.name!r}")

    @property
    def is_anonymous(self) -> bool:
        return self.name is None

    @property
    def is_mutable(self) -> bool:
        return self.context is Context.MUTABLE

    def __str__(self) -> str:
        if self.name is None:
            return "?"
        prefix = "??" if self.context is Context.MUTABLE else "?"
        return prefix + self.name


@dataclass(frozen=True)
class Function:
    functor: str
    args: Tuple["Term", ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError("a function needs arguments; use make_function for f() = f")

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self) -> str:
        return f"{quote_symbol(self.functor)}({','.join(str(a) for a in self.args)})"


Term = Union[Constant, Variable, Function]

ANONYMOUS = Variable()


def make_function(functor: str, args) -> Term:
    """f() is the constant f."""
    args = tuple(args)
    if not args:
        return Constant(functor)
    return Function(functor, args)


@dataclass(frozen=True)
class Predicate:
    symbol: str
    args: Tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def as_term(self) -> Term:
        return make_function(self.symbol, self.args)

    @classmethod
    def from_term(cls, term: Term) -> "Predicate":
        if isinstance(term, Constant):
            return cls(term.symbol)
        if isinstance(term, Function):
            return cls(term.functor, term.args)
        raise ValueError(f"a variable is not a predicate: {term}")

    def __str__(self) -> str:
        if not self.args:
            return quote_symbol(self.symbol)
        return f"{quote_symbol(self.symbol)}({','.join(str(a) for a in self.args)})"


# Marker for messages that carry no content. The symbol is outside the
# token grammar; parse_ground_predicate rejects its quoted form.
ABSENT_CONTENT = Predicate("⊥content")

ContentPattern = Union[Predicate, Variable]


def quote_symbol(symbol: str) -> str:
    if TOKEN_RE.fullmatch(symbol):
        return symbol
    return '"' + symbol.replace('"', '""') + '"'


def is_ground(term: Term) -> bool:
    if isinstance(term, Variable):
        return False
    if isinstance(term, Function):
        return all(is_ground(a) for a in term.args)
    return True


def is_ground_predicate(pred: Predicate) -> bool:
    return all(is_ground(a) for a in pred.args)


def variables_of(term: Term) -> Iterator[Variable]:
    """Variable occurrences, left to right."""
    if isinstance(term, Variable):
        yield term
    elif isinstance(term, Function):
        for arg in term.args:
            yield from variables_of(arg)


class Bindings(Mapping):
    """
    Immutable map from variable name to grounded term.

    A variable name appears at most once; values are always grounded and
    the anonymous variable never acquires an entry.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries=None):
        data = dict(entries or {})
        for name, value in data.items():
            if not name:
                raise ValueError("the anonymous variable cannot be bound")
            if not is_ground(value):
                raise ValueError(f"binding for ?{name} is not grounded: {value}")
        object.__setattr__(self, "_entries", data)

    def __setattr__(self, key, value):
        raise AttributeError("Bindings are immutable")

    def __getitem__(self, name: str) -> Term:
        return self._entries[name]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __hash__(self):
        return hash(frozenset(self._entries.items()))

    def __eq__(self, other):
        if isinstance(other, Bindings):
            return self._entries == other._entries
        if isinstance(other, Mapping):
            return self._entries == dict(other)
        return NotImplemented

    def __repr__(self) -> str:
        return f"Bindings({self.render()})"

    def render(self) -> str:
        """Canonical text: ?name=value pairs sorted by name."""
        return " ".join(f"?{name}={self._entries[name]}" for name in sorted(self._entries))


EMPTY_BINDINGS = Bindings()
