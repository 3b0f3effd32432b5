"""
Parser for the textual term syntax.

    constant   token | double-quoted text, with "" for a literal quote
    variable   ?token (immutable) | ??token (mutable) | ? (anonymous)
    function   functor(term, term, ...)

Tokens are letters, digits, underscore, dot and hyphen. Whitespace is
insignificant outside quotes.
"""
import logging
import re
from typing import Tuple

from core.errors import AcreError

from .language import (
    ABSENT_CONTENT,
    ContentPattern,
    Context,
    Constant,
    Predicate,
    Term,
    Variable,
    is_ground_predicate,
    make_function,
    TOKEN_RE,
)

logger = logging.getLogger(__name__)

_WS_RE = re.compile(r"\s*")


class TermSyntaxError(AcreError):
    """Raised for unparseable term text; carries the offending position."""
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}", "TERM_SYNTAX")
        self.text = text
        self.position = position


def _skip_ws(text: str, i: int) -> int:
    return _WS_RE.match(text, i).end()


def _parse_quoted(text: str, i: int) -> Tuple[str, int]:
    # text[i] is the opening quote; "" inside escapes a quote
    start = i
    i += 1
    chars = []
    while i < len(text):
        ch = text[i]
        if ch == '"':
            if text.startswith('""', i):
                chars.append('"')
                i += 2
                continue
            return "".join(chars), i + 1
        chars.append(ch)
        i += 1
    raise TermSyntaxError("unterminated string", text, start)


def _parse_symbol(text: str, i: int) -> Tuple[str, int]:
    if i < len(text) and text[i] == '"':
        return _parse_quoted(text, i)
    match = TOKEN_RE.match(text, i)
    if not match:
        if i >= len(text):
            raise TermSyntaxError("unexpected end of input", text, i)
        if text[i] in "(),":
            raise TermSyntaxError("empty functor or constant", text, i)
        raise TermSyntaxError(f"illegal character {text[i]!r}", text, i)
    return match.group(0), match.end()


def _parse_term(text: str, i: int) -> Tuple[Term, int]:
    i = _skip_ws(text, i)
    if i < len(text) and text[i] == "?":
        if text.startswith("??", i):
            match = TOKEN_RE.match(text, i + 2)
            if not match:
                raise TermSyntaxError("mutable variable needs a name", text, i)
            return Variable(match.group(0), Context.MUTABLE), match.end()
        match = TOKEN_RE.match(text, i + 1)
        if not match:
            return Variable(), i + 1
        return Variable(match.group(0), Context.IMMUTABLE), match.end()

    symbol, i = _parse_symbol(text, i)
    j = _skip_ws(text, i)
    if j < len(text) and text[j] == "(":
        args = []
        j = _skip_ws(text, j + 1)
        if j < len(text) and text[j] == ")":
            return make_function(symbol, ()), j + 1
        while True:
            arg, j = _parse_term(text, j)
            args.append(arg)
            j = _skip_ws(text, j)
            if j >= len(text):
                raise TermSyntaxError("unbalanced parentheses", text, j)
            if text[j] == ",":
                j += 1
                continue
            if text[j] == ")":
                return make_function(symbol, args), j + 1
            raise TermSyntaxError(f"expected ',' or ')' but found {text[j]!r}", text, j)
    return Constant(symbol), i


def parse_term(text: str) -> Term:
    """Parse one term; the whole input must be consumed."""
    if not text or not text.strip():
        raise TermSyntaxError("empty input", text or "", 0)
    term, i = _parse_term(text, 0)
    i = _skip_ws(text, i)
    if i != len(text):
        if text[i] == ")":
            raise TermSyntaxError("unbalanced parentheses", text, i)
        raise TermSyntaxError(f"unexpected {text[i]!r} after term", text, i)
    return term


def parse_predicate(text: str) -> Predicate:
    """
    Parse a predicate such as ``process(??docid)`` or ``ready``.

    Raises:
        TermSyntaxError: on malformed input or when the text is a bare variable.
    """
    term = parse_term(text)
    if isinstance(term, Variable):
        raise TermSyntaxError("a predicate cannot be a bare variable", text, 0)
    return Predicate.from_term(term)


def parse_ground_predicate(text: str) -> Predicate:
    """Parse message content; variables are not allowed."""
    pred = parse_predicate(text)
    if not is_ground_predicate(pred):
        raise TermSyntaxError("message content must not contain variables", text, text.index("?"))
    if pred == ABSENT_CONTENT:
        raise TermSyntaxError(f"{ABSENT_CONTENT.symbol!r} is reserved for messages without content", text, 0)
    return pred


def parse_content_pattern(text: str) -> ContentPattern:
    """Transition content: a predicate, or a single variable matching any content."""
    term = parse_term(text)
    if isinstance(term, Variable):
        return term
    return Predicate.from_term(term)
