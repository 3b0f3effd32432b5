"""
Textual form of ACL messages.

    (inform :sender agent1 :receiver agent2 :content ready
            :conversation-id c1 :protocol is.lill.examples.process-documents.1.0)

Serialization emits keys in a fixed order and only for present fields,
so ``serialize_message`` output is canonical. A ``:receiver`` value may be
a list ``(set a b)``; it expands to one message per receiver.
"""
import logging
from typing import List, Tuple

from core.errors import AcreError
from protocols.identifiers import InvalidProtocolId, ProtocolId
from terms.language import quote_symbol
from terms.parser import TermSyntaxError, parse_ground_predicate

from .messages import PRESERVED_PARAMETERS, Message
from .performatives import parse_performative

logger = logging.getLogger(__name__)

KEY_ORDER = (
    "sender",
    "receiver",
    "content",
    "conversation-id",
    "protocol",
    "reply-by",
    "reply-with",
    "in-reply-to",
)


class MessageSyntaxError(AcreError):
    def __init__(self, message: str, text: str = ""):
        detail = f"{message} in {text!r}" if text else message
        super().__init__(detail, "MESSAGE_SYNTAX")
        self.text = text


class UnknownParameter(AcreError):
    def __init__(self, key: str):
        super().__init__(f"unknown message parameter :{key}", "UNKNOWN_PARAMETER")
        self.key = key


def _read_atom(text: str, i: int) -> Tuple[str, int]:
    """Read one value; parentheses nest and quoted strings are opaque."""
    start = i
    depth = 0
    while i < len(text):
        ch = text[i]
        if ch == '"':
            i += 1
            while i < len(text):
                if text[i] == '"':
                    if text.startswith('""', i):
                        i += 2
                        continue
                    break
                i += 1
            if i >= len(text):
                raise MessageSyntaxError("unterminated string", text)
        elif ch == "(":
            depth += 1
        elif ch == ")":
            if depth == 0:
                break
            depth -= 1
        elif ch.isspace() and depth == 0:
            break
        i += 1
    if depth:
        raise MessageSyntaxError("unbalanced parentheses", text)
    return text[start:i], i


def _skip_ws(text: str, i: int) -> int:
    while i < len(text) and text[i].isspace():
        i += 1
    return i


def _unquote(raw: str) -> str:
    if len(raw) >= 2 and raw[0] == '"' and raw[-1] == '"':
        return raw[1:-1].replace('""', '"')
    return raw


def _receivers(raw: str) -> List[str]:
    if not raw.startswith("("):
        return [_unquote(raw)]
    inner = raw[1:-1]
    names = []
    i = _skip_ws(inner, 0)
    while i < len(inner):
        atom, i = _read_atom(inner, i)
        names.append(_unquote(atom))
        i = _skip_ws(inner, i)
    if names and names[0] == "set":
        names = names[1:]
    if not names:
        raise MessageSyntaxError("empty receiver list", raw)
    return names


def _split(text: str):
    """Performative token plus the (key, raw value) pairs in input order."""
    body = (text or "").strip()
    if not body.startswith("(") or not body.endswith(")"):
        raise MessageSyntaxError("a message is one parenthesized expression", text)
    i = _skip_ws(body, 1)
    head, i = _read_atom(body, i)
    if not head:
        raise MessageSyntaxError("missing performative", text)
    pairs = []
    while True:
        i = _skip_ws(body, i)
        if i >= len(body) - 1:
            if i != len(body) - 1:
                raise MessageSyntaxError("unbalanced parentheses", text)
            break
        if body[i] != ":":
            raise MessageSyntaxError(f"expected a :parameter at position {i}", text)
        key, i = _read_atom(body, i + 1)
        if not key:
            raise MessageSyntaxError(f"empty parameter name at position {i}", text)
        i = _skip_ws(body, i)
        value, i = _read_atom(body, i)
        if not value:
            raise MessageSyntaxError(f"parameter :{key} has no value", text)
        pairs.append((key.lower(), value))
    return head, pairs


def parse_messages(text: str) -> List[Message]:
    """Parse one s-expression; a receiver list yields one message per receiver."""
    head, pairs = _split(text)
    performative = parse_performative(head)

    fields = {}
    extras = []
    receivers: List[str] = []
    seen = set()
    for key, raw in pairs:
        if key in seen:
            raise MessageSyntaxError(f"parameter :{key} given twice", text)
        seen.add(key)
        if key == "receiver":
            receivers = _receivers(raw)
        elif key == "sender":
            fields["sender"] = _unquote(raw)
        elif key == "content":
            try:
                fields["content"] = parse_ground_predicate(raw)
            except TermSyntaxError as e:
                raise MessageSyntaxError(f"malformed content: {e}", text) from e
        elif key == "conversation-id":
            fields["conversation_id"] = _unquote(raw)
        elif key == "protocol":
            try:
                fields["protocol_id"] = ProtocolId.from_wire(_unquote(raw))
            except InvalidProtocolId as e:
                raise MessageSyntaxError(f"malformed protocol: {e}", text) from e
        elif key == "reply-by":
            try:
                fields["reply_by"] = float(_unquote(raw))
            except ValueError:
                raise MessageSyntaxError(f"reply-by must be seconds since the epoch, got {raw!r}", text) from None
        elif key == "reply-with":
            fields["reply_with"] = _unquote(raw)
        elif key == "in-reply-to":
            fields["in_reply_to"] = _unquote(raw)
        elif key in PRESERVED_PARAMETERS or key.startswith("x-"):
            extras.append((key, _unquote(raw)))
        else:
            raise UnknownParameter(key)

    if not fields.get("sender"):
        raise MessageSyntaxError("missing :sender", text)
    if not receivers:
        raise MessageSyntaxError("missing :receiver", text)
    try:
        return [
            Message(performative=performative, receiver=receiver, extras=tuple(extras), **fields)
            for receiver in receivers
        ]
    except ValueError as e:
        raise MessageSyntaxError(str(e), text) from e


def parse_message(text: str) -> Message:
    """
    Parse a single-receiver message.

    Raises:
        MessageSyntaxError: malformed text, or more than one receiver.
        UnknownPerformative: performative outside the FIPA set.
        UnknownParameter: parameter outside the FIPA set without an "x-" prefix.
    """
    messages = parse_messages(text)
    if len(messages) != 1:
        raise MessageSyntaxError("several receivers; use parse_messages", text)
    return messages[0]


def format_timestamp(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def serialize_message(m: Message) -> str:
    parts = [m.performative.value, ":sender", quote_symbol(m.sender), ":receiver", quote_symbol(m.receiver)]
    if m.content is not None:
        parts += [":content", str(m.content)]
    if m.conversation_id is not None:
        parts += [":conversation-id", quote_symbol(m.conversation_id)]
    if m.protocol_id is not None:
        parts += [":protocol", m.protocol_id.wire]
    if m.reply_by is not None:
        parts += [":reply-by", format_timestamp(m.reply_by)]
    if m.reply_with is not None:
        parts += [":reply-with", quote_symbol(m.reply_with)]
    if m.in_reply_to is not None:
        parts += [":in-reply-to", quote_symbol(m.in_reply_to)]
    for key, value in m.extras:
        parts += [f":{key}", quote_symbol(value)]
    return "(" + " ".join(parts) + ")"
