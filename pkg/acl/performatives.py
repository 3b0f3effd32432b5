"""
The FIPA communicative acts.

The set is closed: inform-done, inform-result and similar pseudo
performatives are not members.
"""
from enum import Enum

from core.errors import AcreError


class UnknownPerformative(AcreError):
    def __init__(self, token: str):
        super().__init__(f"unknown performative {token!r}", "UNKNOWN_PERFORMATIVE")
        self.token = token


class Performative(str, Enum):
    ACCEPT_PROPOSAL = "accept-proposal"
    AGREE = "agree"
    CANCEL = "cancel"
    CFP = "cfp"
    CONFIRM = "confirm"
    DISCONFIRM = "disconfirm"
    FAILURE = "failure"
    INFORM = "inform"
    INFORM_IF = "inform-if"
    INFORM_REF = "inform-ref"
    NOT_UNDERSTOOD = "not-understood"
    PROPAGATE = "propagate"
    PROPOSE = "propose"
    PROXY = "proxy"
    QUERY_IF = "query-if"
    QUERY_REF = "query-ref"
    REFUSE = "refuse"
    REJECT_PROPOSAL = "reject-proposal"
    REQUEST = "request"
    REQUEST_WHEN = "request-when"
    REQUEST_WHENEVER = "request-whenever"
    SUBSCRIBE = "subscribe"

    def __str__(self) -> str:
        return self.value


_BY_TOKEN = {p.value: p for p in Performative}


def parse_performative(token: str) -> Performative:
    """Performatives are matched case-insensitively and returned canonical."""
    try:
        return _BY_TOKEN[(token or "").strip().lower()]
    except KeyError:
        raise UnknownPerformative(token) from None
