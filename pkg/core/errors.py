# core/errors.py
"""
Shared error type and error-code messages for the ACRE engine.

Every app raises a subclass of AcreError carrying a stable error code.
The command-line frontend maps codes to the messages below.
"""


# =============================================================================
# ERROR MESSAGES
# =============================================================================
# Maps internal error codes to user-facing messages
ERROR_MESSAGES = {
    # Content language
    "TERM_SYNTAX": "The term could not be parsed. Check parentheses, quotes and variable names.",

    # ACL messages and traces
    "MESSAGE_SYNTAX": "The ACL message is malformed.",
    "UNKNOWN_PERFORMATIVE": "The performative is not one of the FIPA communicative acts.",
    "UNKNOWN_PARAMETER": "The message uses a parameter outside the FIPA set (custom parameters need an 'x-' prefix).",
    "TRACE_SYNTAX": "The trace file contains a line that is not a message.",

    # Protocol definitions
    "PROTOCOL_SCHEMA": "The protocol definition does not conform to the protocol schema.",
    "PROTOCOL_INVALID": "The protocol definition is not a valid finite state machine.",
    "INVALID_PROTOCOL_ID": "Protocol identifiers need a namespace, a name and a version such as 1.0.",
    "DUPLICATE_STATE": "A state name is declared more than once.",
    "UNRESOLVED_IMPORT": "An imported protocol could not be found. Fetch its repository or pass --store.",
    "IMPORT_CYCLE": "Protocols import each other in a cycle.",
    "STATE_COLLISION": "An imported protocol declares a state that already exists.",

    # Repositories and store
    "REPOSITORY_SCHEMA": "The repository descriptor does not conform to the repository schema.",
    "FETCH_FAILED": "The repository could not be reached. Check the URL or path and try again.",
    "PROTOCOL_CONFLICT": "A protocol with the same identifier but different content is already stored. Publish a new version instead.",
    "STORE_CORRUPT": "The protocol store contains an unreadable file.",

    # Conversations
    "UNKNOWN_CONVERSATION": "No conversation with that identifier is known.",
    "CONVERSATION_TERMINAL": "The conversation has already finished.",
    "UNKNOWN_PROTOCOL": "The protocol is not in the protocol store.",
    "NOT_INVOLVED": "The message is neither sent nor received by this agent.",
    "NOT_ARCHIVED": "The conversation is not archived.",
    "NO_CANCEL_PENDING": "There is no pending cancel request for this conversation.",
    "NOT_CANCELLABLE": "Only an active conversation can be cancelled.",
    "CYCLE_IN_PROGRESS": "The conversation manager is already running a cycle.",

    # Groups
    "DUPLICATE_GROUP": "A group with that identifier already exists.",
    "UNKNOWN_GROUP": "No group with that identifier is known.",
    "EMPTY_GROUP": "The agent group has no members.",
    "GROUP_PROTOCOL_MISMATCH": "All conversations in a group must follow the same protocol.",
    "UNKNOWN_MONITOR": "No group monitor is registered under that name.",
    "MONITOR_ARITY": "The group monitor was given the wrong number of parameters.",

    # Harness
    "SCENARIO_INVALID": "The scenario file is invalid.",
    "UNKNOWN_AGENT": "The scenario refers to an agent it does not declare.",
    "SEED_MISMATCH": "The transcript was recorded with a different seed.",

    # General
    "IO_ERROR": "A file could not be read or written.",
    "ERROR": "An unexpected error occurred.",
}


class AcreError(Exception):
    """Base exception for engine errors."""
    def __init__(self, message: str, error_code: str = "ERROR"):
        super().__init__(message)
        self.error_code = error_code


def get_user_message(code: str, default: str = None) -> str:
    """Get a user-facing message for an error code."""
    return ERROR_MESSAGES.get(code, default or "An error occurred.")


def describe(error: AcreError) -> str:
    """Technical message plus the user-facing hint for its code."""
    hint = ERROR_MESSAGES.get(error.error_code)
    if hint and hint != str(error):
        return f"{error} ({hint})"
    return str(error)
