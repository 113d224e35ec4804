"""Domain error types.

Every error carries a machine-readable ``code`` so the HTTP layer and the
CLI can report failures without leaking stack traces.
"""


class PresyError(Exception):
    """Base class for all domain errors."""

    code = "error"


class InvalidField(PresyError):
    code = "invalid_field"


class UnsupportedLanguage(PresyError):
    code = "unsupported_language"


class UnknownProfile(PresyError):
    code = "unknown_profile"


class UnknownEntry(PresyError):
    code = "unknown_entry"


class IllegalTransition(PresyError):
    code = "illegal_transition"


class MalformedRecord(PresyError):
    code = "malformed_record"


class DuplicateId(PresyError):
    code = "duplicate_id"


class MissingConfig(PresyError):
    code = "missing_config"


class DuplicateUrl(PresyError):
    code = "duplicate_url"


class UnknownProvider(PresyError):
    code = "unknown_provider"


class ProviderUnavailable(PresyError):
    code = "provider_unavailable"


class MalformedProviderResponse(PresyError):
    code = "malformed_provider_response"


class UnparsableUrl(PresyError):
    code = "unparsable_url"


class TooManyResults(PresyError):
    code = "too_many_results"


class WrongRowCount(PresyError):
    code = "wrong_row_count"


class MismatchedEngines(PresyError):
    code = "mismatched_engines"


class MalformedScenarioFile(PresyError):
    code = "malformed_scenarios"


class EvaluationAborted(PresyError):
    """A provider failure stopped the evaluation suite.

    The message names the scenario and mode that were running.
    """

    code = "evaluation_aborted"
