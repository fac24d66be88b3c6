EXPERIMENT_FAILURE = 1
USAGE_FAILURE = 2


class UnilabException(Exception):
    exit_code = EXPERIMENT_FAILURE

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class EmptyTextError(UnilabException):
    pass


class AlphabetError(UnilabException):
    pass


class SequenceTooShortError(UnilabException):
    pass


class EnumerationCapError(UnilabException):
    pass


class MessageSpaceError(UnilabException):
    pass


class InvalidParameterError(UnilabException):
    pass


class CorpusError(UnilabException):
    exit_code = USAGE_FAILURE


class ConfigError(UnilabException):
    exit_code = USAGE_FAILURE
