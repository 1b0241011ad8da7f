"""Exception types raised across the toolkit."""


class MlsubwordError(Exception):
    """Base class for all toolkit errors."""


class InvalidEncoding(MlsubwordError, ValueError):
    pass


class UnsegmentableWord(MlsubwordError, ValueError):
    """Raised when part of a word matches no syllable pattern.

    ``offset`` is the codepoint index at which matching failed.
    """

    def __init__(self, word, offset, reason=""):
        self.word = word
        self.offset = offset
        self.reason = reason
        msg = f"cannot syllabify {word!r} at offset {offset}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class UnmappedCodepoint(MlsubwordError, KeyError):
    def __init__(self, char, token):
        self.char = char
        self.token = token
        super().__init__(f"no phone mapping for U+{ord(char):04X} in {token!r}")

    def __str__(self):
        return self.args[0]


class MalformedLine(MlsubwordError, ValueError):
    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class DuplicateToken(MalformedLine):
    pass


class EmptyBase(MlsubwordError, ValueError):
    pass


class InvalidOrder(MlsubwordError, ValueError):
    pass


class DegenerateCorpus(MlsubwordError, ValueError):
    pass


class EmptyCorpus(MlsubwordError, ValueError):
    pass


class MalformedArpa(MalformedLine):
    pass


class EmptyReference(MlsubwordError, ValueError):
    pass


class NoTokenizableWords(MlsubwordError, ValueError):
    pass


class ConfigError(MlsubwordError, ValueError):
    pass
