"""Exception types raised across the package."""


class LenientError(Exception):
    """Base class for all errors raised by lenient_cer."""


class EmptyLattice(LenientError):
    """The lattice has no complete start-to-final path."""


class CyclicLattice(LenientError):
    """The arcs of a lattice contain a cycle."""


class EmptyReference(LenientError):
    """A reference (or the selected best path) has no characters."""


class NotConvertible(LenientError):
    """A string contains scalars outside the kana conversion range."""


class EmptyCorpus(LenientError):
    """No training text was supplied."""


class NoValidRecords(LenientError):
    """Every record of an evaluation corpus was rejected."""


class ResourceError(LenientError):
    """A resource file (dictionary, lexicon, model) could not be parsed."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class DuplicateSpelling(ResourceError):
    """A spelling occurs in more than one equivalence class."""


class MalformedLine(ResourceError):
    """A resource line has the wrong shape (e.g. a lexicon class with one member)."""
