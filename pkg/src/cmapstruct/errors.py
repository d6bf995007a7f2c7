"""Exception hierarchy shared by all cmapstruct modules."""


class CmapError(Exception):
    """Base class for every error raised by cmapstruct."""


class InputError(CmapError):
    """Input data is malformed or inconsistent (CLI exit status 2)."""


class ParseError(InputError):
    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        if source is not None:
            where = f"{source}:{line}:" if line is not None else f"{source}:"
        else:
            where = f"line {line}:" if line is not None else ""
        super().__init__(f"{where} {message}" if where else message)


class StructuralError(InputError):
    """Parsed data violates a structural rule (duplicate ids, dangling refs)."""


class EmptyCorpusError(InputError):
    pass


class EmptyLabelError(InputError, ValueError):
    pass


class RejectedTripleError(InputError):
    def __init__(self, message, offenders=()):
        self.offenders = list(offenders)
        super().__init__(message)


class TaxonomyError(InputError):
    """A category path is not part of the fixed relation taxonomy."""


class DuplicateError(InputError):
    pass


class InverseConflictError(InputError):
    pass


class UnknownLabelError(CmapError, KeyError):
    def __init__(self, labels):
        self.labels = sorted(labels)
        super().__init__("unregistered label(s): " + ", ".join(self.labels))

    def __str__(self):
        return self.args[0]


class EmptyMapError(InputError):
    pass


class TotalityError(InputError):
    def __init__(self, missing):
        self.missing = sorted(missing)
        super().__init__("unassigned concept(s): " + ", ".join(self.missing))


class LevelOverflowError(CmapError):
    pass


class FormatError(InputError):
    pass


class MissingRegistryError(CmapError):
    pass
