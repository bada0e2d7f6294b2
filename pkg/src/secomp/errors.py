"""Exception hierarchy shared by every module."""


class SecompError(Exception):
    """Base class for all package errors."""


class DomainError(SecompError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class PreconditionError(SecompError, ValueError):
    """A structural precondition (normal form, independence, support) fails."""


class ResourceError(SecompError):
    """An enumeration or search would exceed its size guard."""


class ProtocolError(SecompError):
    """A protocol description is internally inconsistent."""


class InsecureProtocolError(SecompError):
    """A reduction was asked to start from a protocol that is not secure."""
