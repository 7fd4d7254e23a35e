"""
Toolkit Errors
Exception hierarchy shared by the library, the CLI and the HTTP API.

Every error carries a short machine-readable ``code`` so that the command
line can print ``error[<code>]: ...`` and the API can return it as JSON.
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""
    code = 'error'

    def to_dict(self) -> dict:
        """Convert to dictionary for JSON serialization."""
        return {'error': str(self), 'code': self.code}


class DomainError(ToolkitError, ValueError):
    """Argument outside the domain of a mathematical function."""
    code = 'domain'


class PreconditionError(ToolkitError, ValueError):
    """Caller violated an operation's precondition (e.g. table too small)."""
    code = 'precondition'


class SpecError(ToolkitError, ValueError):
    """Malformed set or eta-product description."""
    code = 'spec'


class UnsupportedSpecError(SpecError):
    """Well-formed description that the requested engine cannot handle."""
    code = 'unsupported-spec'


class ResourceError(ToolkitError, MemoryError):
    """Request would exceed the configured memory budget."""
    code = 'resource'


class UsageError(ToolkitError, ValueError):
    """Bad command-line or configuration input."""
    code = 'usage'
