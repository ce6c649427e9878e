"""Exception hierarchy shared by every cramer-lab module.

Each error carries the process exit code the CLI reports for it:

- 1: usage errors (bad flags, malformed config files)
- 2: validation errors (bad polynomials, inadmissible families,
  arguments outside an operation's domain, insufficient coverage)
- 3: resource errors (memory budget exceeded)
"""


class LabError(Exception):
    """Base class for all errors raised by the library."""

    exit_code = 1


class UsageError(LabError):
    """Raised when the command line or a config file is malformed."""

    exit_code = 1


class ValidationError(LabError):
    """Raised when an input is well formed but not acceptable."""

    exit_code = 2


class DomainError(ValidationError):
    """Raised when an argument lies outside an operation's domain."""


class InadmissibleFamilyError(ValidationError):
    """Raised when a polynomial family has a fixed prime divisor.

    Attributes:
        prime (int): The obstructing prime p with omega_f(p) = p.
    """

    def __init__(self, prime: int, family_text: str = "") -> None:
        self.prime = prime
        label = f" {family_text}" if family_text else ""
        super().__init__(
            f"Family{label} is not admissible: omega_f({prime}) = {prime}, "
            f"so every value of the product is divisible by {prime}."
        )


class ResourceError(LabError):
    """Raised when a request would exceed the configured memory budget."""

    exit_code = 3
