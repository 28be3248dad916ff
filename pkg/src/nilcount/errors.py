"""Shared exception types."""


class NilcountError(Exception):
    """Base class for all errors raised by this package."""


class DegreeMismatch(NilcountError):
    """Permutations of different degrees were combined."""


class CapExceeded(NilcountError):
    """An enumeration grew past its configured cap."""


class NotNormal(NilcountError):
    """A quotient was requested by a non-normal subgroup."""


class NotPrime(NilcountError):
    """A prime argument was composite."""


class TrivialGroup(NilcountError):
    """An invariant of a nontrivial group was requested for the trivial one."""


class NotTransitive(NilcountError):
    """A transitive permutation group was required."""


class NotNilpotent(NilcountError):
    """A nilpotent group was required."""


class PropertyViolated(NilcountError):
    """A structural property that should be impossible to break was broken."""


class InvalidChain(NilcountError):
    """A subgroup chain is not a central refinement with prime steps."""


class QuotientMismatch(NilcountError):
    """Two extensions do not share the same quotient group."""


class NotAction(NilcountError):
    """A claimed group action fails the homomorphism or automorphism law."""


class VerificationFailed(NilcountError):
    """An explicit construction contradicts a verified structural claim."""


class BudgetExceeded(NilcountError):
    """A sieve or enumeration exceeds its memory/work budget."""


class InsufficientData(NilcountError):
    """Not enough checkpoints to estimate asymptotic slopes."""


class UnknownTheorem(NilcountError):
    """An unknown verification suite id was requested."""


class UnsupportedModulus(NilcountError):
    """Base-field cyclotomic data does not cover the requested modulus."""
