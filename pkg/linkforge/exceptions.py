"""This module contains the error hierarchy of the pipeline and functions to handle errors in the framework."""

import traceback
from typing import Callable

from linkforge.connection import PipelineConnection


class LinkforgeError(Exception):
    """Base class of every error raised by the pipeline.
    The message is qualified with the module the error belongs to.
    """
    module = "linkforge"

    def __init__(self, message: str = "", module: str | None = None):
        if module:
            self.module = module
        self.message = message
        super().__init__(f"{self.module}: {message}" if message else self.module)


class BusinessError(LinkforgeError):
    """An error caused by invalid input rather than by the construction itself."""


class PreconditionError(LinkforgeError):
    """An operation was called with arguments that break its precondition."""


# braid
class ParseError(BusinessError):
    """A braid word, polynomial or trace could not be parsed."""
    module = "cli"


class ZeroLetter(BusinessError):
    """A braid word contains the letter 0."""
    module = "braid"


class IndexOutOfRange(BusinessError):
    """A letter index is not between 1 and strands - 1."""
    module = "braid"


class OddInterComponentCount(LinkforgeError):
    """The signed crossing count between two components is odd."""
    module = "braid"


class TooManyCrossings(LinkforgeError):
    """The word is too long for the Kauffman bracket state sum."""
    module = "braid"


class TimeAtPi(LinkforgeError):
    """A singular crossing lies at t = pi."""
    module = "braid"


class LengthMismatch(LinkforgeError):
    """Letters and crossing times differ in length."""
    module = "braid"


# trigpoly
class IllConditioned(LinkforgeError):
    """An interpolation system could not be solved to tolerance."""
    module = "trigpoly"


class IdenticallyZero(LinkforgeError):
    """Root finding was asked for the zero polynomial."""
    module = "trigpoly"


# parametrize
class PermConditionFailed(LinkforgeError):
    """The interval permutations of a strand system do not match the word."""
    module = "parametrize"


class EndpointOnCrossing(LinkforgeError):
    """Two distinct strands meet at an interval endpoint."""
    module = "parametrize"


# genericity
class IdenticalStrands(LinkforgeError):
    """Two strand functions coincide everywhere."""
    module = "genericity"


class BudgetExhausted(LinkforgeError):
    """No perturbation size above the floor made the pass succeed."""
    module = "genericity"


class UnresolvableInterval(LinkforgeError):
    """The crossings of a schedule interval cannot be signed to reproduce its letter."""
    module = "genericity"


# assemble
class EvennessViolated(LinkforgeError):
    """g has a frequency that is not an even integer."""
    module = "assemble"


class RealnessViolated(LinkforgeError):
    """A coefficient of g is not real."""
    module = "assemble"


class NegativeExponent(LinkforgeError):
    """A monomial would need a negative or fractional exponent."""
    module = "assemble"


class SideSignMismatch(LinkforgeError):
    """The critical value has different signs on the two sides of a crossing."""
    module = "assemble"


class EvenFrequencyPresent(LinkforgeError):
    """A has an even frequency."""
    module = "assemble"


# verifier
class BoundViolated(LinkforgeError):
    """A degree exceeds its proven bound."""
    module = "verifier"


class NoConvergence(LinkforgeError):
    """The root finder hit its iteration cap."""
    module = "verifier"


class StrandCollision(LinkforgeError):
    """Two tracked roots came closer than the separation tolerance."""
    module = "verifier"

    def __init__(self, message: str = "", radius: float | None = None, t: float | None = None):
        super().__init__(message)
        self.radius = radius
        self.t = t


class SimultaneousCrossings(LinkforgeError):
    """Two crossings of the tracked braid could not be separated in t."""
    module = "verifier"


class NoStabilization(LinkforgeError):
    """The radius floor was reached without two agreeing radii."""
    module = "verifier"

    def __init__(self, message: str = "", attempts: list[dict] | None = None):
        super().__init__(message)
        self.attempts = attempts or []


class StructuralFailure(LinkforgeError):
    """The polynomial fails f(O) = 0, Df(O) = 0 or f(u, 0) = u^s."""
    module = "verifier"


class MarginZero(LinkforgeError):
    """A tracked zero is a critical point of f."""
    module = "verifier"


def handle_error(message: str, error: Exception, connection: PipelineConnection) -> None:
    """Handles an error caught during the process.
    Logs the module qualified error together with its trace.

    Args:
        message: A message to prepend to the error message.
        error: The exception that should be handled.
        connection: The connection of the running command.
    """
    error_msg = f"{message}: {error}\n\nTrace:\n{traceback.format_exc()}"
    connection.log_error(error_msg)


def log_exception(connection: PipelineConnection) -> Callable:
    """Creates a function to be used as an exception hook that logs any uncaught exception.

    Args:
        connection: The connection of the running command.

    Returns:
        callable: A function that can be assigned to sys.excepthook.
    """
    def inner(exception_type, value, traceback_string):
        connection.log_error(f"Uncaught Exception:\nType: {exception_type}\nValue: {value}\nTrace: {traceback_string}")
    return inner
