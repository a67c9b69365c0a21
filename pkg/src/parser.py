"""Parsing of polynomial expressions in z1, cz1, z2, cz2.

Grammar (whitespace-insensitive):

    expr     :: term [ ('+' | '-') term ]*
    term     :: signed [ ('*' | '/') signed ]*
    signed   :: [ '+' | '-' ] power
    power    :: atom [ '^' integer ]*
    atom     :: integer | variable | 'i' | '(' expr ')'

Variables are z1, z2, their conjugates cz1, cz2 and the formal real
parameters s, t, n. Only exact literals are accepted: integers, quotients of
constants and the imaginary unit, so the coefficients land in the Gaussian
rationals. Decimals and named irrational constants are rejected with the
position of the offending token.
"""

import logging

from pyparsing import (
    OpAssoc,
    ParseBaseException,
    ParseFatalException,
    ParserElement,
    ParseResults,
    Regex,
    Word,
    alphanums,
    alphas,
    infix_notation,
    nums,
    one_of,
)

from src.config import IMAGINARY_UNIT_NAME, PARAMETER_NAMES, VARIABLE_NAMES
from src.polynomial import RPoly, gaussian

logger = logging.getLogger(__name__)

ParserElement.enable_packrat()

IRRATIONAL_NAMES = frozenset({"pi", "e", "E", "I", "sqrt", "exp", "log", "ln", "sin", "cos", "tan", "oo", "inf", "nan"})


class PolynomialSyntaxError(ValueError):
    """Error when a polynomial expression does not match the grammar."""

    def __init__(self, text: str, position: int, reason: str) -> None:
        self.text = text
        self.position = position
        self.line = text.count("\n", 0, position) + 1
        self.column = position - (text.rfind("\n", 0, position) + 1) + 1
        self.reason = reason
        super().__init__(f"{reason} (line {self.line}, column {self.column})")


def _reject_decimal(text: str, loc: int, tokens: ParseResults) -> None:
    msg = f"decimal literal {tokens[0]!r} is not exact; write it as a quotient p/q"
    raise ParseFatalException(text, loc, msg)


def _integer(tokens: ParseResults) -> list[RPoly]:
    return [RPoly.constant(int(tokens[0]))]


def _identifier(text: str, loc: int, tokens: ParseResults) -> list[RPoly]:
    name = tokens[0]
    if name == IMAGINARY_UNIT_NAME:
        return [RPoly.constant(gaussian(0, 1))]
    if name in VARIABLE_NAMES or name in PARAMETER_NAMES:
        return [RPoly.variable(name)]
    if name in IRRATIONAL_NAMES:
        msg = f"irrational or transcendental constant {name!r} is not allowed"
    else:
        msg = f"unknown identifier {name!r}"
    raise ParseFatalException(text, loc, msg)


def _exponent_value(text: str, loc: int, exponent: RPoly) -> int:
    """Read a power's exponent as a non-negative integer constant."""
    value = exponent.constant_term
    if not exponent.is_constant or value.y or value.x.denominator != 1 or value.x < 0:
        msg = f"exponent must be a non-negative integer, got {exponent}"
        raise ParseFatalException(text, loc, msg)
    return int(value.x)


def _power(text: str, loc: int, tokens: ParseResults) -> list[RPoly]:
    operands = tokens[0][::2]
    # right-associative: a^b^c = a^(b^c)
    result = operands[-1]
    for base in reversed(operands[:-1]):
        result = base ** _exponent_value(text, loc, result)
    return [result]


def _sign(tokens: ParseResults) -> list[RPoly]:
    operator, operand = tokens[0]
    return [-operand if operator == "-" else operand]


def _product(text: str, loc: int, tokens: ParseResults) -> list[RPoly]:
    group = tokens[0]
    result = group[0]
    for operator, operand in zip(group[1::2], group[2::2], strict=True):
        if operator == "*":
            result = result * operand
            continue
        if not operand.is_constant:
            msg = f"division by the non-constant polynomial {operand}"
            raise ParseFatalException(text, loc, msg)
        if not operand:
            msg = "division by zero"
            raise ParseFatalException(text, loc, msg)
        result = result / operand.constant_term
    return [result]


def _sum(tokens: ParseResults) -> list[RPoly]:
    group = tokens[0]
    result = group[0]
    for operator, operand in zip(group[1::2], group[2::2], strict=True):
        result = result + operand if operator == "+" else result - operand
    return [result]


def _build_grammar() -> ParserElement:
    decimal = Regex(r"\d+\.\d*|\.\d+").set_parse_action(_reject_decimal)
    integer = Word(nums).set_parse_action(_integer)
    identifier = Word(alphas, alphanums + "_").set_parse_action(_identifier)
    operand = decimal | integer | identifier
    return infix_notation(
        operand,
        [
            ("^", 2, OpAssoc.RIGHT, _power),
            (one_of("+ -"), 1, OpAssoc.RIGHT, _sign),
            (one_of("* /"), 2, OpAssoc.LEFT, _product),
            (one_of("+ -"), 2, OpAssoc.LEFT, _sum),
        ],
    )


GRAMMAR = _build_grammar()


def parse(text: str) -> RPoly:
    """Parse a polynomial expression into its canonical form.

    Args:
        text: Expression in the polynomial grammar, e.g. "z1*cz1 + z2*cz2".

    Returns:
        The canonical polynomial. Printing it and parsing the result gives it back.

    Raises:
        PolynomialSyntaxError: On malformed input, inexact literals or unknown names.
    """
    if not text.strip():
        raise PolynomialSyntaxError(text, 0, "empty expression")
    try:
        result = GRAMMAR.parse_string(text, parse_all=True)
    except ParseBaseException as exc:
        logger.debug("Failed to parse %r at offset %d: %s", text, exc.loc, exc.msg)
        raise PolynomialSyntaxError(text, exc.loc, exc.msg) from exc
    poly: RPoly = result[0]
    logger.debug("Parsed %r into %d terms", text, len(poly))
    return RPoly.from_element(poly.element)
