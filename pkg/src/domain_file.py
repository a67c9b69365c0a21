"""Reading domain files: one model polynomial plus optional flow and map declarations.

A domain file looks like

    # the model polynomial
    P = z1*cz1 + z2*cz2

    flow rot { kind = 4; a = i; b = 2*i }
    map swap { f1 = z2; f2 = z1; mu = 1; phi = 0 }

``P = <expr>`` may also be written as a bare expression. Inside a block,
assignments end at ";" or at the end of the line, and "#" starts a comment
anywhere. Values are expressions in the polynomial grammar; syntax errors in
them are reported with their position in the whole file.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path

from pyparsing import (
    Group,
    Keyword,
    Optional,
    ParseBaseException,
    ParserElement,
    ParseResults,
    Regex,
    Suppress,
    Word,
    ZeroOrMore,
    alphanums,
    alphas,
    one_of,
    python_style_comment,
)
from sympy.external.gmpy import MPQ
from sympy.polys.domains.gaussiandomains import GaussianRational

from src.flows import FlowKind, FlowSpec
from src.parser import PolynomialSyntaxError, parse
from src.polynomial import HoloPoly, ModelMap, NotHolomorphicError, PolyMap, RPoly, z1, z2
from src.symmetry import ModelDomain

logger = logging.getLogger(__name__)

FLOW_KEYS = frozenset({"kind", "a", "b", "p", "d", "beta3", "swapped"})
MAP_KEYS = frozenset({"f1", "f2", "mu", "phi"})


class DomainFileError(ValueError):
    """Error when a domain file is malformed or declares inconsistent data."""

    def __init__(self, reason: str, line: int | None = None) -> None:
        self.reason = reason
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"domain file: {reason}{where}")


@dataclass(frozen=True)
class _Snippet:
    """A value expression and its offset in the file text."""

    text: str
    loc: int


def _snippet(text: str, loc: int, tokens: ParseResults) -> list[_Snippet]:
    return [_Snippet(tokens[0].rstrip(), loc)]


def _build_grammar() -> ParserElement:
    name = Word(alphas + "_", alphanums + "_")
    value = Regex(r"[^;{}#\n]+").set_parse_action(_snippet)
    end = Optional(Suppress(";"))
    assignment = Group(name("key") + Suppress("=") + value("value") + end)
    block = Group(
        one_of("flow map", as_keyword=True)("block")
        + Optional(name("name"))
        + Suppress("{")
        - Group(ZeroOrMore(assignment))("body")
        - Suppress("}")
    )
    declaration = Group(Suppress(Keyword("P")) + Suppress("=") + value("value") + end)
    bare = Group(value("value") + end)
    return ZeroOrMore(block | declaration | bare).ignore(python_style_comment)


GRAMMAR = _build_grammar()


@dataclass
class DomainFile:
    """Parsed contents of a domain file."""

    text: str
    path: Path | None = None
    p: RPoly | None = None
    flows: dict[str, FlowSpec] = field(default_factory=dict)
    maps: dict[str, ModelMap] = field(default_factory=dict)

    @property
    def domain(self) -> ModelDomain:
        """The model domain of P.

        Raises:
            DomainFileError: If the file declares no polynomial.
            InvalidDomainError: If P is not an admissible model polynomial.
        """
        if self.p is None:
            msg = "no model polynomial declared"
            raise DomainFileError(msg)
        return ModelDomain(self.p)


def _line_of(text: str, loc: int) -> int:
    return text.count("\n", 0, loc) + 1


def _polynomial(text: str, snippet: _Snippet) -> RPoly:
    try:
        return parse(snippet.text)
    except PolynomialSyntaxError as exc:
        raise PolynomialSyntaxError(text, snippet.loc + exc.position, exc.reason) from exc


def _constant(text: str, key: str, snippet: _Snippet) -> GaussianRational:
    poly = _polynomial(text, snippet)
    if not poly.is_constant:
        msg = f"{key} must be a constant, got {poly}"
        raise DomainFileError(msg, _line_of(text, snippet.loc))
    return poly.constant_term


def _real_constant(text: str, key: str, snippet: _Snippet) -> MPQ:
    value = _constant(text, key, snippet)
    if value.y:
        msg = f"{key} must be real, got {snippet.text}"
        raise DomainFileError(msg, _line_of(text, snippet.loc))
    return value.x


def _holomorphic(text: str, key: str, snippet: _Snippet) -> HoloPoly:
    try:
        return HoloPoly.coerce(_polynomial(text, snippet))
    except NotHolomorphicError as exc:
        msg = f"{key} must be holomorphic: {exc}"
        raise DomainFileError(msg, _line_of(text, snippet.loc)) from exc


def _assignments(text: str, body: ParseResults, allowed: frozenset[str], block: str) -> dict[str, _Snippet]:
    values: dict[str, _Snippet] = {}
    for assignment in body:
        key, snippet = assignment["key"], assignment["value"]
        line = _line_of(text, snippet.loc)
        if key not in allowed:
            msg = f"unknown key {key!r} in {block} block, expected one of {sorted(allowed)}"
            raise DomainFileError(msg, line)
        if key in values:
            msg = f"duplicate key {key!r} in {block} block"
            raise DomainFileError(msg, line)
        values[key] = snippet
    return values


def _flow_kind(text: str, snippet: _Snippet) -> FlowKind:
    label = snippet.text.strip().lower().removeprefix("type").strip()
    try:
        return FlowKind(label)
    except ValueError:
        msg = f"unknown flow kind {snippet.text!r}, expected one of {[kind.value for kind in FlowKind]}"
        raise DomainFileError(msg, _line_of(text, snippet.loc)) from None


def _flow(text: str, values: dict[str, _Snippet], line: int | None) -> FlowSpec:
    if "kind" not in values:
        msg = "flow block without kind"
        raise DomainFileError(msg, line)
    kwargs: dict[str, object] = {"kind": _flow_kind(text, values["kind"])}
    for key in ("a", "b"):
        if key in values:
            kwargs[key] = _constant(text, key, values[key])
    if "p" in values:
        kwargs["p"] = _holomorphic(text, "p", values["p"])
    if "d" in values:
        degree = _real_constant(text, "d", values["d"])
        if degree.denominator != 1:
            msg = f"d must be an integer, got {values['d'].text}"
            raise DomainFileError(msg, _line_of(text, values["d"].loc))
        kwargs["d"] = int(degree)
    if "beta3" in values:
        kwargs["beta3"] = _real_constant(text, "beta3", values["beta3"])
    if "swapped" in values:
        flag = values["swapped"].text.strip().lower()
        if flag not in ("true", "false"):
            msg = f"swapped must be true or false, got {values['swapped'].text!r}"
            raise DomainFileError(msg, _line_of(text, values["swapped"].loc))
        kwargs["swapped"] = flag == "true"
    return FlowSpec(**kwargs)  # type: ignore[arg-type]


def _map(text: str, values: dict[str, _Snippet]) -> ModelMap:
    f1 = _holomorphic(text, "f1", values["f1"]) if "f1" in values else z1()
    f2 = _holomorphic(text, "f2", values["f2"]) if "f2" in values else z2()
    mu = _real_constant(text, "mu", values["mu"]) if "mu" in values else 1
    phi = _holomorphic(text, "phi", values["phi"]) if "phi" in values else HoloPoly.coerce(RPoly.zero())
    if not mu:
        msg = "mu must be nonzero"
        raise DomainFileError(msg, _line_of(text, values["mu"].loc))
    return ModelMap(PolyMap(f1, f2), mu, phi)


def _check_unique(name: str, result: DomainFile, line: int | None) -> None:
    if name in result.flows or name in result.maps:
        msg = f"duplicate declaration name {name!r}"
        raise DomainFileError(msg, line)


def parse_domain_text(text: str, path: Path | None = None, *, require_polynomial: bool = True) -> DomainFile:
    """Parse the text of a domain file.

    Args:
        text: The file contents.
        path: Where the text came from, kept for reporting.
        require_polynomial: Whether a model polynomial must be declared; flow
            and map files passed to ``verify`` may omit it.

    Returns:
        The parsed declarations. Unnamed blocks are called flow1, flow2, ...
        and map1, map2, ... in file order.

    Raises:
        PolynomialSyntaxError: If the text or a value does not parse.
        DomainFileError: If declarations are missing, repeated or inconsistent.
        InvalidFlowError: If a flow violates the side conditions of its kind.
    """
    try:
        statements = GRAMMAR.parse_string(text, parse_all=True)
    except ParseBaseException as exc:
        raise PolynomialSyntaxError(text, exc.loc, exc.msg) from exc
    result = DomainFile(text=text, path=path)
    for statement in statements:
        if "block" not in statement:
            snippet = statement["value"]
            if result.p is not None:
                msg = "more than one model polynomial declared"
                raise DomainFileError(msg, _line_of(text, snippet.loc))
            result.p = _polynomial(text, snippet)
            continue
        kind = statement["block"]
        body = statement["body"]
        line = _line_of(text, body[0]["value"].loc) if body else None
        if kind == "flow":
            name = statement.get("name") or f"flow{len(result.flows) + 1}"
            _check_unique(name, result, line)
            result.flows[name] = _flow(text, _assignments(text, body, FLOW_KEYS, kind), line)
        else:
            name = statement.get("name") or f"map{len(result.maps) + 1}"
            _check_unique(name, result, line)
            result.maps[name] = _map(text, _assignments(text, body, MAP_KEYS, kind))
    if require_polynomial and result.p is None:
        msg = "no model polynomial declared"
        raise DomainFileError(msg)
    logger.debug("Parsed domain file with %d flows and %d maps", len(result.flows), len(result.maps))
    return result


def load_domain_file(path: Path, *, require_polynomial: bool = True) -> DomainFile:
    """Read and parse a domain file.

    Args:
        path: The file to read, UTF-8 encoded.
        require_polynomial: Whether a model polynomial must be declared.

    Returns:
        The parsed declarations.

    Raises:
        OSError: If the file cannot be read.
    """
    text = path.read_text(encoding="utf-8")
    logger.info("Loaded domain file %s", path)
    return parse_domain_text(text, path, require_polynomial=require_polynomial)
