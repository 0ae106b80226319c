"""Reader and writer for the ``.crn`` text format.

One reaction per line, ``#`` starts a comment::

    E + S0 <-> ES0 -> E + S1     # chains expand left to right
    N -> 2N
    P -> 0
    @intermediates ES0, FS1
    @catalysts E
    @ptm enz=E,F sub=S0,S1 int=ES0,FS1
    @rate N + P -> P = 1/2
    @rate default = 1
    @init N = 1
    @assume-dissipative

Coefficients are positive integers or ``p/q`` fractions; decimals are
rejected so that nothing is rounded silently.  Rates and initial values
accept decimals since they feed numerical integration only.
"""

from __future__ import annotations

import re
from importlib import resources
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import (
    NegativeOrZeroCoefficientError,
    NetworkError,
    ParseError,
    UnknownSpeciesInAnnotationError,
)
from .network import Complex, Reaction, ReactionNetwork
from .ptm import CascadeSpec, PTMPartition

_NAME = r"[A-Za-z_][A-Za-z0-9_^'.\[\]]*"
_NAME_RE = re.compile(_NAME)
_TERM_RE = re.compile(rf"\s*(?P<coef>\d+(?:/\d+)?)?\s*(?P<name>{_NAME})\s*")
_ARROW_RE = re.compile(r"<->|->")
_VALUE_RE = re.compile(r"\s*(?:\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\d+/\d+)\s*$")


@dataclass(frozen=True)
class NetworkDocument:
    network: ReactionNetwork
    intermediates: frozenset[str] | None = None
    catalysts: frozenset[str] | None = None
    layers: tuple[PTMPartition, ...] = ()
    rates: tuple[tuple[Reaction, Fraction], ...] = ()
    default_rate: Fraction | None = None
    init: tuple[tuple[str, Fraction], ...] = ()
    assume_dissipative: bool = False
    name: str | None = field(default=None, compare=False)

    @property
    def cascade(self) -> CascadeSpec | None:
        return CascadeSpec(self.layers) if self.layers else None

    def rate_of(self, r: Reaction) -> Fraction:
        for known, k in self.rates:
            if known == r:
                return k
        return self.default_rate if self.default_rate is not None else Fraction(1)

    def initial_value(self, species: str) -> Fraction:
        for s, v in self.init:
            if s == species:
                return v
        return Fraction(1)


def _parse_complex(text: str, line: int, col: int) -> Complex:
    stripped = text.strip()
    if stripped == "0":
        return Complex()
    if not stripped:
        raise ParseError(line, col, "a complex", text)
    terms = []
    offset = 0
    for part in text.split("+"):
        pcol = col + offset
        offset += len(part) + 1
        if re.match(r"\s*-", part):
            raise NegativeOrZeroCoefficientError(line, pcol, "a positive coefficient", part.strip())
        if re.match(r"\s*\d*\.\d", part):
            raise ParseError(line, pcol, "an integer or p/q coefficient (decimals are not allowed)", part.strip())
        m = _TERM_RE.fullmatch(part)
        if m is None:
            raise ParseError(line, pcol, "[coefficient] species-name", part.strip())
        coef = m.group("coef")
        if coef is None:
            value = Fraction(1)
        else:
            num, _, den = coef.partition("/")
            if den and int(den) == 0:
                raise ParseError(line, pcol, "a nonzero denominator", coef)
            value = Fraction(int(num), int(den) if den else 1)
        if value <= 0:
            raise NegativeOrZeroCoefficientError(line, pcol, "a positive coefficient", part.strip())
        terms.append((m.group("name"), value))
    return Complex(terms)


def _parse_reaction_line(text: str, line: int) -> list[Reaction]:
    pieces = _ARROW_RE.split(text)
    arrows = _ARROW_RE.findall(text)
    if not arrows:
        raise ParseError(line, 1, "'->' or '<->'", text.strip())
    complexes = []
    col = 1
    for k, piece in enumerate(pieces):
        complexes.append(_parse_complex(piece, line, col))
        col += len(piece) + (len(arrows[k]) if k < len(arrows) else 0)
    out = []
    for k, arrow in enumerate(arrows):
        a, b = complexes[k], complexes[k + 1]
        if a == b:
            raise ParseError(line, 1, "distinct reactant and product (self-loop)", text.strip())
        out.append(Reaction(a, b))
        if arrow == "<->":
            out.append(Reaction(b, a))
    return out


def _name_list(text: str, line: int, col: int) -> list[str]:
    names = [n for n in re.split(r"[,\s]+", text.strip()) if n]
    for n in names:
        if not _NAME_RE.fullmatch(n):
            raise ParseError(line, col, "a species name", n)
    return names


def _value(text: str, line: int, col: int) -> Fraction:
    if not _VALUE_RE.match(text):
        raise ParseError(line, col, "a nonnegative number", text.strip())
    return Fraction(text.strip())


def parse(text: str, name: str | None = None) -> NetworkDocument:
    reactions: list[Reaction] = []
    seen: dict[Reaction, int] = {}
    annotations = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        if body.lstrip().startswith("@"):
            annotations.append((lineno, body.strip()))
            continue
        for r in _parse_reaction_line(body, lineno):
            if r in seen:
                raise ParseError(lineno, 1, f"a reaction not already given on line {seen[r]}", str(r))
            seen[r] = lineno
            reactions.append(r)
    try:
        net = ReactionNetwork(reactions)
    except NetworkError as exc:  # pragma: no cover - guarded above
        raise ParseError(0, 0, str(exc)) from exc

    def known(names, lineno):
        for n in names:
            if not net.has_species(n):
                raise UnknownSpeciesInAnnotationError(lineno, 1, f"a species of the network, not {n!r}")
        return names

    doc = dict(intermediates=None, catalysts=None, layers=[], rates=[], default_rate=None, init=[],
               assume_dissipative=False)
    for lineno, ann in annotations:
        keyword, _, rest = ann[1:].partition(" ")
        col = len(keyword) + 2
        if keyword in ("intermediates", "catalysts"):
            doc[keyword] = frozenset(known(_name_list(rest, lineno, col), lineno))
        elif keyword == "ptm":
            fields = {"enz": [], "sub": [], "int": []}
            for chunk in rest.split():
                key, eq, vals = chunk.partition("=")
                if not eq or key not in fields:
                    raise ParseError(lineno, col, "enz=..., sub=... or int=...", chunk)
                fields[key] = known(_name_list(vals.replace(",", " "), lineno, col), lineno)
            doc["layers"].append(PTMPartition.of(fields["enz"], fields["sub"], fields["int"]))
        elif keyword == "rate":
            target, eq, value = rest.rpartition("=")
            if not eq:
                raise ParseError(lineno, col, "'<reaction> = <rate>' or 'default = <rate>'", rest)
            k = _value(value, lineno, col + len(target) + 1)
            if k <= 0:
                raise ParseError(lineno, col, "a positive rate constant", value.strip())
            if target.strip() == "default":
                doc["default_rate"] = k
                continue
            rs = _parse_reaction_line(target, lineno)
            if len(rs) != 1 or rs[0] not in seen:
                raise ParseError(lineno, col, "a single reaction of the network", target.strip())
            doc["rates"].append((rs[0], k))
        elif keyword == "init":
            target, eq, value = rest.partition("=")
            if not eq:
                raise ParseError(lineno, col, "'<species> = <value>'", rest)
            names = known(_name_list(target, lineno, col), lineno)
            if len(names) != 1:
                raise ParseError(lineno, col, "exactly one species name", target.strip())
            doc["init"].append((names[0], _value(value, lineno, col + len(target) + 1)))
        elif keyword == "assume-dissipative":
            doc["assume_dissipative"] = True
        else:
            raise ParseError(lineno, 1, "a known annotation", "@" + keyword)
    return NetworkDocument(
        network=net,
        intermediates=doc["intermediates"],
        catalysts=doc["catalysts"],
        layers=tuple(doc["layers"]),
        rates=tuple(doc["rates"]),
        default_rate=doc["default_rate"],
        init=tuple(doc["init"]),
        assume_dissipative=doc["assume_dissipative"],
        name=name,
    )


def load(path) -> NetworkDocument:
    path = Path(path)
    return parse(path.read_text(encoding="utf-8"), name=path.stem)


def parse_network(text: str) -> ReactionNetwork:
    return parse(text).network


def _names(names, net) -> str:
    return ", ".join(sorted(names, key=net.index))


def format_document(doc: NetworkDocument) -> str:
    net = doc.network
    lines = [str(r) for r in net.reactions]
    if doc.intermediates is not None:
        lines.append(f"@intermediates {_names(doc.intermediates, net)}")
    if doc.catalysts is not None:
        lines.append(f"@catalysts {_names(doc.catalysts, net)}")
    for part in doc.layers:
        chunks = [f"enz={','.join(sorted(part.enzymes, key=net.index))}",
                  f"sub={','.join(sorted(part.substrates, key=net.index))}"]
        if part.intermediates:
            chunks.append(f"int={','.join(sorted(part.intermediates, key=net.index))}")
        lines.append("@ptm " + " ".join(chunks))
    if doc.default_rate is not None:
        lines.append(f"@rate default = {doc.default_rate}")
    lines.extend(f"@rate {r} = {k}" for r, k in doc.rates)
    lines.extend(f"@init {s} = {v}" for s, v in doc.init)
    if doc.assume_dissipative:
        lines.append("@assume-dissipative")
    return "\n".join(lines) + "\n"


def format_network(net: ReactionNetwork) -> str:
    return format_document(NetworkDocument(net))


def corpus_dir() -> Path:
    """Directory of the bundled example networks."""
    return Path(str(resources.files("crnpersist") / "corpus"))


def corpus_names() -> list[str]:
    return sorted(p.stem for p in corpus_dir().glob("*.crn"))


def load_example(name: str) -> NetworkDocument:
    return load(corpus_dir() / f"{name}.crn")
