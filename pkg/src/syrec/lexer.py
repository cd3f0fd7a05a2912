"""Tokenizer for SyReC source text."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Union

from .errors import LexError

KEYWORDS = frozenset(
    """module in out inout wire state call uncall for do to step rof
    if then else fi skip""".split()
)

# Longest operators first so that matching is greedy.
OPERATORS = {
    "<=>": "SWAPOP",
    "<=": "LE",
    ">=": "GE",
    "!=": "NE",
    "<<": "SHL",
    ">>": "SHR",
    "++": "INC",
    "--": "DEC",
    "&&": "LAND",
    "||": "LOR",
    "+=": "ADDEQ",
    "-=": "SUBEQ",
    "^=": "XOREQ",
    "+": "PLUS",
    "-": "MINUS",
    "*": "STAR",
    "/": "SLASH",
    "^": "CARET",
    "&": "AMP",
    "|": "PIPE",
    "~": "TILDE",
    "!": "BANG",
    "<": "LT",
    ">": "GT",
    "=": "EQ",
    "(": "LPAREN",
    ")": "RPAREN",
    "[": "LBRACK",
    "]": "RBRACK",
    ",": "COMMA",
    ";": "SEMI",
    ".": "DOT",
    ":": "COLON",
    "#": "HASH",
    "$": "DOLLAR",
}
_OPS_BY_LENGTH = sorted(OPERATORS, key=len, reverse=True)


@dataclass(frozen=True)
class Token:
    kind: str  # "IDENT", "INT", "KEYWORD", "EOF" or an operator name
    text: str
    line: int
    col: int

    @property
    def pos(self):
        return (self.line, self.col)


def tokenize(source: Union[str, bytes]) -> List[Token]:
    """Split ``source`` into tokens, dropping whitespace and comments.

    The returned list does not include an end-of-file marker; the parser
    appends its own.
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8-sig")
    tokens: List[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def advance(count: int) -> None:
        nonlocal i, line, col
        for ch in source[i : i + count]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += count

    while i < n:
        ch = source[i]
        if ch in " \t\r\n\f\v":
            advance(1)
            continue
        if source.startswith("//", i):
            end = source.find("\n", i)
            advance((end if end != -1 else n) - i)
            continue
        if source.startswith("/*", i):
            end = source.find("*/", i + 2)
            if end == -1:
                raise LexError("unterminated comment", (line, col), kind="UnterminatedComment")
            advance(end + 2 - i)
            continue
        if ch == "_" or ch.isascii() and ch.isalpha():
            j = i + 1
            while j < n and (source[j] == "_" or source[j].isascii() and source[j].isalnum()):
                j += 1
            text = source[i:j]
            kind = "KEYWORD" if text in KEYWORDS else "IDENT"
            tokens.append(Token(kind, text, line, col))
            advance(j - i)
            continue
        if ch.isascii() and ch.isdigit():
            j = i + 1
            while j < n and source[j].isascii() and source[j].isdigit():
                j += 1
            tokens.append(Token("INT", source[i:j], line, col))
            advance(j - i)
            continue
        for op in _OPS_BY_LENGTH:
            if source.startswith(op, i):
                tokens.append(Token(OPERATORS[op], op, line, col))
                advance(len(op))
                break
        else:
            raise LexError(f"unknown character {ch!r}", (line, col))
    return tokens
