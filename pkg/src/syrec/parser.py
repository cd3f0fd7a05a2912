"""Recursive-descent parser producing :mod:`syrec.nodes` trees."""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple, Union

from .errors import ParseError
from .lexer import Token, tokenize
from .nodes import (
    Assign,
    Binary,
    Call,
    Expression,
    For,
    If,
    Lit,
    LoopVar,
    Module,
    Number,
    NumberExpr,
    NumBinary,
    Program,
    Shift,
    SignalAccess,
    SignalDecl,
    Skip,
    Statement,
    Swap,
    Unary,
    UnaryStmt,
    WidthOf,
)

_BINARY_TOKENS = {
    "PLUS": "+",
    "MINUS": "-",
    "CARET": "^",
    "STAR": "*",
    "SLASH": "/",
    "LAND": "&&",
    "LOR": "||",
    "AMP": "&",
    "PIPE": "|",
    "LT": "<",
    "GT": ">",
    "EQ": "=",
    "NE": "!=",
    "LE": "<=",
    "GE": ">=",
}
_NUMBER_OPS = {"PLUS": "+", "MINUS": "-", "STAR": "*", "SLASH": "/"}
_ASSIGN_TOKENS = {"XOREQ": "^", "ADDEQ": "+", "SUBEQ": "-"}
_SPLIT_ASSIGN = {"CARET": "^", "PLUS": "+", "MINUS": "-"}
_STATEMENT_START = {"IDENT", "TILDE", "INC", "DEC"}
_STATEMENT_KEYWORDS = {"call", "uncall", "for", "if", "skip"}


class Parser:
    def __init__(self, tokens: Sequence[Token]):
        self.tokens = list(tokens)
        last = self.tokens[-1] if self.tokens else None
        eof_pos = (last.line, last.col + len(last.text)) if last else (1, 1)
        self.tokens.append(Token("EOF", "", *eof_pos))
        self.i = 0

    # -- token helpers --------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def at_kw(self, *words: str) -> bool:
        return self.tok.kind == "KEYWORD" and self.tok.text in words

    def fail(self, expected: Sequence[str]):
        t = self.tok
        found = "end of input" if t.kind == "EOF" else repr(t.text)
        raise ParseError(f"expected {' or '.join(expected)}, found {found}", t.pos, expected)

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        if not self.at(kind, text):
            self.fail([text or kind])
        t = self.tok
        self.i += 1
        return t

    def expect_kw(self, word: str) -> Token:
        return self.expect("KEYWORD", word)

    # -- program structure ----------------------------------------------------

    def program(self) -> Program:
        modules = [self.module()]
        while self.at_kw("module"):
            modules.append(self.module())
        if not self.at("EOF"):
            self.fail(["module", "end of input"])
        return Program(tuple(modules))

    def module(self) -> Module:
        start = self.expect_kw("module")
        name = self.expect("IDENT").text
        self.expect("LPAREN")
        params: List[SignalDecl] = []
        if not self.at("RPAREN"):
            params.append(self.parameter())
            while self.at("COMMA"):
                self.i += 1
                params.append(self.parameter())
        self.expect("RPAREN")
        locals_: List[SignalDecl] = []
        while self.at_kw("wire", "state"):
            modifier = self.tok.text
            self.i += 1
            locals_.append(self.declaration(modifier))
            while self.at("COMMA"):
                self.i += 1
                locals_.append(self.declaration(modifier))
        body = self.statement_list()
        return Module(name, tuple(params), tuple(locals_), body, start.pos)

    def parameter(self) -> SignalDecl:
        if not self.at_kw("in", "out", "inout"):
            self.fail(["in", "out", "inout"])
        modifier = self.tok.text
        self.i += 1
        return self.declaration(modifier)

    def declaration(self, modifier: str) -> SignalDecl:
        ident = self.expect("IDENT")
        dims = []
        while self.at("LBRACK"):
            self.i += 1
            dims.append(int(self.expect("INT").text))
            self.expect("RBRACK")
        width = None
        if self.at("LPAREN"):
            self.i += 1
            width = int(self.expect("INT").text)
            self.expect("RPAREN")
        return SignalDecl(ident.text, modifier, tuple(dims), width, ident.pos)

    # -- statements -----------------------------------------------------------

    def starts_statement(self) -> bool:
        t = self.tok
        return t.kind in _STATEMENT_START or (t.kind == "KEYWORD" and t.text in _STATEMENT_KEYWORDS)

    def statement_list(self) -> Tuple[Statement, ...]:
        stmts = [self.statement()]
        while True:
            if self.at("SEMI"):
                self.i += 1
                while self.at("SEMI"):
                    self.i += 1
                if not self.starts_statement():
                    break
            elif not self.starts_statement():
                break
            stmts.append(self.statement())
        return tuple(stmts)

    def statement(self) -> Statement:
        t = self.tok
        if t.kind == "KEYWORD":
            if t.text in ("call", "uncall"):
                return self.call_statement()
            if t.text == "for":
                return self.for_statement()
            if t.text == "if":
                return self.if_statement()
            if t.text == "skip":
                self.i += 1
                return Skip(t.pos)
        if t.kind in ("TILDE", "INC", "DEC"):
            self.i += 1
            self.expect("EQ")
            return UnaryStmt(t.text, self.signal(), t.pos)
        if t.kind == "IDENT":
            lhs = self.signal()
            if self.at("SWAPOP"):
                self.i += 1
                return Swap(lhs, self.signal(), t.pos)
            if self.tok.kind in _ASSIGN_TOKENS:
                op = _ASSIGN_TOKENS[self.tok.kind]
                self.i += 1
            elif self.tok.kind in _SPLIT_ASSIGN and self.peek().kind == "EQ":
                op = _SPLIT_ASSIGN[self.tok.kind]
                self.i += 2
            else:
                self.fail(["<=>", "^=", "+=", "-="])
            return Assign(lhs, op, self.expression(), t.pos)
        self.fail(["statement"])

    def call_statement(self) -> Call:
        t = self.tok
        self.i += 1
        name = self.expect("IDENT").text
        self.expect("LPAREN")
        args = []
        if not self.at("RPAREN"):
            args.append(self.expect("IDENT").text)
            while self.at("COMMA"):
                self.i += 1
                args.append(self.expect("IDENT").text)
        self.expect("RPAREN")
        return Call(t.text, name, tuple(args), t.pos)

    def for_statement(self) -> For:
        t = self.expect_kw("for")
        var = None
        if self.at("DOLLAR"):
            self.i += 1
            var = self.expect("IDENT").text
            self.expect("EQ")
            start: Optional[Expression] = self.expression()
            self.expect_kw("to")
            stop = self.expression()
        else:
            first = self.expression()
            if self.at_kw("to"):
                self.i += 1
                start, stop = first, self.expression()
            else:
                start, stop = None, first
        step = None
        negative = False
        if self.at_kw("step"):
            self.i += 1
            if self.at("MINUS"):
                self.i += 1
                negative = True
            step = self.number()
        if self.at_kw("do"):
            self.i += 1
        body = self.statement_list()
        self.expect_kw("rof")
        return For(var, start, stop, step, negative, body, t.pos)

    def if_statement(self) -> If:
        t = self.expect_kw("if")
        cond = self.expression()
        self.expect_kw("then")
        then_body = self.statement_list()
        self.expect_kw("else")
        else_body = self.statement_list()
        self.expect_kw("fi")
        fi_cond = self.expression()
        return If(cond, then_body, else_body, fi_cond, t.pos)

    # -- signals, expressions, numbers -----------------------------------------

    def signal(self) -> SignalAccess:
        ident = self.expect("IDENT")
        indices = []
        while self.at("LBRACK"):
            self.i += 1
            indices.append(self.expression())
            self.expect("RBRACK")
        lo = hi = None
        if self.at("DOT"):
            self.i += 1
            lo = hi = self.number()
            if self.at("COLON"):
                self.i += 1
                hi = self.number()
        return SignalAccess(ident.text, tuple(indices), lo, hi, ident.pos)

    def expression(self) -> Expression:
        t = self.tok
        if t.kind in ("INT", "HASH", "DOLLAR"):
            return Number(self.number(), t.pos)
        if t.kind == "IDENT":
            return self.signal()
        if t.kind in ("BANG", "TILDE"):
            self.i += 1
            return Unary(t.text, self.expression(), t.pos)
        if t.kind == "LPAREN":
            self.i += 1
            lhs = self.expression()
            op_tok = self.tok
            if op_tok.kind in ("SHL", "SHR"):
                self.i += 1
                amount = self.number()
                self.expect("RPAREN")
                return Shift(op_tok.text, lhs, amount, t.pos)
            if op_tok.kind not in _BINARY_TOKENS:
                self.fail(sorted(set(_BINARY_TOKENS.values())) + ["<<", ">>"])
            self.i += 1
            rhs = self.expression()
            self.expect("RPAREN")
            op = _BINARY_TOKENS[op_tok.kind]
            if isinstance(lhs, Number) and isinstance(rhs, Number) and op_tok.kind in _NUMBER_OPS:
                return Number(NumBinary(op, lhs.value, rhs.value, t.pos), t.pos)
            return Binary(op, lhs, rhs, t.pos)
        self.fail(["expression"])

    def number(self) -> NumberExpr:
        t = self.tok
        if t.kind == "INT":
            self.i += 1
            return Lit(int(t.text), t.pos)
        if t.kind == "HASH":
            self.i += 1
            return WidthOf(self.expect("IDENT").text, t.pos)
        if t.kind == "DOLLAR":
            self.i += 1
            return LoopVar(self.expect("IDENT").text, t.pos)
        if t.kind == "LPAREN":
            self.i += 1
            lhs = self.number()
            if self.tok.kind not in _NUMBER_OPS:
                self.fail(list(_NUMBER_OPS.values()))
            op = _NUMBER_OPS[self.tok.kind]
            self.i += 1
            rhs = self.number()
            self.expect("RPAREN")
            return NumBinary(op, lhs, rhs, t.pos)
        self.fail(["number"])


def parse(tokens: Union[Sequence[Token], str]) -> Program:
    """Parse a token stream (or raw source text) into a :class:`Program`."""
    if isinstance(tokens, str):
        tokens = tokenize(tokens)
    return Parser(tokens).program()


def parse_source(source: str) -> Program:
    return parse(tokenize(source))
