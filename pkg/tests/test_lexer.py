import pytest

from syrec.errors import LexError
from syrec.lexer import tokenize


def kinds(src):
    return [t.kind for t in tokenize(src)]


def test_keywords_and_identifiers():
    toks = tokenize("module rof fi skip call foo_1")
    assert [t.kind for t in toks] == ["KEYWORD"] * 5 + ["IDENT"]
    assert toks[-1].text == "foo_1"


def test_longest_operator_wins():
    assert kinds("<=> <= << < ++ += +") == ["SWAPOP", "LE", "SHL", "LT", "INC", "ADDEQ", "PLUS"]


def test_positions_are_one_based():
    toks = tokenize("a\n  b")
    assert toks[0].pos == (1, 1)
    assert toks[1].pos == (2, 3)


def test_comments_are_skipped():
    assert kinds("a // x += y\n/* multi\nline */ b") == ["IDENT", "IDENT"]


def test_unterminated_comment():
    with pytest.raises(LexError) as exc:
        tokenize("a /* never closed")
    assert exc.value.kind == "UnterminatedComment"


def test_unknown_character():
    with pytest.raises(LexError) as exc:
        tokenize("a @ b")
    assert exc.value.kind == "UnknownCharacter"
    assert exc.value.pos == (1, 3)


def test_bytes_input():
    assert kinds(b"x ^= 1") == ["IDENT", "XOREQ", "INT"]
