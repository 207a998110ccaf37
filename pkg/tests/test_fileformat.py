from fractions import Fraction as F

import pytest

from gameminer.errors import ParseError
from gameminer.fileformat import (
    MenuSettings, parse_game_file, parse_number, serialize_game, serialize_game_file,
)
from gameminer.game_core import A, B, Game


def test_parse_number_exact():
    assert parse_number("1/2") == F(1, 2)
    assert parse_number(".49") == F(49, 100)
    assert parse_number("-.5") == F(-1, 2)
    assert parse_number("2.99") == F(299, 100)
    assert parse_number("+3") == 3


@pytest.mark.parametrize("tok", ["1e3", "abc", "1/", "0x10", "1//2"])
def test_parse_number_rejects(tok):
    with pytest.raises(ParseError):
        parse_number(tok)


def test_zero_denominator():
    with pytest.raises(ParseError) as e:
        parse_number("3/0", 4, 7)
    assert (e.value.line, e.value.col) == (4, 7)


def test_fixture_file(cell_phone):
    g = cell_phone.game
    assert g.row_labels == ("H", "L")
    assert g.payoff_B == ((F(1, 2), 0), (0, 1))
    eps100 = cell_phone.contract("eps100")
    assert eps100.payer == A
    assert eps100.transfers == ((F(3, 2), F(49, 100)), (0, F(-1, 2)))
    assert cell_phone.contracts_of(B) == ()
    assert cell_phone.menu == MenuSettings(epsilon=F(1, 100), steps=4)
    with pytest.raises(KeyError):
        cell_phone.contract("missing")


def test_comments_and_blank_lines():
    text = "# header\n\ngame 1 2   # shape\nA:\n1 2\n\nB:\n3 4 # trailing\n"
    gf = parse_game_file(text)
    assert gf.game.payoff_B == ((3, 4),)
    assert gf.menu == MenuSettings()


def _err(text):
    with pytest.raises(ParseError) as e:
        parse_game_file(text)
    return e.value


def test_short_row_reports_position():
    e = _err("game 2 2\nA:\n1 2\n0\nB:\n0 0\n0 0\n")
    assert e.line == 4
    assert "row 2 of payoff A" in str(e)


def test_bad_entry_reports_column():
    e = _err("game 1 2\nA:\n1 x\nB:\n0 0\n")
    assert (e.line, e.col) == (3, 3)


def test_structural_errors():
    assert "header" in str(_err("A:\n1\n"))
    assert "missing payoff block" in str(_err("game 1 1\nA:\n1\n"))
    assert "second payoff block" in str(_err("game 1 1\nA:\n1\nA:\n2\nB:\n0\n"))
    assert "labels" in str(_err("game 1 2\nlabels B: x\nA:\n1 2\nB:\n0 0\n"))
    assert "payer" in str(_err("game 1 1\nA:\n1\nB:\n0\ncontract c payer=G:\n1\n"))
    assert "duplicate" in str(_err("game 1 1\nA:\n1\nB:\n0\ncontract c payer=A:\n1\ncontract c payer=B:\n1\n"))
    assert "unknown menu" in str(_err("game 1 1\nA:\n1\nB:\n0\nmenu speed=3\n"))
    assert "epsilon" in str(_err("game 1 1\nA:\n1\nB:\n0\nmenu epsilon=0\n"))
    assert "unexpected" in str(_err("game 1 1\nA:\n1\nB:\n0\nplayers 2\n"))
    assert "file ended" in str(_err("game 2 1\nA:\n1\n"))


def test_menu_line():
    gf = parse_game_file("game 1 1\nA:\n1\nB:\n0\nmenu epsilon=1/1000 steps=0 restrict fixtures-only\n")
    assert gf.menu == MenuSettings(F(1, 1000), 0, True, True)


def test_serialize_round_trip(dual_offer):
    text = serialize_game_file(dual_offer)
    again = parse_game_file(text)
    assert again.game == dual_offer.game
    assert again.contracts == dual_offer.contracts
    assert "labels A: x y z" in text
    assert "299/100" in text


def test_serialize_omits_default_labels():
    text = serialize_game(Game([[1, 2]], [[F(1, 2), 0]]), menu=MenuSettings(steps=2))
    assert "labels" not in text
    assert text.splitlines()[-1] == "menu steps=2"
    assert parse_game_file(text).game.payoff_B == ((F(1, 2), 0),)


def test_serialize_rejects_spaced_labels():
    g = Game([[1]], [[1]], ("two words",), ("c",))
    with pytest.raises(ValueError):
        serialize_game(g)
