from fractions import Fraction as F

import pytest

from gameminer.config import THREADS_ENV, thread_cap
from gameminer.utils import decimal_str, die, fmt_scalar, parallel_map


def test_fmt_scalar():
    assert fmt_scalar(F(5, 3)) == "5/3"
    assert fmt_scalar(F(4, 2)) == "2"
    assert fmt_scalar(F(-1, 2)) == "-1/2"


def test_decimal_str():
    assert decimal_str(F(1, 3)) == "0.3333333333"
    assert decimal_str(F(-2, 3), 4) == "-0.6667"
    assert decimal_str(F(299, 50)) == "5.98"
    assert decimal_str(F(0)) == "0"


def test_thread_cap(monkeypatch):
    assert thread_cap() == 1
    monkeypatch.setenv(THREADS_ENV, "4")
    assert thread_cap() == 4
    monkeypatch.setenv(THREADS_ENV, "many")
    assert thread_cap() == 1
    monkeypatch.setenv(THREADS_ENV, "0")
    assert thread_cap() == 1


def test_parallel_map_keeps_order(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "4")
    assert parallel_map(lambda x: x * x, range(20)) == [x * x for x in range(20)]
    assert parallel_map(str, []) == []


def test_die_exits_with_code(capsys):
    with pytest.raises(SystemExit) as e:
        die("boom", 3)
    assert e.value.code == 3
    assert "boom" in capsys.readouterr().err
