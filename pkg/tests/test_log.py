# tests/test_log.py

import logging

import pytest

from tclflex import log


def test_indented():
    # default n_spaces is 2
    assert log.indented("foo") == "  foo"
    assert log.indented("foo", 3) == "   foo"


def test_join_lines():
    assert log.join_lines(["one", "two"]) == "one\ntwo"
    assert log.join_lines(["one"]) == "one"
    assert log.join_lines([""]) == ""


def test_add_blankline_before():
    assert log.add_blankline_before("foo") == "\nfoo"
    assert log.add_blankline_before("") == "\n"


format_number_testdata = [
    # value, expected
    (0.51, "0.51"),
    (510.00000000000006, "510"),
    (1000.0, "1000"),
    (0.7142857142857143, "0.714286"),
    (1.2244897959183674, "1.22449"),
    (1234567.0, "1.23457e+06"),
    (0.0, "0"),
    (-2.5, "-2.5"),
]


@pytest.mark.parametrize("value, expected", format_number_testdata)
def test_format_number(value, expected):
    assert log.format_number(value) == expected


def test_format_optional_number():
    assert log.format_optional_number(None) == "-"
    assert log.format_optional_number(None, missing="") == ""
    assert log.format_optional_number(0.25) == "0.25"


def test_format_table():
    table = log.format_table([["Class", "Watts"], ["fridge", "510"]])

    lines = table.splitlines()
    assert lines[0].split() == ["Class", "Watts"]
    assert set(lines[1]) <= {"-", " "}
    assert lines[2].split() == ["fridge", "510"]


def test_format_table_no_header():
    table = log.format_table_no_header([["Scheme", "indiv"], ["Threshold", "0.5 h"]])

    lines = table.splitlines()
    assert len(lines) == 2
    assert lines[0].split() == ["Scheme", "indiv"]
    assert lines[1].split() == ["Threshold", "0.5", "h"]


def test_format_table_keeps_number_text():
    # numbers are formatted upstream and must not be re-parsed by tabulate
    table = log.format_table_no_header([["Average", "1.23457e+06"]])

    assert "1.23457e+06" in table


def test_configure_logging_levels(monkeypatch):
    calls = []
    monkeypatch.setattr(
        logging, "basicConfig", lambda **kwargs: calls.append(kwargs["level"])
    )

    log.configure_logging(debug=True)
    log.configure_logging(debug=False)

    assert calls == [logging.DEBUG, logging.INFO]
