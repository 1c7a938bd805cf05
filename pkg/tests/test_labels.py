import pytest

from protomata.errors import ContractError, ParseError
from protomata.labels import Direction, Label, inc, neutral, out, parse_label


def test_label_forms():
    assert str(inc("Lock")) == "INC:Lock"
    assert str(out("LockF1")) == "OUT:LockF1"
    assert str(neutral("Read")) == "Read"
    assert str(inc("Lock", "F")) == "INC:Lock<F>"


@pytest.mark.parametrize("text,expected", [
    ("INC:Lock", inc("Lock")),
    ("INC: Lock", inc("Lock")),
    ("OUT:LockF1", out("LockF1")),
    ("Read", neutral("Read")),
    ("INC:Lock<F>", inc("Lock", "F")),
    ("Lock<F>", neutral("Lock", "F")),
])
def test_parse_label(text, expected):
    assert parse_label(text) == expected


def test_parse_label_round_trip():
    for label in (inc("Lock"), out("UnlockF2"), neutral("brake"), inc("Read", "F")):
        assert parse_label(str(label)) == label


@pytest.mark.parametrize("bad", ["", "a b", "a.b", "x*", "p(q", "a:b", "<F>"])
def test_reserved_characters_rejected(bad):
    with pytest.raises(ContractError):
        Label(Direction.NEUTRAL, bad)


def test_empty_parameter_rejected():
    with pytest.raises(ContractError):
        Label(Direction.INC, "Lock", "")


def test_parse_label_bad_direction():
    with pytest.raises(ParseError):
        parse_label("FOO:Lock")


def test_with_instance_concatenates():
    assert inc("Lock", "F").with_instance("F1") == inc("LockF1")
    assert out("Unlock", "F").with_instance("f0") == out("Unlockf0")
    assert inc("Lock").with_instance("F1") == inc("Lock")


def test_labels_differ_by_direction():
    assert inc("newPrtcl") != out("newPrtcl")
    assert neutral("newPrtcl") != out("newPrtcl")
