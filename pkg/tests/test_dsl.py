"""Surface syntax: loading, printing, and the print/parse fixpoint."""
import pathlib

import pytest

from rasv.dsl import ParseError, dumps, load, loads
from rasv.fragments import classify
from rasv.search import breach

SPECS = pathlib.Path(__file__).resolve().parent.parent / "specs"
FILES = sorted(SPECS.glob("*.ras"))


def test_ships_both_benchmarks():
    names = {load(str(p)).name for p in FILES}
    assert "job-hiring" in names
    assert "flight-management" in names


@pytest.mark.parametrize("path", FILES, ids=lambda p: p.stem)
def test_print_parse_fixpoint(path):
    text = dumps(load(str(path)))
    assert dumps(loads(text)) == text


@pytest.mark.parametrize("path", FILES, ids=lambda p: p.stem)
def test_reprint_preserves_meaning(path):
    original = load(str(path))
    reparsed = loads(dumps(original))
    assert reparsed.name == original.name
    assert set(reparsed.properties) == set(original.properties)
    # the printer canonicalizes every transition to its raw form, which
    # drops shape certificates but must not change any semantic judgement
    a, b = classify(original).to_json(), classify(reparsed).to_json()
    for key in ("acyclic", "tree_like", "sas", "properties"):
        assert a[key] == b[key]


def test_reprint_preserves_verdicts(flight):
    reparsed = loads(dumps(flight))
    for prop in ("phantom-flight", "any-registration"):
        assert breach(reparsed, prop).verdict == breach(flight, prop).verdict


GOOD = (SPECS / "flight.ras").read_text()


@pytest.mark.parametrize("label,mutation", [
    ("unknown declaration", ("id sort CityId", "idx sort CityId")),
    ("unknown sort", ("FlightId -> CityId", "FlightId -> Nowhere")),
    ("stray operator", ("guard c != undef", "guard c !== undef")),
    ("unknown component", ("regdPassenger[q] != undef and destination",
                           "ghost[q] != undef and destination")),
    ("unbalanced braces", (GOOD[-2:], "")),
])
def test_parse_errors(label, mutation):
    old, new = mutation
    bad = GOOD.replace(old, new)
    assert bad != GOOD
    with pytest.raises(ParseError):
        loads(bad)


def test_duplicate_names_rejected():
    reg = GOOD[GOOD.index("transition register"):GOOD.index("# three")]
    with pytest.raises(ParseError, match="duplicate transition"):
        loads(GOOD + "\n" + reg)
    prop = GOOD[GOOD.index("property any-registration"):]
    with pytest.raises(ParseError, match="duplicate property"):
        loads(GOOD + "\n" + prop)


def test_load_missing_file(tmp_path):
    with pytest.raises(OSError):
        load(str(tmp_path / "nope.ras"))
