from importlib import resources

import pytest

from cei_ground import operad_fixture as of

DEFECT_KEY, DEFECT_AB = (0, 3, 0, 0, 3, 0), (0, 0)


def test_packaged_fixture_is_the_frozen_sign_choice():
    text = resources.files("cei_ground.data").joinpath(of.TORUS_FILE).read_text()
    assert text == of.torus_fixture_text(of.TORUS_SIGNS)
    assert of.TORUS_SIGNS == (1, 1, 1, 1)


def test_text_round_trip():
    for F in (of.torus_fixture(), of.disk_fixture(), of.trivial_fixture()):
        assert of.OperadFixture.from_text(F.to_text()) == F


def test_torus_dimensions_and_degrees():
    F = of.torus_fixture()
    assert F.dim(0, 3) == 16 and F.dim(1, 1) == 4
    assert sorted(F.deg(0, 3, a) for a in range(F.dim(0, 3)))[-1] == 4


@pytest.mark.parametrize("name", ["torus", "disk", "trivial"])
def test_axioms_hold_on_small_box(name):
    F = {"torus": of.torus_fixture, "disk": of.disk_fixture, "trivial": of.trivial_fixture}[name]()
    rep = of.validate_s1_modular_axioms(F, (1, 3))
    assert rep.ok, rep.lines()


def test_negated_entry_is_detected_with_witness():
    bad = of.negate_entry(of.torus_fixture(), DEFECT_KEY, DEFECT_AB)
    rep = of.validate_s1_modular_axioms(bad, (1, 4))
    assert not rep.ok
    failing = [name for name, r in rep.results.items() if not r.ok]
    assert "circle_equivariance" in failing
    assert all(rep.results[n].witness for n in failing)


@pytest.mark.parametrize("text", ["garbage\n", "fixture t\nspace 0 3 x\n", "fixture t\nspace 0 3 2\ndegrees 0 3 0\n"])
def test_malformed_text_is_rejected(text):
    with pytest.raises(of.FixtureFormatError):
        of.OperadFixture.from_text(text)


def test_load_fixture_from_path(tmp_path):
    path = tmp_path / "t.fixture"
    path.write_text(of.torus_fixture().to_text())
    assert of.load_fixture(path) == of.torus_fixture()
