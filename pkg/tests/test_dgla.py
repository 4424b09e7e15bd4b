from fractions import Fraction

import pytest

from cei_ground import dgla as dl
from cei_ground import operad_fixture as of
from cei_ground import stable_graphs as sg

INITIAL = {(0, (0, 0, 0)): 1}


@pytest.fixture(scope="module")
def torus():
    return dl.DGLA(of.torus_fixture())


@pytest.fixture(scope="module")
def disk():
    return dl.DGLA(of.disk_fixture())


def test_identities_small(torus):
    checks = dl.check_delta(torus, 3) + dl.check_bracket(torus, 3) + [dl.check_jacobi(torus, 3)]
    for c in checks:
        assert c.ok, (c.name, c.witness)
        assert c.checked > 0


def test_torus_master_equation_is_obstructed(torus):
    sol = dl.solve_qme(torus, INITIAL, 4)
    assert sol.solved == [(0, 3)]
    ob = sol.obstruction
    assert ob.slot == (1, 1) and ob.closed and not ob.exact


def test_disk_master_equation_solves(disk):
    sol = dl.solve_qme(disk, INITIAL, 3)
    assert sol.obstruction is None
    assert all(not r for r in dl.qme_residual(disk, sol.V, 3).values())
    for c in dl.check_pushforward(disk, sol.V, dl.qme_slots(disk.F, 2)):
        assert c.ok, (c.name, c.witness)


def test_perturbed_solution_is_not_closed(disk):
    sol = dl.solve_qme(disk, INITIAL, 2)
    V = dict(sol.V)
    V[(0, 3)] = {k: 2 * v for k, v in V[(0, 3)].items()}
    d, elt, _ = dl.pushforward_closed(disk, V, 0, 4, 2)
    assert elt and d


def test_solver_rejects_bad_initial_data(disk):
    with pytest.raises(dl.RejectedInput):
        dl.solve_qme(disk, {(0, (1, 0, 0)): 1}, 2)


def test_marked_graphs():
    marked = dl.marked_graphs(0, 4, [(0, 3), (0, 3)])
    assert len(marked) == 6 and all(m.aut == 1 for m in marked)
    assert [m.aut for m in dl.marked_graphs(1, 1, [(0, 3)])] == [2]


def test_pushforward_weights():
    assert [r["weight"] for r in dl.pushforward_records(1, 1)] == [1, Fraction(1, 2)]
    for r in dl.pushforward_records(1, 2):
        assert r["degree"] == 4 and r["degree_identity"] == 0


def test_degree_identity_all_small_graphs():
    for t in [(0, 5), (1, 3), (2, 1), (3, 0)]:
        assert all(dl.degree_identity(G) == 0 for G in sg.enumerate_stable_graphs(*t))
