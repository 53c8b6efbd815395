"""Tests for the quotient Morse layer: invariant function construction,
critical-set certification, gradient flow-line counting, the weighted
orbifold complex, and the index-gap correspondence with orbit indices."""

import numpy as np
import pytest

from chlab.morse import (
    build_invariant_morse,
    count_flow_lines,
    find_critical_points,
    orbifold_complex,
    seifert_index_check,
)
from chlab.orbits import make_orbit

BATTERY = tuple(f"C:{n}" for n in range(2, 13)) + tuple(
    f"D:{n}" for n in range(2, 9)
) + ("T", "O", "I")


def _index_census(label):
    census = {}
    for cp in find_critical_points(build_invariant_morse(label)):
        census[cp.index] = census.get(cp.index, 0) + 1
    return census


# ---------------------------------------------------------------------------
# invariant functions and critical sets
# ---------------------------------------------------------------------------


def test_cyclic_function_is_a_height():
    func = build_invariant_morse("C:4")
    assert func.kind == "height"
    assert _index_census("C:4") == {0: 1, 2: 1}


def test_dihedral_critical_census():
    func = build_invariant_morse("D:3")
    assert func.kind == "bump-sum"
    assert _index_census("D:3") == {0: 3, 1: 3, 2: 2}


def test_polyhedral_critical_census():
    assert _index_census("T") == {0: 4, 1: 6, 2: 4}
    assert _index_census("O") == {0: 6, 1: 12, 2: 8}
    assert _index_census("I") == {0: 12, 1: 30, 2: 20}


@pytest.mark.parametrize("label", ["C:5", "D:4", "T", "I"])
def test_invariance_residual_is_tiny(label):
    func = build_invariant_morse(label)
    assert func.invariance_residual() <= 1e-10


@pytest.mark.parametrize("label", ["D:3", "O"])
def test_critical_points_lie_on_sphere_with_clean_hessians(label):
    for cp in find_critical_points(build_invariant_morse(label)):
        assert abs(np.linalg.norm(np.asarray(cp.location)) - 1.0) < 1e-9
        eigs = np.asarray(cp.hessian_eigenvalues)
        assert np.min(np.abs(eigs)) > 1e-6
        assert int(np.sum(eigs < 0)) == cp.index


def test_saddles_are_the_non_orientable_points():
    for cp in find_critical_points(build_invariant_morse("D:4")):
        assert cp.orientable == (cp.index != 1)
        if cp.index == 1:
            assert cp.isotropy == 2


# ---------------------------------------------------------------------------
# flow lines
# ---------------------------------------------------------------------------


def test_tetrahedral_flow_counts():
    func = build_invariant_morse("T")
    down = count_flow_lines(func, "Face", "Edge")
    assert (down.source, down.target) == ("Face", "Edge")
    assert down.downstairs == 1
    assert down.weights == (3,)
    up = count_flow_lines(func, "Edge", "Vertex")
    assert up.downstairs == 1
    assert up.weights == (2,)


def test_flow_lines_empty_for_index_gap_two():
    func = build_invariant_morse("T")
    flows = count_flow_lines(func, "Face", "Vertex")
    assert flows.downstairs == 0
    assert flows.upstairs == 0
    assert flows.weights == ()
    assert flows.trajectories == ()


def test_dihedral_flow_weights():
    func = build_invariant_morse("D:3")
    assert count_flow_lines(func, "Plus", "Saddle").weights == (3,)
    assert count_flow_lines(func, "Saddle", "Minus").weights == (2,)


def test_hypothetical_composite_weight():
    # if the saddle class survived, the squared-differential entry would
    # weigh (max -> saddle) * (saddle -> min) = 3 * 2
    func = build_invariant_morse("T")
    w21 = count_flow_lines(func, "Face", "Edge").weights[0]
    w10 = count_flow_lines(func, "Edge", "Vertex").weights[0]
    assert w21 * w10 == 6


def test_trajectories_cover_every_seed():
    func = build_invariant_morse("T")
    flows = count_flow_lines(func, "Face", "Edge")
    assert len(flows.trajectories) == flows.upstairs > 0
    for traj in flows.trajectories:
        for endpoint in (traj.start, traj.end):
            assert abs(np.linalg.norm(np.asarray(endpoint)) - 1.0) < 1e-6
        assert 0 <= traj.orbit_class < flows.downstairs


# ---------------------------------------------------------------------------
# orbifold complex
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("label", ["C:3", "C:8", "D:2", "D:5", "T", "O", "I"])
def test_orbifold_complex_ranks(label):
    cx = orbifold_complex(label)
    assert cx.homology_ranks() == (1, 0, 1)


def test_orbifold_complex_excludes_saddles():
    cx = orbifold_complex("T")
    assert cx.generators[0] == ("Vertex",)
    assert cx.generators[1] == ()
    assert cx.generators[2] == ("Face",)
    assert cx.excluded == ("Edge",)
    for matrix in cx.differential.values():
        assert not np.any(np.asarray(matrix))
    assert ("Face", "Edge") in cx.flow_counts
    assert ("Edge", "Vertex") in cx.flow_counts


def test_cyclic_complex_has_two_generators():
    cx = orbifold_complex("C:5")
    assert cx.generators[0] == ("SouthPole",)
    assert cx.generators[1] == ()
    assert cx.generators[2] == ("NorthPole",)
    assert cx.excluded == ()
    assert cx.flow_counts == {}


# ---------------------------------------------------------------------------
# index-gap correspondence
# ---------------------------------------------------------------------------


def test_seifert_index_check_tetrahedral():
    report = seifert_index_check("T")
    assert report["failures"] == ()
    gaps = {row["pair"]: row["morse_gap"] for row in report["rows"]}
    assert gaps[("Face", "Edge")] == 1
    assert gaps[("Face", "Vertex")] == 2
    assert make_orbit("T", "Face", 6).cz - make_orbit("T", "Edge", 4).cz == 1
    assert make_orbit("T", "Face", 6).cz - make_orbit("T", "Vertex", 6).cz == 2
    for row in report["rows"]:
        assert row["morse_gap"] == row["cz_gap"]


def test_seifert_index_check_dihedral():
    report = seifert_index_check("D:4")
    assert report["failures"] == ()
    gaps = {row["pair"]: row["morse_gap"] for row in report["rows"]}
    assert gaps[("Plus", "Minus")] == 2
    assert make_orbit("D:4", "Plus", 8).cz - make_orbit("D:4", "Minus", 4).cz == 2


@pytest.mark.parametrize("label", ["C:6", "D:3", "O", "I"])
def test_seifert_index_check_battery(label):
    report = seifert_index_check(label)
    assert report["check"] == "seifert_index"
    assert report["failures"] == ()
    assert report["instances"] == len(report["rows"]) > 0
