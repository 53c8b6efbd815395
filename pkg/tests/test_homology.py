"""Tests for the filtered chain complexes: generator parity, homology
ranks, the closed-form answer, filtration inclusions, the direct limit, and
the class-count correspondence."""

import pytest

from chlab.homology import (
    GradedVectorSpace,
    build_complex,
    closed_form,
    direct_limit,
    homology_ranks,
    homology_report,
    inclusion_map,
    mckay_check,
)
from chlab.groups import parse_group_spec

BATTERY = tuple(f"C:{n}" for n in range(2, 13)) + tuple(
    f"D:{n}" for n in range(2, 9)
) + ("T", "O", "I")


# ---------------------------------------------------------------------------
# chain complexes
# ---------------------------------------------------------------------------


def test_build_complex_dihedral_three():
    cx = build_complex("D:3", 1)
    assert cx.degree_rank(0) == 5
    assert cx.degree_rank(2) == 5
    assert cx.degrees == [0, 2]
    assert sum(cx.degree_rank(d) for d in cx.degrees) == 10
    # full differential vanishes for parity reasons
    for matrix in cx.differential.values():
        assert all(v == 0 for v in matrix.values())


def test_build_complex_small_cases():
    cx = build_complex("C:2", 1)
    assert {d: cx.degree_rank(d) for d in cx.degrees} == {0: 1, 2: 1}
    cx = build_complex("I", 1)
    assert {d: cx.degree_rank(d) for d in cx.degrees} == {0: 8, 2: 8}


@pytest.mark.parametrize("label", ["C:7", "D:4", "O"])
def test_complex_generators_are_good_and_even(label):
    cx = build_complex(label, 2)
    for degree, gens in cx.generators.items():
        assert degree % 2 == 0
        for orbit in gens:
            assert orbit.good
            assert orbit.grading == degree


# ---------------------------------------------------------------------------
# homology ranks and the closed form
# ---------------------------------------------------------------------------


def test_homology_ranks_examples():
    assert homology_ranks(build_complex("D:3", 1)).ranks == {0: 5, 2: 5}
    assert homology_ranks(build_complex("T", 2)).ranks == {0: 6, 2: 7, 4: 7, 6: 6}
    assert homology_ranks(build_complex("C:4", 1)).ranks == {0: 3, 2: 3}


def test_closed_form_level_one():
    for label in BATTERY:
        m = parse_group_spec(label).class_count
        assert closed_form(label, 1).ranks == {0: m - 1, 2: m - 1}


def test_closed_form_octahedral_level_three():
    assert closed_form("O", 3).ranks == {0: 7, 2: 8, 4: 8, 6: 8, 8: 8, 10: 7}


def test_closed_form_vanishes_off_support():
    gvs = closed_form("D:5", 2)
    assert gvs.rank(-2) == 0
    assert gvs.rank(1) == 0
    assert gvs.rank(4 * 2 - 2 + 2) == 0


@pytest.mark.parametrize("label", BATTERY)
def test_homology_matches_closed_form_low_levels(label):
    for N in (1, 2):
        assert homology_ranks(build_complex(label, N)) == closed_form(label, N)


@pytest.mark.parametrize("label", ["C:5", "D:4", "I"])
def test_homology_matches_closed_form_deep_levels(label):
    for N in (3, 4, 5, 6):
        assert homology_ranks(build_complex(label, N)) == closed_form(label, N)


def test_graded_vector_space_equality_ignores_zero_entries():
    assert GradedVectorSpace({0: 2, 2: 0}) == GradedVectorSpace({0: 2})
    assert GradedVectorSpace({0: 2}) != GradedVectorSpace({0: 3})


# ---------------------------------------------------------------------------
# inclusions of filtration levels
# ---------------------------------------------------------------------------


def test_inclusion_same_level_is_identity():
    inc = inclusion_map("C:4", 2, 2)
    assert inc.source == inc.target == 2
    assert all(src == dst for src, dst in inc.pairing.items())


def test_inclusion_dihedral_injects_and_preserves_grading():
    inc = inclusion_map("D:3", 1, 2)
    assert len(inc.pairing) == 10
    targets = list(inc.pairing.values())
    assert len(set(targets)) == len(targets)  # injective
    target_cx = build_complex("D:3", 2)
    assert sum(target_cx.degree_rank(d) for d in target_cx.degrees) == 22
    for src, dst in inc.pairing.items():
        assert src.grading == dst.grading


def test_inclusions_compose():
    first = inclusion_map("D:3", 1, 2)
    second = inclusion_map("D:3", 2, 3)
    direct = inclusion_map("D:3", 1, 3)
    for src, mid in first.pairing.items():
        assert direct.pairing[src] == second.pairing[mid]


def test_inclusion_rejects_decreasing_levels():
    with pytest.raises(ValueError):
        inclusion_map("C:4", 2, 1)


# ---------------------------------------------------------------------------
# direct limit
# ---------------------------------------------------------------------------


def test_direct_limit_cyclic():
    gvs, report = direct_limit("C:4", 3)
    assert gvs.ranks == {0: 3, 2: 4, 4: 4, 6: 4, 8: 4}
    assert report["violations"] == 0
    assert all(1 <= first <= 3 for first in report["first_stable"].values())


def test_direct_limit_structure():
    for label in ("D:4", "T"):
        m = parse_group_spec(label).class_count
        gvs, _ = direct_limit(label, 3)
        assert gvs.rank(0) == m - 1
        for degree in range(2, 9, 2):
            assert gvs.rank(degree) == m
        assert all(d % 2 == 0 for d in gvs.ranks)


def test_direct_limit_needs_two_levels():
    with pytest.raises(ValueError):
        direct_limit("C:4", 1)


# ---------------------------------------------------------------------------
# class-count correspondence
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("label", BATTERY)
def test_mckay_triple(label):
    report = mckay_check(label)
    m = parse_group_spec(label).class_count
    assert report["violations"] == 0
    assert tuple(report["triple"]) == (m - 1, m - 1, m - 1)


def test_mckay_examples():
    assert tuple(mckay_check("C:5")["triple"]) == (4, 4, 4)
    assert tuple(mckay_check("D:3")["triple"]) == (5, 5, 5)
    assert tuple(mckay_check("I")["triple"]) == (8, 8, 8)


def test_homology_report_shape():
    report = homology_report("T", 2)
    assert report["spec"] == "T"
    assert report["N"] == 2
    assert report["match"] is True
    assert len(report["generators"]) == 26
    assert report["ranks"] == {"0": 6, "2": 7, "4": 7, "6": 6}
    assert report["closed_form"] == report["ranks"]
