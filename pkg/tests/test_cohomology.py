from __future__ import annotations

import json

import pytest

from caspr import cohomology as coh
from caspr import groupring as gr


@pytest.fixture(scope="module")
def report():
    return coh.cech_report()


@pytest.mark.parametrize("k", range(6))
def test_chain_condition(k):
    assert coh.chain_condition(k)


def test_printed_boundary_breaks_chain_condition():
    assert not all(coh.chain_condition(k, coh.PRINTED_BOUNDARY_1) for k in range(6))


def test_group_ring_chain_condition():
    prod = coh.BOUNDARY_1 @ coh.BOUNDARY_2
    assert all(not gr.evaluate(prod, k).rows[i][j] for k in range(6)
               for i in range(prod.shape[0]) for j in range(prod.shape[1])
               if i in coh.deletions(k).vertices)


def test_per_representation_table(report):
    assert [r.h1 for r in report.per_k] == [0, 2, 0, 0, 0, 2]
    assert [r.h1_limit for r in report.per_k] == [0, 2, 0, 0, 0, 2]
    assert [r.h2_limit for r in report.per_k] == [2, 2, 1, 2, 1, 2]
    assert (report.h1_total, report.h2_total) == (4, 10)


def test_h1_eigenvalues(report):
    for k in (1, 5):
        assert report.per_k[k].h1_eigen == {"t^2-8t+1": 1}


def test_euler_characteristic(report):
    for r in report.per_k:
        c0, c1, c2 = r.counts
        h0 = c0 - r.rank_d1
        assert c0 - c1 + c2 == h0 - r.h1 + r.h2


def test_cell_counts():
    assert coh.deletions(0).counts == (3, 7, 9)
    assert coh.deletions(1).counts == (1, 8, 9)
    assert coh.deletions(3).counts == (3, 8, 9)


def test_substitution_degree_validation():
    with pytest.raises(ValueError):
        coh.substitution_on_h(1, 3)


def test_integral():
    r = coh.integral_report()
    assert r.stabilized
    assert (r.h1_rank, r.h1_torsion, r.h2_rank, r.h2_torsion) == (4, [], 10, [])
    assert "Z^4" in r.format() and "Z^10" in r.format()


def _rows(m):
    return [[str(e) for e in row] for row in m.entries]


def test_constants_roundtrip():
    text = json.dumps({"boundary_1": _rows(coh.BOUNDARY_1), "boundary_2": _rows(coh.BOUNDARY_2)})
    c = coh.Constants.from_json(text)
    assert c.boundary_1 == coh.BOUNDARY_1 and c.boundary_2 == coh.BOUNDARY_2


def test_corrupted_constants_detected():
    c = coh.Constants.from_json(json.dumps({"boundary_1": _rows(coh.PRINTED_BOUNDARY_1)}))
    with pytest.raises(coh.RepresentativeError):
        coh.cech_report(c)
    with pytest.raises(coh.RepresentativeError):
        coh.integral_report(constants=c)


def test_perturbed_substitution_is_not_a_chain_map():
    rows = _rows(coh.SUBSTITUTION_2)
    rows[0][0] = "0"
    c = coh.Constants.from_json(json.dumps({"substitution_2": rows}))
    with pytest.raises(coh.RepresentativeError):
        coh.cech_report(c)


@pytest.mark.parametrize("payload", [{"nope": []}, {"boundary_1": [["1"]]}])
def test_constants_validation(payload):
    with pytest.raises(ValueError):
        coh.Constants.from_json(json.dumps(payload))


def test_checksum_is_stable():
    assert coh.constants_checksum() == coh.constants_checksum()
    assert len(coh.constants_checksum()) == 64
