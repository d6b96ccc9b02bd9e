from __future__ import annotations

import io
from collections import Counter

import numpy as np
import pytest

from caspr import inflation as I
from caspr import tiles as T
from caspr.ring import LAM, RealQuadratic, RingElement, embed, xi_power


def test_stored_rule_matches_derivation():
    derived = I.derive_supertile_rule()
    assert derived.to_json() == I.load_rule().to_json()


def test_rule_json_roundtrip():
    r = I.load_rule()
    assert I.SupertileRule.from_json(r.to_json()).to_json() == r.to_json()


def test_abelianization_matches_substitution_matrices():
    assert I.abelianization_diff() == []


@pytest.mark.parametrize("edge", T.EDGE_TYPES)
def test_superedge_is_inflated_edge(edge):
    assert I.superedge_vector(edge) == I.phi(T.EDGE_VECTORS[edge])


def test_edge_eigen_identity_row_convention():
    assert not any(I.edge_eigencheck())
    assert any(I.edge_eigencheck(column=True))


def test_phi_is_antilinear_contraction_pair():
    z = RingElement(2, -1, 3, 1)
    assert I.phi(I.phi(z)) == LAM * z
    assert I.phi(xi_power(1) * z) == xi_power(-1) * I.phi(z)
    assert abs(abs(embed(I.MU)) ** 2 - float(4 + 15 ** 0.5)) < 1e-12


def test_frequency_vector():
    f = I.frequency_vector()
    assert tuple(f) == I.EXPECTED_FREQUENCIES
    assert sum(f, RealQuadratic()) == RealQuadratic(1)
    assert all(float(x) > 0 for x in f)


@pytest.mark.parametrize("seed", ["Gamma", "Psi", "Theta"])
def test_geometric_counts_match_matrix(seed):
    p = I.generate_patch(seed, 4)
    assert p.type_counts().tolist() == I.type_counts_after(seed, 4)


def test_sides_shared_at_most_twice_with_opposite_orientation(patch4):
    vc = patch4.vertex_coords()
    directed = Counter()
    for i in range(len(patch4)):
        for k in range(6):
            a, b = tuple(vc[i, k]), tuple(vc[i, (k + 1) % 6])
            directed[(a, b)] += 1
    assert max(directed.values()) == 1
    shared = sum(1 for (a, b) in directed if (b, a) in directed)
    assert shared > len(directed) // 2


def test_tiles_do_not_overlap(patch4):
    # distinct tiles have distinct centroids at least a fixed distance apart
    from scipy.spatial import cKDTree
    z = patch4.vertices_complex().mean(axis=1)
    d, _ = cKDTree(np.column_stack([z.real, z.imag])).query(np.column_stack([z.real, z.imag]), k=2)
    assert d[:, 1].min() > 1.0


def test_parity_and_budget():
    p = I.generate_patch("Gamma", 1)
    assert p.parity == 1
    with pytest.raises(ValueError):
        I.inflate_squared(p)
    assert I.inflate_squared(I.Patch.seed("Gamma")).parity == 0
    with pytest.raises(MemoryError):
        I.generate_patch("Gamma", 6, budget=1000)


def test_empty_patch_inflates_to_empty():
    q = I.inflate_once(I.Patch.empty())
    assert len(q) == 0 and q.parity == 1


def test_patch_file_roundtrip(patch4):
    buf = io.StringIO()
    I.write_patch(patch4, buf, "Gamma", 4)
    text = buf.getvalue()
    q = I.read_patch(io.StringIO(text))
    s = patch4.sorted()
    assert np.array_equal(q.types, s.types) and np.array_equal(q.rots, s.rots) and np.array_equal(q.pos, s.pos)
    buf2 = io.StringIO()
    I.write_patch(q, buf2, "Gamma", 4)
    assert buf2.getvalue() == text
    assert q.projection is None


def test_projection_header():
    buf = io.StringIO()
    I.write_patch(I.Patch.seed("Psi"), buf, "Psi", 0, projection="hex")
    assert "# projection: hex" in buf.getvalue()
    assert I.read_patch(io.StringIO(buf.getvalue())).projection == "hex"


@pytest.mark.parametrize("text", [
    "garbage\n",
    "# caspr-patch v9\n# seed= steps=0 parity=0 tiles=0\n",
    "# caspr-patch v1\n# seed= steps=0 parity=0 tiles=1\nOmega 0 right 0 0 0 0 1\n",
    "# caspr-patch v1\n# seed= steps=0 parity=0 tiles=1\nGamma 0 right 0 0 0\n",
    "# caspr-patch v1\n# seed= steps=0 parity=0 tiles=1\nGamma 0 right 0 0 0 0 2\n",
])
def test_malformed_patch_files(text):
    with pytest.raises(ValueError):
        I.read_patch(io.StringIO(text))


@pytest.mark.parametrize("anchor", T.ANCHORS)
def test_cluster_table_recovered_from_patch(anchor, patch4):
    for name, rho, off in T.CLUSTER_MEMBERS[anchor][1:]:
        tally = I.cluster_partners(patch4, name)
        key, _ = max(tally.items(), key=lambda kv: kv[1])
        assert key == (rho, off.int_coords())
        # every tile of that type sits in exactly this position next to an anchor
        assert tally[key] >= int((patch4.types == I.TILE_INDEX[name]).sum()) - 40


def test_every_interior_tile_has_its_cluster(patch4):
    ids = I.cluster_ids(patch4)
    assert (ids >= 0).mean() > 0.95
    anchors = patch4.types[ids[ids >= 0]]
    assert set(T.TILE_TYPES[t] for t in anchors) <= set(T.ANCHORS)


def test_control_points_distinct(patch4):
    coords, kinds, _ = I.control_points(patch4)
    n_anchor = sum(int((patch4.types == I.TILE_INDEX[a]).sum()) for a in T.ANCHORS)
    assert len(coords) == n_anchor
    assert len({tuple(c) for c in coords}) == len(coords)


@pytest.fixture(scope="module")
def history():
    return I.generate_patch("Gamma", 4, history=True)


def test_border_forcing_two_half_steps(history):
    r = I.border_force_check(history, depth=2)
    assert set(r.environments.values()) == {1}
    assert r.pairs_seen


def test_border_forcing_one_half_step(history):
    r = I.border_force_check(history, depth=1)
    assert r.environments == {"alpha": 1, "beta": 2, "gamma": 1, "epsilon": 2, "eta": 2}


def test_border_not_forced_without_inflation(history):
    r = I.border_force_check(history, depth=0)
    assert max(r.environments.values()) > 2
