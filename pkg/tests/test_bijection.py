import pytest

from stuffedmaps.bijection import ALL_CONVENTIONS, PINNED, label_bps, phi, phi_invariants, pin_convention, psi, \
    roundtrip_failures, verify_bijection
from stuffedmaps.cells import cellset
from stuffedmaps.enumerate import enumerate_hypermobiles, enumerate_pointed_bms
from stuffedmaps.hypermobile import WHITE, Hypermobile, Mobile, canonical_code_hm, validate_hypermobile

QUAD = cellset([4])
QB = cellset([4], [2, 2])


@pytest.fixture(scope="module")
def pointed_qb():
    return enumerate_pointed_bms(QB, 5)[1]


@pytest.fixture(scope="module")
def mobiles_qb():
    return enumerate_hypermobiles(QB, 5)[1]


def test_labels_are_distances(pointed_qb):
    for m in pointed_qb[:200]:
        labels = label_bps(m)
        ci, src = m.source
        assert labels[ci][src] == 0
        for c, lab in zip(m.components, labels):
            for h in range(c.n_darts):
                assert abs(lab[c.tail(h)] - lab[c.head(h)]) == 1


def test_phi_images_are_valid_hypermobiles(pointed_qb):
    for m in pointed_qb:
        h = phi(m)
        assert validate_hypermobile(h, QB) == []
        assert phi_invariants(m, h) == []
        assert h.n_whites + len(h.mobiles) == m.V


def test_psi_inverts_phi(pointed_qb):
    assert roundtrip_failures(pointed_qb, PINNED) == []


def test_phi_inverts_psi(mobiles_qb):
    for h in mobiles_qb:
        assert canonical_code_hm(phi(psi(h))) == canonical_code_hm(h)


def test_phi_is_injective(pointed_qb):
    codes = {canonical_code_hm(phi(m)) for m in pointed_qb}
    assert len(codes) == len(pointed_qb)


def test_pinned_convention_is_the_unique_survivor():
    maps = enumerate_pointed_bms(QUAD, 5)[1]
    survivors = [c for c in ALL_CONVENTIONS if not roundtrip_failures(maps, c, limit=1)]
    assert survivors == [PINNED]
    assert pin_convention(maps) == PINNED


def test_verify_bijection_report():
    r = verify_bijection(QUAD, 5)
    assert r["ok"] and r["n_failures"] == 0
    assert r["counts_left"] == r["counts_right"] == {"3": 6, "4": 36, "5": 270}
    assert r["convention"] == PINNED.as_dict()


def test_hypermobile_json_roundtrip(mobiles_qb):
    for h in mobiles_qb[:100]:
        back = Hypermobile.from_json(h.to_json())
        assert canonical_code_hm(back) == canonical_code_hm(h)
        assert Hypermobile.from_json(h.dumps()).dumps() == h.dumps()


def test_label_jump_rejected(mobiles_qb):
    h = next(x for x in mobiles_qb if any(len(m.whites()) >= 2 for m in x.mobiles))
    mi = next(i for i, m in enumerate(h.mobiles) if len(m.whites()) >= 2)
    m = h.mobiles[mi]
    w = m.whites()[-1]
    labels = list(m.label)
    labels[w] += 5
    bad_mobile = Mobile(m.color, tuple(labels), m.rot)
    bad = Hypermobile(h.mobiles[:mi] + (bad_mobile,) + h.mobiles[mi + 1:], h.hyperedges, h.root)
    assert validate_hypermobile(bad, QB)


def test_wrong_black_valency_rejected(mobiles_qb):
    h = next(x for x in mobiles_qb if not x.hyperedges)
    assert validate_hypermobile(h, cellset([6]))


def test_hyperedge_within_one_mobile_rejected(mobiles_qb):
    h = next(x for x in mobiles_qb if x.hyperedges)
    (a, b) = h.hyperedges[0]
    bad = Hypermobile(h.mobiles, ((a, (a[0],) + b[1:]),) + h.hyperedges[1:], h.root)
    assert validate_hypermobile(bad, QB)


def test_whites_carry_labels(mobiles_qb):
    for h in mobiles_qb[:50]:
        for m in h.mobiles:
            assert all((m.label[v] is not None) == (m.color[v] == WHITE) for v in range(m.n))

