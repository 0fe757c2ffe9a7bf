from __future__ import annotations

from qhi.decoration import edge_sums
from qhi.fixtures import RECIPES, check_document, fixture_catalog, get_fixture, seed_document
from qhi.triangulation import hamiltonian_germs


def test_catalog_validates():
    cat = fixture_catalog()
    assert [d.name for d in cat] == list(RECIPES)
    for doc in cat:
        assert check_document(doc) == []


def test_seed_properties():
    doc = seed_document()
    assert doc.tri.counts() == (1, 3, 4, 2)
    assert hamiltonian_germs(doc.tri, doc.H) == [2]
    Hs = set(doc.H)
    assert all(s == 2 for e, s in enumerate(edge_sums(doc.tri, doc.charge)) if e not in Hs)


def test_sizes_and_provenance():
    sizes = {d.name: d.tri.n_tets for d in fixture_catalog()}
    assert sorted(set(sizes.values())) == [2, 4, 5, 6, 7, 8]
    for doc in fixture_catalog():
        assert [p[0] for p in doc.provenance] == list(RECIPES[doc.name])


def test_catalog_is_deterministic():
    from qhi.fixtures import _catalog
    from qhi.qhifile import serialize
    first = [serialize(d) for d in _catalog()]
    _catalog.cache_clear()
    assert [serialize(d) for d in _catalog()] == first


def test_get_fixture_unknown():
    import pytest
    with pytest.raises(KeyError):
        get_fixture("nope")
