import json
from fractions import Fraction as F

import pytest
import sympy

from caliber import catalog
from caliber.exterior import GENERATORS, from_span, inner, is_self_dual
from caliber.liealg import infinitesimal_matrix
from caliber.triality import comass_exact, conjugate_to_face, psi_inv

H = F(1, 2)


def mix(*pairs):
    return tuple(sum(w * c[i] for w, c in pairs) for i in range(7))


def test_golden_file_matches():
    assert catalog.catalog_table() == catalog.load_golden()


@pytest.mark.parametrize("label, norm2, ratio, stab", [
    ((1, 0), 14, 14, 21),
    ((2, 0), 6, 6, 16),
    ((3, 0), F(10, 3), F(10, 3), 13),
    ((1, 1), 8, 8, 15),
    ((2, 1), F(11, 2), F(11, 2), 10),
    ((2, 2), 4, 4, 8),
    ((3, 1), F(7, 2), F(7, 2), 9),
    ((3, 2), F(78, 25), F(78, 25), 7),
    ((3, 3), F(8, 3), F(8, 3), 7),
])
def test_catalog_entries(label, norm2, ratio, stab):
    entry = {x.type_label: x for x in catalog.catalog_entries()}[label]
    assert entry.comass == 1
    assert entry.norm2 == norm2 and entry.ratio == ratio
    assert entry.stab_dim == stab


@pytest.mark.parametrize("label", [(2, 0), (1, 1), (3, 3)])
def test_stabilizer_dims_against_sympy(label):
    entry = {x.type_label: x for x in catalog.catalog_entries()}[label]
    m = sympy.Matrix(infinitesimal_matrix(from_span(entry.coeffs)))
    assert 28 - m.rank() == entry.stab_dim


def test_type21_variants():
    v = {x.type_label: x for x in catalog.catalog_entries()}[(2, 1)].variants
    assert all(x["comass"] == 1 for x in v.values())
    # the printed second expression collapses to the special Lagrangian representative
    assert v["mu_as_printed"]["coeffs"] == mix((H, catalog.cayley()), (H, catalog.eta(4)))
    assert v["mu_normalized"]["ratio"] == 6
    assert v["psi"]["ratio"] == F(46, 9)


def test_complex_construction():
    assert catalog.build_from_complex() == from_span(catalog.cayley())


def test_quaternionic_construction():
    assert catalog.build_from_quaternionic() == from_span(catalog.eta(2))


def test_special_lagrangian_product():
    assert catalog.special_lagrangian_product() == from_span(mix((H, catalog.cayley()), (H, catalog.eta(4))))


def test_type22_product():
    q = F(1, 4)
    want = mix((q, catalog.cayley()), (q, catalog.omega(2)), (q, catalog.eta(3)), (q, catalog.eta(4)))
    assert catalog.type22_product() == from_span(want)


def test_imaginary_volume_is_orthogonal_to_span():
    _, im = catalog.holomorphic_volume()
    assert is_self_dual(im)
    assert all(inner(im, s) == 0 for s in GENERATORS)


def test_kraines_candidate_is_conjugate_to_type30():
    cand = catalog.span_of(catalog.kraines_candidate())
    entry = catalog.catalog_entries()[2]
    assert sorted(psi_inv(cand)) == sorted(psi_inv(entry.coeffs))
    assert conjugate_to_face(cand)[0] == conjugate_to_face(entry.coeffs)[0]
    assert comass_exact(cand) == 1


def test_counterexamples():
    cx = catalog.counterexamples()
    assert cx["omega_plus"].coeffs == (1,) * 7
    assert cx["mu"].coeffs == (1, -1, 1, 1, 1, 1, 1)
    for c in cx.values():
        assert c.comass == 2
        assert sum(c.half_weights) == 1 and all(w >= 0 for w in c.half_weights)
        assert comass_exact(c.half_conjugate) == 1
    q = F(1, 4)
    assert cx["omega_plus"].half_weights == (q, 0, 0, 0, q, 0, q, q)
    assert cx["mu"].half_weights == (q, q, q, 0, 0, 0, q, 0)


def test_markdown_table_has_nine_rows():
    lines = catalog.markdown_table().splitlines()
    assert len(lines) == 11 and lines[2].startswith("| (1,0)")


def test_index_errors():
    with pytest.raises(IndexError):
        catalog.omega(5)
    with pytest.raises(IndexError):
        catalog.eta(0)


def test_span_of_rejects_off_span():
    with pytest.raises(ValueError):
        catalog.span_of(catalog.holomorphic_volume()[1] + from_span(catalog.cayley()))


def test_write_golden_roundtrip(tmp_path):
    path = catalog.write_golden(tmp_path / "golden.json")
    assert json.loads(path.read_text()) == catalog.load_golden()
