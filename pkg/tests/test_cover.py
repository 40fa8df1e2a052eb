import pytest

from bicover.cover import (
    BidoubleData, CoverError, SchemaError, chi_X, chi_Yi, classify_quotient, data_from_json,
    data_to_json, half_classes, k2_X, kodaira_and_minimality, pg_q_X, plurigenus_Yi,
    singular_k2, validate,
)
from bicover.geom import P1xP1, P2, Fn, h0

B = BidoubleData.from_totals


def all_rows(rows_by_base):
    return [r for rows in rows_by_base.values() for r in rows]


def test_validate():
    assert validate(B(P2, 3, 3, 3)) == []
    errs = validate(B(P2, 3, 2, 1))
    assert any("D1+D2" in e for e in errs)
    assert any("two trivial" in e for e in validate(B(P2, 4, 0, 0)))


def test_half_classes():
    assert [c.coeffs for c in half_classes(B(P2, 4, 2, 2))] == [(2,), (3,), (3,)]
    assert [c.coeffs for c in half_classes(B(P1xP1, (3, 3), (1, 1), (1, 1)))] == [(1, 1), (2, 2), (2, 2)]


def test_chi_k2_examples():
    assert chi_X(B(P2, 3, 3, 1)) == 2
    assert chi_X(B(P2, 3, 3, 3)) == 4
    assert chi_X(B(P1xP1, (4, 0), (0, 4), (4, 0))) == 0
    assert k2_X(B(P2, 5, 1, 1)) == 1
    assert k2_X(B(P1xP1, (3, 3), (1, 1), (1, 1))) == 2
    F = Fn(2)
    d1 = BidoubleData(F, data_from_json({"base": {"Fn": 2}, "divisors": [
        {"total": [3, 4], "components": [[1, 0], [2, 4]]}, {"total": [1, 4]}, {"total": [1, 4]}]}).d)
    assert k2_X(d1) == 6


def test_quotients_and_plurigenera():
    d = B(P2, 4, 2, 2)
    assert chi_Yi(d, 3) == 2 and chi_Yi(d, 1) == 1
    assert plurigenus_Yi(d, 3, 1) == 1
    assert plurigenus_Yi(B(P2, 3, 3, 1), 1, 2) == 0
    e = B(P2, 5, 1, 1)
    assert classify_quotient(e, 2).tag == "K3"
    assert classify_quotient(e, 1).tag == "RationalPg0"
    n = classify_quotient(B(P1xP1, (4, 0), (0, 4), (2, 0)), 2)
    assert (n.tag, n.q) == ("RuledIrregular", 2)


def test_pg_q_and_kodaira():
    assert pg_q_X(B(P2, 4, 2, 2)) == (2, 0)
    assert pg_q_X(B(P1xP1, (4, 0), (0, 4), (4, 0))) == (2, 3)
    assert pg_q_X(B(P2, 2, 4, 0)) == (1, 0)
    assert kodaira_and_minimality(B(P2, 2, 4, 0)) == ("K3Special", True)
    assert kodaira_and_minimality(B(P2, 3, 3, 3)) == ("Two", True)
    assert kodaira_and_minimality(B(P1xP1, (4, 2), (0, 2), (6, 0))) == ("One", True)


def test_singular_k2():
    cubics = B(P2, 3, 3, 3)
    assert [singular_k2(cubics, k) for k in range(1, 8)] == list(range(8, 1, -1))
    assert singular_k2(cubics, 0) == 9
    with pytest.raises(CoverError):
        singular_k2(cubics, 8)
    with pytest.raises(CoverError):
        singular_k2(cubics, 10)
    assert singular_k2(B(P1xP1, (3, 1), (1, 3), (1, 3)), 1) == 5


def test_chi_identity_on_all_rows(rows_by_base):
    for r in all_rows(rows_by_base):
        d = r.data
        assert chi_X(d) == sum(chi_Yi(d, i) for i in (1, 2, 3)) - 2, d


def test_p1p1_closed_forms(rows_by_base):
    for r in rows_by_base["P1xP1"]:
        d = r.data
        (n1, m1), (n3, m3) = d.D(1).coeffs, d.D(3).coeffs
        if classify_quotient(d, 3).tag != "K3":
            continue
        assert k2_X(d) == 2 * n3 * m3
        assert 2 * chi_X(d) == 8 - 2 * (n1 + m1) + n3 * m3 + n1 * m1
        L = half_classes(d)
        pg = sum(max(0, l.coeffs[0] - 1) * max(0, l.coeffs[1] - 1) for l in L)
        assert pg_q_X(d)[0] == pg


def test_fn_k2_closed_form(rows_by_base):
    for name in ("F2", "F3", "F4"):
        for r in rows_by_base[name]:
            d = r.data
            n = d.base.n
            a = sum(d.D(i).coeffs[0] for i in (1, 2, 3))
            b = sum(d.D(i).coeffs[1] for i in (1, 2, 3))
            assert k2_X(d) == 2 * (a - 4) * (b - 2 * n - 4) - n * (a - 4) ** 2


def test_k3_tag_matches_chi_and_plurigenera(rows_by_base):
    for r in all_rows(rows_by_base):
        d = r.data
        for i in (1, 2, 3):
            k3 = classify_quotient(d, i).tag == "K3"
            probe = chi_Yi(d, i) == 2 and all(plurigenus_Yi(d, i, k) == 1 for k in range(1, 5))
            assert k3 == probe, (d, i)


def test_json_round_trip_and_schema_errors():
    d = B(P1xP1, (3, 1), (1, 3), (1, 3))
    assert data_from_json(data_to_json(d)) == d
    for bad in ({}, {"base": "P2"}, {"base": "P2", "divisors": [[1], [1], [1]]},
                {"base": "P2", "divisors": [{"total": [1, 2]}] * 3}, {"base": "P7", "divisors": []}):
        with pytest.raises(SchemaError):
            data_from_json(bad)
