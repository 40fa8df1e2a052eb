import pytest

from bicover import fixtures as fx
from bicover import iterated as it

FILES = ("iterated-P2", "iterated-P1xP1", "iterated-Fn")


def covers():
    out = []
    for tid in FILES:
        for c in fx.load_fixture(tid)["covers"]:
            out.append(pytest.param(c, id=f"{tid}-{c['case']}"))
    return out


def _cov(c):
    return it.build(fx._data(fx._base(c["base"]), c["divisors"]))


@pytest.mark.parametrize("c", covers())
def test_blowup_data(c):
    cov = _cov(c)
    assert cov.k == c["k"]
    assert cov.fmt(cov.canonical) == c["K"]
    assert cov.fmt(cov.branch) == c["B"]


@pytest.mark.parametrize("c", covers())
@pytest.mark.parametrize("construction", [1, 2])
def test_solution_invariants(c, construction):
    cov = _cov(c)
    for s in it.enumerate_iterated(cov, construction):
        d1, d2, d3 = s.deltas
        assert tuple(x + y for x, y in zip(d1, d3)) == cov.branch
        if construction == 1:
            assert all(x + y + 2 * k == 0 for x, y, k in zip(d1, d2, cov.canonical))
        else:
            assert d1 == d2
        assert not any(cov.e_part(d1)) and not any(cov.e_part(d2))
        assert all(x >= 0 for d in s.deltas for x in d)
        assert s.pg_W is None or s.pg_W >= 0
        assert not s.divisibility_verified


@pytest.mark.parametrize("c", covers())
@pytest.mark.parametrize("construction", [1, 2])
def test_slack_stability(c, construction):
    cov = _cov(c)
    base = {s.deltas for s in it.enumerate_iterated(cov, construction)}
    wide = {s.deltas for s in it.enumerate_iterated(cov, construction, slack=2)}
    assert wide == base


def test_gs2b_first_construction_quotient():
    c = fx.load_fixture("iterated-P2")["covers"][0]
    cov = _cov(c)
    (s,) = it.enumerate_iterated(cov, 1)
    assert s.z1_class == "Enriques-like"
    assert (s.pg_W, s.rank_TW) == (3, 27)


def test_bad_construction():
    cov = _cov(fx.load_fixture("iterated-P2")["covers"][0])
    with pytest.raises(ValueError):
        it.candidates(cov, 3)


def test_rejected_have_reasons():
    cov = _cov(fx.load_fixture("iterated-Fn")["covers"][0])
    for deltas, why in it.rejected(cov, 1):
        assert why
