import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlgauge import groupoid_finite as gf


def naive_associativity(G):
    """Brute-force oracle: composable triples whose two bracketings differ."""
    bad = []
    for f, g, h in itertools.product(range(G.n_arrows), repeat=3):
        fg, gh = G.comp[f, g], G.comp[g, h]
        if fg >= 0 and gh >= 0 and G.comp[fg, h] != G.comp[f, gh]:
            bad.append((f, g, h))
    return bad


BUILTINS = {
    "pair4": gf.pair_groupoid(4),
    "z3z3": gf.cyclic_action_groupoid(3),
    "transitive2x3": gf.transitive_groupoid(2, 3),
    "union": gf.disjoint_union(gf.pair_groupoid(2), gf.cyclic_action_groupoid(2)),
}


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_builtin_groupoids_are_valid(name):
    G = BUILTINS[name]
    assert gf.validate_groupoid(G)["valid"]
    U = gf.unit_bundle(G)
    assert gf.validate_action(U)["valid"]
    assert gf.validate_principality(U)["principal"]
    assert gf.division_identities(U)["valid"]


def test_pair_groupoid_arithmetic():
    G = gf.pair_groupoid(4)
    lab = G.arrow_labels
    assert lab[G.mul(lab.index("(0,1)"), lab.index("(1,3)"))] == "(0,3)"
    with pytest.raises(ValueError):
        G.mul(lab.index("(0,1)"), lab.index("(2,3)"))


def test_corrupted_composition_reports_exact_triples():
    G = gf.pair_groupoid(3)
    rng = np.random.default_rng(0)
    for _ in range(10):
        g, h = map(int, rng.integers(G.n_arrows, size=2))
        if not G.composable(g, h):
            continue
        comp = G.comp.copy()
        comp[g, h] = (comp[g, h] + 1 + rng.integers(G.n_arrows - 1)) % G.n_arrows
        bad = G.replace(comp=comp)
        rep = gf.validate_groupoid(bad)
        assert not rep["valid"]
        assert rep["associativity"] == [tuple(int(v) for v in t) for t in naive_associativity(bad)]


def test_every_same_endpoint_corruption_is_caught():
    """Redirecting gh to another arrow with the same endpoints still breaks some axiom."""
    G = gf.transitive_groupoid(2, 3)
    for g, h in itertools.product(range(G.n_arrows), repeat=2):
        if not G.composable(g, h):
            continue
        k0 = int(G.comp[g, h])
        for k in range(G.n_arrows):
            if k != k0 and G.s[k] == G.s[k0] and G.t[k] == G.t[k0]:
                comp = G.comp.copy()
                comp[g, h] = k
                assert not gf.validate_groupoid(G.replace(comp=comp))["valid"]


def test_corrupted_inverse_and_unit():
    G = gf.cyclic_action_groupoid(3)
    inv = G.inv.copy()
    inv[4] = inv[5]
    assert gf.validate_groupoid(G.replace(inv=inv))["inverse"]
    unit = G.unit.copy()
    unit[0] = 1
    assert not gf.validate_groupoid(G.replace(unit=unit))["valid"]


def test_division_in_pair_groupoid():
    G = gf.pair_groupoid(3)
    U = gf.unit_bundle(G)
    lab = G.arrow_labels
    assert lab[gf.division(U, lab.index("(0,1)"), lab.index("(0,2)"))] == "(1,2)"
    for g in range(G.n_arrows):
        assert gf.division(U, g, g) == G.unit[G.t[g]]


def test_z3z3_division_is_subtraction():
    G = gf.cyclic_action_groupoid(3)
    U = gf.unit_bundle(G)
    for p, q in itertools.product(range(G.n_arrows), repeat=2):
        if U.proj[p] != U.proj[q]:
            continue
        d = gf.division(U, p, q)
        (x, a), (_, b) = (tuple(map(int, G.arrow_labels[k][1:-1].split("+"))) for k in (p, q))
        assert G.arrow_labels[d] == f"({(x + a) % 3}+{(b - a) % 3})"


def test_division_rejects_cross_fiber_pairs():
    U = gf.unit_bundle(gf.pair_groupoid(2))
    with pytest.raises(ValueError):
        gf.division(U, 0, 3)


def test_non_free_action_fails_injectivity():
    P = gf.non_free_bundle()
    assert gf.validate_action(P)["valid"]
    rep = gf.validate_principality(P)
    assert not rep["injective"] and rep["non_injective"]
    with pytest.raises(gf.DivisionError) as info:
        gf.division(P, 0, 0)
    assert info.value.kind == "multiple-arrows"


def test_merged_unit_bundles_fail_surjectivity():
    P = gf.merged_unit_bundles(gf.pair_groupoid(2))
    assert gf.validate_action(P)["valid"]
    rep = gf.validate_principality(P)
    assert rep["injective"] and not rep["surjective"] and rep["unreached"]
    p, q = rep["unreached"][0]
    with pytest.raises(gf.DivisionError) as info:
        gf.division(P, p, q)
    assert info.value.kind == "no-such-arrow"


def test_redirected_action_entry_flags_one_point():
    G = gf.pair_groupoid(3)
    U = gf.unit_bundle(G)
    for p in range(U.n_total):
        for g in G.arrows_from(int(U.moment[p])):
            q = int(U.act[p, g])
            for q2 in U.fiber(int(U.proj[p])):
                if q2 == q:
                    continue
                act = U.act.copy()
                act[p, g] = q2
                rep = gf.validate_principality(U.replace(act=act))
                assert rep["failing_points"] == [p]


def test_action_mutations_are_caught():
    U = gf.unit_bundle(gf.cyclic_action_groupoid(3))
    rng = np.random.default_rng(1)
    for _ in range(20):
        p = int(rng.integers(U.n_total))
        g = int(rng.choice(U.G.arrows_from(int(U.moment[p]))))
        act = U.act.copy()
        act[p, g] = (act[p, g] + 1 + rng.integers(U.n_total - 1)) % U.n_total
        bad = U.replace(act=act)
        assert not (gf.validate_action(bad)["valid"] and gf.validate_principality(bad)["principal"])


def test_pullback_over_constant_map():
    G = gf.pair_groupoid(2)
    P = gf.pullback_trivial_bundle(G, [0, 0, 0])
    assert P.n_total == 6
    assert all(len(P.fiber(m)) == G.n_objects for m in range(3))
    assert gf.validate_action(P)["valid"] and gf.validate_principality(P)["principal"]


def test_pullback_along_identity_is_unit_bundle():
    G = gf.transitive_groupoid(2, 2)
    P = gf.pullback_trivial_bundle(G, range(G.n_objects))
    U = gf.unit_bundle(G)
    assert P.n_total == U.n_total
    assert gf.section_isomorphism(U, [int(u) for u in G.unit])["valid"]


def test_one_chart_and_constant_shift_cocycles():
    G = gf.pair_groupoid(4)
    U = gf.unit_bundle(G)
    lab = G.arrow_labels
    s1 = {m: lab.index(f"({m},0)") for m in range(4)}
    s2 = {m: lab.index(f"({m},1)") for m in range(4)}
    fam = gf.SectionFamily((range(4), range(4)), (s1, s2))
    phi = gf.transition_cocycle(U, fam)
    assert all(phi[(0, 0)][m] == G.unit[0] for m in range(4))
    assert {lab[g] for g in phi[(0, 1)].values()} == {"(0,1)"}
    assert {lab[g] for g in phi[(1, 0)].values()} == {"(1,0)"}
    assert gf.cocycle_report(U, fam)["valid"]


def test_cocycle_on_eight_point_base():
    G = gf.pair_groupoid(4)
    rng = np.random.default_rng(8)
    P = gf.pullback_trivial_bundle(G, rng.integers(0, 4, size=8))
    for seed in range(5):
        fam = gf.random_section_family(P, 3, seed, size=3)
        assert gf.cocycle_report(P, fam)["valid"]


def test_sections_must_lie_over_their_points():
    U = gf.unit_bundle(gf.pair_groupoid(2))
    fam = gf.SectionFamily(({0, 1},), ({0: 3, 1: 3},))
    with pytest.raises(ValueError):
        gf.transition_cocycle(U, fam)
    with pytest.raises(ValueError):
        gf.SectionFamily(({0, 1},), ({0: 0},))


@pytest.mark.parametrize("seed", range(20))
def test_random_principal_bundles(seed):
    P, sigma = gf.random_principal_bundle(seed)
    assert gf.validate_groupoid(P.G)["valid"]
    assert gf.validate_action(P)["valid"]
    assert gf.validate_principality(P)["principal"]
    assert gf.division_identities(P)["valid"]
    assert gf.cocycle_report(P, gf.random_section_family(P, 3, seed))["valid"]
    assert gf.section_isomorphism(P, sigma)["valid"]


@given(st.integers(0, 10 ** 6))
def test_json_round_trip(seed):
    P, _ = gf.random_principal_bundle(seed)
    Q = gf.loads(gf.dumps(P))
    for name in ("proj", "moment", "act"):
        assert np.array_equal(getattr(P, name), getattr(Q, name))
    for name in ("s", "t", "unit", "inv", "comp"):
        assert np.array_equal(getattr(P.G, name), getattr(Q.G, name))
    assert gf.dumps(Q) == gf.dumps(P)
    G2 = gf.loads(gf.dumps(P.G))
    assert np.array_equal(G2.comp, P.G.comp) and G2.arrow_labels == P.G.arrow_labels


def test_tables_are_immutable():
    G = gf.pair_groupoid(2)
    with pytest.raises(ValueError):
        G.comp[0, 0] = 3
    with pytest.raises(ValueError):
        gf.FiniteGroupoid(1, [0], [0], [0, 0], [0], [[0]])
