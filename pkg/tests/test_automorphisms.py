import itertools
import random

import numpy as np
import pytest

from thlim import kernels
from thlim.automorphisms import (
    compose_perm, check_ambient_condition, check_chain_condition, designated_position,
    enumerate_automorphisms, find_constrained_automorphism, invert_perm, is_automorphism,
    recheck_certificate, tuple_orbits,
)
from thlim.families import (
    GF2_SPACE, ORDER, PARITY_ORDER, SYM_GROUP, build_chain, linear_order, parity_order, pure_set,
    symmetric_group, vector_space,
)
from thlim.pools import catalog_members, random_structure
from thlim.structure import Signature, StructureError


def brute_force(s, fix=()):
    return {p for p in itertools.permutations(range(s.size))
            if all(p[a] == a for a in fix) and is_automorphism(s, p)}


def gl2_maps(dim):
    """All automorphisms of GF(2)^dim as index permutations, via matrices."""
    n = 2**dim
    vecs = np.array([[(x >> t) & 1 for t in range(dim)] for x in range(n)])
    weights = 1 << np.arange(dim)
    out = []
    for bits in itertools.product((0, 1), repeat=dim * dim):
        m = np.array(bits).reshape(dim, dim)
        img = (vecs @ m.T) % 2 @ weights
        if len(set(img.tolist())) == n:
            out.append(tuple(img.tolist()))
    return out


def test_gl_oracle_matches_brute_force_small():
    assert set(gl2_maps(2)) == brute_force(vector_space(2, 2))
    assert len(gl2_maps(3)) == 168


@pytest.mark.parametrize("s,count", [
    (pure_set(3), 6), (parity_order(4), 1), (vector_space(2, 2), 6), (linear_order(5), 1),
    (symmetric_group(3), 6), (pure_set(1), 1),
])
def test_enumeration_counts(backend, s, count):
    auts = enumerate_automorphisms(s, backend=backend)
    assert auts.complete
    assert len(auts) == count
    assert set(auts.elements) == brute_force(s)
    assert auts.is_group()


def test_fixing_points(backend):
    auts = enumerate_automorphisms(pure_set(5), fix=(0, 3), backend=backend)
    assert len(auts) == 6 and all(g[0] == 0 and g[3] == 3 for g in auts.elements)
    assert len(enumerate_automorphisms(vector_space(2, 3), fix=(1,), backend=backend)) == 24


def test_budget_marks_incomplete(backend):
    auts = enumerate_automorphisms(pure_set(7), budget=50, backend=backend)
    assert not auts.complete
    assert len(auts) < 5040


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("THLIM_BUDGET", "30")
    assert not enumerate_automorphisms(pure_set(6)).complete


def test_backends_agree_on_catalog():
    if len(kernels.BACKENDS) < 2:
        pytest.skip("compiled kernel not built")
    sigs = [Signature(), ORDER, PARITY_ORDER, GF2_SPACE, SYM_GROUP]
    for sig in sigs:
        for s in catalog_members(sig, 8):
            runs = [enumerate_automorphisms(s, backend=b) for b in sorted(kernels.BACKENDS)]
            assert len({r.elements for r in runs}) == 1
            assert len({r.nodes for r in runs}) == 1


def test_is_group_rejects_non_groups():
    s = pure_set(3)
    full = enumerate_automorphisms(s)
    broken = type(full)(s, tuple(g for g in full.elements if g != (1, 2, 0)), True)
    assert not broken.is_group()
    assert not type(full)(s, ((1, 0, 2),), True).is_group()


def test_perm_helpers():
    g, h = (1, 2, 0), (1, 0, 2)
    assert compose_perm(g, h) == (2, 1, 0)
    assert compose_perm(g, invert_perm(g)) == (0, 1, 2)


# -- colour refinement ---------------------------------------------------------

def test_refinement_colours():
    assert len(set(kernels.refine_colors(pure_set(4)))) == 1
    assert len(set(kernels.refine_colors(linear_order(6)))) == 6
    cols = kernels.refine_colors(pure_set(4), pins=[(0, 2)])
    assert cols[0] == cols[4 + 2] and cols[0] != cols[1]


@pytest.mark.parametrize("sig", [
    Signature(relations=(("R", 2),)),
    Signature(relations=(("R", 2), ("P", 1))),
    Signature(functions=(("f", 1),)),
    Signature(functions=(("g", 2),)),
    Signature(functions=(("f", 1), ("c", 0)), relations=(("R", 2),)),
])
def test_search_matches_brute_force_on_random_structures(backend, sig):
    rng = random.Random(7)
    for _ in range(25):
        s = random_structure(sig, rng.randint(1, 5), rng)
        fix = tuple(sorted(rng.sample(range(s.size), rng.randint(0, min(2, s.size)))))
        got = enumerate_automorphisms(s, fix=fix, backend=backend)
        assert set(got.elements) == brute_force(s, fix)


def test_large_order_is_fast(backend):
    auts = enumerate_automorphisms(linear_order(30), backend=backend)
    assert auts.elements == (tuple(range(30)),)


# -- constrained search --------------------------------------------------------

def _satisfies(s, res, fix, carry, target):
    g = res.automorphism
    return is_automorphism(s, g) and all(g[a] == a for a in fix) and all(g[c] in target for c in carry)


def test_constrained_pure_set(backend):
    s = pure_set(6)
    res = find_constrained_automorphism(s, fix=(0,), carry=(0, 5), target=(0, 1, 2), backend=backend)
    assert res.found and _satisfies(s, res, (0,), (0, 5), {0, 1, 2})


def test_constrained_parity_absent(backend):
    res = find_constrained_automorphism(parity_order(6), carry=(5,), target=(0, 1, 2), backend=backend)
    assert not res.found and res.complete and not res.indeterminate


def test_constrained_gf2(backend):
    s = vector_space(2, 3)
    target = {0, 1, 2, 3}  # span of the first two basis vectors
    res = find_constrained_automorphism(s, fix=(0,), carry=(4,), target=target, backend=backend)
    assert res.found and _satisfies(s, res, (0,), (4,), target)
    oracle = [g for g in gl2_maps(3) if g[4] in target]
    assert res.automorphism in oracle


def test_constrained_budget_is_indeterminate(backend):
    s = pure_set(8)
    res = find_constrained_automorphism(s, carry=(7,), target=(0,), pins={0: 1}, budget=1, backend=backend)
    assert res.indeterminate


def test_constrained_rejects_foreign_elements():
    with pytest.raises(StructureError):
        find_constrained_automorphism(pure_set(3), fix=(5,))


def test_conflicting_pins_are_absent():
    res = find_constrained_automorphism(pure_set(3), fix=(0,), pins={0: 1})
    assert not res.found and res.complete


def test_tuple_orbits(backend):
    reps, wit = tuple_orbits(pure_set(4), (0,), 2, backend=backend)
    # pairs over {0..3} with 0 fixed: (0,0) (0,x) (x,0) (x,x) (x,y)
    assert len(reps) == 5
    for t, (rep, g) in wit.items():
        assert tuple(g[x] for x in rep) == t and g[0] == 0
    reps, _ = tuple_orbits(parity_order(3), (), 1, backend=backend)
    assert reps == [(0,), (1,), (2,)]


# -- chain conditions ----------------------------------------------------------

def _pure_set_oracle(chain, m):
    """Least position per constant set, by counting: on a pure set any
    bijection is an automorphism."""
    d = designated_position(chain, m)
    out = {}
    for a in itertools.combinations(range(chain.member(d).size), m):
        chosen = None
        for i in range(d, chain.length):
            ok = True
            for j in range(i + 1, chain.length + 1):
                a_img = {chain.composite(d, j)[x] for x in a}
                tgt = chain.image(i, j)
                # worst b uses m fresh elements
                if not a_img <= tgt or len(tgt) < len(a_img) + min(m, chain.member(j).size - len(a_img)):
                    ok = False
            if ok:
                chosen = chain.labels[i - 1]
                break
        out[a] = chosen
    return out


def _gf2_oracle(chain, m):
    d = designated_position(chain, m)
    maps = {j: gl2_maps(j) for j in range(1, chain.length + 1)}
    out = {}
    for a in itertools.combinations(range(chain.member(d).size), m):
        chosen = None
        for i in range(d, chain.length):
            ok = True
            for j in range(i + 1, chain.length + 1):
                a_img = [chain.composite(d, j)[x] for x in a]
                tgt = chain.image(i, j)
                fixing = [g for g in maps[j] if all(g[x] == x for x in a_img)]
                for b in itertools.product(range(2**j), repeat=m):
                    if not any(all(g[x] in tgt for x in a_img + list(b)) for g in fixing):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                chosen = chain.labels[i - 1]
                break
        out[a] = chosen
    return out


def test_chain_condition_finite_sets(backend):
    chain = build_chain("finite-sets", 8)
    certs = check_chain_condition(chain, 2, backend=backend)
    assert [c.status for c in certs] == ["certified"]
    assert certs[0].constants == (0, 1)
    assert chain.member(certs[0].chosen).size == 4
    assert {c.constants: c.chosen for c in certs} == _pure_set_oracle(chain, 2)
    assert recheck_certificate(certs[0], {j: chain.member(j) for j in certs[0].evidence})


def test_chain_condition_parity_fails(backend):
    chain = build_chain("parity-order", 6)
    certs = check_chain_condition(chain, 1, backend=backend)
    assert certs and all(c.status == "failed" for c in certs)
    assert all(c.failures for c in certs)


def test_chain_condition_gf2(backend):
    chain = build_chain("gf2-vector-space", 4)
    certs = check_chain_condition(chain, 1, backend=backend)
    got = {c.constants: c.chosen for c in certs}
    assert got == _gf2_oracle(chain, 1)
    assert got == {(0,): 1, (1,): 2}
    for c in certs:
        assert recheck_certificate(c, {j: chain.member(j) for j in c.evidence})


def test_chain_condition_indeterminate_on_tiny_budget():
    chain = build_chain("finite-sets", 6)
    certs = check_chain_condition(chain, 1, budget=1)
    assert all(c.status == "indeterminate" for c in certs)


def test_short_horizon_note():
    chain = build_chain("finite-sets", 2)
    certs = check_chain_condition(chain, 2)
    assert certs[0].status == "failed" and "horizon" in certs[0].note


def test_ambient_condition(backend):
    chain = build_chain("finite-sets", 8)
    certs = check_ambient_condition(chain, pure_set(12), 2, backend=backend)
    assert [chain.member(c.chosen).size for c in certs] == [4]
    assert recheck_certificate(certs[0], {"ambient": pure_set(12)})

    certs = check_ambient_condition(build_chain("parity-order", 8), parity_order(9), 1, backend=backend)
    assert all(c.status == "failed" for c in certs)

    chain = build_chain("gf2-vector-space", 3)
    certs = check_ambient_condition(chain, vector_space(2, 4), 1, backend=backend)
    assert all(c.status == "certified" for c in certs)
    assert all(recheck_certificate(c, {"ambient": vector_space(2, 4)}) for c in certs)


def test_ambient_must_contain_last_member():
    with pytest.raises(StructureError):
        check_ambient_condition(build_chain("parity-order", 5), linear_order(9), 1)


def test_recheck_detects_tampering():
    chain = build_chain("finite-sets", 8)
    cert = check_chain_condition(chain, 2)[0]
    key = next(iter(cert.evidence))
    rep = next(iter(cert.evidence[key]))
    n = chain.member(key).size
    cert.evidence[key][rep] = tuple(range(1, n)) + (0,)  # moves the constants
    assert not recheck_certificate(cert, {j: chain.member(j) for j in cert.evidence})
