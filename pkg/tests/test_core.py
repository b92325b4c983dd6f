import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tidykit import catalog, core
from tidykit.core import (
    ElementSet,
    are_isomorphic,
    closure_violation,
    conjugacy_classes,
    conjugate_set,
    from_cayley_table,
    from_permutation_generators,
    generated_subgroup,
    is_normal,
    is_subgroup,
    normal_closure,
    quotient,
    semidirect_product,
)
from tidykit.errors import (
    ClosureTooLarge,
    EmptySet,
    GroupMismatch,
    InvalidPermutation,
    NotAGroup,
    NotAnAction,
    NotAnAutomorphism,
    NotNormal,
    NotSubgroup,
    OrderBoundExceeded,
)


def z_table(n, shift=0):
    """Cyclic group table with element k stored at index (k + shift) % n."""
    idx = lambda k: (k + shift) % n
    t = np.zeros((n, n), dtype=int)
    for a in range(n):
        for b in range(n):
            t[idx(a), idx(b)] = idx(a + b)
    return t


# ---------------------------------------------------------------- Cayley tables


def test_trivial_table():
    G = from_cayley_table([[0]])
    assert G.order == 1 and G.ord.tolist() == [1]


def test_identity_renumbered_to_zero():
    G = from_cayley_table(z_table(3, shift=2))
    assert (G.mul[0] == np.arange(3)).all() and (G.mul[:, 0] == np.arange(3)).all()
    assert sorted(G.ord.tolist()) == [1, 3, 3]


def test_corrupted_entry_reports_violation():
    t = z_table(6)
    t[2, 3] = 0  # row 2 now repeats 0
    with pytest.raises(NotAGroup) as exc:
        from_cayley_table(t)
    assert exc.value.triple is not None


def test_associativity_failure_reports_triple():
    # Latin square with identity and inverses but not associative (order 5 loop)
    t = np.array(
        [
            [0, 1, 2, 3, 4],
            [1, 0, 3, 4, 2],
            [2, 4, 0, 1, 3],
            [3, 2, 4, 0, 1],
            [4, 3, 1, 2, 0],
        ]
    )
    with pytest.raises(NotAGroup) as exc:
        from_cayley_table(t)
    a, b, c = exc.value.triple
    assert t[t[a, b], c] != t[a, t[b, c]]


@pytest.mark.parametrize(
    "table",
    [
        [[0, 1], [1, 1]],  # not Latin
        [[1, 0], [0, 1]],  # identity at 1 works: accepted below instead
    ],
)
def test_small_tables(table):
    if table == [[1, 0], [0, 1]]:
        assert from_cayley_table(table).order == 2
    else:
        with pytest.raises(NotAGroup):
            from_cayley_table(table)


def test_out_of_range_entries():
    with pytest.raises(NotAGroup):
        from_cayley_table([[0, 2], [1, 0]])


def test_order_divides_group_order(corpus):
    for G in corpus:
        assert all(G.order % int(o) == 0 for o in G.ord)
        assert G.ord[0] == 1
        assert all(len(G.cyc_closure[x]) == G.ord[x] for x in range(G.order))


# ---------------------------------------------------------------- permutation closure


def test_s3_from_transposition_and_three_cycle():
    G = from_permutation_generators([[1, 0, 2], [1, 2, 0]], 3)
    assert G.order == 6
    assert are_isomorphic(G, catalog.dihedral(6))


def test_empty_generators_give_trivial_group():
    assert from_permutation_generators([], 3).order == 1


def test_dihedral_of_square():
    G = from_permutation_generators([[1, 2, 3, 0], [0, 3, 2, 1]], 4)
    assert G.order == 8 and are_isomorphic(G, catalog.dihedral(8))


def test_invalid_permutation():
    with pytest.raises(InvalidPermutation):
        from_permutation_generators([[0, 0, 1]], 3)


def test_closure_too_large():
    with pytest.raises(ClosureTooLarge):
        from_permutation_generators([[1, 2, 3, 4, 5, 6, 0], [1, 0, 2, 3, 4, 5, 6]], 7)


def test_permutation_closure_is_deterministic():
    gens = [[1, 2, 3, 0], [1, 0, 2, 3]]
    a = from_permutation_generators(gens, 4)
    b = from_permutation_generators(gens, 4)
    assert (a.mul == b.mul).all()


# ---------------------------------------------------------------- subsets and subgroups


def test_generated_subgroup_examples():
    S3 = catalog.s3()
    assert generated_subgroup(S3, []) == S3.trivial()
    for x in range(6):
        assert generated_subgroup(S3, [x]) == S3.cyc_closure[x]
    transpositions = [x for x in range(6) if S3.ord[x] == 2]
    assert generated_subgroup(S3, transpositions[:2]) == S3.all()


def test_is_subgroup_examples():
    V = catalog.elementary_abelian(2, 2)
    assert is_subgroup(V, V.trivial())
    assert not is_subgroup(V, V.set([0, 1, 2]))
    with pytest.raises(EmptySet):
        is_subgroup(V, V.empty())


def test_cross_group_sets_rejected():
    A, B = catalog.cyclic(4), catalog.cyclic(4)
    with pytest.raises(GroupMismatch):
        A.all() & B.all()


def test_conjugate_set_in_s3():
    S3 = from_permutation_generators([[1, 0, 2], [1, 2, 0]], 3)
    # indices follow discovery order: 0 = id, 1 = (0 1), 2 = (0 1 2)
    t01 = S3.cyc_closure[1]
    c = conjugate_set(S3, t01, 2)
    assert len(c) == 2 and c != t01
    assert conjugate_set(S3, t01, 0) == t01


def test_normal_closure_of_double_transposition_is_klein():
    S4 = catalog.s4()
    x = next(i for i in range(24) if S4.ord[i] == 2 and len(normal_closure(S4, S4.set([i]))) == 4)
    V = normal_closure(S4, S4.set([x]))
    assert all(S4.ord[v] <= 2 for v in V)
    assert normal_closure(S4, S4.trivial()) == S4.trivial()


def test_abelian_normal_closure_is_generated_subgroup():
    G = catalog.direct_product(catalog.cyclic(4), catalog.cyclic(6))
    S = G.set([3, 7])
    assert normal_closure(G, S) == generated_subgroup(G, S)


# ---------------------------------------------------------------- quotients and products


def test_quotient_examples():
    S4 = catalog.s4()
    assert quotient(S4, S4.trivial()).child.order == 24
    assert quotient(S4, S4.all()).child.order == 1
    V = next(N for N in __import__("tidykit").structure.normal_subgroups(S4) if len(N) == 4)
    assert are_isomorphic(quotient(S4, V).child, catalog.s3())


def test_quotient_errors():
    S3 = catalog.s3()
    not_closed = next(S3.set([0, a, b]) for a in range(1, 6) for b in range(a + 1, 6)
                      if not is_subgroup(S3, S3.set([0, a, b])))
    with pytest.raises(NotSubgroup):
        quotient(S3, not_closed)
    t = next(x for x in range(6) if S3.ord[x] == 2)
    with pytest.raises(NotNormal):
        quotient(S3, S3.cyc_closure[t])


def test_quotient_is_homomorphism(corpus):
    from tidykit.structure import normal_subgroups

    for G in corpus[:60]:
        for N in normal_subgroups(G):
            qm = quotient(G, N)
            assert qm.child.order * len(N) == G.order
            pr = qm.projection
            assert (pr[G.mul] == qm.child.mul[pr[:, None], pr[None, :]]).all()
            assert ElementSet.from_mask(G, pr == 0) == N


def test_direct_product_examples():
    Z2 = catalog.cyclic(2)
    V = core.direct_product(Z2, Z2)
    assert V.label == "cyclic(2) x cyclic(2)"
    assert int(V.ord.max()) == 2
    A = catalog.s3()
    assert are_isomorphic(core.direct_product(A, catalog.cyclic(1)), A)
    G = catalog.direct_product(catalog.s3(), catalog.cyclic(3))
    from tidykit.structure import is_nilpotent

    assert G.order == 18 and not is_nilpotent(G)


def test_semidirect_examples():
    Z7, Z3, Z2 = catalog.cyclic(7), catalog.cyclic(3), catalog.cyclic(2)
    trivial = [list(range(7))] * 3
    assert are_isomorphic(semidirect_product(Z7, Z3, trivial), core.direct_product(Z7, Z3))
    act = [[(pow(2, h) * x) % 7 for x in range(7)] for h in range(3)]
    F21 = semidirect_product(Z7, Z3, act)
    assert F21.order == 21
    # brute-force centralizer check: nonidentity kernel elements commute only with the kernel
    K = {x for x in range(21) if F21.ord[x] in (1, 7)}
    for k in K - {0}:
        assert {g for g in range(21) if F21.mul[g, k] == F21.mul[k, g]} <= K
    act3 = [list(range(3)), [0, 2, 1]]
    assert are_isomorphic(semidirect_product(catalog.cyclic(3), Z2, act3), catalog.s3())


def test_semidirect_errors():
    Z4, Z2 = catalog.cyclic(4), catalog.cyclic(2)
    with pytest.raises(NotAnAutomorphism):
        semidirect_product(Z4, Z2, [[0, 1, 2, 3], [0, 2, 1, 3]])
    Z3 = catalog.cyclic(3)
    with pytest.raises(NotAnAction):
        semidirect_product(Z4, Z3, [[0, 1, 2, 3], [0, 3, 2, 1], [0, 3, 2, 1]])


# ---------------------------------------------------------------- isomorphism and classes


def test_isomorphism_examples():
    S4 = catalog.s4()
    assert are_isomorphic(S4, S4)
    assert not are_isomorphic(catalog.cyclic(4), catalog.elementary_abelian(2, 2))
    assert not are_isomorphic(catalog.dihedral(8), catalog.generalized_quaternion(8))
    with pytest.raises(OrderBoundExceeded):
        are_isomorphic(catalog.cyclic(128), catalog.cyclic(128))


def relabel(G, perm):
    """Same group with element i renamed perm[i] (perm[0] = 0)."""
    inv = np.argsort(perm)
    table = perm[G.mul[inv][:, inv]]
    return from_cayley_table(table)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["s4", "sl2_3", "dicyclic(12)", "a4", "direct_product(s3,cyclic(3))", "f9_z4"]), st.randoms())
def test_isomorphism_invariant_under_relabelling(expr, rnd):
    G = catalog.build_family(expr)
    perm = list(range(1, G.order))
    rnd.shuffle(perm)
    H = relabel(G, np.array([0] + perm))
    assert are_isomorphic(G, H) and are_isomorphic(H, G)


def test_isomorphism_is_an_equivalence_on_order_24():
    groups = [catalog.build_family(e) for e in ["s4", "sl2_3", "symmetric(4)", "direct_product(a4,cyclic(2))", "direct_product(s3,cyclic(4))"]]
    rel = [[are_isomorphic(a, b) for b in groups] for a in groups]
    for i, j, k in itertools.product(range(len(groups)), repeat=3):
        assert rel[i][i]
        assert rel[i][j] == rel[j][i]
        if rel[i][j] and rel[j][k]:
            assert rel[i][k]
    assert rel[0][2] and not rel[0][1]


def test_class_examples():
    assert len(conjugacy_classes(catalog.cyclic(10))) == 10
    assert sorted(len(c) for c in conjugacy_classes(catalog.s3())) == [1, 2, 3]
    assert sorted(len(c) for c in conjugacy_classes(catalog.generalized_quaternion(8))) == [1, 1, 2, 2, 2]
    S4 = catalog.s4()
    classes = conjugacy_classes(S4)
    assert classes[0] == S4.trivial()
    assert sorted(len(c) for c in classes) == [1, 3, 6, 6, 8]
    least = [c.least() for c in classes]
    assert least == sorted(least)


# ---------------------------------------------------------------- generated subgroup properties


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["s4", "sl2_3", "binary_octahedral", "f9_q8", "direct_product(dihedral(8),cyclic(3))"]), st.data())
def test_generated_subgroup_closure_properties(expr, data):
    G = catalog.build_family(expr)
    seed = data.draw(st.lists(st.integers(0, G.order - 1), max_size=3))
    extra = data.draw(st.lists(st.integers(0, G.order - 1), max_size=2))
    H = generated_subgroup(G, seed)
    assert is_subgroup(G, H) and closure_violation(G, H) is None
    assert generated_subgroup(G, H) == H
    assert H <= generated_subgroup(G, seed + extra)
    assert G.order % len(H) == 0


# ---------------------------------------------------------------- text formats


def test_parse_formats(tmp_path):
    G = core.parse_group_text("# Z3\ncayley 3\n0 1 2\n1 2 0\n2 0 1\n")
    assert G.order == 3
    H = core.parse_group_text("perm 4  # D8\n1 2 3 0\n0 3 2 1\n")
    assert H.order == 8
    p = tmp_path / "s4.txt"
    p.write_text(core.format_cayley(catalog.s4()))
    assert are_isomorphic(core.load_group(p), catalog.s4())


def test_max_order_env(monkeypatch):
    monkeypatch.setenv("TIDYKIT_MAX_ORDER", "20")
    assert core.max_order() == 20
    with pytest.raises(ClosureTooLarge):
        catalog.s4()
