"""Tests for the bigraded complex layer.

Frozen answers here are computed by hand on complexes small enough to do on
paper: one- and two-variable exterior differentials, an integer multiply-by-2
complex, and quotient-module realizations with known annihilators.
"""
import pytest

from koszul.complexes import (
    COHOMOLOGICAL,
    HOMOLOGICAL,
    UNIT_LABEL,
    BasisLabel,
    FreeComplex,
    format_basis_element,
    homology_basis_at,
    homology_ranks,
    nonzero_table,
    shift_complex,
    tensor_complexes,
    verify_differential,
)
from koszul.linalg import Coefficients
from koszul.rings import DegreeWindow, QuotientModule, RingSpec


def one_variable_ring(p=2, t_max=8):
    return RingSpec(Coefficients.prime_field(p), (("x", 2),), DegreeWindow(0, t_max))


def exterior_on(ring, indices):
    """Free complex on generators e_i with d(e_S) the usual alternating sum."""
    cx = FreeComplex(ring, HOMOLOGICAL)
    from itertools import combinations

    gens = list(indices)
    subsets = []
    for r in range(len(gens) + 1):
        subsets.extend(combinations(range(len(gens)), r))
    subsets.sort(key=lambda s: (len(s), s))
    for sub in subsets:
        label = BasisLabel(e_part=tuple(i + 1 for i in sub))
        internal = sum(ring.degrees[gens[i]] for i in sub)
        cx.add_generator(label, len(sub), internal)
    for sub in subsets:
        label = BasisLabel(e_part=tuple(i + 1 for i in sub))
        terms = []
        for k, i in enumerate(sub):
            rest = tuple(sub[:k] + sub[k + 1 :])
            sign = 1 if k % 2 == 0 else -1
            coeff = ring.generator(ring.names[gens[i]]).scaled(sign)
            terms.append((coeff, BasisLabel(e_part=tuple(j + 1 for j in rest))))
        cx.set_diff(label, terms)
    return cx


def test_basis_label_validation():
    with pytest.raises(ValueError):
        BasisLabel(e_part=(2, 1))
    with pytest.raises(ValueError):
        BasisLabel(u_part=(3, 1))
    assert str(BasisLabel(e_part=(1, 3), u_part=(2, 2))) == "e(1,3)*u~(2,2)"
    assert str(UNIT_LABEL) == "1"


def test_format_basis_element():
    ring = one_variable_ring()
    assert format_basis_element(UNIT_LABEL, (3,), ring) == "x^3"
    assert format_basis_element(BasisLabel(e_part=(1,)), (0,), ring) == "e(1)"
    assert format_basis_element(BasisLabel(e_part=(1,)), (2,), ring) == "e(1)*x^2"


def test_one_variable_exterior_homology():
    ring = one_variable_ring()
    c = exterior_on(ring, [0]).realize()
    assert verify_differential(c).ok
    h = nonzero_table(homology_ranks(c))
    assert h == {(0, 0): h[(0, 0)]}
    assert h[(0, 0)].rank == 1 and h[(0, 0)].certain


def test_two_copies_of_same_variable():
    # d(e1) = d(e2) = x: homology is R/(x) at level 0 and one class at (1, 2)
    ring = one_variable_ring()
    c = exterior_on(ring, [0, 0]).realize()
    assert verify_differential(c).ok
    h = nonzero_table(homology_ranks(c))
    assert set(h) == {(0, 0), (1, 2)}
    assert h[(0, 0)].rank == 1
    assert h[(1, 2)].rank == 1


def test_euler_characteristic_matches_homology():
    ring = one_variable_ring()
    c = exterior_on(ring, [0, 0]).realize()
    h = homology_ranks(c)
    for t in range(0, 9, 2):
        chain_side = sum((-1) ** s * c.dim(s, t) for s in c.s_levels)
        hom_side = sum((-1) ** s * h[(s, t)].rank for s in c.s_levels if (s, t) in h)
        assert chain_side == hom_side


def test_tensor_matches_two_variable_complex():
    ring = RingSpec(
        Coefficients.prime_field(2),
        (("x1", 2), ("x2", 4)),
        DegreeWindow(0, 10),
    )
    a = exterior_on(ring, [0]).realize(description="first factor")
    b = exterior_on(ring, [1]).realize(description="second factor")
    ab = tensor_complexes(a, b)
    direct = exterior_on(ring, [0, 1]).realize()
    for (s, t) in set(ab.bidegrees()) | set(direct.bidegrees()):
        assert ab.dim(s, t) == direct.dim(s, t)
    ha = nonzero_table(homology_ranks(ab))
    hd = nonzero_table(homology_ranks(direct))
    assert {k: (v.rank, v.torsion) for k, v in ha.items()} == {
        k: (v.rank, v.torsion) for k, v in hd.items()
    }
    assert {k: v.rank for k, v in hd.items()} == {(0, 0): 1}


def test_tensor_rejects_quotient_realizations():
    ring = one_variable_ring()
    free = exterior_on(ring, [0])
    quotient = QuotientModule(ring, [ring.generator("x")])
    a = free.realize(module=quotient)
    b = free.realize()
    with pytest.raises(ValueError):
        tensor_complexes(a, b)


def test_integer_torsion_homology():
    # 0 -> Z --2--> Z -> 0 concentrated in internal degree 0
    ring = RingSpec(Coefficients.integers(), (), DegreeWindow(0, 0))
    cx = FreeComplex(ring, HOMOLOGICAL)
    cx.add_generator(UNIT_LABEL, 0, 0)
    e1 = BasisLabel(e_part=(1,))
    cx.add_generator(e1, 1, 0)
    cx.set_diff(e1, [(ring.constant(2), UNIT_LABEL)])
    c = cx.realize()
    assert verify_differential(c).ok
    h = homology_ranks(c)
    assert h[(0, 0)].rank == 0
    assert h[(0, 0)].torsion == (2,)
    assert h[(1, 0)].rank == 0 and h[(1, 0)].torsion == ()


def test_quotient_module_realization():
    # d(e1) = x realized over R/(x^2): one class survives at (1, 4)
    ring = one_variable_ring()
    x = ring.generator("x")
    quotient = QuotientModule(ring, [x * x], name="R/(x^2)")
    c = exterior_on(ring, [0]).realize(module=quotient)
    assert verify_differential(c).ok
    h = nonzero_table(homology_ranks(c))
    assert {k: v.rank for k, v in h.items()} == {(0, 0): 1, (1, 4): 1}


def test_shift_complex():
    ring = one_variable_ring()
    c = exterior_on(ring, [0, 0]).realize()
    shifted = shift_complex(c, 1)
    assert verify_differential(shifted).ok
    h = homology_ranks(c)
    hs = homology_ranks(shifted)
    for (s, t), entry in h.items():
        assert hs[(s - 1, t)].rank == entry.rank
    assert shifted.s_levels == [s - 1 for s in c.s_levels]


def test_truncation_marks_uncertain_levels():
    ring = one_variable_ring()
    cx = FreeComplex(ring, HOMOLOGICAL, complete_above=False)
    cx.add_generator(UNIT_LABEL, 0, 0)
    e1 = BasisLabel(e_part=(1,))
    cx.add_generator(e1, 1, 2)
    cx.set_diff(e1, [(ring.generator("x"), UNIT_LABEL)])
    h = homology_ranks(cx.realize())
    assert h[(0, 0)].certain
    assert not h[(1, 2)].certain


def test_cohomological_certainty_needs_outgoing_level():
    ring = one_variable_ring()
    cx = FreeComplex(ring, COHOMOLOGICAL, complete_above=False)
    cx.add_generator(UNIT_LABEL, 0, 0)
    h = homology_ranks(cx.realize())
    # ker d^0 cannot be trusted: the level-1 module was never described
    assert not h[(0, 0)].certain


def test_verify_differential_catches_corruption():
    ring = one_variable_ring()
    c = exterior_on(ring, [0, 0]).realize()
    m = c.matrix(2, 4)
    assert m.cols == 1
    m.set(0, 0, 0 if m.get(0, 0) else 1)
    c.diff[(2, 4)] = m
    report = verify_differential(c)
    assert not report.ok
    assert any(v.kind == "square" for v in report.violations)
    assert "(2,4)" in str(report) or any(v.s == 2 and v.t == 4 for v in report.violations)


def test_homology_basis_coordinates():
    ring = one_variable_ring()
    c = exterior_on(ring, [0, 0]).realize()
    hb = homology_basis_at(c, 1, 2)
    assert len(hb.reps) == 1
    # the class of e1 + e2 generates; e1 alone is not a cycle mod boundaries
    assert hb.coords({0: 1, 1: 1}) == [1]
    assert not hb.is_boundary({0: 1, 1: 1})
    hb4 = homology_basis_at(c, 1, 4)
    assert len(hb4.reps) == 0
    # x*(e1 + e2) is the boundary of e1e2 at t = 4
    assert hb4.is_boundary(c.matrix(2, 4).column(0))


def test_parallel_matches_serial():
    ring = one_variable_ring()
    c = exterior_on(ring, [0, 0]).realize()
    serial = homology_ranks(c, jobs=1)
    parallel = homology_ranks(c, jobs=2)
    assert {k: (v.rank, v.torsion, v.certain) for k, v in serial.items()} == {
        k: (v.rank, v.torsion, v.certain) for k, v in parallel.items()
    }
