import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import elem
from triesz.cstar import (
    AlgebraElement,
    AlgebraShape,
    SpectrumSet,
    canonical_key,
    is_invertible,
    is_normal,
    is_quasinilpotent,
    is_selfadjoint_projection,
    polyval_roots,
    spectral_radius,
    spectrum,
)
from triesz.errors import InputError, ShapeMismatch
from triesz.generators import random_matrix, random_nilpotent, random_unitary


def random_element(shape, rng):
    return AlgebraElement([random_matrix(n, rng) for n in shape])


shapes = st.lists(st.integers(1, 4), min_size=1, max_size=3)


def test_shape_validation():
    assert AlgebraShape([2, 1]).total_size == 3
    assert AlgebraShape([2, 1]).dimension == 5
    with pytest.raises(InputError):
        AlgebraShape([])
    with pytest.raises(InputError, match=r"block_dims\[1\]"):
        AlgebraShape([2, 0])
    with pytest.raises(InputError, match="exceeds"):
        AlgebraShape([65])
    assert AlgebraShape([65], max_dimension=5000).dimension == 4225


def test_element_validation():
    with pytest.raises(ShapeMismatch):
        AlgebraElement([np.eye(2)], AlgebraShape([3]))
    with pytest.raises(ShapeMismatch):
        AlgebraElement([np.eye(2)], AlgebraShape([2, 1]))
    x = elem(np.eye(2), [[1]])
    with pytest.raises(AttributeError):
        x.blocks = ()
    with pytest.raises(ValueError):
        x.blocks[0][0, 0] = 3
    with pytest.raises(TypeError):
        _ = x * x


def test_arithmetic_examples(rng):
    shape = AlgebraShape([2, 3])
    x = random_element(shape, rng)
    e = AlgebraElement.identity(shape)
    assert (e @ x).allclose(x, 0)
    assert x.H.H == x
    y = AlgebraElement.scalar(shape, 1j)
    assert y.H == AlgebraElement.scalar(shape, -1j)
    assert (x - x) == AlgebraElement.zeros(shape)
    assert (2 * x).allclose(x + x, 0)


@given(shapes, st.integers(0, 2**32 - 1))
def test_star_algebra_identities(dims, seed):
    rng = np.random.default_rng(seed)
    shape = AlgebraShape(dims)
    x, y = random_element(shape, rng), random_element(shape, rng)
    tol = 1e-12 * max(1, x.norm() * y.norm())
    assert ((x @ y).H - y.H @ x.H).norm() <= tol
    # C*-identity
    assert abs((x.H @ x).norm() - x.norm() ** 2) <= 1e-12 * x.norm() ** 2
    assert (x @ y).norm() <= x.norm() * y.norm() * (1 + 1e-12)


def test_spectrum_examples(diag125):
    s = spectrum(diag125)
    assert [round(z.real, 12) for z in s] == [5, 2, 1]
    assert s.multiplicities == (1, 1, 1)
    e = AlgebraElement.identity(AlgebraShape([2, 3, 1]))
    s = spectrum(e)
    assert len(s) == 1 and s.multiplicities == (6,)
    N = elem([[0, 1, 2], [0, 0, 3], [0, 0, 0]], [[0, 7], [0, 0]])
    s = spectrum(N)
    assert len(s) == 1 and abs(s.values[0]) <= 1e-14 and s.total_multiplicity == 5


def test_spectrum_matches_per_block_eigensolve(rng):
    for _ in range(30):
        shape = AlgebraShape(rng.integers(1, 6, size=int(rng.integers(1, 4))).tolist())
        a = random_element(shape, rng)
        s = spectrum(a)
        oracle = np.concatenate([np.linalg.eigvals(b) for b in a.blocks])
        assert s.total_multiplicity == shape.total_size
        for z in oracle:
            assert s.nearest(z)[1] <= 1e-8


def test_spectrum_with_cross_block_repeats():
    a = elem(np.diag([1, 2]), [[1]])
    s = spectrum(a)
    assert dict(zip(np.round(s.values.real, 9), s.multiplicities)) == {2.0: 1, 1.0: 2}


def test_spectral_radius(rng):
    assert spectral_radius(AlgebraElement([random_nilpotent(5, rng)])) <= 1e-12
    assert spectral_radius(elem(np.diag([1, -3]), [[2]])) == pytest.approx(3)
    assert spectral_radius(AlgebraElement.identity(AlgebraShape([2]))) == pytest.approx(1)


def test_quasinilpotency(rng):
    N = elem(np.triu(random_matrix(4, rng), 1), np.triu(random_matrix(2, rng), 1))
    q = is_quasinilpotent(N)
    assert q and q.power_test and q.agree
    q = is_quasinilpotent(AlgebraElement.identity(AlgebraShape([2])))
    assert not q and q.spectral_radius == pytest.approx(1)
    assert set(q.to_dict()) >= {"quasinilpotent", "spectral_radius", "bound"}


def test_invertible_normal_projection(rng):
    e = AlgebraElement.identity(AlgebraShape([2, 1]))
    assert is_invertible(e) and is_normal(e) and is_selfadjoint_projection(e)
    J = elem([[0, 1], [0, 0]])
    assert not is_invertible(J) and not is_normal(J)
    U = random_unitary(2, rng)
    P = AlgebraElement([U @ np.diag([0, 1]) @ U.conj().T])
    assert is_selfadjoint_projection(P) and not is_invertible(P)
    assert not is_selfadjoint_projection(elem([[1, 1], [0, 0]]))


def test_polyval_roots():
    a = elem(np.diag([1, 2]), [[5]])
    p = polyval_roots(a, [1, 2])
    np.testing.assert_allclose(p.blocks[1], [[12]])
    assert np.allclose(p.blocks[0], 0)


def test_canonical_order():
    pts = [1, -1, 2j, 0.5, -2j, 0]
    assert sorted(pts, key=canonical_key) == [-2j, 2j, 1, -1, 0.5, 0]


def test_spectrum_set_operations():
    a = SpectrumSet([(1, 2), (2j, 1)], 1e-8)
    b = SpectrumSet([(1 + 1e-10, 1)], 1e-8)
    assert b.issubset(a) and not a.issubset(b)
    assert a.without(b).same_points(SpectrumSet([(2j, 1)], 1e-8))
    assert a.union(b).multiplicities == (1, 3)
    assert a.plain().multiplicities == (1, 1)
    assert a.to_dict() == {"points": [[0.0, 2.0], [1.0, 0.0]], "multiplicities": [1, 2]}
    with pytest.raises(InputError):
        SpectrumSet([(1, 0)], 0)


@given(shapes, st.integers(0, 2**32 - 1), st.lists(st.complex_numbers(max_magnitude=2), min_size=1, max_size=3))
def test_spectral_mapping_for_polynomials(dims, seed, roots):
    rng = np.random.default_rng(seed)
    a = random_element(AlgebraShape(dims), rng)
    p = polyval_roots(a, roots)
    mapped = np.array([np.prod([z - r for r in roots]) for z in np.concatenate([np.linalg.eigvals(b) for b in a.blocks])])
    got = spectrum(p)
    scale = max(1.0, p.norm())
    # every mapped eigenvalue is a point of spectrum(p(a)), with matching multiplicity totals
    assert got.total_multiplicity == mapped.size
    for z in mapped:
        assert got.nearest(z)[1] <= 1e-6 * scale
    for z, m in zip(got.values, got.multiplicities):
        assert m <= int(np.sum(np.abs(mapped - z) <= 1e-6 * scale))


@given(shapes, st.integers(0, 2**32 - 1))
def test_norm_of_adjoint_and_radius_bound(dims, seed):
    rng = np.random.default_rng(seed)
    a = random_element(AlgebraShape(dims), rng)
    assert abs(a.norm() - a.H.norm()) <= 1e-8 * a.norm()
    assert spectral_radius(a) <= a.norm() * (1 + 1e-12)
