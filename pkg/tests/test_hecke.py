from fractions import Fraction

import numpy as np
import pytest

from gelfand.catalog import get_pair, list_available_pairs, expected_gelfand
from gelfand.group import BiInvariantFunction, GroupFunction, load_group, trivial_subgroup
from gelfand.hecke import (
    bi_invariant_convolve,
    convolution_operator_matrix,
    convolve,
    is_gelfand_pair,
    structure_constants,
)
from gelfand.sampling import random_function
from gelfand.utils.errors import DomainError


def test_convolution_with_delta_is_identity():
    pair = get_pair("s3/e")
    n = pair.group.order
    delta = GroupFunction(pair.group, np.eye(n)[0] * n)
    f = GroupFunction(pair.group, np.arange(n) + 1j)
    np.testing.assert_allclose(convolve(f, delta).values, f.values)
    np.testing.assert_allclose(convolve(delta, f).values, f.values)


def test_convolution_matches_definition():
    pair = get_pair("s3/s2")
    group = pair.group
    rng = np.random.default_rng(3)
    f = GroupFunction(group, rng.normal(size=6) + 1j * rng.normal(size=6))
    g = GroupFunction(group, rng.normal(size=6))
    expected = [
        sum(f.values[group.table[x, group.inv[y]]] * g.values[y] for y in range(6)) / 6 for x in range(6)
    ]
    np.testing.assert_allclose(convolve(f, g).values, expected)


@pytest.mark.parametrize("name", list_available_pairs())
def test_structure_constants_invariants(name):
    space = get_pair(name).space
    constants = structure_constants(space)
    assert np.all(constants.counts >= 0)
    assert constants.mass_balance_defect() == 0
    weights = space.class_weights
    lhs = np.einsum("ijk,k->ij", constants.tensor, weights)
    np.testing.assert_allclose(lhs, np.outer(weights, weights), atol=1e-14)


def test_structure_constants_s3_s2_exact():
    space = get_pair("s3/s2").space
    constants = structure_constants(space)
    # 1_{D1} ⋆ 1_{D1} 在 D_0 上为 4/6、在 D_1 上为 2/6
    assert constants.exact(1, 1, 0) == Fraction(2, 3)
    assert constants.exact(1, 1, 1) == Fraction(1, 3)
    assert constants.exact(0, 1, 1) == Fraction(1, 3)


@pytest.mark.parametrize("name", list_available_pairs())
def test_structure_constants_reproduce_convolution(name):
    space = get_pair(name).space
    if space.size > 12:
        pytest.skip("类太多，只抽查小空间")
    for i in range(space.size):
        for j in range(space.size):
            direct = convolve(space.indicator(i), space.indicator(j))
            expanded = bi_invariant_convolve(space.indicator(i), space.indicator(j))
            np.testing.assert_allclose(direct.values, expanded.expand().values, atol=1e-14)


@pytest.mark.parametrize("name", list_available_pairs())
def test_gelfand_verdict_matches_catalog(name):
    pair = get_pair(name)
    certificate = is_gelfand_pair(pair.group, pair.subgroup)
    assert certificate.verdict == expected_gelfand(name)
    assert (certificate.max_asymmetry == 0) == certificate.verdict


def test_non_gelfand_witness_is_genuine():
    pair = get_pair("s3/e")
    certificate = is_gelfand_pair(pair.group, pair.subgroup)
    i, j, x = certificate.witness
    space = pair.space
    left = convolve(space.indicator(i), space.indicator(j)).values[x]
    right = convolve(space.indicator(j), space.indicator(i)).values[x]
    assert abs(left - right) > 0
    assert certificate.max_asymmetry > 0


def test_bi_invariant_convolution_is_commutative_on_gelfand_pair():
    space = get_pair("cube3").space
    a = random_function(space, 5, 0)
    b = random_function(space, 5, 1)
    np.testing.assert_allclose(
        bi_invariant_convolve(a, b).class_values,
        bi_invariant_convolve(b, a).class_values,
        atol=1e-14,
    )


def test_convolution_operator_matrix_acts_on_class_values():
    space = get_pair("s4/s3").space
    g = BiInvariantFunction(space, [1.0, -2.0])
    matrix = convolution_operator_matrix(space, 1)
    expected = bi_invariant_convolve(space.indicator(1), g).class_values
    np.testing.assert_allclose(matrix @ g.class_values, expected)
    with pytest.raises(DomainError):
        convolution_operator_matrix(space, 5)


def test_convolution_examples():
    z4 = get_pair("z4").group
    delta = GroupFunction(z4, [1, 0, 0, 0])
    np.testing.assert_allclose(convolve(delta, delta).values, [0.25, 0, 0, 0])
    z2 = get_pair("z2").group
    shift = GroupFunction(z2, [0, 1])
    np.testing.assert_allclose(convolve(shift, shift).values, [0.5, 0])


@pytest.mark.parametrize("name", ["s3/e", "d8", "cube3"])
def test_convolution_is_associative(name):
    space = get_pair(name).space
    for trial in range(5):
        f, g, h = (random_function(space, 3, trial, kind="general", stream=s) for s in range(3))
        np.testing.assert_allclose(
            convolve(convolve(f, g), h).values,
            convolve(f, convolve(g, h)).values,
            atol=1e-12,
        )


@pytest.mark.parametrize("name", ["s3/s2", "s4/s3", "cube3", "z8"])
def test_algebra_unit(name):
    pair = get_pair(name)
    space = pair.space
    # (n/|K|)·1_K 是双不变卷积代数的单位元
    unit = space.indicator(0) * (pair.group.order / pair.subgroup.order)
    for trial in range(5):
        f = random_function(space, 8, trial)
        np.testing.assert_allclose(bi_invariant_convolve(unit, f).class_values, f.class_values, atol=1e-12)
        np.testing.assert_allclose(convolve(unit, f).values, f.expand().values, atol=1e-12)


def test_operator_matrix_examples():
    np.testing.assert_allclose(convolution_operator_matrix(get_pair("z2").space, 1), [[0, 0.5], [0.5, 0]])
    np.testing.assert_allclose(convolution_operator_matrix(get_pair("s3/s2").space, 0), np.eye(2) / 3)
    np.testing.assert_allclose(convolution_operator_matrix(get_pair("s3/s3").space, 0), [[1]])


@pytest.mark.parametrize("name", ["s3/e", "s4/e"])
def test_trivial_subgroup_witness(name):
    pair = get_pair(name)
    certificate = is_gelfand_pair(pair.group, pair.subgroup)
    assert not certificate.verdict
    assert certificate.max_asymmetry == pytest.approx(1 / pair.group.order)
    i, j, x = certificate.witness
    space = pair.space
    left = convolve(space.indicator(i), space.indicator(j)).values[x]
    right = convolve(space.indicator(j), space.indicator(i)).values[x]
    assert abs(left - right) == pytest.approx(1 / pair.group.order)


def test_gelfand_verdict_does_not_build_the_tensor(monkeypatch):
    def forbidden(space):
        raise AssertionError("判定不应构造完整结构常数张量")

    monkeypatch.setattr("gelfand.hecke.structure_constants", forbidden)
    for name in ("s3/s2", "s5/s4", "cube3", "d8", "s3/e"):
        pair = get_pair(name)
        assert is_gelfand_pair(pair.group, pair.subgroup).verdict == expected_gelfand(name)

    n = 720
    big = load_group({"name": "Z720", "table": ((np.arange(n)[:, None] + np.arange(n)[None, :]) % n).tolist()})
    assert is_gelfand_pair(big, trivial_subgroup(big)).verdict
