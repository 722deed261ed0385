import math

import numpy as np
import pytest

from gelfand.catalog import catalog, get_pair
from gelfand.group import BiInvariantFunction
from gelfand.sampling import random_function
from gelfand.sobolev import (
    SobolevParams,
    cyclic_modulus_family,
    embedding_l2_check,
    embedding_lp_check,
    embedding_sup_check,
    embedding_sup_constant,
    hausdorff_young_check,
    inverse_hausdorff_young_check,
    lq_monotonicity_check,
    make_mollifier,
    make_weight,
    mollifier_bound_check,
    random_mollifier,
    rellich_chain_report,
    sobolev_norm,
    translation_bound_check,
    translation_modulus,
    young_bound_check,
)
from gelfand.spherical import spherical_basis
from gelfand.utils.errors import DomainError

GELFAND_PAIRS = [entry.name for entry in catalog() if entry.expected_gelfand]
SLACK = -1e-12


@pytest.fixture
def z4():
    space = get_pair("z4").space
    basis = spherical_basis(space)
    weight = make_weight(basis, "cayley", class_indices=[1, 3])
    delta = BiInvariantFunction(space, [1, 0, 0, 0])
    return space, basis, weight, delta


def _weight(name):
    basis = spherical_basis(get_pair(name).space)
    return make_weight(basis, "cayley")


def test_z4_cayley_weight(z4):
    _, basis, weight, _ = z4
    np.testing.assert_allclose(sorted(weight.values), [0, 1, 1, math.sqrt(2)], atol=1e-12)
    # γ_j 与 χ_j(1) 的对应：λ = 1 − Re χ(1)
    for phi, gamma in zip(basis, weight.values):
        assert gamma**2 == pytest.approx(1 - phi.class_values[1].real, abs=1e-12)
    assert weight.mode == "cayley:1,3"


def test_default_cayley_class_is_symmetrized():
    weight = _weight("z4")
    assert weight.mode == "cayley:1,3"


def test_s3_s2_cayley_weight():
    weight = _weight("s3/s2")
    np.testing.assert_allclose(weight.values, [0, math.sqrt(1.5)], atol=1e-12)


def test_cayley_exponent():
    basis = spherical_basis(get_pair("z4").space)
    weight = make_weight(basis, "cayley", class_indices=[1, 3], exponent=2)
    np.testing.assert_allclose(sorted(weight.values), [0, 1, 1, 2], atol=1e-12)


def test_weight_errors():
    basis = spherical_basis(get_pair("z4").space)
    with pytest.raises(DomainError):
        make_weight(basis, "cayley", class_indices=[1])
    with pytest.raises(DomainError):
        make_weight(basis, "user", values=[0, 1, -1, 0])
    with pytest.raises(DomainError):
        make_weight(basis, "user", values=[0, 1])
    with pytest.raises(DomainError):
        make_weight(basis, "cayley", exponent=0)


def test_sobolev_norm_of_delta(z4):
    _, _, weight, delta = z4
    assert sobolev_norm(delta, weight, 1) == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert sobolev_norm(delta, weight, 0) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(DomainError):
        sobolev_norm(delta, weight, -1)


def test_sobolev_norm_of_constant(z4):
    space, _, weight, _ = z4
    assert sobolev_norm(BiInvariantFunction(space, np.ones(4)), weight, 3) == pytest.approx(1.0)


def test_zero_weight_reduces_to_l2():
    space = get_pair("cube3").space
    basis = spherical_basis(space)
    weight = make_weight(basis, "user", values=np.zeros(len(basis)))
    for trial in range(10):
        f = random_function(space, 3, trial)
        for s in (0, 0.5, 2):
            check = embedding_l2_check(f, weight, s)
            assert check.lhs == pytest.approx(check.rhs, abs=1e-12)


@pytest.mark.parametrize("name", ["s3/s2", "d8", "z8"])
def test_sobolev_norm_axioms(name):
    space = get_pair(name).space
    weight = _weight(name)
    for trial in range(20):
        f = random_function(space, 8, trial)
        g = random_function(space, 9, trial)
        norm = sobolev_norm(f, weight, 1.5)
        assert sobolev_norm(f * (2 - 3j), weight, 1.5) == pytest.approx(abs(2 - 3j) * norm, abs=1e-12)
        assert sobolev_norm(f + g, weight, 1.5) <= norm + sobolev_norm(g, weight, 1.5) + 1e-12
        assert sobolev_norm(f, weight, 0.5) <= norm + 1e-12
    assert sobolev_norm(BiInvariantFunction(space, np.zeros(space.size)), weight, 1) == 0


def test_sup_constant_and_bound(z4):
    _, _, weight, delta = z4
    constant = embedding_sup_constant(weight, 1)
    assert constant**2 == pytest.approx(7 / 3, abs=1e-12)
    check = embedding_sup_check(delta, weight, 1)
    assert check.lhs == 1
    assert check.rhs == pytest.approx(math.sqrt(0.5) * math.sqrt(7 / 3))
    assert check.passed()


def test_lp_embedding_example(z4):
    _, _, weight, delta = z4
    params = SobolevParams(s=1, alpha=2)
    assert params.p == pytest.approx(4 / 3)
    assert params.p_conjugate == pytest.approx(4)
    check = embedding_lp_check(delta, weight, params)
    assert check.lhs == pytest.approx(0.25**0.25)
    constant = (1 + 1 / 4 + 1 / 9 + 1 / 4) ** 0.25
    assert check.rhs == pytest.approx(math.sqrt(0.5) * constant)
    assert check.passed()


@pytest.mark.parametrize("s, alpha", [(0, None), (1, 1), (2, 1), (-1, None)])
def test_params_domain(s, alpha):
    if s == 0 and alpha is None:
        assert SobolevParams(s=s).alpha is None
        return
    with pytest.raises(DomainError):
        SobolevParams(s=s, alpha=alpha)


@pytest.mark.parametrize("name", GELFAND_PAIRS)
def test_embedding_inequalities(name):
    space = get_pair(name).space
    weight = _weight(name)
    s = 1.0
    for trial in range(20):
        f = random_function(space, 17, trial)
        assert embedding_l2_check(f, weight, s).slack >= SLACK
        assert embedding_sup_check(f, weight, s).slack >= SLACK
        for alpha in (1.5 * s, 2 * s, 4 * s):
            assert embedding_lp_check(f, weight, SobolevParams(s=s, alpha=alpha)).slack >= SLACK


def test_hausdorff_young_examples(z4):
    _, basis, _, delta = z4
    check = hausdorff_young_check(delta, 1, basis)
    assert check.lhs == pytest.approx(0.25)
    assert check.rhs == pytest.approx(0.25)
    space = basis.space
    one = BiInvariantFunction(space, np.ones(4))
    inverse = inverse_hausdorff_young_check(one, 1.5, basis)
    assert inverse.lhs == pytest.approx(1.0)
    assert inverse.rhs == pytest.approx(1.0)
    with pytest.raises(DomainError):
        hausdorff_young_check(delta, 2.5, basis)
    with pytest.raises(DomainError):
        inverse_hausdorff_young_check(delta, 1, basis)


@pytest.mark.parametrize("name", GELFAND_PAIRS)
def test_hausdorff_young_grid(name):
    space = get_pair(name).space
    basis = spherical_basis(space)
    for trial in range(10):
        f = random_function(space, 23, trial)
        for p in (1, 1.25, 1.5, 1.75, 2):
            assert hausdorff_young_check(f, p, basis).slack >= SLACK
        for p in (1.25, 1.5, 2):
            assert inverse_hausdorff_young_check(f, p).slack >= SLACK
        forward = hausdorff_young_check(f, 2, basis)
        backward = inverse_hausdorff_young_check(f, 2, basis)
        assert forward.lhs == pytest.approx(forward.rhs, rel=1e-10)
        assert backward.lhs == pytest.approx(backward.rhs, rel=1e-10)


@pytest.mark.parametrize("p", [1.0001, 1 + 1e-6])
def test_hausdorff_young_near_one(z4, p):
    _, basis, _, _ = z4
    space = basis.space
    for trial in range(10):
        f = random_function(space, 29, trial)
        forward = hausdorff_young_check(f, p, basis)
        # p' 极大时 ‖f̂‖_{p'} 贴近 ‖f̂‖_∞
        assert forward.lhs == pytest.approx(hausdorff_young_check(f, 1, basis).lhs, rel=1e-3)
        assert forward.passed()
        backward = inverse_hausdorff_young_check(f, p, basis)
        assert math.isfinite(backward.lhs)
        assert backward.lhs == pytest.approx(np.max(np.abs(f.class_values)), rel=1e-3)
        assert backward.passed()


def test_translation_modulus_z4(z4):
    _, basis, weight, _ = z4
    assert translation_modulus(basis, weight, 1, 0) == 0
    assert translation_modulus(basis, weight, 1, 2) == pytest.approx(math.sqrt(2), abs=1e-12)
    assert translation_modulus(basis, weight, 1, 1) == pytest.approx(2 / math.sqrt(3), abs=1e-12)
    assert translation_modulus(basis, weight, 1, 3) == pytest.approx(translation_modulus(basis, weight, 1, 1))


def test_translation_modulus_vanishes_on_single_class():
    basis = spherical_basis(get_pair("s3/s3").space)
    weight = make_weight(basis, "cayley")
    for y in range(6):
        assert translation_modulus(basis, weight, 1, y) == 0


def test_translation_bound_z4_example(z4):
    _, _, weight, delta = z4
    check = translation_bound_check(delta, weight, 1, 2)
    assert check.lhs == pytest.approx(0.5)
    assert check.rhs == pytest.approx(1.0)
    assert check.projected_lhs == pytest.approx(0.5)
    assert check.identity_residual <= 1e-10


def test_translation_full_group_integral_can_exceed_bound():
    space = get_pair("s3/s2").space
    weight = _weight("s3/s2")
    indicator = space.indicator(0)
    y = int(space.classes[1][0])
    check = translation_bound_check(indicator, weight, 1, y)
    assert check.lhs == pytest.approx(2 / 3)
    assert check.rhs == pytest.approx(0.6)
    assert not check.passed()
    assert check.projected_lhs == pytest.approx(0.5)
    assert check.projected_slack >= SLACK


@pytest.mark.parametrize("name", GELFAND_PAIRS)
def test_translation_bound_all_elements(name):
    pair = get_pair(name)
    weight = _weight(name)
    for trial in range(3):
        f = random_function(pair.space, 31, trial)
        for y in range(pair.group.order):
            check = translation_bound_check(f, weight, 1, y)
            assert check.projected_slack >= SLACK
            assert check.identity_residual <= 1e-10
            if pair.subgroup.order == 1:
                assert check.slack >= SLACK


def test_identity_mollifier_on_trivial_subgroup(z4):
    space, _, weight, _ = z4
    eta = make_mollifier(space, [4, 0, 0, 0])
    f = random_function(space, 0, 0)
    check = mollifier_bound_check(f, weight, 1, eta)
    assert check.lhs == pytest.approx(0, abs=1e-14)
    assert check.passed()


def test_constant_mollifier_averages():
    space = get_pair("d8").space
    weight = _weight("d8")
    eta = make_mollifier(space, np.ones(space.size))
    f = random_function(space, 2, 5)
    check = mollifier_bound_check(f, weight, 1, eta)
    mean = np.sum(space.class_weights * f.class_values)
    expected = np.sqrt(np.sum(space.class_weights * np.abs(f.class_values - mean) ** 2))
    assert check.lhs == pytest.approx(expected)
    assert check.passed()


@pytest.mark.parametrize(
    "values",
    [[1.0, -0.5, 1.5, 0.0], [1.0, 1.0, 1.0, 1.0 + 1e-6], [0.0, 2.0, 2.0, 0.0], [1.0, 1.0j, 1.0, 1.0]],
)
def test_mollifier_validation(values):
    space = get_pair("z4").space
    with pytest.raises(DomainError):
        make_mollifier(space, values)


@pytest.mark.parametrize("name", GELFAND_PAIRS)
def test_mollifier_bound_random(name):
    space = get_pair(name).space
    weight = _weight(name)
    for m in range(5):
        eta = random_mollifier(space, 99, m)
        assert eta.support[0]
        for trial in range(5):
            f = random_function(space, 100 + m, trial)
            assert mollifier_bound_check(f, weight, 1, eta).slack >= SLACK


def test_young_and_lq_monotonicity():
    space = get_pair("s4/s3").space
    eta = random_mollifier(space, 4, 0)
    for trial in range(10):
        f = random_function(space, 5, trial, kind="general")
        g = random_function(space, 6, trial, kind="general")
        for p in (1, 4 / 3, 2):
            assert young_bound_check(f, g, eta, p).slack >= SLACK
        assert lq_monotonicity_check(f, 1, 2).slack >= SLACK
        assert lq_monotonicity_check(f, 2, np.inf).slack >= SLACK
    with pytest.raises(DomainError):
        lq_monotonicity_check(f, 3, 2)


def test_rellich_chain_z4(z4):
    _, _, weight, _ = z4
    report = rellich_chain_report(weight, SobolevParams(s=1, alpha=2), trials=5, seed=3)
    assert report.moduli[2] == pytest.approx(math.sqrt(2), abs=1e-12)
    assert report.moduli[1] == pytest.approx(report.moduli[3])
    assert report.lemma_constant == pytest.approx(min(report.moduli.values()))
    assert report.all_links_pass()
    assert len({link.name for link in report.links}) == 7


def test_rellich_chain_single_class():
    basis = spherical_basis(get_pair("s3/s3").space)
    weight = make_weight(basis, "cayley")
    report = rellich_chain_report(weight, SobolevParams(s=1, alpha=2), trials=3)
    assert all(value == 0 for value in report.moduli.values())
    assert report.lemma_constant is None
    assert report.all_links_pass()


@pytest.mark.parametrize("name", GELFAND_PAIRS)
def test_rellich_chain_every_pair(name):
    report = rellich_chain_report(_weight(name), SobolevParams(s=1, alpha=2), trials=4, seed=1)
    assert report.all_links_pass()


def test_cyclic_modulus_family():
    records = cyclic_modulus_family([4, 8, 16], s=1)
    assert [r.order for r in records] == [4, 8, 16]
    assert records[0].modulus == pytest.approx(2 / math.sqrt(3), abs=1e-12)
    for record in records:
        assert record.modulus > 0
