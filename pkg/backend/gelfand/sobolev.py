from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from .catalog import cyclic_pair
from .documents import ParamsDocument, WeightDocument
from .group import (
    AnyFunction,
    BiInvariantFunction,
    DoubleCosetSpace,
    as_group_function,
    holder_conjugate,
    lp_norm_group,
    project_bi_invariant,
)
from .hecke import convolve
from .sampling import random_function, random_mollifier_values, stream_id
from .spherical import (
    SphericalBasis,
    lp_norm_spectral,
    plancherel_measure,
    spherical_basis,
    spherical_transform,
)
from .utils.errors import DomainError, PairMismatchError
from .utils.logger import base_logger

logger = base_logger.getChild("Sobolev")

INEQUALITY_TOLERANCE = 1e-12
MOLLIFIER_MASS_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class SobolevWeight:
    basis: SphericalBasis
    values: np.ndarray
    mode: str
    exponent: float = 1.0


@dataclass(frozen=True)
class SobolevParams:
    s: float
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.s < 0:
            raise DomainError(f"Sobolev 阶 s 必须 ≥ 0，收到 s={self.s}")
        if self.alpha is not None and not self.alpha > self.s > 0:
            raise DomainError(f"需要 α > s > 0，收到 s={self.s}, α={self.alpha}")

    @property
    def p(self) -> float:
        if self.alpha is None:
            raise DomainError("未给出 α，无法确定指数 p")
        return 2 * self.alpha / (self.alpha + self.s)

    @property
    def p_conjugate(self) -> float:
        return holder_conjugate(self.p)

    @classmethod
    def from_document(cls, document: ParamsDocument) -> "SobolevParams":
        return cls(s=document.s, alpha=document.alpha)


@dataclass(frozen=True, eq=False)
class MollifierFunction:
    eta: BiInvariantFunction
    support: np.ndarray


@dataclass(frozen=True)
class InequalityCheck:
    """lhs ⩽ rhs 的一次数值核对，slack = rhs − lhs"""

    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def passed(self, tolerance: float = INEQUALITY_TOLERANCE) -> bool:
        return self.slack >= -tolerance


@dataclass(frozen=True)
class TranslationCheck(InequalityCheck):
    """
    lhs 是整个群上的 ∫|R_y f − f|²；projected_lhs 是 R_y f − f 双平均投影后的同一积分

    K 非平凡时只有后者一定被右端控制。
    """

    projected_lhs: float = 0.0
    identity_residual: float = 0.0

    @property
    def projected_slack(self) -> float:
        return self.rhs - self.projected_lhs


@dataclass(frozen=True)
class ChainLink:
    name: str
    trial: int
    check: InequalityCheck


@dataclass
class RellichChainReport:
    moduli: Dict[int, float]
    lemma_constant: Optional[float]
    note: str
    links: List[ChainLink] = field(default_factory=list)

    def all_links_pass(self, tolerance: float = INEQUALITY_TOLERANCE) -> bool:
        return all(link.check.passed(tolerance) for link in self.links)


@dataclass(frozen=True)
class FamilyRecord:
    order: int
    modulus: float


# ---------------------------------------------------------------------------
# 权重
# ---------------------------------------------------------------------------


def _symmetric_classes(space: DoubleCosetSpace, class_indices: Sequence[int]) -> List[int]:
    classes = sorted(set(int(i) for i in class_indices))
    if not classes:
        raise DomainError("Cayley 权重需要至少一个双陪集")
    for i in classes:
        if not 0 <= i < space.size:
            raise DomainError(f"双陪集编号 {i} 超出范围 0..{space.size - 1}")
        if int(space.inverse_class[i]) not in classes:
            raise DomainError(f"类 {classes} 在求逆下不封闭（D_{i} 的逆是 D_{space.inverse_class[i]}）")
    return classes


def _default_cayley_classes(space: DoubleCosetSpace) -> List[int]:
    if space.size == 1:
        return [0]
    return sorted({1, int(space.inverse_class[1])})


def make_weight(
    basis: SphericalBasis,
    mode: str,
    values: Optional[Sequence[float]] = None,
    class_indices: Optional[Union[int, Sequence[int]]] = None,
    exponent: float = 1.0,
) -> SobolevWeight:
    """
    构造 Sobolev 权重 γ

    Args:
        basis: 球函数基
        mode: "user" 直接给出 γ_j；"cayley" 取类并集 S 上 Cayley 算子的归一化 Laplace 特征值
        values: user 模式下的 d+1 个非负数
        class_indices: cayley 模式下的类编号（单个或列表），缺省为 D_1 ∪ D_1^{-1}
        exponent: cayley 模式下 γ_j = max(0, λ_j)^{r/2} 中的 r

    Returns:
        SobolevWeight
    """
    space = basis.space
    if mode == "user":
        if values is None:
            raise DomainError("user 模式需要给出 γ 的取值")
        gamma = np.asarray(values, dtype=float).reshape(-1)
        if gamma.shape != (len(basis),):
            raise DomainError(f"γ 的长度 {gamma.shape[0]} 与球函数个数 {len(basis)} 不一致")
        if not np.all(np.isfinite(gamma)) or np.any(gamma < 0):
            raise DomainError("γ 必须是有限的非负数")
        gamma = gamma.copy()
        gamma.setflags(write=False)
        return SobolevWeight(basis=basis, values=gamma, mode="user")

    if mode != "cayley":
        raise DomainError(f"未知的权重模式: {mode}")
    if exponent <= 0:
        raise DomainError(f"权重指数必须为正，收到 {exponent}")
    if class_indices is None:
        classes = _default_cayley_classes(space)
    else:
        classes = _symmetric_classes(space, np.atleast_1d(class_indices))

    generator = space.indicator(classes)
    transformed = spherical_transform(generator, basis).values
    laplacian = 1.0 - (transformed / transformed[0]).real
    gamma = np.maximum(laplacian, 0.0) ** (exponent / 2)
    gamma.setflags(write=False)
    tag = "cayley:" + ",".join(str(i) for i in classes)
    logger.debug(f"{space.group.name}: 权重 {tag}, γ = {np.round(gamma, 6).tolist()}")
    return SobolevWeight(basis=basis, values=gamma, mode=tag, exponent=exponent)


def weight_from_document(basis: SphericalBasis, document: WeightDocument) -> SobolevWeight:
    return make_weight(
        basis,
        document.mode,
        values=document.values,
        class_indices=document.class_indices(),
        exponent=document.exponent,
    )


# ---------------------------------------------------------------------------
# Sobolev 范数与嵌入
# ---------------------------------------------------------------------------


def _check_order(s: float):
    if s < 0:
        raise DomainError(f"Sobolev 阶 s 必须 ≥ 0，收到 s={s}")


def _bi_invariant(f: AnyFunction, basis: SphericalBasis) -> BiInvariantFunction:
    """非双不变输入先做双平均投影"""
    space = basis.space
    if isinstance(f, BiInvariantFunction):
        if f.space is not space:
            raise PairMismatchError("函数与权重不在同一个群对上")
        return f
    if f.group is not space.group:
        raise PairMismatchError("函数与权重不在同一个群上")
    return project_bi_invariant(f, space.subgroup)


def sobolev_norm(f: AnyFunction, weight: SobolevWeight, s: float) -> float:
    """‖f‖_{H^s_γ} = (Σ_j μ̂_j·(1+γ_j²)^s·|f̂_j|²)^{1/2}"""
    _check_order(s)
    measure = plancherel_measure(weight.basis)
    spectrum = spherical_transform(f, weight.basis).values
    return float(np.sqrt(np.sum(measure.weights * (1 + weight.values**2) ** s * np.abs(spectrum) ** 2)))


def embedding_l2_check(f: AnyFunction, weight: SobolevWeight, s: float) -> InequalityCheck:
    f = _bi_invariant(f, weight.basis)
    return InequalityCheck(lhs=lp_norm_group(f, 2), rhs=sobolev_norm(f, weight, s))


def embedding_sup_constant(weight: SobolevWeight, s: float) -> float:
    """C = ‖(1+γ²)^{-s/2}‖₂ = (Σ_j μ̂_j·(1+γ_j²)^{-s})^{1/2}"""
    _check_order(s)
    measure = plancherel_measure(weight.basis)
    return float(np.sqrt(np.sum(measure.weights * (1 + weight.values**2) ** (-s))))


def embedding_sup_check(f: AnyFunction, weight: SobolevWeight, s: float) -> InequalityCheck:
    f = _bi_invariant(f, weight.basis)
    return InequalityCheck(
        lhs=lp_norm_group(f, np.inf),
        rhs=embedding_sup_constant(weight, s) * sobolev_norm(f, weight, s),
    )


def embedding_lp_constant(weight: SobolevWeight, params: SobolevParams) -> float:
    """‖(1+γ²)^{-1}‖_α^{s/2} = (Σ_j μ̂_j·(1+γ_j²)^{-α})^{s/(2α)}"""
    if params.alpha is None:
        raise DomainError("L^{p'} 嵌入需要给出 α")
    measure = plancherel_measure(weight.basis)
    total = np.sum(measure.weights * (1 + weight.values**2) ** (-params.alpha))
    return float(total ** (params.s / (2 * params.alpha)))


def embedding_lp_check(f: AnyFunction, weight: SobolevWeight, params: SobolevParams) -> InequalityCheck:
    f = _bi_invariant(f, weight.basis)
    constant = embedding_lp_constant(weight, params)
    return InequalityCheck(
        lhs=lp_norm_group(f, params.p_conjugate),
        rhs=sobolev_norm(f, weight, params.s) * constant,
    )


# ---------------------------------------------------------------------------
# Hausdorff-Young
# ---------------------------------------------------------------------------


def hausdorff_young_check(
    f: AnyFunction, p: float, basis: Optional[SphericalBasis] = None
) -> InequalityCheck:
    """‖f̂‖_{p'} ⩽ ‖f‖_p，p ∈ [1, 2]"""
    if not 1 <= p <= 2:
        raise DomainError(f"Hausdorff-Young 要求 p ∈ [1, 2]，收到 p={p}")
    basis = basis or _basis_of(f)
    f = _bi_invariant(f, basis)
    spectrum = spherical_transform(f, basis)
    measure = plancherel_measure(basis)
    return InequalityCheck(
        lhs=lp_norm_spectral(spectrum, holder_conjugate(p), measure),
        rhs=lp_norm_group(f, p),
    )


def inverse_hausdorff_young_check(
    f: AnyFunction, p: float, basis: Optional[SphericalBasis] = None
) -> InequalityCheck:
    """‖f‖_{p'} ⩽ ‖f̂‖_p，p ∈ (1, 2]"""
    if not 1 < p <= 2:
        raise DomainError(f"逆 Hausdorff-Young 要求 p ∈ (1, 2]，收到 p={p}")
    basis = basis or _basis_of(f)
    f = _bi_invariant(f, basis)
    spectrum = spherical_transform(f, basis)
    measure = plancherel_measure(basis)
    return InequalityCheck(
        lhs=lp_norm_group(f, holder_conjugate(p)),
        rhs=lp_norm_spectral(spectrum, p, measure),
    )


def _basis_of(f: AnyFunction) -> SphericalBasis:
    if not isinstance(f, BiInvariantFunction):
        raise PairMismatchError("群上的一般函数需要显式给出球函数基")
    return spherical_basis(f.space)


# ---------------------------------------------------------------------------
# 平移与磨光估计
# ---------------------------------------------------------------------------


def _check_weight_basis(basis: SphericalBasis, weight: SobolevWeight):
    if weight.basis is not basis:
        raise PairMismatchError("权重不属于给定的球函数基")


def translation_moduli(basis: SphericalBasis, weight: SobolevWeight, s: float) -> np.ndarray:
    """每个双陪集 D_i 上的 sup_j |φ_j(D_i) − 1| / (1+γ_j²)^{s/2}"""
    _check_weight_basis(basis, weight)
    _check_order(s)
    scale = (1 + weight.values**2) ** (s / 2)
    return np.max(np.abs(basis.matrix - 1.0) / scale[:, None], axis=0)


def translation_modulus(basis: SphericalBasis, weight: SobolevWeight, s: float, y: int) -> float:
    space = basis.space
    if not 0 <= y < space.group.order:
        raise DomainError(f"元素编号 {y} 超出范围 0..{space.group.order - 1}")
    return float(translation_moduli(basis, weight, s)[space.class_of[y]])


def translation_bound_check(f: AnyFunction, weight: SobolevWeight, s: float, y: int) -> TranslationCheck:
    """
    ∫|f(x y^{-1}) − f(x)|² dx ⩽ modulus(y)²·‖f‖²_{H^s_γ}

    同时核对变换恒等式 (R_y f)^(φ) = f̂(φ)·φ(y^{-1})。
    """
    basis = weight.basis
    space = basis.space
    f = _bi_invariant(f, basis)
    g = as_group_function(f)
    difference = g.translate(y) - g
    full = lp_norm_group(difference, 2) ** 2
    projected = lp_norm_group(project_bi_invariant(difference, space.subgroup), 2) ** 2

    translated = spherical_transform(g.translate(y), basis).values
    expected = spherical_transform(f, basis).values * basis.matrix[:, space.class_of[space.group.inv[y]]]
    residual = float(np.max(np.abs(translated - expected)))

    modulus = translation_modulus(basis, weight, s, y)
    return TranslationCheck(
        lhs=full,
        rhs=modulus**2 * sobolev_norm(f, weight, s) ** 2,
        projected_lhs=projected,
        identity_residual=residual,
    )


def make_mollifier(space: DoubleCosetSpace, class_values: Sequence[float]) -> MollifierFunction:
    """
    校验并构造磨光函数 η：非负、∫η = 1、η(e) > 0
    """
    values = np.asarray(class_values, dtype=complex).reshape(-1)
    if values.shape != (space.size,):
        raise DomainError(f"磨光函数长度 {values.shape[0]} 与双陪集个数 {space.size} 不一致")
    if np.any(np.abs(values.imag) > 0) or np.any(values.real < 0):
        raise DomainError("磨光函数必须是非负实函数")
    mass = float(np.sum(space.class_weights * values.real))
    if abs(mass - 1.0) > MOLLIFIER_MASS_TOLERANCE:
        raise DomainError(f"磨光函数积分为 {mass}，应为 1")
    if values[0].real <= 0:
        raise DomainError("磨光函数在单位元处必须非零")
    support = values.real > 0
    support.setflags(write=False)
    return MollifierFunction(eta=BiInvariantFunction(space, values.real), support=support)


def random_mollifier(space: DoubleCosetSpace, seed: int, trial: int, stream: int = 0) -> MollifierFunction:
    return make_mollifier(space, random_mollifier_values(space, seed, trial, stream))


def mollifier_constant(weight: SobolevWeight, s: float, eta: MollifierFunction) -> float:
    moduli = translation_moduli(weight.basis, weight, s)
    return float(np.max(moduli[eta.support]))


def mollifier_bound_check(
    f: AnyFunction, weight: SobolevWeight, s: float, eta: MollifierFunction
) -> InequalityCheck:
    """‖f⋆η − f‖₂ ⩽ sup_{y∈supp η} modulus(y)·‖f‖_{H^s_γ}"""
    if eta.eta.space is not weight.basis.space:
        raise PairMismatchError("磨光函数与权重不在同一个群对上")
    f = _bi_invariant(f, weight.basis)
    smoothed = convolve(f, eta.eta)
    return InequalityCheck(
        lhs=lp_norm_group(smoothed - as_group_function(f), 2),
        rhs=mollifier_constant(weight, s, eta) * sobolev_norm(f, weight, s),
    )


def young_bound_check(f: AnyFunction, g: AnyFunction, eta: MollifierFunction, p: float) -> InequalityCheck:
    """‖(f−g)⋆η‖_∞ ⩽ ‖f−g‖_p·‖η‖_{p'}"""
    difference = as_group_function(f) - as_group_function(g)
    return InequalityCheck(
        lhs=lp_norm_group(convolve(difference, eta.eta), np.inf),
        rhs=lp_norm_group(difference, p) * lp_norm_group(eta.eta, holder_conjugate(p)),
    )


def lq_monotonicity_check(f: AnyFunction, q: float, r: float) -> InequalityCheck:
    """归一化测度下 q ⩽ r 时 ‖f‖_q ⩽ ‖f‖_r"""
    if q > r:
        raise DomainError(f"需要 q ⩽ r，收到 q={q}, r={r}")
    return InequalityCheck(lhs=lp_norm_group(f, q), rhs=lp_norm_group(f, r))


# ---------------------------------------------------------------------------
# Rellich-Kondrachov 证明链
# ---------------------------------------------------------------------------

DISCRETE_NOTE = (
    "离散群上 y → e 的极限条件在 y = e 处平凡成立，紧性只能通过证明链中逐个核对的不等式来认证"
)


def rellich_chain_report(
    weight: SobolevWeight,
    params: SobolevParams,
    trials: int = 20,
    seed: int = 0,
) -> RellichChainReport:
    """
    对随机的 f_n、f 与磨光函数 η 核对紧嵌入证明中的每一环

    Args:
        weight: Sobolev 权重
        params: 需要 α > s > 0
        trials: 随机试验次数
        seed: 主种子

    Returns:
        RellichChainReport，包含全部非单位元的平移模、Lemma 常数与每次试验的各环核对
    """
    if params.alpha is None:
        raise DomainError("证明链需要给出 α")
    basis = weight.basis
    space = basis.space
    s = params.s
    moduli_by_class = translation_moduli(basis, weight, s)
    moduli = {y: float(moduli_by_class[space.class_of[y]]) for y in range(1, space.group.order)}
    lemma_constant = float(np.min(moduli_by_class[1:])) if space.size > 1 else None

    links: List[ChainLink] = []
    for trial in range(trials):
        f_n = random_function(space, seed, trial, stream=stream_id("rellich-fn"))
        f = random_function(space, seed, trial, stream=stream_id("rellich-f"))
        eta = random_mollifier(space, seed, trial, stream=stream_id("rellich-eta"))
        smoothed_n = convolve(f_n, eta.eta)
        smoothed = convolve(f, eta.eta)
        triangle = InequalityCheck(
            lhs=lp_norm_group(f_n - f, 2),
            rhs=lp_norm_group(as_group_function(f_n) - smoothed_n, 2)
            + lp_norm_group(smoothed_n - smoothed, 2)
            + lp_norm_group(smoothed - as_group_function(f), 2),
        )
        difference = f_n - f
        links.extend(
            [
                ChainLink("triangle", trial, triangle),
                ChainLink("mollifier-fn", trial, mollifier_bound_check(f_n, weight, s, eta)),
                ChainLink("mollifier-f", trial, mollifier_bound_check(f, weight, s, eta)),
                ChainLink("young", trial, young_bound_check(f_n, f, eta, params.p)),
                ChainLink("sobolev-lp", trial, embedding_lp_check(difference, weight, params)),
                ChainLink("lq-monotonicity-1", trial, lq_monotonicity_check(difference, 1.0, params.p_conjugate)),
                ChainLink("lq-monotonicity-2", trial, lq_monotonicity_check(difference, 2.0, params.p_conjugate)),
            ]
        )
    return RellichChainReport(moduli=moduli, lemma_constant=lemma_constant, note=DISCRETE_NOTE, links=links)


DEFAULT_FAMILY_ORDERS = [4, 8, 16, 32, 64, 128, 256]


def cyclic_modulus_family(orders: Iterable[int] = DEFAULT_FAMILY_ORDERS, s: float = 1.0) -> List[FamilyRecord]:
    """(ℤ_n, {e}) 在 {±1} 上的 Cayley 权重下，生成元 1 处的平移模；只报告，不断言极限"""
    records = []
    for n in orders:
        space = cyclic_pair(n).space
        basis = spherical_basis(space)
        weight = make_weight(basis, "cayley", class_indices=[space.class_of[1], space.class_of[n - 1]])
        modulus = translation_modulus(basis, weight, s, 1)
        logger.info(f"ℤ_{n}: modulus(1) = {modulus:.6g}")
        records.append(FamilyRecord(order=int(n), modulus=modulus))
    return records
