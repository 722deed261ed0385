from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np

from .group import (
    AnyFunction,
    BiInvariantFunction,
    DoubleCosetSpace,
    as_group_function,
    bi_invariance_defect,
    project_bi_invariant,
)
from .hecke import convolution_operator_matrix, convolve, is_gelfand_pair
from .utils.cache import cached_on_owner
from .utils.config import analysis_config
from .utils.errors import (
    DomainError,
    NotGelfandPairError,
    PairMismatchError,
    PsdCapExceededError,
    SphericalSolverError,
)
from .utils.logger import base_logger, SUCCESS

logger = base_logger.getChild("Spherical")

SPHERICAL_TOLERANCE = 1e-10
BOUND_TOLERANCE = 1e-12
# 随机组合的特征值间距小于该值视为碰撞，换种子重试
COLLISION_GAP = 1e-8
ORDER_DECIMALS = 9


@dataclass(frozen=True, eq=False)
class SphericalFunction:
    space: DoubleCosetSpace
    class_values: np.ndarray
    index: int
    psd_min_eigenvalue: Optional[float]
    l2_norm_sq: float

    def values(self) -> np.ndarray:
        return self.class_values[self.space.class_of]

    def at(self, x: int) -> complex:
        return complex(self.class_values[self.space.class_of[x]])

    def as_bi_invariant(self) -> BiInvariantFunction:
        return BiInvariantFunction(self.space, self.class_values)


@dataclass(frozen=True, eq=False)
class SphericalBasis:
    """球函数基：平凡函数在前，其余按各类上取值的实部升序"""

    space: DoubleCosetSpace
    functions: tuple

    def __len__(self) -> int:
        return len(self.functions)

    def __iter__(self):
        return iter(self.functions)

    def __getitem__(self, j: int) -> SphericalFunction:
        return self.functions[j]

    @property
    def matrix(self) -> np.ndarray:
        """matrix[j, i] = φ_j(D_i)"""
        return np.array([phi.class_values for phi in self.functions])


@dataclass(frozen=True, eq=False)
class PlancherelMeasure:
    basis: SphericalBasis
    weights: np.ndarray


@dataclass(frozen=True, eq=False)
class SpectralVector:
    basis: SphericalBasis
    values: np.ndarray
    # 输入不是双不变函数时先做了投影
    projected: bool = False


@dataclass(frozen=True)
class PsdCertificate:
    verdict: bool
    min_eigenvalue: float
    asymmetry: float


@dataclass(frozen=True)
class PositiveDefiniteProperties:
    """半正定函数的三条推论：f(e) 为非负实数、f(x^{-1}) = conj f(x)、|f(x)| ⩽ f(e)"""

    value_at_identity: complex
    hermitian_defect: float
    bound_excess: float

    def holds(self, tolerance: float = SPHERICAL_TOLERANCE) -> bool:
        return (
            abs(self.value_at_identity.imag) <= tolerance
            and self.value_at_identity.real >= -tolerance
            and self.hermitian_defect <= tolerance
            and self.bound_excess <= BOUND_TOLERANCE
        )


# ---------------------------------------------------------------------------
# 半正定性
# ---------------------------------------------------------------------------


def is_positive_semidefinite(f: AnyFunction) -> PsdCertificate:
    """
    构造完整的 Gram 矩阵 A[u][v] = f(x_u^{-1}·x_v)，返回 Hermite 部分的最小特征值

    A 不是 Hermite 矩阵时判定为否，并给出不对称量。
    """
    f = as_group_function(f)
    group = f.group
    if group.order > analysis_config.psd_cap:
        raise PsdCapExceededError(
            f"群阶 {group.order} 超过 Gram 矩阵上限 {analysis_config.psd_cap}（GP_PSD_CAP）"
        )
    gram = f.values[group.table[group.inv]]
    asymmetry = float(np.max(np.abs(gram - gram.conj().T)))
    hermitian = (gram + gram.conj().T) / 2
    min_eigenvalue = float(np.linalg.eigvalsh(hermitian)[0])
    verdict = asymmetry <= SPHERICAL_TOLERANCE and min_eigenvalue >= -SPHERICAL_TOLERANCE
    return PsdCertificate(verdict=verdict, min_eigenvalue=min_eigenvalue, asymmetry=asymmetry)


def positive_definite_properties(f: AnyFunction) -> PositiveDefiniteProperties:
    f = as_group_function(f)
    values = f.values
    at_identity = complex(values[0])
    hermitian_defect = float(np.max(np.abs(values[f.group.inv] - np.conj(values))))
    bound_excess = float(np.max(np.abs(values)) - at_identity.real)
    return PositiveDefiniteProperties(at_identity, hermitian_defect, bound_excess)


def functional_equation_residual(phi: Union[SphericalFunction, BiInvariantFunction]) -> float:
    """
    max_{x,y} |(1/|K|) Σ_k φ(x k y) − φ(x)·φ(y)|

    φ 双不变时左右两边在 x、y 各自的双陪集上不变，因此只需遍历代表元对。
    """
    space = phi.space
    group = space.group
    values = phi.class_values[space.class_of]
    reps = space.rep_of
    average = np.zeros((len(reps), len(reps)), dtype=complex)
    for k in space.subgroup.members:
        xk = group.table[reps, k]
        average += values[group.table[xk[:, None], reps[None, :]]]
    average /= space.subgroup.order
    product = np.outer(values[reps], values[reps])
    return float(np.max(np.abs(average - product)))


# ---------------------------------------------------------------------------
# 联合对角化
# ---------------------------------------------------------------------------


def _normalized_operators(space: DoubleCosetSpace) -> List[np.ndarray]:
    """
    在 L² 正交归一基 1_{D_k}/sqrt(|D_k|/n) 下的平均算子 (n/|D_i|)·(1_{D_i} ⋆ ·)

    交换代数中的卷积算子是正规的，这个基下的矩阵也是正规矩阵。
    """
    weights = space.class_weights
    root = np.sqrt(weights)
    return [
        root[:, None] * convolution_operator_matrix(space, i) / root[None, :] / weights[i]
        for i in range(space.size)
    ]


def _min_gap(eigenvalues: np.ndarray) -> float:
    if len(eigenvalues) < 2:
        return np.inf
    gaps = np.abs(eigenvalues[:, None] - eigenvalues[None, :])
    gaps[np.diag_indices_from(gaps)] = np.inf
    return float(gaps.min())


def _random_combination_vectors(operators, seed: int) -> Optional[np.ndarray]:
    rng = np.random.default_rng(seed)
    coefficients = rng.uniform(-1.0, 1.0, size=len(operators))
    combination = sum(c * op for c, op in zip(coefficients, operators))
    eigenvalues, vectors = np.linalg.eig(combination)
    if _min_gap(eigenvalues) < COLLISION_GAP:
        return None
    return vectors


def _split_block(vectors: np.ndarray, operators, depth: int) -> np.ndarray:
    """在退化特征子空间上依次用下一个算子细分"""
    if depth == len(operators) or vectors.shape[1] == 1:
        return vectors
    q, _ = np.linalg.qr(vectors)
    restricted = q.conj().T @ operators[depth] @ q
    eigenvalues, local = np.linalg.eig(restricted)
    refined = q @ local
    blocks = []
    remaining = list(range(len(eigenvalues)))
    while remaining:
        anchor = eigenvalues[remaining[0]]
        cluster = [m for m in remaining if abs(eigenvalues[m] - anchor) < COLLISION_GAP]
        blocks.append(_split_block(refined[:, cluster], operators, depth + 1))
        remaining = [m for m in remaining if m not in cluster]
    return np.hstack(blocks)


def _joint_refinement_vectors(operators) -> np.ndarray:
    size = operators[0].shape[0]
    return _split_block(np.eye(size, dtype=complex), operators, 0)


def _to_class_values(space: DoubleCosetSpace, vectors: np.ndarray) -> Optional[List[np.ndarray]]:
    coefficients = vectors / np.sqrt(space.class_weights)[:, None]
    result = []
    for column in coefficients.T:
        if abs(column[0]) < 1e-12:
            return None
        values = column / column[0]
        values = np.where(np.abs(values.imag) < 1e-13, values.real + 0j, values)
        values[0] = 1.0
        result.append(values)
    return result


def _order_key(values: np.ndarray):
    rest = values[1:]
    return tuple(np.round(rest.real, ORDER_DECIMALS)) + tuple(np.round(rest.imag, ORDER_DECIMALS))


def _orthogonality_defect(space: DoubleCosetSpace, candidates: List[np.ndarray]) -> float:
    matrix = np.array(candidates)
    gram = (matrix * space.class_weights) @ matrix.conj().T
    off_diagonal = gram - np.diag(np.diag(gram))
    return float(np.max(np.abs(off_diagonal))) if len(candidates) > 1 else 0.0


def _certify(space: DoubleCosetSpace, candidates: List[np.ndarray]) -> Optional[str]:
    """返回 None 表示通过全部校验，否则返回失败原因"""
    for values in candidates:
        function = BiInvariantFunction(space, values)
        residual = functional_equation_residual(function)
        if residual > SPHERICAL_TOLERANCE:
            return f"函数方程残差 {residual:.3e}"
        if not positive_definite_properties(function).holds():
            return "不满足半正定函数的基本性质"
    defect = _orthogonality_defect(space, candidates)
    if defect > SPHERICAL_TOLERANCE:
        return f"正交性偏差 {defect:.3e}"
    return None


def _assemble(space: DoubleCosetSpace, candidates: List[np.ndarray]) -> SphericalBasis:
    trivial = int(np.argmin([np.max(np.abs(v - 1.0)) for v in candidates]))
    others = [v for m, v in enumerate(candidates) if m != trivial]
    others.sort(key=_order_key)
    ordered = [np.ones(space.size, dtype=complex)] + others

    psd_enabled = space.group.order <= analysis_config.psd_cap
    if not psd_enabled:
        logger.warning(
            f"群阶 {space.group.order} 超过 GP_PSD_CAP={analysis_config.psd_cap}，跳过 Gram 证书"
        )
    weights = space.class_weights
    functions = []
    for j, values in enumerate(ordered):
        values.setflags(write=False)
        psd_min = None
        if psd_enabled:
            psd_min = is_positive_semidefinite(BiInvariantFunction(space, values)).min_eigenvalue
            if psd_min < -SPHERICAL_TOLERANCE:
                raise SphericalSolverError(f"φ_{j} 的 Gram 最小特征值为 {psd_min:.3e}")
        functions.append(
            SphericalFunction(
                space=space,
                class_values=values,
                index=j,
                psd_min_eigenvalue=psd_min,
                l2_norm_sq=float(np.sum(weights * np.abs(values) ** 2)),
            )
        )
    return SphericalBasis(space=space, functions=tuple(functions))


@cached_on_owner
def spherical_basis(space: DoubleCosetSpace) -> SphericalBasis:
    """
    求 Gelfand 对的全部球函数

    先对可交换族 {M_i} 的随机实线性组合做特征分解；特征值碰撞或校验失败时换确定性种子重试，
    重试用尽后退回逐个算子细分退化子空间的联合细化。
    """
    certificate = is_gelfand_pair(space.group, space.subgroup)
    if not certificate.verdict:
        raise NotGelfandPairError(
            f"({space.group.name}, K) 不是 Gelfand 对，见证 {certificate.witness}"
        )
    operators = _normalized_operators(space)

    failure = "未尝试"
    for attempt in range(analysis_config.solver_retries + 1):
        vectors = _random_combination_vectors(operators, analysis_config.solver_seed + attempt)
        if vectors is None:
            failure = "特征值碰撞"
            logger.warning(f"{space.group.name}: 第 {attempt} 次随机组合特征值碰撞，重试")
            continue
        candidates = _to_class_values(space, vectors)
        failure = "特征向量在单位元处为零" if candidates is None else _certify(space, candidates)
        if failure is None:
            basis = _assemble(space, candidates)
            logger.log(SUCCESS, f"{space.group.name}: 求得 {len(basis)} 个球函数")
            return basis
        logger.warning(f"{space.group.name}: 第 {attempt} 次求解未通过校验（{failure}）")

    logger.warning(f"{space.group.name}: 随机组合重试用尽，改用联合细化")
    candidates = _to_class_values(space, _joint_refinement_vectors(operators))
    if candidates is not None and len(candidates) == space.size:
        failure = _certify(space, candidates)
        if failure is None:
            return _assemble(space, candidates)
    raise SphericalSolverError(f"{space.group.name}: 联合对角化失败（{failure}）")


# ---------------------------------------------------------------------------
# 球变换与 Plancherel 测度
# ---------------------------------------------------------------------------


def _class_values_on(f: AnyFunction, space: DoubleCosetSpace):
    if isinstance(f, BiInvariantFunction):
        if f.space is not space:
            raise PairMismatchError("函数与球函数基不在同一个群对上")
        return f.class_values, False
    if f.group is not space.group:
        raise PairMismatchError("函数与球函数基不在同一个群上")
    projected = bi_invariance_defect(f, space) > BOUND_TOLERANCE
    return project_bi_invariant(f, space.subgroup).class_values, projected


def spherical_transform(f: AnyFunction, basis: SphericalBasis) -> SpectralVector:
    """球变换 f̂(φ_j) = (1/n) Σ_x f(x)·φ_j(x^{-1})"""
    space = basis.space
    class_values, projected = _class_values_on(f, space)
    kernel = basis.matrix[:, space.inverse_class]
    values = kernel @ (space.class_weights * class_values)
    return SpectralVector(basis=basis, values=values, projected=projected)


def transform_at(f: AnyFunction, phi: SphericalFunction) -> complex:
    g = as_group_function(f)
    return complex(np.mean(g.values * phi.values()[g.group.inv]))


@cached_on_owner
def plancherel_measure(basis: SphericalBasis) -> PlancherelMeasure:
    """μ̂_j = 1/‖φ_j‖₂²，并在示性函数基上核对 Parseval 等式"""
    norms = np.array([phi.l2_norm_sq for phi in basis])
    if np.any(norms < 1e-14):
        raise SphericalSolverError("存在范数为零的球函数")
    weights = 1.0 / norms
    space = basis.space
    for i in range(space.size):
        transformed = spherical_transform(space.indicator(i), basis).values
        parseval = float(np.sum(weights * np.abs(transformed) ** 2))
        if abs(parseval - space.class_weights[i]) > SPHERICAL_TOLERANCE:
            raise SphericalSolverError(
                f"示性函数 1_D{i} 的 Parseval 偏差 {abs(parseval - space.class_weights[i]):.3e}"
            )
    weights.setflags(write=False)
    return PlancherelMeasure(basis=basis, weights=weights)


def inverse_transform(spectrum: SpectralVector, measure: PlancherelMeasure) -> BiInvariantFunction:
    """反演公式 f(x) = Σ_j μ̂_j·F_j·φ_j(x)"""
    if spectrum.basis is not measure.basis:
        raise PairMismatchError("谱向量与 Plancherel 测度不属于同一个基")
    values = (measure.weights * spectrum.values) @ spectrum.basis.matrix
    return BiInvariantFunction(spectrum.basis.space, values)


def lp_norm_spectral(spectrum: SpectralVector, p: float, measure: PlancherelMeasure) -> float:
    if p < 1:
        raise DomainError(f"L^p 范数要求 p ≥ 1，收到 p={p}")
    if spectrum.basis is not measure.basis:
        raise PairMismatchError("谱向量与 Plancherel 测度不属于同一个基")
    magnitudes = np.abs(spectrum.values)
    peak = float(magnitudes.max())
    if np.isinf(p) or peak == 0:
        return peak
    return float(peak * np.sum(measure.weights * (magnitudes / peak) ** p) ** (1.0 / p))


def spectral_inner_product(f: SpectralVector, g: SpectralVector, measure: PlancherelMeasure) -> complex:
    return complex(np.sum(measure.weights * f.values * np.conj(g.values)))


def eigenvalue_check(f: AnyFunction, phi: SphericalFunction) -> float:
    """max_x |(f⋆φ)(x) − f̂(φ)·φ(x)|，其中 λ_f = f̂(φ)"""
    if as_group_function(f).group is not phi.space.group:
        raise PairMismatchError("函数与球函数不在同一个群上")
    symbol = transform_at(f, phi)
    convolved = convolve(f, phi.as_bi_invariant()).values
    return float(np.max(np.abs(convolved - symbol * phi.values())))


def convolution_theorem_residual(f: AnyFunction, g: AnyFunction, basis: SphericalBasis) -> float:
    """max_j |(f⋆g)^(φ_j) − f̂(φ_j)·ĝ(φ_j)|"""
    lhs = spherical_transform(convolve(f, g), basis).values
    rhs = spherical_transform(f, basis).values * spherical_transform(g, basis).values
    return float(np.max(np.abs(lhs - rhs)))


def orthogonality_defect(basis: SphericalBasis) -> float:
    return _orthogonality_defect(basis.space, [phi.class_values for phi in basis])
