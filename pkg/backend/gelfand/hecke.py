from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .group import (
    AnyFunction,
    BiInvariantFunction,
    DoubleCosetSpace,
    FiniteGroup,
    GroupFunction,
    Subgroup,
    as_group_function,
    double_cosets,
)
from .utils.cache import cached_on_owner
from .utils.errors import DomainError, PairMismatchError
from .utils.logger import base_logger

logger = base_logger.getChild("Hecke")

_CONVOLUTION_ROWS = 1024


def convolve(f: AnyFunction, g: AnyFunction) -> GroupFunction:
    """
    卷积 (f⋆g)(x) = (1/n) Σ_y f(x y^{-1}) g(y)

    有限群是幺模的，上式等于 (1/n) Σ_y f(y) g(y^{-1} x)。
    """
    f, g = as_group_function(f), as_group_function(g)
    if f.group is not g.group:
        raise PairMismatchError("卷积的两个函数不在同一个群上")
    group = f.group
    n = group.order
    result = np.empty(n, dtype=complex)
    for start in range(0, n, _CONVOLUTION_ROWS):
        # shifted[x, y] = x·y^{-1}
        shifted = group.table[start : start + _CONVOLUTION_ROWS][:, group.inv]
        rows = f.values[shifted]
        result[start : start + _CONVOLUTION_ROWS] = rows @ g.values
    return GroupFunction(group, result / n)


@dataclass(frozen=True, eq=False)
class StructureConstants:
    """
    1_{D_i} ⋆ 1_{D_j} = Σ_k c[i][j][k]·1_{D_k}

    counts[i, j, k] 为满足 a∈D_i、b∈D_j、a·b = rep_k 的有序对个数，c = counts / n 精确成立。
    """

    space: DoubleCosetSpace
    counts: np.ndarray

    @property
    def tensor(self) -> np.ndarray:
        return self.counts / self.space.group.order

    def exact(self, i: int, j: int, k: int) -> Fraction:
        return Fraction(int(self.counts[i, j, k]), self.space.group.order)

    def mass_balance_defect(self) -> int:
        """Σ_k counts[i,j,k]·|D_k| − |D_i|·|D_j| 的最大绝对值，精确整数"""
        sizes = self.space.class_sizes
        lhs = self.counts.astype(np.int64) @ sizes
        rhs = np.outer(sizes, sizes)
        return int(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True)
class GelfandCertificate:
    verdict: bool
    witness: Optional[Tuple[int, int, int]]
    max_asymmetry: float


def _factor_classes(space: DoubleCosetSpace, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """所有 a·b = rep_k 的分解：(a 所在类, b 所在类)，按 a 遍历整个群"""
    group = space.group
    # b = a^{-1}·rep_k 是唯一满足 a·b = rep_k 的右因子
    second = space.class_of[group.table[group.inv, space.rep_of[k]]]
    return space.class_of, second


@cached_on_owner
def structure_constants(space: DoubleCosetSpace) -> StructureConstants:
    size = space.size
    counts = np.zeros((size, size, size), dtype=np.int32)
    for k in range(size):
        first, second = _factor_classes(space, k)
        np.add.at(counts[:, :, k], (first, second), 1)
    counts.setflags(write=False)
    return StructureConstants(space=space, counts=counts)


def bi_invariant_convolve(
    a: BiInvariantFunction, b: BiInvariantFunction, constants: Optional[StructureConstants] = None
) -> BiInvariantFunction:
    """通过结构常数展开双不变函数的卷积"""
    if a.space is not b.space:
        raise PairMismatchError("两个双不变函数不在同一个双陪集空间上")
    constants = constants or structure_constants(a.space)
    values = np.einsum("i,j,ijk->k", a.class_values, b.class_values, constants.tensor)
    return BiInvariantFunction(a.space, values)


def _slab_asymmetry(space: DoubleCosetSpace, k: int) -> Tuple[int, int, int]:
    """
    max_{i,j} |counts[i,j,k] − counts[j,i,k]| 及其位置

    只对出现过的 (i, j) 计数，内存随群阶线性增长，不构造 d×d 的切片。
    """
    size = space.size
    first, second = _factor_classes(space, k)
    keys = np.concatenate([first * size + second, second * size + first])
    signs = np.concatenate([np.ones(len(first), dtype=np.int64), -np.ones(len(first), dtype=np.int64)])
    unique, inverse = np.unique(keys, return_inverse=True)
    difference = np.zeros(len(unique), dtype=np.int64)
    np.add.at(difference, inverse.reshape(-1), signs)
    worst = int(np.argmax(np.abs(difference)))
    i, j = divmod(int(unique[worst]), size)
    return abs(int(difference[worst])), i, j


def _non_gelfand(group: FiniteGroup, space: DoubleCosetSpace, value: int, i: int, j: int, k: int):
    witness = (i, j, int(space.rep_of[k]))
    logger.info(f"({group.name}, K) 不是 Gelfand 对，见证 (i={i}, j={j}, x={witness[2]})")
    return GelfandCertificate(verdict=False, witness=witness, max_asymmetry=value / group.order)


def is_gelfand_pair(group: FiniteGroup, subgroup: Subgroup) -> GelfandCertificate:
    """
    判断 (G, K) 是否为 Gelfand 对：示性函数的卷积两两可交换（精确整数比较）

    逐个 k 比较 counts[:, :, k] 与其转置，不构造完整的结构常数张量；K = {e} 时等价于 G 可交换。
    """
    space = double_cosets(group, subgroup)
    if subgroup.order == 1:
        if group.is_abelian():
            return GelfandCertificate(verdict=True, witness=None, max_asymmetry=0.0)
        a, b = divmod(int(np.argmax(group.table != group.table.T)), group.order)
        # 单点类：1_a ⋆ 1_b 在 a·b 处为 1/n，1_b ⋆ 1_a 在该处为 0
        return _non_gelfand(
            group, space, 1, int(space.class_of[a]), int(space.class_of[b]), int(space.class_of[group.table[a, b]])
        )

    worst_value, worst = 0, None
    for k in range(space.size):
        value, i, j = _slab_asymmetry(space, k)
        if value > worst_value:
            worst_value, worst = value, (i, j, k)
    if worst is None:
        return GelfandCertificate(verdict=True, witness=None, max_asymmetry=0.0)
    return _non_gelfand(group, space, worst_value, *worst)


def convolution_operator_matrix(space: DoubleCosetSpace, i: int) -> np.ndarray:
    """g ↦ 1_{D_i} ⋆ g 在示性函数基下的矩阵，(M_i)[k][j] = c[i][j][k]"""
    if not 0 <= i < space.size:
        raise DomainError(f"双陪集编号 {i} 超出范围 0..{space.size - 1}")
    return structure_constants(space).counts[i].T / space.group.order
