from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
from pydantic import ValidationError

from .documents import GroupDocument, SubgroupDocument
from .utils.cache import cached_on_owner
from .utils.config import analysis_config
from .utils.errors import DomainError, GroupSpecError, PairMismatchError
from .utils.logger import base_logger, SUCCESS

logger = base_logger.getChild("Group")

# 超过该阶时结合律改为抽样检查
EXHAUSTIVE_ASSOCIATIVITY_LIMIT = 64
ASSOCIATIVITY_SAMPLE_FACTOR = 10
_CHUNK_ELEMENTS = 1 << 22


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """有限群：元素编号 0..n-1，编号 0 为单位元，table[i, j] 为 x_i·x_j 的编号"""

    name: str
    table: np.ndarray
    inv: np.ndarray
    # 由置换生成时保留每个元素的一行像，便于按置换查找编号
    permutations: Optional[np.ndarray] = None

    @property
    def order(self) -> int:
        return int(self.table.shape[0])

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def index_of_permutation(self, images: Sequence[int]) -> int:
        if self.permutations is None:
            raise GroupSpecError(f"群 {self.name} 不是由置换给出的")
        hits = np.flatnonzero((self.permutations == np.asarray(images)).all(axis=1))
        if len(hits) == 0:
            raise GroupSpecError(f"置换 {list(images)} 不属于群 {self.name}")
        return int(hits[0])


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: FiniteGroup
    members: np.ndarray

    @property
    def order(self) -> int:
        return int(len(self.members))

    def __contains__(self, element: int) -> bool:
        index = np.searchsorted(self.members, element)
        return bool(index < len(self.members) and self.members[index] == element)


@dataclass(frozen=True)
class HaarMeasure:
    """归一化计数测度：每个元素质量 1/|carrier|"""

    carrier_size: int
    weight: Fraction

    @property
    def total_mass(self) -> Fraction:
        return self.weight * self.carrier_size


@dataclass(frozen=True, eq=False)
class DoubleCosetSpace:
    """双陪集空间 K\\G/K，类按最小代表元排序，D_0 = K"""

    group: FiniteGroup
    subgroup: Subgroup
    classes: tuple
    rep_of: np.ndarray
    class_of: np.ndarray
    # D_i^{-1} 仍是双陪集，记录其编号
    inverse_class: np.ndarray

    @property
    def size(self) -> int:
        return len(self.classes)

    @property
    def class_sizes(self) -> np.ndarray:
        return np.array([len(c) for c in self.classes], dtype=np.int64)

    @property
    def class_weights(self) -> np.ndarray:
        """各双陪集的 Haar 质量 |D_i|/n"""
        return self.class_sizes / self.group.order

    def indicator(self, class_indices: Union[int, Sequence[int]]) -> "BiInvariantFunction":
        values = np.zeros(self.size, dtype=complex)
        values[np.atleast_1d(class_indices)] = 1.0
        return BiInvariantFunction(self, values)


@dataclass(frozen=True, eq=False)
class GroupFunction:
    group: FiniteGroup
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex).reshape(-1)
        if values.shape != (self.group.order,):
            raise PairMismatchError(
                f"函数长度 {values.shape[0]} 与群阶 {self.group.order} 不一致"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("函数取值必须有限")
        object.__setattr__(self, "values", _frozen(values))

    def translate(self, y: int) -> "GroupFunction":
        """右平移 R_y f(x) = f(x y^{-1})"""
        return GroupFunction(self.group, self.values[self.group.table[:, self.group.inv[y]]])

    def _other_values(self, other) -> np.ndarray:
        other = as_group_function(other)
        if other.group is not self.group:
            raise PairMismatchError("两个函数不在同一个群上")
        return other.values

    def __add__(self, other) -> "GroupFunction":
        return GroupFunction(self.group, self.values + self._other_values(other))

    def __sub__(self, other) -> "GroupFunction":
        return GroupFunction(self.group, self.values - self._other_values(other))

    def __mul__(self, scalar: complex) -> "GroupFunction":
        return GroupFunction(self.group, self.values * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class BiInvariantFunction:
    """在双陪集上取常值的函数，只存储每个类上的值"""

    space: DoubleCosetSpace
    class_values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.class_values, dtype=complex).reshape(-1)
        if values.shape != (self.space.size,):
            raise PairMismatchError(
                f"类取值长度 {values.shape[0]} 与双陪集个数 {self.space.size} 不一致"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("函数取值必须有限")
        object.__setattr__(self, "class_values", _frozen(values))

    @property
    def group(self) -> FiniteGroup:
        return self.space.group

    def expand(self) -> GroupFunction:
        return GroupFunction(self.space.group, self.class_values[self.space.class_of])

    def _other_values(self, other) -> np.ndarray:
        if not isinstance(other, BiInvariantFunction) or other.space is not self.space:
            raise PairMismatchError("两个双不变函数不在同一个双陪集空间上")
        return other.class_values

    def __add__(self, other) -> "BiInvariantFunction":
        return BiInvariantFunction(self.space, self.class_values + self._other_values(other))

    def __sub__(self, other) -> "BiInvariantFunction":
        return BiInvariantFunction(self.space, self.class_values - self._other_values(other))

    def __mul__(self, scalar: complex) -> "BiInvariantFunction":
        return BiInvariantFunction(self.space, self.class_values * scalar)

    __rmul__ = __mul__


AnyFunction = Union[GroupFunction, BiInvariantFunction]


def as_group_function(f: AnyFunction) -> GroupFunction:
    if isinstance(f, BiInvariantFunction):
        return f.expand()
    return f


# ---------------------------------------------------------------------------
# 乘法表校验
# ---------------------------------------------------------------------------


def _check_latin_square(table: np.ndarray):
    n = table.shape[0]
    identity = np.arange(n)
    if not np.array_equal(table[0], identity) or not np.array_equal(table[:, 0], identity):
        raise GroupSpecError("元素 0 不是单位元：第 0 行或第 0 列不是恒等排列")
    bad_rows = np.flatnonzero(~(np.sort(table, axis=1) == identity).all(axis=1))
    if len(bad_rows):
        raise GroupSpecError(f"乘法表不是拉丁方：第 {int(bad_rows[0])} 行有重复元素")
    bad_cols = np.flatnonzero(~(np.sort(table, axis=0) == identity[:, None]).all(axis=0))
    if len(bad_cols):
        raise GroupSpecError(f"乘法表不是拉丁方：第 {int(bad_cols[0])} 列有重复元素")


def _check_associativity(table: np.ndarray):
    n = table.shape[0]
    if n <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT:
        left = table[table]  # left[i, j, k] = (x_i x_j) x_k
        right = table[np.arange(n)[:, None, None], table[None, :, :]]
        mismatch = np.argwhere(left != right)
    else:
        rng = np.random.default_rng(n)
        remaining = ASSOCIATIVITY_SAMPLE_FACTOR * n * n
        mismatch = np.empty((0, 3), dtype=np.int64)
        while remaining > 0 and len(mismatch) == 0:
            size = min(remaining, _CHUNK_ELEMENTS)
            i, j, k = rng.integers(0, n, size=(3, size))
            bad = table[table[i, j], k] != table[i, table[j, k]]
            mismatch = np.stack([i[bad], j[bad], k[bad]], axis=1)
            remaining -= size
    if len(mismatch):
        i, j, k = (int(v) for v in mismatch[0])
        raise GroupSpecError(f"乘法表不满足结合律：三元组 ({i}, {j}, {k})")


def _inverse_map(table: np.ndarray) -> np.ndarray:
    return np.argmax(table == 0, axis=1).astype(np.int64)


def group_from_table(name: str, table) -> FiniteGroup:
    table = np.asarray(table, dtype=np.int64)
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        raise GroupSpecError("乘法表必须是非空的 n×n 矩阵")
    n = table.shape[0]
    if table.min() < 0 or table.max() >= n:
        raise GroupSpecError(f"乘法表元素必须在 0..{n - 1} 之间")
    _check_latin_square(table)
    _check_associativity(table)
    inv = _inverse_map(table)
    return FiniteGroup(name=name, table=_frozen(table), inv=_frozen(inv))


# ---------------------------------------------------------------------------
# 置换生成元
# ---------------------------------------------------------------------------


def _close_permutations(degree: int, generators: List[tuple], max_order: int) -> List[tuple]:
    """广度优先闭包：单位元在前，按生成元给定顺序右乘"""
    identity = tuple(range(degree))
    seen = {identity}
    elements = [identity]
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for g in generators:
            # (x·g)[i] = x[g[i]]
            y = tuple(x[i] for i in g)
            if y not in seen:
                seen.add(y)
                elements.append(y)
                queue.append(y)
                if len(elements) > max_order:
                    raise GroupSpecError(
                        f"生成元闭包超过阶上限 {max_order}（可通过 GP_MAX_ORDER 调整）"
                    )
    return elements


def _permutation_table(perms: np.ndarray) -> np.ndarray:
    n, degree = perms.shape
    table = np.empty((n, n), dtype=np.int64)
    if degree <= 15:
        radix = degree ** np.arange(degree - 1, -1, -1, dtype=np.int64)
        keys = perms @ radix
        order = np.argsort(keys)
        sorted_keys = keys[order]
        rows = max(1, _CHUNK_ELEMENTS // max(1, n * degree))
        for start in range(0, n, rows):
            block = perms[start : start + rows]
            composed = block[:, perms]  # composed[a, j, k] = x_a[x_j[k]]
            table[start : start + rows] = order[np.searchsorted(sorted_keys, composed @ radix)]
    else:
        index = {tuple(p): i for i, p in enumerate(perms.tolist())}
        for i in range(n):
            for j in range(n):
                table[i, j] = index[tuple(perms[i][perms[j]])]
    return table


def group_from_permutations(
    name: str, degree: int, generators: Sequence[Sequence[int]], max_order: Optional[int] = None
) -> FiniteGroup:
    max_order = max_order or analysis_config.max_order
    if degree <= 0:
        raise GroupSpecError("置换次数必须为正整数")
    gens = []
    for g in generators:
        if sorted(g) != list(range(degree)):
            raise GroupSpecError(f"生成元 {list(g)} 不是 0..{degree - 1} 上的置换")
        gens.append(tuple(int(v) for v in g))
    perms = np.array(_close_permutations(degree, gens, max_order), dtype=np.int64)
    table = _permutation_table(perms)
    _check_latin_square(table)
    inv = _inverse_map(table)
    return FiniteGroup(
        name=name, table=_frozen(table), inv=_frozen(inv), permutations=_frozen(perms)
    )


def load_group(spec: Union[GroupDocument, Dict], max_order: Optional[int] = None) -> FiniteGroup:
    """
    按描述文档构造并校验有限群

    Args:
        spec: 乘法表形式 {"name", "order", "table"} 或置换形式 {"name", "degree", "generators"}
        max_order: 生成元闭包的阶上限，默认取 GP_MAX_ORDER

    Returns:
        校验通过的 FiniteGroup
    """
    try:
        document = spec if isinstance(spec, GroupDocument) else GroupDocument.model_validate(spec)
    except ValidationError as e:
        raise GroupSpecError(f"群描述文档格式错误: {e}") from e

    if document.table is not None:
        group = group_from_table(document.name, document.table)
    else:
        group = group_from_permutations(
            document.name, document.degree, document.generators, max_order
        )
    logger.log(SUCCESS, f"群 {group.name} 加载成功，阶={group.order}")
    return group


# ---------------------------------------------------------------------------
# 子群
# ---------------------------------------------------------------------------


def closure(group: FiniteGroup, elements: Sequence[int]) -> np.ndarray:
    """由给定元素生成的子群（有限群中乘法闭包即子群）"""
    n = group.order
    gens = sorted({int(e) for e in elements})
    for e in gens:
        if e < 0 or e >= n:
            raise GroupSpecError(f"元素下标 {e} 超出范围 0..{n - 1}")
    members = {0}
    frontier = [0]
    while frontier:
        products = {int(group.table[x, g]) for x in frontier for g in gens}
        frontier = sorted(products - members)
        members.update(frontier)
    return np.array(sorted(members), dtype=np.int64)


def load_subgroup(
    group: FiniteGroup, spec: Union[SubgroupDocument, Dict, Sequence[int]]
) -> Subgroup:
    """子群文档 {"members": [...]} 或 {"generators": [...]}，结果为闭包并排序"""
    try:
        if isinstance(spec, SubgroupDocument):
            document = spec
        elif isinstance(spec, dict):
            document = SubgroupDocument.model_validate(spec)
        else:
            document = SubgroupDocument(generators=list(spec))
    except ValidationError as e:
        raise GroupSpecError(f"子群描述文档格式错误: {e}") from e

    listed = document.elements()
    members = closure(group, listed)
    if document.members is not None and len(members) != len(set(listed) | {0}):
        logger.warning(f"给出的成员在 {group.name} 中不封闭，已取闭包，阶={len(members)}")
    return Subgroup(parent=group, members=_frozen(members))


def trivial_subgroup(group: FiniteGroup) -> Subgroup:
    return Subgroup(parent=group, members=_frozen(np.zeros(1, dtype=np.int64)))


def full_subgroup(group: FiniteGroup) -> Subgroup:
    return Subgroup(parent=group, members=_frozen(np.arange(group.order, dtype=np.int64)))


def haar_measure(carrier: Union[FiniteGroup, Subgroup]) -> HaarMeasure:
    size = carrier.order
    return HaarMeasure(carrier_size=size, weight=Fraction(1, size))


# ---------------------------------------------------------------------------
# 双陪集
# ---------------------------------------------------------------------------


def double_cosets(group: FiniteGroup, subgroup: Subgroup) -> DoubleCosetSpace:
    """K\\G/K；每个子群对象只构造一次，之后总是返回同一个空间对象"""
    if subgroup.parent is not group:
        raise PairMismatchError("子群不属于给定的群")
    return _double_coset_space(subgroup)


@cached_on_owner
def _double_coset_space(subgroup: Subgroup) -> DoubleCosetSpace:
    """反复饱和 x ↦ K·x·K"""
    group = subgroup.parent
    n = group.order
    members = subgroup.members
    class_of = np.full(n, -1, dtype=np.int64)
    classes = []
    for x in range(n):
        if class_of[x] >= 0:
            continue
        left = group.table[members, x]
        orbit = np.unique(group.table[left[:, None], members[None, :]])
        class_of[orbit] = len(classes)
        classes.append(_frozen(orbit))

    rep_of = np.array([int(c[0]) for c in classes], dtype=np.int64)
    inverse_class = class_of[group.inv[rep_of]]
    space = DoubleCosetSpace(
        group=group,
        subgroup=subgroup,
        classes=tuple(classes),
        rep_of=_frozen(rep_of),
        class_of=_frozen(class_of),
        inverse_class=_frozen(inverse_class),
    )
    logger.debug(f"{group.name}: {space.size} 个双陪集")
    return space


def project_bi_invariant(f: AnyFunction, subgroup: Subgroup) -> BiInvariantFunction:
    """
    双平均投影 f♮(x) = ∬_{K×K} f(k1 x k2) dk1 dk2

    (k1, k2) ↦ k1·x·k2 在 KxK 上的纤维大小相同，所以双平均等于 f 在双陪集上的平均值。
    """
    f = as_group_function(f)
    if f.group is not subgroup.parent:
        raise PairMismatchError("函数与子群不在同一个群上")
    space = double_cosets(subgroup.parent, subgroup)
    sizes = space.class_sizes
    real = np.bincount(space.class_of, weights=f.values.real, minlength=space.size)
    imag = np.bincount(space.class_of, weights=f.values.imag, minlength=space.size)
    return BiInvariantFunction(space, (real + 1j * imag) / sizes)


def bi_invariance_defect(f: AnyFunction, space: DoubleCosetSpace) -> float:
    """max_x |f(x) − f♮(x)|，双不变函数为 0"""
    if isinstance(f, BiInvariantFunction):
        return 0.0
    projected = project_bi_invariant(f, space.subgroup)
    return float(np.max(np.abs(f.values - projected.expand().values)))


# ---------------------------------------------------------------------------
# 范数与内积
# ---------------------------------------------------------------------------


def holder_conjugate(p: float) -> float:
    if p < 1:
        raise DomainError(f"指数 p={p} 必须 ≥ 1")
    if p == 1:
        return float("inf")
    if np.isinf(p):
        return 1.0
    return p / (p - 1)


def lp_norm_group(f: AnyFunction, p: float) -> float:
    """归一化 Haar 测度下的 L^p 范数，p = inf 时为最大模"""
    if p < 1:
        raise DomainError(f"L^p 范数要求 p ≥ 1，收到 p={p}")
    values = np.abs(as_group_function(f).values)
    peak = float(values.max())
    if np.isinf(p) or peak == 0:
        return peak
    # 先除以最大模，p 很大时 values**p 才不会上溢或下溢
    return float(peak * np.mean((values / peak) ** p) ** (1.0 / p))


def inner_product(f: AnyFunction, g: AnyFunction) -> complex:
    """⟨f, g⟩ = ∫ f·conj(g) dx"""
    f, g = as_group_function(f), as_group_function(g)
    if f.group is not g.group:
        raise PairMismatchError("两个函数不在同一个群上")
    return complex(np.mean(f.values * np.conj(g.values)))
