from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from .group import (
    DoubleCosetSpace,
    FiniteGroup,
    Subgroup,
    double_cosets,
    full_subgroup,
    group_from_permutations,
    group_from_table,
    load_subgroup,
    trivial_subgroup,
)
from .utils.errors import ConfigurationError
from .utils.logger import base_logger

logger = base_logger.getChild("Catalog")


@dataclass(frozen=True, eq=False)
class GelfandPair:
    name: str
    group: FiniteGroup
    subgroup: Subgroup

    @property
    def space(self) -> DoubleCosetSpace:
        return double_cosets(self.group, self.subgroup)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    builder: Callable[..., Tuple[FiniteGroup, Subgroup]]
    expected_gelfand: bool
    description: str
    parameters: Dict[str, Any] = field(default_factory=dict)

    def build(self) -> GelfandPair:
        group, subgroup = self.builder(**self.parameters)
        return GelfandPair(name=self.name, group=group, subgroup=subgroup)


# ---------------------------------------------------------------------------
# 群的构造
# ---------------------------------------------------------------------------


def _cyclic(n: int) -> Tuple[FiniteGroup, Subgroup]:
    elements = np.arange(n)
    group = group_from_table(f"Z{n}", (elements[:, None] + elements[None, :]) % n)
    return group, trivial_subgroup(group)


def _klein() -> Tuple[FiniteGroup, Subgroup]:
    elements = np.arange(4)
    group = group_from_table("V4", elements[:, None] ^ elements[None, :])
    return group, trivial_subgroup(group)


def _symmetric_generators(n: int) -> List[List[int]]:
    transposition = [1, 0] + list(range(2, n))
    cycle = list(range(1, n)) + [0]
    return [transposition, cycle]


def _symmetric(n: int, subgroup: str) -> Tuple[FiniteGroup, Subgroup]:
    """
    对称群 S_n 及其子群

    Args:
        n: 置换次数
        subgroup: "stabilizer" 为固定点 n-1 的 S_{n-1}，"trivial" 为 {e}，"full" 为 S_n
    """
    group = group_from_permutations(f"S{n}", n, _symmetric_generators(n))
    if subgroup == "trivial":
        return group, trivial_subgroup(group)
    if subgroup == "full":
        return group, full_subgroup(group)
    members = np.flatnonzero(group.permutations[:, n - 1] == n - 1)
    return group, load_subgroup(group, {"members": members.tolist()})


def _hyperoctahedral() -> Tuple[FiniteGroup, Subgroup]:
    """B_3 = ℤ₂³⋊S₃ 作用在 {0,1,2} ∪ {3,4,5} 上，i+3 表示坐标 i 取反；K 为不变号的 S₃"""
    generators = [
        [1, 0, 2, 4, 3, 5],
        [1, 2, 0, 4, 5, 3],
        [3, 1, 2, 0, 4, 5],
    ]
    group = group_from_permutations("B3", 6, generators)
    members = np.flatnonzero(np.all(group.permutations[:, :3] < 3, axis=1))
    return group, load_subgroup(group, {"members": members.tolist()})


def _dihedral() -> Tuple[FiniteGroup, Subgroup]:
    group = group_from_permutations("D8", 4, [[1, 2, 3, 0], [0, 3, 2, 1]])
    reflection = group.index_of_permutation([0, 3, 2, 1])
    return group, load_subgroup(group, [reflection])


AVAILABLE_PAIRS: Dict[str, CatalogEntry] = {
    **{
        f"z{n}": CatalogEntry(f"z{n}", _cyclic, True, f"循环群 ℤ_{n} 与平凡子群", {"n": n})
        for n in (2, 3, 4, 8, 16, 64)
    },
    "klein4": CatalogEntry("klein4", _klein, True, "Klein 四元群与平凡子群"),
    **{
        f"s{n}/s{n - 1}": CatalogEntry(
            f"s{n}/s{n - 1}",
            _symmetric,
            True,
            f"(S_{n}, S_{n - 1})，S_{n - 1} 为点 {n - 1} 的稳定子",
            {"n": n, "subgroup": "stabilizer"},
        )
        for n in (3, 4, 5)
    },
    "cube3": CatalogEntry("cube3", _hyperoctahedral, True, "超八面体群 ℤ₂³⋊S₃ 与 S₃（Hamming 立方体）"),
    "d8": CatalogEntry("d8", _dihedral, True, "8 阶二面体群与 2 阶反射子群"),
    "s3/s3": CatalogEntry("s3/s3", _symmetric, True, "(S₃, S₃)，只有一个双陪集", {"n": 3, "subgroup": "full"}),
    "s3/e": CatalogEntry("s3/e", _symmetric, False, "(S₃, {e})，非交换，阴性对照", {"n": 3, "subgroup": "trivial"}),
    "s4/e": CatalogEntry("s4/e", _symmetric, False, "(S₄, {e})，非交换，阴性对照", {"n": 4, "subgroup": "trivial"}),
}


def catalog() -> List[CatalogEntry]:
    return list(AVAILABLE_PAIRS.values())


def list_available_pairs() -> List[str]:
    """列出所有内置群对"""
    return list(AVAILABLE_PAIRS.keys())


@lru_cache(maxsize=None)
def get_pair(name: str) -> GelfandPair:
    """按名称构造内置群对，结果缓存"""
    if name not in AVAILABLE_PAIRS:
        raise ConfigurationError(f"未知的群对: {name}，可用: {', '.join(list_available_pairs())}")
    pair = AVAILABLE_PAIRS[name].build()
    logger.debug(f"构造群对 {name}: |G|={pair.group.order}, |K|={pair.subgroup.order}")
    return pair


def expected_gelfand(name: str) -> bool:
    if name not in AVAILABLE_PAIRS:
        raise ConfigurationError(f"未知的群对: {name}")
    return AVAILABLE_PAIRS[name].expected_gelfand


@lru_cache(maxsize=None)
def cyclic_pair(n: int) -> GelfandPair:
    """任意阶的 (ℤ_n, {e})，内置的 z* 条目直接复用"""
    if f"z{n}" in AVAILABLE_PAIRS:
        return get_pair(f"z{n}")
    group, subgroup = _cyclic(n)
    return GelfandPair(name=f"z{n}", group=group, subgroup=subgroup)
