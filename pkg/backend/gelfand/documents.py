from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic.alias_generators import to_camel


ALL_SUITES = [
    "gelfand",
    "spherical",
    "plancherel",
    "hy",
    "inverse-hy",
    "embeddings",
    "translation",
    "mollifier",
    "rellich-chain",
]

DEFAULT_P_GRID = [1.0, 1.25, 1.5, 1.75, 2.0]


class Document(BaseModel):
    """所有 JSON 文档的基类：字段以 camelCase 序列化，同时接受 snake_case"""

    model_config = ConfigDict(alias_generator=to_camel, populate_by_name=True)


# 群与子群描述
class GroupDocument(Document):
    name: str = "G"
    order: Optional[int] = None
    table: Optional[List[List[int]]] = None
    degree: Optional[int] = None
    generators: Optional[List[List[int]]] = None

    @model_validator(mode="after")
    def check_form(self):
        if (self.table is None) == (self.generators is None):
            raise ValueError("群描述必须且只能包含 table 或 generators 之一")
        if self.generators is not None and self.degree is None:
            raise ValueError("生成元形式需要给出 degree")
        if self.table is not None and self.order is not None:
            if self.order != len(self.table):
                raise ValueError(
                    f"order={self.order} 与乘法表行数 {len(self.table)} 不一致"
                )
        return self


class SubgroupDocument(Document):
    members: Optional[List[int]] = None
    generators: Optional[List[int]] = None

    @model_validator(mode="after")
    def check_form(self):
        if (self.members is None) == (self.generators is None):
            raise ValueError("子群描述必须且只能包含 members 或 generators 之一")
        return self

    def elements(self) -> List[int]:
        return list(self.members if self.members is not None else self.generators)


# 函数与谱向量
class FunctionDocument(Document):
    pair: str
    domain: Literal["group", "classes"] = "classes"
    values: List[Tuple[float, float]]

    def complex_values(self) -> np.ndarray:
        return np.array([re + 1j * im for re, im in self.values], dtype=complex)

    @classmethod
    def from_values(cls, pair: str, domain: str, values) -> "FunctionDocument":
        return cls(
            pair=pair,
            domain=domain,
            values=[(float(v.real), float(v.imag)) for v in np.asarray(values)],
        )


class SpectralDocument(Document):
    pair: str
    values: List[Tuple[float, float]]
    # 球函数在各双陪集上的取值，逆变换时用于核对基的顺序
    basis_order: List[List[Tuple[float, float]]] = Field(default_factory=list)

    def complex_values(self) -> np.ndarray:
        return np.array([re + 1j * im for re, im in self.values], dtype=complex)


# Sobolev 权重与参数
class WeightDocument(Document):
    mode: Literal["user", "cayley"]
    values: Optional[List[float]] = None
    class_index: Optional[Union[int, List[int]]] = Field(default=None, alias="class")
    exponent: float = Field(default=1.0, gt=0)

    @model_validator(mode="after")
    def check_mode(self):
        if self.mode == "user" and self.values is None:
            raise ValueError("user 模式需要给出 values")
        return self

    def class_indices(self) -> Optional[List[int]]:
        if self.class_index is None:
            return None
        if isinstance(self.class_index, int):
            return [self.class_index]
        return list(self.class_index)


class ParamsDocument(Document):
    s: float = Field(ge=0)
    alpha: Optional[float] = None


# 测试套件配置与报告
class SuiteConfig(Document):
    pairs: List[str]
    suites: List[str] = Field(default_factory=lambda: list(ALL_SUITES))
    trials: int = Field(default=100, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    tolerance: float = Field(default=1e-10, gt=0)
    weight: str = "cayley"
    s: float = Field(default=1.0, ge=0)
    alpha: Optional[float] = None
    p_grid: List[float] = Field(default_factory=lambda: list(DEFAULT_P_GRID))
    check_tolerances: Dict[str, float] = Field(default_factory=dict)
    mollifier_trials: int = Field(default=20, ge=1)

    def tolerance_for(self, check_name: str) -> float:
        return self.check_tolerances.get(check_name, self.tolerance)


class CheckRecord(Document):
    check_name: str
    pair: str
    kind: Literal["inequality", "equality", "verdict", "diagnostic"]
    params: Dict[str, Any] = Field(default_factory=dict)
    lhs: float
    rhs: float
    slack: float
    passed: bool = Field(alias="pass")
    trial_count: int = 1
    worst_trial_seed: Optional[int] = None


class SuiteSummary(Document):
    total: int = 0
    passed: int = 0
    failed: int = 0
    diagnostics: int = 0
    diagnostic_violations: int = 0


class SuiteReport(Document):
    version: str
    config: SuiteConfig
    records: List[CheckRecord] = Field(default_factory=list)
    summary: SuiteSummary = Field(default_factory=SuiteSummary)

    @property
    def all_passed(self) -> bool:
        return self.summary.failed == 0


# 命令行与服务的输出文档
class GelfandReport(Document):
    group: str
    order: int
    subgroup_order: int
    classes: int
    verdict: bool
    witness: Optional[List[int]] = None
    max_asymmetry: float = 0.0


class AnalysisReport(Document):
    pair: str
    order: int
    subgroup_order: int
    class_sizes: List[int]
    basis: List[List[Tuple[float, float]]]
    psd_min_eigenvalues: List[Optional[float]]
    plancherel: List[float]
    weight_mode: str
    gamma: List[float]
    s: float
    alpha: Optional[float] = None
    p: Optional[float] = None
    sup_constant: float
    lp_constant: Optional[float] = None
    # 按双陪集编号索引的平移模
    moduli: List[float]


class FamilyEntry(Document):
    order: int
    modulus: float
