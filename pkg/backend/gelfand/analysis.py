import json
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from .catalog import get_pair
from .documents import (
    AnalysisReport,
    FamilyEntry,
    FunctionDocument,
    GelfandReport,
    GroupDocument,
    SpectralDocument,
    SubgroupDocument,
    WeightDocument,
)
from .group import BiInvariantFunction, GroupFunction, double_cosets, load_group, load_subgroup
from .hecke import is_gelfand_pair
from .sobolev import (
    SobolevParams,
    cyclic_modulus_family,
    embedding_lp_constant,
    embedding_sup_constant,
    translation_moduli,
    weight_from_document,
)
from .spherical import (
    SpectralVector,
    inverse_transform,
    plancherel_measure,
    spherical_basis,
    spherical_transform,
)
from .utils.errors import ConfigurationError, DomainError, PairMismatchError
from .utils.logger import base_logger, SUCCESS

logger = base_logger.getChild("Analysis")

BASIS_ORDER_TOLERANCE = 1e-9


def _pairs(values) -> List[tuple]:
    return [(float(v.real), float(v.imag)) for v in np.asarray(values, dtype=complex)]


def parse_weight_spec(spec: Union[str, WeightDocument, dict]) -> WeightDocument:
    """
    解析权重描述

    支持 "cayley"、"cayley:1,3"、"user:0,1,1.5" 以及指向权重 JSON 文档的路径。
    """
    if isinstance(spec, WeightDocument):
        return spec
    if isinstance(spec, dict):
        return WeightDocument.model_validate(spec)
    text = spec.strip()
    if text == "cayley":
        return WeightDocument(mode="cayley")
    mode, _, rest = text.partition(":")
    try:
        if mode == "cayley" and rest:
            return WeightDocument(mode="cayley", class_index=[int(v) for v in rest.split(",")])
        if mode == "user" and rest:
            return WeightDocument(mode="user", values=[float(v) for v in rest.split(",")])
    except ValueError as e:
        raise DomainError(f"无法解析权重描述 {spec!r}: {e}") from e
    path = Path(text)
    if path.is_file():
        return WeightDocument.model_validate_json(path.read_text(encoding="utf-8"))
    raise ConfigurationError(f"无法识别的权重描述: {spec!r}")


def gelfand_report(
    group_spec: Union[GroupDocument, dict], subgroup_spec: Union[SubgroupDocument, dict, list]
) -> GelfandReport:
    """按群与子群文档判定 Gelfand 性质"""
    group = load_group(group_spec)
    subgroup = load_subgroup(group, subgroup_spec)
    certificate = is_gelfand_pair(group, subgroup)
    return GelfandReport(
        group=group.name,
        order=group.order,
        subgroup_order=subgroup.order,
        classes=double_cosets(group, subgroup).size,
        verdict=certificate.verdict,
        witness=list(certificate.witness) if certificate.witness else None,
        max_asymmetry=certificate.max_asymmetry,
    )


def analyze_pair(
    name: str,
    weight: Union[str, WeightDocument, dict] = "cayley",
    s: float = 1.0,
    alpha: Optional[float] = None,
) -> AnalysisReport:
    """
    输出群对的球函数基、Plancherel 测度、权重 γ 与各嵌入常数

    Args:
        name: 内置群对名称
        weight: 权重描述
        s: Sobolev 阶
        alpha: 可选 α，给出时同时计算 L^{p'} 嵌入常数

    Returns:
        AnalysisReport
    """
    pair = get_pair(name)
    params = SobolevParams(s=s, alpha=alpha)
    basis = spherical_basis(pair.space)
    measure = plancherel_measure(basis)
    gamma = weight_from_document(basis, parse_weight_spec(weight))

    report = AnalysisReport(
        pair=name,
        order=pair.group.order,
        subgroup_order=pair.subgroup.order,
        class_sizes=pair.space.class_sizes.tolist(),
        basis=[_pairs(phi.class_values) for phi in basis],
        psd_min_eigenvalues=[phi.psd_min_eigenvalue for phi in basis],
        plancherel=measure.weights.tolist(),
        weight_mode=gamma.mode,
        gamma=gamma.values.tolist(),
        s=s,
        alpha=alpha,
        p=params.p if alpha is not None else None,
        sup_constant=embedding_sup_constant(gamma, s),
        lp_constant=embedding_lp_constant(gamma, params) if alpha is not None else None,
        moduli=translation_moduli(basis, gamma, s).tolist(),
    )
    logger.log(SUCCESS, f"{name}: 分析完成，{len(basis)} 个球函数")
    return report


def _check_pair(name: str, document_pair: str):
    if document_pair != name:
        raise PairMismatchError(f"文档属于群对 {document_pair}，与请求的 {name} 不一致")


def transform_function(name: str, document: FunctionDocument) -> SpectralDocument:
    """正变换：群上或类上的函数 → 谱向量，附带球函数基的取值用于逆变换时核对顺序"""
    _check_pair(name, document.pair)
    pair = get_pair(name)
    space = pair.space
    basis = spherical_basis(space)
    values = document.complex_values()
    if document.domain == "classes":
        f = BiInvariantFunction(space, values)
    else:
        f = GroupFunction(pair.group, values)
    spectrum = spherical_transform(f, basis)
    if spectrum.projected:
        logger.warning(f"{name}: 输入函数不是双不变的，已先做双平均投影")
    return SpectralDocument(
        pair=name,
        values=_pairs(spectrum.values),
        basis_order=[_pairs(phi.class_values) for phi in basis],
    )


def inverse_transform_document(name: str, document: SpectralDocument) -> FunctionDocument:
    """逆变换：谱向量 → 类上的函数"""
    _check_pair(name, document.pair)
    space = get_pair(name).space
    basis = spherical_basis(space)
    values = document.complex_values()
    if values.shape != (len(basis),):
        raise PairMismatchError(f"谱向量长度 {values.shape[0]} 与球函数个数 {len(basis)} 不一致")
    if document.basis_order:
        recorded = np.array(
            [[re + 1j * im for re, im in row] for row in document.basis_order], dtype=complex
        )
        if recorded.shape != basis.matrix.shape or np.max(np.abs(recorded - basis.matrix)) > BASIS_ORDER_TOLERANCE:
            raise PairMismatchError("谱向量记录的球函数顺序与当前基不一致")
    spectrum = SpectralVector(basis=basis, values=values)
    f = inverse_transform(spectrum, plancherel_measure(basis))
    return FunctionDocument.from_values(name, "classes", f.class_values)


def family_report(orders: Optional[List[int]] = None, s: float = 1.0) -> List[FamilyEntry]:
    records = cyclic_modulus_family(orders, s) if orders else cyclic_modulus_family(s=s)
    return [FamilyEntry(order=r.order, modulus=r.modulus) for r in records]


def read_document(path: Union[str, Path]) -> dict:
    """读取 UTF-8 JSON 文档"""
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"无法读取文档 {path}: {e}") from e
