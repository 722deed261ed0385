import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from . import __version__
from .analysis import parse_weight_spec
from .catalog import GelfandPair, expected_gelfand, get_pair, list_available_pairs
from .documents import ALL_SUITES, CheckRecord, SuiteConfig, SuiteReport, SuiteSummary
from .group import inner_product, lp_norm_group
from .hecke import is_gelfand_pair, structure_constants
from .sampling import random_function, stream_id
from .sobolev import (
    SobolevParams,
    SobolevWeight,
    embedding_l2_check,
    embedding_lp_check,
    embedding_sup_check,
    hausdorff_young_check,
    inverse_hausdorff_young_check,
    mollifier_bound_check,
    random_mollifier,
    rellich_chain_report,
    translation_bound_check,
    weight_from_document,
)
from .spherical import (
    PlancherelMeasure,
    SphericalBasis,
    convolution_theorem_residual,
    eigenvalue_check,
    functional_equation_residual,
    inverse_transform,
    lp_norm_spectral,
    orthogonality_defect,
    plancherel_measure,
    positive_definite_properties,
    spectral_inner_product,
    spherical_basis,
    spherical_transform,
)
from .utils.config import analysis_config
from .utils.errors import ConfigurationError, DomainError
from .utils.logger import base_logger, SUCCESS

logger = base_logger.getChild("Suite")

# (试验编号, lhs, rhs, 附加参数)
Trial = Tuple[int, float, float, Dict[str, Any]]


@dataclass
class PairContext:
    """一个群对上所有套件共享的只读数据，在并发执行前串行构造"""

    name: str
    pair: GelfandPair
    config: SuiteConfig
    gelfand: bool
    basis: Optional[SphericalBasis] = None
    measure: Optional[PlancherelMeasure] = None
    weight: Optional[SobolevWeight] = None

    @property
    def space(self):
        return self.pair.space

    def random(self, check: str, trial: int, kind: str = "bi-invariant"):
        return random_function(self.space, self.config.seed, trial, kind, stream_id(check))


# ---------------------------------------------------------------------------
# 记录的构造与聚合
# ---------------------------------------------------------------------------


def _score(kind: str, lhs: float, rhs: float) -> float:
    """越小越差"""
    if kind == "equality":
        return -abs(lhs - rhs) / (1 + abs(rhs))
    return rhs - lhs


def _passes(kind: str, lhs: float, rhs: float, tolerance: float) -> bool:
    if kind == "equality":
        return abs(lhs - rhs) <= tolerance * (1 + abs(rhs))
    if kind == "verdict":
        return lhs == rhs
    return rhs - lhs >= -tolerance


def make_record(
    context: PairContext,
    check_name: str,
    kind: str,
    trials: Iterable[Trial],
    params: Optional[Dict[str, Any]] = None,
) -> CheckRecord:
    """
    把多次试验聚合为一条记录：保留最差的一次，trial_count 为试验次数

    Args:
        context: 群对上下文
        check_name: 检查名
        kind: inequality | equality | verdict | diagnostic
        trials: (试验编号, lhs, rhs, 附加参数) 序列
        params: 记录的公共参数

    Returns:
        CheckRecord
    """
    trials = list(trials)
    if not trials:
        raise ValueError(f"检查 {check_name} 没有任何试验")
    worst = min(trials, key=lambda t: (_score(kind, t[1], t[2]), t[0]))
    trial, lhs, rhs, extra = worst
    tolerance = context.config.tolerance_for(check_name)
    record_params = dict(params or {})
    record_params.update(extra)
    return CheckRecord(
        check_name=check_name,
        pair=context.name,
        kind=kind,
        params=record_params,
        lhs=lhs,
        rhs=rhs,
        slack=rhs - lhs,
        passed=_passes(kind, lhs, rhs, tolerance),
        trial_count=len(trials),
        worst_trial_seed=trial if len(trials) > 1 else None,
    )


def _single(context: PairContext, check_name: str, kind: str, lhs: float, rhs: float, **params) -> CheckRecord:
    return make_record(context, check_name, kind, [(0, float(lhs), float(rhs), {})], params)


# ---------------------------------------------------------------------------
# 各套件
# ---------------------------------------------------------------------------


def gelfand_suite(context: PairContext) -> List[CheckRecord]:
    certificate = is_gelfand_pair(context.pair.group, context.pair.subgroup)
    expected = expected_gelfand(context.name)
    records = [
        _single(
            context,
            "gelfand-verdict",
            "verdict",
            1.0 if certificate.verdict else 0.0,
            1.0 if expected else 0.0,
            maxAsymmetry=certificate.max_asymmetry,
            witness=list(certificate.witness) if certificate.witness else None,
        ),
        _single(context, "mass-balance", "equality", structure_constants(context.space).mass_balance_defect(), 0.0),
    ]
    return records


def spherical_suite(context: PairContext) -> List[CheckRecord]:
    basis = context.basis
    space = context.space
    residuals = [functional_equation_residual(phi) for phi in basis]
    properties = [positive_definite_properties(phi.as_bi_invariant()) for phi in basis]
    records = [
        _single(context, "basis-size", "equality", len(basis), space.size),
        _single(context, "functional-equation", "equality", max(residuals), 0.0),
        _single(context, "orthogonality", "equality", orthogonality_defect(basis), 0.0),
        _single(
            context,
            "phi-identity",
            "equality",
            max(abs(p.value_at_identity - 1) for p in properties),
            0.0,
        ),
        _single(context, "hermitian-symmetry", "equality", max(p.hermitian_defect for p in properties), 0.0),
        _single(
            context,
            "bounded-by-one",
            "inequality",
            max(float(np.max(np.abs(phi.class_values))) for phi in basis),
            1.0,
        ),
    ]
    psd = [phi.psd_min_eigenvalue for phi in basis]
    if all(value is not None for value in psd):
        # slack = 最小特征值
        records.append(_single(context, "psd-gram", "inequality", -min(psd), 0.0))
    else:
        logger.warning(f"{context.name}: 群阶超过 GP_PSD_CAP，不输出 Gram 证书记录")

    eigen_trials = []
    convolution_trials = []
    for trial in range(context.config.trials):
        f = context.random("eigenvalue", trial)
        eigen_trials.append((trial, max(eigenvalue_check(f, phi) for phi in basis), 0.0, {}))
        a = context.random("convolution-a", trial)
        b = context.random("convolution-b", trial)
        convolution_trials.append((trial, convolution_theorem_residual(a, b, basis), 0.0, {}))
    records.append(make_record(context, "eigenfunction", "equality", eigen_trials))
    records.append(make_record(context, "convolution-theorem", "equality", convolution_trials))
    return records


def plancherel_suite(context: PairContext) -> List[CheckRecord]:
    basis, measure = context.basis, context.measure
    norms, parseval, inversion = [], [], []
    for trial in range(context.config.trials):
        f = context.random("plancherel-f", trial)
        g = context.random("plancherel-g", trial)
        f_hat = spherical_transform(f, basis)
        g_hat = spherical_transform(g, basis)
        norms.append((trial, lp_norm_spectral(f_hat, 2, measure), lp_norm_group(f, 2), {}))
        group_side = inner_product(f, g)
        spectral_side = spectral_inner_product(f_hat, g_hat, measure)
        parseval.append((trial, abs(group_side - spectral_side), 0.0, {"scale": abs(group_side)}))
        recovered = inverse_transform(f_hat, measure)
        error = float(np.max(np.abs(recovered.class_values - f.class_values)))
        inversion.append((trial, error / max(1.0, float(np.max(np.abs(f.class_values)))), 0.0, {}))
    return [
        make_record(context, "plancherel", "equality", norms),
        make_record(context, "parseval", "equality", parseval),
        make_record(context, "inversion", "equality", inversion),
    ]


def _p_records(context: PairContext, check_name: str, grid: List[float], check: Callable) -> List[CheckRecord]:
    records = []
    for p in grid:
        trials = []
        for trial in range(context.config.trials):
            f = context.random(f"{check_name}-{p}", trial)
            result = check(f, p, context.basis)
            trials.append((trial, result.lhs, result.rhs, {}))
        records.append(make_record(context, check_name, "inequality", trials, {"p": p}))
        if p == 2:
            records.append(make_record(context, f"{check_name}-endpoint", "equality", trials, {"p": p}))
    return records


def hausdorff_young_suite(context: PairContext) -> List[CheckRecord]:
    grid = [p for p in context.config.p_grid if 1 <= p <= 2]
    return _p_records(context, "hausdorff-young", grid, hausdorff_young_check)


def inverse_hausdorff_young_suite(context: PairContext) -> List[CheckRecord]:
    grid = [p for p in context.config.p_grid if 1 < p <= 2]
    return _p_records(context, "inverse-hausdorff-young", grid, inverse_hausdorff_young_check)


def _alpha_grid(config: SuiteConfig) -> List[float]:
    if config.alpha is not None:
        return [config.alpha]
    return [1.5 * config.s, 2 * config.s, 4 * config.s]


def embeddings_suite(context: PairContext) -> List[CheckRecord]:
    config, weight = context.config, context.weight
    s = config.s
    params = {"s": s, "weight": weight.mode}
    l2, sup = [], []
    for trial in range(config.trials):
        f = context.random("embedding", trial)
        check = embedding_l2_check(f, weight, s)
        l2.append((trial, check.lhs, check.rhs, {}))
        check = embedding_sup_check(f, weight, s)
        sup.append((trial, check.lhs, check.rhs, {}))
    records = [
        make_record(context, "embedding-l2", "inequality", l2, params),
        make_record(context, "embedding-sup", "inequality", sup, params),
    ]
    if s <= 0:
        logger.warning(f"{context.name}: s = 0，跳过 L^p' 嵌入检查")
        return records
    for alpha in _alpha_grid(config):
        sobolev = SobolevParams(s=s, alpha=alpha)
        trials = []
        for trial in range(config.trials):
            f = context.random(f"embedding-lp-{alpha}", trial)
            check = embedding_lp_check(f, weight, sobolev)
            trials.append((trial, check.lhs, check.rhs, {}))
        records.append(
            make_record(context, "embedding-lp", "inequality", trials, {**params, "alpha": alpha, "p": sobolev.p})
        )
    return records


def translation_suite(context: PairContext) -> List[CheckRecord]:
    config, weight = context.config, context.weight
    params = {"s": config.s, "weight": weight.mode}
    projected, full, identity = [], [], []
    for trial in range(config.trials):
        f = context.random("translation", trial)
        for y in range(context.pair.group.order):
            check = translation_bound_check(f, weight, config.s, y)
            projected.append((trial, check.projected_lhs, check.rhs, {"y": y}))
            full.append((trial, check.lhs, check.rhs, {"y": y}))
            identity.append((trial, check.identity_residual, 0.0, {"y": y}))
    return [
        make_record(context, "translation-bound", "inequality", projected, params),
        make_record(context, "translation-bound-full-group", "diagnostic", full, params),
        make_record(context, "translation-identity", "equality", identity, params),
    ]


def mollifier_suite(context: PairContext) -> List[CheckRecord]:
    config, weight = context.config, context.weight
    rounds = config.mollifier_trials
    trials = []
    for m in range(rounds):
        eta = random_mollifier(context.space, config.seed, m, stream_id("mollifier-eta"))
        for k in range(rounds):
            index = m * rounds + k
            f = context.random("mollifier-f", index)
            check = mollifier_bound_check(f, weight, config.s, eta)
            trials.append((index, check.lhs, check.rhs, {}))
    return [make_record(context, "mollifier-bound", "inequality", trials, {"s": config.s, "weight": weight.mode})]


def rellich_chain_suite(context: PairContext) -> List[CheckRecord]:
    config, weight = context.config, context.weight
    if config.s <= 0:
        logger.warning(f"{context.name}: s = 0，跳过 Rellich 证明链")
        return []
    alpha = config.alpha if config.alpha is not None else 2 * config.s
    params = SobolevParams(s=config.s, alpha=alpha)
    report = rellich_chain_report(weight, params, trials=config.mollifier_trials, seed=config.seed)

    by_link: Dict[str, List[Trial]] = {}
    for link in report.links:
        by_link.setdefault(link.name, []).append((link.trial, link.check.lhs, link.check.rhs, {}))
    common = {"s": config.s, "alpha": alpha, "weight": weight.mode}
    records = [make_record(context, f"rellich-{name}", "inequality", trials, common) for name, trials in by_link.items()]
    if report.lemma_constant is not None:
        records.append(
            _single(
                context,
                "rellich-moduli",
                "diagnostic",
                report.lemma_constant,
                report.lemma_constant,
                **common,
                moduli={str(y): value for y, value in report.moduli.items()},
                note=report.note,
            )
        )
    return records


AVAILABLE_SUITES: Dict[str, Callable[[PairContext], List[CheckRecord]]] = {
    "gelfand": gelfand_suite,
    "spherical": spherical_suite,
    "plancherel": plancherel_suite,
    "hy": hausdorff_young_suite,
    "inverse-hy": inverse_hausdorff_young_suite,
    "embeddings": embeddings_suite,
    "translation": translation_suite,
    "mollifier": mollifier_suite,
    "rellich-chain": rellich_chain_suite,
}


# ---------------------------------------------------------------------------
# 调度
# ---------------------------------------------------------------------------


class SuiteRunner:
    """按 (群对, 套件) 并发执行检查，并按提交顺序归并结果"""

    def __init__(self, config: SuiteConfig, workers: Optional[int] = None):
        unknown_suites = [name for name in config.suites if name not in AVAILABLE_SUITES]
        if unknown_suites:
            raise ConfigurationError(f"未知的测试套件: {', '.join(unknown_suites)}，可用: {', '.join(ALL_SUITES)}")
        unknown_pairs = [name for name in config.pairs if name not in list_available_pairs()]
        if unknown_pairs:
            raise ConfigurationError(f"未知的群对: {', '.join(unknown_pairs)}")
        self.config = config
        self.workers = workers or analysis_config.workers
        self.weight_document = parse_weight_spec(config.weight)

    def _context(self, name: str) -> PairContext:
        pair = get_pair(name)
        gelfand = is_gelfand_pair(pair.group, pair.subgroup).verdict
        context = PairContext(name=name, pair=pair, config=self.config, gelfand=gelfand)
        if gelfand:
            context.basis = spherical_basis(pair.space)
            context.measure = plancherel_measure(context.basis)
            context.weight = weight_from_document(context.basis, self.weight_document)
        return context

    def _jobs(self, contexts: List[PairContext]) -> List[Tuple[PairContext, str]]:
        jobs = []
        for context in contexts:
            for suite in self.config.suites:
                if suite != "gelfand" and not context.gelfand:
                    logger.info(f"{context.name} 不是 Gelfand 对，跳过套件 {suite}")
                    continue
                jobs.append((context, suite))
        return jobs

    def run(self) -> SuiteReport:
        try:
            contexts = [self._context(name) for name in self.config.pairs]
        except DomainError as e:
            logger.error(f"构造群对上下文失败: {e}")
            raise

        jobs = self._jobs(contexts)
        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            futures = [executor.submit(AVAILABLE_SUITES[suite], context) for context, suite in jobs]
            results = [future.result() for future in futures]

        records = [record for batch in results for record in batch]
        summary = summarize(records)
        logger.log(
            SUCCESS,
            f"套件完成: 共 {summary.total} 条记录，通过 {summary.passed}，失败 {summary.failed}，"
            f"诊断 {summary.diagnostics}（其中 {summary.diagnostic_violations} 条不等式不成立）",
        )
        return SuiteReport(version=__version__, config=self.config, records=records, summary=summary)


def summarize(records: List[CheckRecord]) -> SuiteSummary:
    summary = SuiteSummary()
    for record in records:
        if record.kind == "diagnostic":
            summary.diagnostics += 1
            if not record.passed:
                summary.diagnostic_violations += 1
            continue
        summary.total += 1
        if record.passed:
            summary.passed += 1
        else:
            summary.failed += 1
    return summary


def run_suite(config: SuiteConfig) -> SuiteReport:
    return SuiteRunner(config).run()


def exit_code(report: SuiteReport) -> int:
    return 0 if report.all_passed else 1


# ---------------------------------------------------------------------------
# 确定性序列化
# ---------------------------------------------------------------------------


def _encode(value: Any, indent: int) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return '"NaN"'
        if math.isinf(value):
            return '"Infinity"' if value > 0 else '"-Infinity"'
        return format(value, ".17g")
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(value[k], indent + 1)}" for k in sorted(value)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{pad}{_encode(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"无法序列化的类型: {type(value).__name__}")


def dump_document(document) -> str:
    """按键排序、浮点数保留 17 位有效数字的 JSON 文本"""
    data = document.model_dump(by_alias=True, mode="python")
    return _encode(data, 0) + "\n"


def dump_documents(documents: List) -> str:
    return _encode([d.model_dump(by_alias=True, mode="python") for d in documents], 0) + "\n"
