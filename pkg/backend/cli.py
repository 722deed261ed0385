import argparse
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from gelfand.analysis import (
    analyze_pair,
    family_report,
    gelfand_report,
    inverse_transform_document,
    read_document,
    transform_function,
)
from gelfand.catalog import catalog, list_available_pairs
from gelfand.documents import ALL_SUITES, FunctionDocument, SpectralDocument, SuiteConfig
from gelfand.suite import dump_document, dump_documents, exit_code, run_suite
from gelfand.utils.config import analysis_config
from gelfand.utils.errors import GelfandError
from gelfand.utils.logger import base_logger, set_level

logger = base_logger.getChild("CLI")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def _emit(text: str, out: Optional[Path]):
    if out is None:
        sys.stdout.write(text)
        return
    out.write_text(text, encoding="utf-8")
    logger.info(f"结果已写入 {out}")


def _split(text: Optional[str]) -> List[str]:
    return [item.strip() for item in text.split(",") if item.strip()] if text else []


def _parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="gelfand", description="有限 Gelfand 对上的调和分析与不等式核对")
    parser.add_argument("--max-order", type=int, help="生成元闭包的阶上限，覆盖 GP_MAX_ORDER")
    parser.add_argument("--psd-cap", type=int, help="Gram 证书的群阶上限，覆盖 GP_PSD_CAP")
    parser.add_argument(
        "--log-level", choices=["DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR"], help="覆盖 GP_LOG_LEVEL"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("catalog", help="列出内置群对")

    gelfand = commands.add_parser("gelfand", help="判定给定群与子群是否构成 Gelfand 对")
    gelfand.add_argument("--group", type=Path, required=True)
    gelfand.add_argument("--subgroup", type=Path, required=True)

    analyze = commands.add_parser("analyze", help="输出球函数基、Plancherel 测度、权重与嵌入常数")
    analyze.add_argument("--pair", required=True)
    analyze.add_argument("--weight", default="cayley")
    analyze.add_argument("--s", type=float, default=1.0)
    analyze.add_argument("--alpha", type=float)
    analyze.add_argument("--out", type=Path)

    transform = commands.add_parser("transform", help="球变换或其逆变换")
    transform.add_argument("--pair", required=True)
    transform.add_argument("--function", type=Path, required=True)
    transform.add_argument("--inverse", action="store_true")
    transform.add_argument("--out", type=Path)

    verify = commands.add_parser("verify", help="运行不等式与恒等式检查套件")
    target = verify.add_mutually_exclusive_group(required=True)
    target.add_argument("--pair", help="逗号分隔的群对名称")
    target.add_argument("--all", action="store_true")
    verify.add_argument("--suite", help=f"逗号分隔的套件，默认全部: {','.join(ALL_SUITES)}")
    verify.add_argument("--trials", type=int, default=100)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--tol", type=float)
    verify.add_argument("--weight", default="cayley")
    verify.add_argument("--s", type=float, default=1.0)
    verify.add_argument("--alpha", type=float)
    verify.add_argument("--p-grid", help="逗号分隔的 p 取值")
    verify.add_argument("--mollifier-trials", type=int, default=20)
    verify.add_argument("--out", type=Path)

    family = commands.add_parser("family", help="(ℤ_n, {e}) 族在生成元处的平移模")
    family.add_argument("--orders", help="逗号分隔的群阶，默认 4..256 的 2 的幂")
    family.add_argument("--s", type=float, default=1.0)
    family.add_argument("--out", type=Path)
    return parser.parse_args(argv)


def _verify_config(args: argparse.Namespace) -> SuiteConfig:
    config = {
        "pairs": list_available_pairs() if args.all else _split(args.pair),
        "trials": args.trials,
        "seed": args.seed,
        "weight": args.weight,
        "s": args.s,
        "alpha": args.alpha,
        "mollifier_trials": args.mollifier_trials,
    }
    if args.suite:
        config["suites"] = _split(args.suite)
    if args.tol is not None:
        config["tolerance"] = args.tol
    if args.p_grid:
        config["p_grid"] = [float(p) for p in _split(args.p_grid)]
    return SuiteConfig.model_validate(config)


def run(args: argparse.Namespace) -> int:
    if args.max_order is not None:
        analysis_config.max_order = args.max_order
    if args.log_level is not None:
        set_level(args.log_level)
    if args.psd_cap is not None:
        analysis_config.psd_cap = args.psd_cap

    if args.command == "catalog":
        lines = [
            f"{entry.name}\t{'gelfand' if entry.expected_gelfand else 'non-gelfand'}\t{entry.description}"
            for entry in catalog()
        ]
        _emit("\n".join(lines) + "\n", None)
        return EXIT_OK

    if args.command == "gelfand":
        report = gelfand_report(read_document(args.group), read_document(args.subgroup))
        _emit(dump_document(report), None)
        return EXIT_OK

    if args.command == "analyze":
        report = analyze_pair(args.pair, args.weight, args.s, args.alpha)
        _emit(dump_document(report), args.out)
        return EXIT_OK

    if args.command == "transform":
        data = read_document(args.function)
        if args.inverse:
            result = inverse_transform_document(args.pair, SpectralDocument.model_validate(data))
        else:
            result = transform_function(args.pair, FunctionDocument.model_validate(data))
        _emit(dump_document(result), args.out)
        return EXIT_OK

    if args.command == "verify":
        report = run_suite(_verify_config(args))
        _emit(dump_document(report), args.out)
        return exit_code(report)

    if args.command == "family":
        orders = [int(n) for n in _split(args.orders)] or None
        _emit(dump_documents(family_report(orders, args.s)), args.out)
        return EXIT_OK

    return EXIT_CONFIG


def main(argv: Optional[List[str]] = None) -> int:
    args = _parse_args(argv)
    try:
        return run(args)
    except (GelfandError, ValidationError, ValueError) as e:
        logger.error(f"{args.command} 失败: {e}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
