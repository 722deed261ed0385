from contextlib import asynccontextmanager
from typing import Optional

from fastapi import FastAPI, HTTPException

from gelfand import __version__
from gelfand.analysis import (
    analyze_pair,
    family_report,
    gelfand_report,
    inverse_transform_document,
    transform_function,
)
from gelfand.catalog import catalog
from gelfand.documents import (
    Document,
    FunctionDocument,
    GroupDocument,
    SpectralDocument,
    SubgroupDocument,
    SuiteConfig,
)
from gelfand.suite import exit_code, run_suite
from gelfand.utils.config import server_config
from gelfand.utils.errors import ConfigurationError, GelfandError
from gelfand.utils.logger import base_logger

logger = base_logger.getChild("Server")


@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info("Gelfand 调和分析服务启动")
    yield
    logger.info("服务已关闭")


app = FastAPI(title="Gelfand 对调和分析服务", version=__version__, lifespan=lifespan)


class GelfandRequest(Document):
    group: GroupDocument
    subgroup: SubgroupDocument


class TransformRequest(Document):
    pair: str
    inverse: bool = False
    function: Optional[FunctionDocument] = None
    spectrum: Optional[SpectralDocument] = None


def _raise_http(action: str, e: Exception):
    """把领域异常映射为 HTTP 状态码：未知名称 404，其余输入错误 400"""
    logger.error(f"{action}失败: {e}")
    if isinstance(e, ConfigurationError):
        raise HTTPException(status_code=404, detail=str(e))
    if isinstance(e, (GelfandError, ValueError)):
        raise HTTPException(status_code=400, detail=str(e))
    raise HTTPException(status_code=500, detail=str(e))


@app.get("/")
async def root():
    return {"message": "Gelfand 对调和分析 API", "version": __version__}


@app.get("/api/catalog")
async def get_catalog():
    """列出内置群对"""
    return {
        "success": True,
        "data": [
            {"name": entry.name, "expectedGelfand": entry.expected_gelfand, "description": entry.description}
            for entry in catalog()
        ],
    }


@app.post("/api/gelfand")
def check_gelfand(request: GelfandRequest):
    try:
        report = gelfand_report(request.group, request.subgroup)
        return {"success": True, "data": report.model_dump(by_alias=True)}
    except Exception as e:
        _raise_http("Gelfand 判定", e)


@app.get("/api/analyze")
def analyze(pair: str, weight: str = "cayley", s: float = 1.0, alpha: Optional[float] = None):
    """
    群对分析

    Args:
        pair: 内置群对名称
        weight: 权重描述，如 cayley、cayley:1,3、user:0,1,1
        s: Sobolev 阶
        alpha: 可选 α
    """
    try:
        report = analyze_pair(pair, weight, s, alpha)
        return {"success": True, "data": report.model_dump(by_alias=True)}
    except Exception as e:
        _raise_http("分析", e)


@app.post("/api/transform")
def transform(request: TransformRequest):
    try:
        if request.inverse:
            if request.spectrum is None:
                raise HTTPException(status_code=400, detail="逆变换需要给出 spectrum")
            result = inverse_transform_document(request.pair, request.spectrum)
        else:
            if request.function is None:
                raise HTTPException(status_code=400, detail="正变换需要给出 function")
            result = transform_function(request.pair, request.function)
        return {"success": True, "data": result.model_dump(by_alias=True)}
    except HTTPException:
        raise
    except Exception as e:
        _raise_http("变换", e)


@app.post("/api/verify")
def verify(config: SuiteConfig):
    try:
        report = run_suite(config)
        return {
            "success": report.all_passed,
            "exitCode": exit_code(report),
            "data": report.model_dump(by_alias=True),
        }
    except Exception as e:
        _raise_http("套件运行", e)


@app.get("/api/family")
def family(orders: Optional[str] = None, s: float = 1.0):
    try:
        parsed = [int(n) for n in orders.split(",")] if orders else None
        entries = family_report(parsed, s)
        return {"success": True, "data": [entry.model_dump(by_alias=True) for entry in entries]}
    except Exception as e:
        _raise_http("平移模族", e)


@app.get("/health")
async def health_check():
    """健康检查"""
    return {"status": "healthy", "message": "系统运行正常"}


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(app, host=server_config.api_host, port=server_config.api_port)
