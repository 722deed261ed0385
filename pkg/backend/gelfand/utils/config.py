import os
from dotenv import load_dotenv

# 加载环境变量
load_dotenv()


class ServerConfig:
    def __init__(self):
        self.api_host = os.getenv("API_HOST", "0.0.0.0")
        self.api_port = int(os.getenv("API_PORT", 8000))
        self.log_file = os.getenv("GP_LOG_FILE")
        self.log_level = os.getenv("GP_LOG_LEVEL", "INFO")


class AnalysisConfig:
    def __init__(self):
        # 生成元闭包的阶上限
        self.max_order = int(os.getenv("GP_MAX_ORDER", 5040))
        # 半正定证书使用完整 Gram 矩阵的阶上限
        self.psd_cap = int(os.getenv("GP_PSD_CAP", 4096))
        self.tolerance = float(os.getenv("GP_TOLERANCE", 1e-10))
        self.workers = int(os.getenv("GP_WORKERS", 4))
        self.solver_seed = int(os.getenv("GP_SOLVER_SEED", 24301))
        self.solver_retries = int(os.getenv("GP_SOLVER_RETRIES", 8))


# 全局配置实例
server_config = ServerConfig()
analysis_config = AnalysisConfig()
