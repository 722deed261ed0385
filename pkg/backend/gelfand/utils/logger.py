import logging
import os
from typing import Optional, Union

from .config import server_config


SUCCESS = 25
logging.addLevelName(SUCCESS, "SUCCESS")


class LevelSignFormatter(logging.Formatter):
    """自定义日志格式化器，添加不同级别的标志"""

    LEVEL_SIGNS = {
        logging.DEBUG: "🐞",
        logging.INFO: "ℹ️",
        logging.WARNING: "⚠️",
        logging.ERROR: "❌",
        logging.CRITICAL: "🔥",
        SUCCESS: "✅",
    }

    def format(self, record):
        record.levelsign = self.LEVEL_SIGNS.get(record.levelno, "")
        return super().format(record)


# 套件在线程池中运行，带上线程名便于对照 (群对, 套件) 任务
formatter = LevelSignFormatter("[%(asctime)s] %(levelsign)s [%(name)s:%(threadName)s] %(message)s")


def _file_handler(path: str) -> Optional[logging.Handler]:
    directory = os.path.dirname(path) or "."
    if not os.path.isdir(directory):
        return None
    handler = logging.FileHandler(path, encoding="utf-8")
    handler.setFormatter(formatter)
    return handler


def set_level(level: Union[str, int]):
    """同时调整 gelfand 日志器与其全部处理器的级别，命令行 --log-level 经由这里生效"""
    base_logger.setLevel(level)
    for handler in base_logger.handlers:
        handler.setLevel(level)


base_logger = logging.getLogger("gelfand")

if not base_logger.handlers:
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    base_logger.addHandler(console_handler)
    if server_config.log_file:
        file_handler = _file_handler(server_config.log_file)
        if file_handler is None:
            base_logger.warning(f"日志文件目录不存在，无法创建日志文件: {server_config.log_file}")
        else:
            base_logger.addHandler(file_handler)
    set_level(server_config.log_level)
