import zlib
from typing import Literal

import numpy as np

from .group import AnyFunction, BiInvariantFunction, DoubleCosetSpace, GroupFunction

FunctionKind = Literal["bi-invariant", "general"]


def stream_id(name: str) -> int:
    """把套件或检查名映射为稳定的 32 位流编号"""
    return zlib.crc32(name.encode("utf-8"))


def trial_generator(seed: int, trial: int, stream: int = 0) -> np.random.Generator:
    """
    基于计数器的随机数发生器，密钥由 (主种子, 流编号, 试验编号) 决定

    同一组密钥总是得到相同的序列，与线程调度顺序无关。
    """
    key = np.array([seed % 2**64, ((stream % 2**32) << 32) | (trial % 2**32)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _uniform_complex(rng: np.random.Generator, size: int) -> np.ndarray:
    real = rng.uniform(-1.0, 1.0, size=size)
    imag = rng.uniform(-1.0, 1.0, size=size)
    return real + 1j * imag


def random_function(
    space: DoubleCosetSpace,
    seed: int,
    trial: int,
    kind: FunctionKind = "bi-invariant",
    stream: int = 0,
) -> AnyFunction:
    """
    实部和虚部均匀分布在 [-1, 1] 的随机函数

    Args:
        space: 双陪集空间
        seed: 主种子
        trial: 试验编号
        kind: "bi-invariant" 每个双陪集取一个值，"general" 每个群元素取一个值
        stream: 流编号，区分不同检查的随机序列

    Returns:
        BiInvariantFunction 或 GroupFunction
    """
    rng = trial_generator(seed, trial, stream)
    if kind == "bi-invariant":
        return BiInvariantFunction(space, _uniform_complex(rng, space.size))
    if kind == "general":
        return GroupFunction(space.group, _uniform_complex(rng, space.group.order))
    raise ValueError(f"未知的函数类型: {kind}")


def random_mollifier_values(space: DoubleCosetSpace, seed: int, trial: int, stream: int = 0) -> np.ndarray:
    """
    随机磨光函数的类取值：支撑集是包含 D_0 的随机双陪集并集，积分归一化为 1
    """
    rng = trial_generator(seed, trial, stream)
    support = rng.random(space.size) < 0.5
    support[0] = True
    values = np.where(support, rng.uniform(0.05, 1.0, size=space.size), 0.0)
    return values / float(np.sum(space.class_weights * values))
