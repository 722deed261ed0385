class GelfandError(Exception):
    """所有可预期错误的基类，命令行映射为退出码 2"""


class GroupSpecError(GelfandError):
    """群或子群描述文档无效：非拉丁方、不满足结合律、闭包超限、下标越界"""


class PairMismatchError(GelfandError):
    """函数、基或权重属于不同的群或群对"""


class NotGelfandPairError(GelfandError):
    """双陪集卷积代数不可交换"""


class SphericalSolverError(GelfandError):
    """联合对角化或球函数校验失败"""


class PsdCapExceededError(GelfandError):
    """群阶超过 Gram 矩阵上限"""


class DomainError(GelfandError):
    """参数 p、s、α、权重或磨光函数超出定义域"""


class ConfigurationError(GelfandError):
    """未知的群对或测试套件名称"""
