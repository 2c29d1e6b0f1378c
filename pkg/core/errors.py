"""
异常类型

输入错误同时是 ValueError；否定判定和"在界内无结论"都是返回值，不是异常。
"""
from typing import Optional


class KptError(Exception):
    """所有自定义异常的基类"""


class MalformedInputError(KptError, ValueError):
    """
    输入格式或取值不合法（元组元数不符、顶点越界、未知字段等）

    Args:
        message: 错误说明
        field_path: 出错字段的路径，例如 ``relations.E[3]``
    """

    def __init__(self, message: str, field_path: Optional[str] = None):
        self.field_path = field_path
        if field_path:
            message = f"{field_path}: {message}"
        super().__init__(message)


class SignatureMismatchError(MalformedInputError):
    """两个结构不在同一签名上"""


class BaseMismatchError(MalformedInputError):
    """着色或嵌入集合的底座 (A, C) 或定义域不一致"""


class PreconditionError(KptError, ValueError):
    """操作的前置条件不满足（例如 A 不在类中、Emb(A, C) 为空）"""


class NotAFraisseClassError(KptError):
    """flim_prefix 拒绝构造：类在工作界内不是年龄类或不满足 AP"""

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)


class SolverIntegrationError(KptError, RuntimeError):
    """外部 SAT 模型文件格式错误，或模型未通过复核"""
