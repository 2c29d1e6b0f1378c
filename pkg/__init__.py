"""
kptkit - 有限 KPT 组合工具
有限结构的嵌入 Ramsey 判定、Fraïssé 前缀构造与扩张类检查
"""

from core import __version__

__all__ = ["__version__"]
