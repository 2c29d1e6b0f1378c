"""有限结构、Fraïssé 类、Ramsey 判定与扩张类的核心模块"""

__version__ = "0.1.0"
