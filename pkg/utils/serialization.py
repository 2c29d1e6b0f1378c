"""
结构化报告格式

JSON 文档 ``{"schema": "kptkit-report/1", "result": ...}``；数据类带类型标签，
元组、frozenset、分数、字节串和结构各有标签，解码后与原对象相等。
输出键排序、frozenset 元素排序，相同结果总是得到相同字节。
"""
import dataclasses
import json
from fractions import Fraction
from functools import lru_cache
from typing import Dict

import numpy as np

from core import classes, expansions, ramsey, structures
from core.errors import MalformedInputError
from core.structures import FinStructure, Signature

from . import results

SCHEMA = "kptkit-report/1"

_MODULES = (structures, classes, ramsey, expansions, results)


@lru_cache(maxsize=None)
def _registry() -> Dict[str, type]:
    registry = {}
    for module in _MODULES:
        for name, obj in vars(module).items():
            if isinstance(obj, type) and dataclasses.is_dataclass(obj) and obj.__module__ == module.__name__:
                registry[name] = obj
    return registry


def _sort_key(encoded) -> str:
    return json.dumps(encoded, sort_keys=True)


def encode(obj):
    """对象 → 可 JSON 化的值"""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Fraction):
        return {"__fraction__": f"{obj.numerator}/{obj.denominator}"}
    if isinstance(obj, bytes):
        return {"__bytes__": obj.hex()}
    if isinstance(obj, FinStructure):
        return {"__structure__": obj.to_document()}
    if isinstance(obj, Signature):
        return {"__signature__": [[name, arity] for name, arity in obj.symbols]}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {"__type__": type(obj).__name__,
                "fields": {f.name: encode(getattr(obj, f.name)) for f in dataclasses.fields(obj) if f.init}}
    if isinstance(obj, tuple):
        return {"__tuple__": [encode(x) for x in obj]}
    if isinstance(obj, (frozenset, set)):
        return {"__frozenset__": sorted((encode(x) for x in obj), key=_sort_key)}
    if isinstance(obj, list):
        return [encode(x) for x in obj]
    if isinstance(obj, dict):
        return {"__dict__": sorted(([encode(k), encode(v)] for k, v in obj.items()), key=_sort_key)}
    raise TypeError(f"无法序列化 {type(obj).__name__}")


def decode(value, path: str = "result"):
    """encode 的逆"""
    if isinstance(value, list):
        return [decode(x, f"{path}[{i}]") for i, x in enumerate(value)]
    if not isinstance(value, dict):
        return value
    if "__tuple__" in value:
        return tuple(decode(x, f"{path}[{i}]") for i, x in enumerate(value["__tuple__"]))
    if "__frozenset__" in value:
        return frozenset(decode(x, path) for x in value["__frozenset__"])
    if "__fraction__" in value:
        return Fraction(value["__fraction__"])
    if "__bytes__" in value:
        return bytes.fromhex(value["__bytes__"])
    if "__structure__" in value:
        return FinStructure.from_document(value["__structure__"], path)
    if "__signature__" in value:
        return Signature(tuple((name, arity) for name, arity in value["__signature__"]))
    if "__dict__" in value:
        return {decode(k, path): decode(v, path) for k, v in value["__dict__"]}
    if "__type__" in value:
        cls = _registry().get(value["__type__"])
        if cls is None:
            raise MalformedInputError(f"未知类型 {value['__type__']!r}", path)
        fields = {name: decode(v, f"{path}.{name}") for name, v in value.get("fields", {}).items()}
        try:
            return cls(**fields)
        except TypeError as e:
            raise MalformedInputError(f"{cls.__name__} 字段不符: {e}", path) from None
    raise MalformedInputError("无法识别的值", path)


def emit(result) -> bytes:
    """结果 → 结构化报告字节"""
    document = {"schema": SCHEMA, "result": encode(result)}
    return (json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def parse(data: bytes):
    """
    结构化报告字节 → 结果

    Raises:
        MalformedInputError: 不是 JSON、schema 不符或类型标签未知
    """
    try:
        document = json.loads(data.decode("utf-8") if isinstance(data, bytes) else data)
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise MalformedInputError(f"报告不是合法 JSON: {e}") from None
    if not isinstance(document, dict) or document.get("schema") != SCHEMA:
        raise MalformedInputError(f"报告 schema 必须是 {SCHEMA}", "schema")
    return decode(document.get("result"))
