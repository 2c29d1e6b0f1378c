"""
输入文件格式

三种 JSON 文档：
- 结构：``{signature, size, relations}``
- 类：``{name, signature, forbidden}`` 或 ``{name, superpose: [类名, ...]}``
- 扩张：``{name, base, extended, alignment}``，base / extended 是类名、类文件路径或内联类文档

出错时异常信息带字段路径，例如 ``forbidden[2].relations.E[0]``。
"""
import json
import logging
from pathlib import Path
from typing import Callable, List, Sequence, Union

from core.classes import ClassSpec, superpose
from core.errors import MalformedInputError
from core.expansions import ExpansionSpec
from core.structures import FinStructure, signature_from_document

log = logging.getLogger(__name__)

PathLike = Union[str, Path]
ClassResolver = Callable[[str], ClassSpec]

STRUCTURE = "structure"
CLASS = "class"
EXPANSION = "expansion"


def load_json(path: PathLike):
    """
    读取 JSON 文件

    Raises:
        MalformedInputError: 文件不存在或 JSON 语法错误（带行列位置）
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise MalformedInputError(f"无法读取文件: {e.strerror or e}", str(path)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedInputError(f"JSON 语法错误 第 {e.lineno} 行第 {e.colno} 列: {e.msg}", str(path)) from None


def document_kind(doc) -> str:
    if not isinstance(doc, dict):
        raise MalformedInputError("顶层必须是对象")
    if "base" in doc or "extended" in doc:
        return EXPANSION
    if "forbidden" in doc or "superpose" in doc or "name" in doc:
        return CLASS
    return STRUCTURE


def parse_structure(doc, path: str = "") -> FinStructure:
    return FinStructure.from_document(doc, path)


def parse_class(doc, resolver: ClassResolver) -> ClassSpec:
    """
    解析类文档

    Args:
        doc: 解析后的 JSON 对象
        resolver: superpose / 扩张中按名称取类的函数

    Raises:
        MalformedInputError: 字段缺失、未知字段或禁止结构不合法
    """
    if not isinstance(doc, dict):
        raise MalformedInputError("类文档必须是对象")
    if "superpose" in doc:
        unknown = set(doc) - {"name", "superpose"}
        if unknown:
            raise MalformedInputError(f"未知字段 {sorted(unknown)}")
        parts = doc["superpose"]
        if not isinstance(parts, list) or not parts or not all(isinstance(p, str) for p in parts):
            raise MalformedInputError("superpose 必须是非空的类名列表", "superpose")
        return superpose(doc.get("name", "+".join(parts)), *(resolver(p) for p in parts))

    unknown = set(doc) - {"name", "signature", "forbidden"}
    if unknown:
        raise MalformedInputError(f"未知字段 {sorted(unknown)}")
    for key in ("name", "signature"):
        if key not in doc:
            raise MalformedInputError("缺少字段", key)
    sig = signature_from_document(doc["signature"], "signature")
    forbidden_docs = doc.get("forbidden", [])
    if not isinstance(forbidden_docs, list):
        raise MalformedInputError("forbidden 必须是列表", "forbidden")
    forbidden = []
    for i, item in enumerate(forbidden_docs):
        F = FinStructure.from_document(item, f"forbidden[{i}]")
        if F.sig != sig:
            raise MalformedInputError("签名与类签名不一致", f"forbidden[{i}].signature")
        forbidden.append(F)
    return ClassSpec(doc["name"], sig, tuple(forbidden))


def _class_field(value, key: str, resolver: ClassResolver) -> ClassSpec:
    if isinstance(value, str):
        return resolver(value)
    if isinstance(value, dict):
        try:
            return parse_class(value, resolver)
        except MalformedInputError as e:
            raise MalformedInputError(str(e), key) from None
    raise MalformedInputError("必须是类名或类文档", key)


def parse_expansion(doc, resolver: ClassResolver) -> ExpansionSpec:
    """
    解析扩张文档；alignment 列出基类符号名，必须恰好是扩张签名的前段
    """
    if not isinstance(doc, dict):
        raise MalformedInputError("扩张文档必须是对象")
    unknown = set(doc) - {"name", "base", "extended", "alignment"}
    if unknown:
        raise MalformedInputError(f"未知字段 {sorted(unknown)}")
    for key in ("name", "base", "extended"):
        if key not in doc:
            raise MalformedInputError("缺少字段", key)
    base = _class_field(doc["base"], "base", resolver)
    extended = _class_field(doc["extended"], "extended", resolver)
    alignment = doc.get("alignment", list(base.sig.names))
    if not isinstance(alignment, list) or list(alignment) != list(base.sig.names):
        raise MalformedInputError(f"必须等于基类符号 {list(base.sig.names)}", "alignment")
    if extended.sig.names[:len(alignment)] != tuple(alignment):
        raise MalformedInputError("基类符号必须是扩张签名的前段", "alignment")
    return ExpansionSpec(doc["name"], base, extended)


def parse_inputs(paths: Sequence[PathLike], resolver: ClassResolver) -> List[object]:
    """
    按文档形状逐个解析输入文件

    Returns:
        FinStructure / ClassSpec / ExpansionSpec 列表，与 paths 同序
    """
    parsed = []
    for p in paths:
        doc = load_json(p)
        kind = document_kind(doc)
        try:
            if kind == STRUCTURE:
                parsed.append(parse_structure(doc))
            elif kind == CLASS:
                parsed.append(parse_class(doc, resolver))
            else:
                parsed.append(parse_expansion(doc, resolver))
        except MalformedInputError as e:
            raise MalformedInputError(str(e), str(p)) from None
        log.debug("parsed %s as %s", p, kind)
    return parsed
