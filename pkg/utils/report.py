"""
报告输出

text 格式用 utils/templates 下的 Jinja2 模板渲染，给人读；
structured 格式是 serialization 的版本化 JSON，可以被 verify 子命令读回。
"""
import dataclasses
from fractions import Fraction
from pathlib import Path

from jinja2 import Environment, FileSystemLoader, select_autoescape

from core.structures import FinStructure

from .serialization import emit

TEXT = "text"
STRUCTURED = "structured"
FORMATS = (TEXT, STRUCTURED)

TEMPLATE_DIR = Path(__file__).resolve().parent / "templates"

_MAX_ITEMS = 16


def brief(value) -> str:
    """单行摘要；长序列截断"""
    if isinstance(value, FinStructure):
        return repr(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, bytes):
        return value.hex()
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return type(value).__name__
    if isinstance(value, (tuple, list, frozenset, set)):
        items = sorted(value) if isinstance(value, (frozenset, set)) else list(value)
        shown = ", ".join(brief(x) for x in items[:_MAX_ITEMS])
        more = f", ... 共 {len(items)} 项" if len(items) > _MAX_ITEMS else ""
        return f"[{shown}{more}]"
    return str(value)


def fields_of(obj):
    return [(f.name, getattr(obj, f.name)) for f in dataclasses.fields(obj)]


def _environment() -> Environment:
    env = Environment(
        loader=FileSystemLoader(str(TEMPLATE_DIR)),
        autoescape=select_autoescape(enabled_extensions=()),
        trim_blocks=True,
        lstrip_blocks=True,
        keep_trailing_newline=True,
    )
    env.filters["brief"] = brief
    env.globals["fields_of"] = fields_of
    env.globals["is_dataclass"] = lambda x: dataclasses.is_dataclass(x) and not isinstance(x, type)
    return env


_ENV = _environment()


def template_name(result) -> str:
    """ArrowResult → arrow_result.j2；没有专用模板时用 generic.j2"""
    name = type(result).__name__
    snake = "".join(f"_{c.lower()}" if c.isupper() else c for c in name).lstrip("_") + ".j2"
    return snake if (TEMPLATE_DIR / snake).is_file() else "generic.j2"


def render_text(result) -> str:
    template = _ENV.get_template(template_name(result))
    return template.render(result=result, kind=type(result).__name__)


def emit_report(result, fmt: str = TEXT) -> bytes:
    """
    渲染报告

    Args:
        result: 已完成的结果对象
        fmt: text 或 structured

    Returns:
        UTF-8 字节
    """
    if fmt == STRUCTURED:
        return emit(result)
    if fmt != TEXT:
        raise ValueError(f"未知输出格式 {fmt!r}，可选 {FORMATS}")
    return render_text(result).encode("utf-8")
