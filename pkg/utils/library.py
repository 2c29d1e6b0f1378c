"""
内置类库与具名结构

类与扩张以 JSON 文档形式放在仓库根目录的 library/ 下，按名称加载；
小结构（lo6、k3、c5 ...）按名称直接构造。
"""
import logging
import re
from functools import lru_cache
from pathlib import Path
from typing import List, Optional

from core.classes import ClassSpec
from core.errors import MalformedInputError
from core.expansions import ExpansionSpec
from core.structures import FinStructure, Signature

from .io_format import load_json, parse_class, parse_expansion, parse_structure

log = logging.getLogger(__name__)

LIBRARY_DIR = Path(__file__).resolve().parent.parent / "library"

GRAPH_SIG = Signature.of(("E", 2))
ORDER_SIG = Signature.of(("lt", 2))
EMPTY_SIG = Signature()

_NAMED = re.compile(r"^(lo|k|c|p|i|set)(\d+)$")


def linear_order(n: int) -> FinStructure:
    """1 < 2 < ... < n"""
    return FinStructure.build(ORDER_SIG, n, {"lt": [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]})


def _symmetric(n: int, edges) -> FinStructure:
    tuples = set()
    for a, b in edges:
        tuples.add((a, b))
        tuples.add((b, a))
    return FinStructure.build(GRAPH_SIG, n, {"E": tuples})


def complete_graph(n: int) -> FinStructure:
    return _symmetric(n, [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)])


def cycle(n: int) -> FinStructure:
    """n >= 3 的圈 1-2-...-n-1"""
    if n < 3:
        raise MalformedInputError(f"圈至少需要 3 个顶点，得到 {n}")
    return _symmetric(n, [(i, i % n + 1) for i in range(1, n + 1)])


def path(n: int) -> FinStructure:
    """n 个顶点的路 1-2-...-n"""
    return _symmetric(n, [(i, i + 1) for i in range(1, n)])


def independent_set(n: int) -> FinStructure:
    return _symmetric(n, [])


def pure_set(n: int) -> FinStructure:
    return FinStructure.build(EMPTY_SIG, n)


_BUILDERS = {
    "lo": linear_order,
    "k": complete_graph,
    "c": cycle,
    "p": path,
    "i": independent_set,
    "set": pure_set,
}


def named_structure(name: str) -> Optional[FinStructure]:
    """
    按名称构造内置结构

    Args:
        name: lo<n> / k<n> / c<n> / p<n> / i<n> / set<n>

    Returns:
        结构；名称不是内置格式时返回 None
    """
    m = _NAMED.match(name.lower())
    if not m:
        return None
    return _BUILDERS[m.group(1)](int(m.group(2)))


def resolve_structure(ref: str) -> FinStructure:
    """内置名称或结构文件路径"""
    built = named_structure(ref)
    if built is not None:
        return built
    return parse_structure(load_json(ref))


def list_classes() -> List[str]:
    return sorted(p.stem for p in LIBRARY_DIR.glob("*.json") if not p.stem.endswith(".expansion"))


def list_expansions() -> List[str]:
    return sorted(p.name[:-len(".expansion.json")] for p in LIBRARY_DIR.glob("*.expansion.json"))


@lru_cache(maxsize=None)
def load_class(name: str) -> ClassSpec:
    """
    加载内置类

    Raises:
        MalformedInputError: 类库中没有该名称
    """
    path = LIBRARY_DIR / f"{name}.json"
    if not path.is_file():
        raise MalformedInputError(f"类库中没有类 {name!r}（可选: {', '.join(list_classes())}）", "class")
    return parse_class(load_json(path), resolve_class)


@lru_cache(maxsize=None)
def load_expansion(name: str) -> ExpansionSpec:
    path = LIBRARY_DIR / f"{name}.expansion.json"
    if not path.is_file():
        raise MalformedInputError(f"类库中没有扩张 {name!r}（可选: {', '.join(list_expansions())}）", "expansion")
    return parse_expansion(load_json(path), resolve_class)


def resolve_class(ref: str) -> ClassSpec:
    """类库名称或类文件路径"""
    if (LIBRARY_DIR / f"{ref}.json").is_file():
        return load_class(ref)
    if Path(ref).is_file():
        return parse_class(load_json(ref), resolve_class)
    return load_class(ref)


def resolve_expansion(ref: str) -> ExpansionSpec:
    if (LIBRARY_DIR / f"{ref}.expansion.json").is_file():
        return load_expansion(ref)
    if Path(ref).is_file():
        return parse_expansion(load_json(ref), resolve_class)
    return load_expansion(ref)
