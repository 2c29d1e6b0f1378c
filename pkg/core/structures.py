"""
有限关系结构

提供签名、有限结构、嵌入、自同构与规范形式，是其余模块的基础。

约定：
- 论域固定为 {1..n}，所有顶点标号从 1 开始
- 嵌入按像元组 (map(1), ..., map(|A|)) 的字典序枚举，这个顺序是着色下标的稳定契约
- 大小为 0 的结构合法，Emb(∅, B) 恰好含一个空映射
"""
import hashlib
import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import MalformedInputError, SignatureMismatchError

log = logging.getLogger(__name__)

RelTuple = Tuple[int, ...]


@dataclass(frozen=True)
class Signature:
    """
    关系签名：有序的 (名称, 元数) 列表

    符号顺序有语义：规范编码按这个顺序逐符号展开。
    """
    symbols: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self):
        normalized = []
        seen = set()
        for i, item in enumerate(self.symbols):
            try:
                name, arity = item
            except (TypeError, ValueError):
                raise MalformedInputError("符号必须是 (名称, 元数) 对", f"signature[{i}]")
            if not isinstance(name, str) or not name.isidentifier():
                raise MalformedInputError(f"非法符号名 {name!r}", f"signature[{i}].name")
            if name in seen:
                raise MalformedInputError(f"符号名重复 {name!r}", f"signature[{i}].name")
            if isinstance(arity, bool) or not isinstance(arity, int) or arity < 1:
                raise MalformedInputError(f"元数必须是正整数，得到 {arity!r}", f"signature[{i}].arity")
            seen.add(name)
            normalized.append((name, arity))
        object.__setattr__(self, "symbols", tuple(normalized))

    @classmethod
    def of(cls, *symbols: Tuple[str, int]) -> "Signature":
        return cls(tuple(symbols))

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.symbols)

    def index(self, name: str) -> int:
        for i, (sym, _) in enumerate(self.symbols):
            if sym == name:
                return i
        raise MalformedInputError(f"签名中没有符号 {name!r}")

    def arity(self, name: str) -> int:
        return self.symbols[self.index(name)][1]

    def is_prefix_of(self, other: "Signature") -> bool:
        return other.symbols[:len(self.symbols)] == self.symbols

    def extend(self, *symbols: Tuple[str, int]) -> "Signature":
        return Signature(self.symbols + tuple(symbols))


def signature_from_document(doc, path: str = "signature") -> Signature:
    """解析 ``[{name, arity}, ...]``"""
    if not isinstance(doc, list):
        raise MalformedInputError("签名必须是列表", path)
    symbols = []
    for i, item in enumerate(doc):
        if not isinstance(item, dict) or set(item) != {"name", "arity"}:
            raise MalformedInputError("符号必须是 {name, arity} 对象", f"{path}[{i}]")
        symbols.append((item["name"], item["arity"]))
    try:
        return Signature(tuple(symbols))
    except MalformedInputError as e:
        inner = (e.field_path or "signature")[len("signature"):]
        raise MalformedInputError(str(e).split(": ", 1)[-1], f"{path}{inner}") from None


@dataclass(frozen=True)
class FinStructure:
    """
    论域为 {1..size} 的有限关系结构

    relations 与 sig.symbols 一一对应，每项是该符号成立的元组集合。
    """
    sig: Signature
    size: int
    relations: Tuple[FrozenSet[RelTuple], ...]

    def __post_init__(self):
        if isinstance(self.size, bool) or not isinstance(self.size, int) or self.size < 0:
            raise MalformedInputError(f"size 必须是非负整数，得到 {self.size!r}", "size")
        if len(self.relations) != len(self.sig):
            raise MalformedInputError("关系个数与签名不符", "relations")
        normalized = []
        for idx, ((name, arity), rel) in enumerate(zip(self.sig.symbols, self.relations)):
            tuples = set()
            for j, t in enumerate(rel):
                t = tuple(t)
                path = f"relations.{name}[{j}]"
                if len(t) != arity:
                    raise MalformedInputError(f"元组 {list(t)} 的长度与元数 {arity} 不符", path)
                for x in t:
                    if isinstance(x, bool) or not isinstance(x, int) or not 1 <= x <= self.size:
                        raise MalformedInputError(f"元组 {list(t)} 含越界顶点（论域 1..{self.size}）", path)
                tuples.add(t)
            normalized.append(frozenset(tuples))
        object.__setattr__(self, "relations", tuple(normalized))

    @classmethod
    def build(cls, sig: Signature, size: int,
              relations: Optional[Mapping[str, Iterable[Sequence[int]]]] = None) -> "FinStructure":
        """
        按符号名构造结构，未给出的符号视为空关系

        Args:
            sig: 签名
            size: 论域大小
            relations: {符号名: 元组列表}
        """
        relations = dict(relations or {})
        unknown = set(relations) - set(sig.names)
        if unknown:
            raise MalformedInputError(f"未知符号 {sorted(unknown)}", "relations")
        rels = tuple(frozenset(tuple(t) for t in relations.get(name, ())) for name in sig.names)
        return cls(sig, size, rels)

    @classmethod
    def empty(cls, sig: Signature) -> "FinStructure":
        return cls(sig, 0, tuple(frozenset() for _ in sig.symbols))

    @property
    def vertices(self) -> range:
        return range(1, self.size + 1)

    def rel(self, name: str) -> FrozenSet[RelTuple]:
        return self.relations[self.sig.index(name)]

    def to_document(self) -> dict:
        """转成结构文本格式（JSON 对象），元组按字典序输出"""
        return {
            "signature": [{"name": name, "arity": arity} for name, arity in self.sig.symbols],
            "size": self.size,
            "relations": {name: [list(t) for t in sorted(rel)]
                          for (name, _), rel in zip(self.sig.symbols, self.relations)},
        }

    @classmethod
    def from_document(cls, doc, path: str = "") -> "FinStructure":
        """
        从结构文本格式构造，未知字段一律拒绝

        Args:
            doc: 解析后的 JSON 对象
            path: 错误信息里的字段路径前缀
        """
        prefix = f"{path}." if path else ""
        if not isinstance(doc, dict):
            raise MalformedInputError("结构必须是对象", path or None)
        unknown = set(doc) - {"signature", "size", "relations"}
        if unknown:
            raise MalformedInputError(f"未知字段 {sorted(unknown)}", path or None)
        for key in ("signature", "size"):
            if key not in doc:
                raise MalformedInputError("缺少字段", f"{prefix}{key}")
        sig = signature_from_document(doc["signature"], f"{prefix}signature")
        relations = doc.get("relations", {})
        if not isinstance(relations, dict):
            raise MalformedInputError("relations 必须是对象", f"{prefix}relations")
        for name in relations:
            if name not in sig.names:
                raise MalformedInputError(f"签名中没有符号 {name!r}", f"{prefix}relations.{name}")
        rels = []
        for name in sig.names:
            tuples = relations.get(name, [])
            if not isinstance(tuples, list) or not all(isinstance(t, list) for t in tuples):
                raise MalformedInputError("元组列表格式错误", f"{prefix}relations.{name}")
            rels.append(tuples)
        try:
            return cls(sig, doc["size"], tuple(frozenset(tuple(t) for t in ts) for ts in rels))
        except MalformedInputError as e:
            if path and e.field_path:
                raise MalformedInputError(str(e).split(": ", 1)[1], f"{path}.{e.field_path}") from None
            raise

    def __repr__(self) -> str:
        parts = [f"size={self.size}"]
        for (name, _), rel in zip(self.sig.symbols, self.relations):
            parts.append(f"{name}={sorted(rel)}")
        return f"FinStructure({', '.join(parts)})"


@dataclass(frozen=True)
class Embedding:
    """
    嵌入 dom → cod，map[i-1] 是顶点 i 的像

    直接构造不做校验；需要校验时用 Embedding.checked。
    """
    dom: FinStructure
    cod: FinStructure
    map: Tuple[int, ...]

    @classmethod
    def checked(cls, mapping: Sequence[int], dom: FinStructure, cod: FinStructure) -> "Embedding":
        mapping = tuple(mapping)
        if not is_embedding(mapping, dom, cod):
            raise MalformedInputError(f"{list(mapping)} 不是嵌入")
        return cls(dom, cod, mapping)

    def __call__(self, vertex: int) -> int:
        return self.map[vertex - 1]

    def apply(self, t: Sequence[int]) -> RelTuple:
        return tuple(self.map[x - 1] for x in t)

    @property
    def image(self) -> FrozenSet[int]:
        return frozenset(self.map)


@dataclass(frozen=True)
class CanonicalCode:
    """
    规范编码

    code 可全序比较，两个结构同构当且仅当 code 相等；
    relabeling[i-1] 是旧顶点 i 在规范代表中的新标号。
    """
    code: bytes
    relabeling: Tuple[int, ...]


def _check_same_sig(A: FinStructure, B: FinStructure):
    if A.sig != B.sig:
        raise SignatureMismatchError(f"签名不一致: {A.sig.symbols} vs {B.sig.symbols}")


@lru_cache(maxsize=None)
def _closing_tuples(sig: Signature, n: int) -> Tuple[Tuple[Tuple[int, RelTuple], ...], ...]:
    """
    第 i 项列出 {1..i} 上最大元素恰为 i 的全部 (符号下标, 元组)，
    符号按签名顺序，同一符号内按字典序
    """
    levels: List[Tuple[Tuple[int, RelTuple], ...]] = [()]
    for i in range(1, n + 1):
        level = []
        for idx, (_, arity) in enumerate(sig.symbols):
            for t in itertools.product(range(1, i + 1), repeat=arity):
                if max(t) == i:
                    level.append((idx, t))
        levels.append(tuple(level))
    return tuple(levels)


def is_embedding(mapping: Sequence[int], A: FinStructure, B: FinStructure) -> bool:
    """
    判断 mapping 是否是 A → B 的嵌入（单射、保持且反映全部关系）

    Raises:
        MalformedInputError: 长度或取值越界（与"否"的判定区分开）
    """
    _check_same_sig(A, B)
    mapping = tuple(mapping)
    if len(mapping) != A.size:
        raise MalformedInputError(f"映射长度 {len(mapping)} 与 |A|={A.size} 不符", "map")
    for i, v in enumerate(mapping):
        if isinstance(v, bool) or not isinstance(v, int) or not 1 <= v <= B.size:
            raise MalformedInputError(f"像 {v!r} 不在 1..{B.size}", f"map[{i}]")
    if len(set(mapping)) != len(mapping):
        return False
    image = set(mapping)
    for rel_a, rel_b in zip(A.relations, B.relations):
        mapped = {tuple(mapping[x - 1] for x in t) for t in rel_a}
        within = {t for t in rel_b if all(x in image for x in t)}
        if mapped != within:
            return False
    return True


def _embedding_maps(A: FinStructure, B: FinStructure, fixed: Mapping[int, int]) -> Iterator[Tuple[int, ...]]:
    n = A.size
    if n > B.size:
        return
    closing = _closing_tuples(A.sig, n)
    current = [0] * n
    used = [False] * (B.size + 1)

    def consistent(i: int) -> bool:
        for idx, t in closing[i]:
            image = tuple(current[x - 1] for x in t)
            if (t in A.relations[idx]) != (image in B.relations[idx]):
                return False
        return True

    def extend(i: int) -> Iterator[Tuple[int, ...]]:
        if i > n:
            yield tuple(current)
            return
        candidates = (fixed[i],) if i in fixed else range(1, B.size + 1)
        for v in candidates:
            if used[v]:
                continue
            current[i - 1] = v
            used[v] = True
            if consistent(i):
                yield from extend(i + 1)
            used[v] = False
        current[i - 1] = 0

    yield from extend(1)


def iter_embeddings(A: FinStructure, B: FinStructure,
                    partial: Optional[Mapping[int, int]] = None) -> Iterator[Embedding]:
    """
    惰性枚举 A → B 的嵌入（字典序），可选地固定部分顶点的像

    Args:
        partial: {A 中顶点: B 中顶点}，只枚举与之相容的嵌入
    """
    _check_same_sig(A, B)
    fixed = dict(partial or {})
    for a, b in fixed.items():
        if not 1 <= a <= A.size:
            raise MalformedInputError(f"部分映射的定义域顶点 {a} 越界", "partial")
        if not 1 <= b <= B.size:
            raise MalformedInputError(f"部分映射的像 {b} 越界", "partial")
    for mapping in _embedding_maps(A, B, fixed):
        yield Embedding(A, B, mapping)


@lru_cache(maxsize=4096)
def enumerate_embeddings(A: FinStructure, B: FinStructure) -> Tuple[Embedding, ...]:
    """
    枚举 Emb(A, B)

    Returns:
        按像元组字典序排列、无重复的嵌入元组；该顺序即着色下标
    """
    return tuple(iter_embeddings(A, B))


@lru_cache(maxsize=4096)
def embedding_index(A: FinStructure, B: FinStructure) -> Dict[Tuple[int, ...], int]:
    """像元组 → 在 enumerate_embeddings(A, B) 中的下标"""
    return {e.map: i for i, e in enumerate(enumerate_embeddings(A, B))}


def embedding_fingerprint(A: FinStructure, B: FinStructure) -> str:
    """枚举顺序指纹：Emb(A, B) 的 SHA-256，证书借此保证下标稳定"""
    digest = hashlib.sha256()
    digest.update(f"{A.size}->{B.size};".encode())
    for e in enumerate_embeddings(A, B):
        digest.update((",".join(map(str, e.map)) + ";").encode())
    return digest.hexdigest()


def extend_embedding(partial: Mapping[int, int], A: FinStructure, B: FinStructure) -> Optional[Embedding]:
    """返回与部分映射相容的第一个嵌入，不存在则返回 None"""
    return next(iter_embeddings(A, B, partial), None)


def compose(outer: Embedding, inner: Embedding) -> Embedding:
    """复合 outer∘inner"""
    if inner.cod.size != outer.dom.size or inner.cod != outer.dom:
        raise MalformedInputError("复合的中间结构不一致")
    return Embedding(inner.dom, outer.cod, tuple(outer.map[x - 1] for x in inner.map))


def induced_substructure(B: FinStructure, S: Iterable[int]) -> Tuple[FinStructure, Embedding]:
    """
    取 B 在 S 上的诱导子结构并重新标号为 {1..|S|}

    Returns:
        (子结构, 包含嵌入)
    """
    subset = list(S)
    for v in subset:
        if isinstance(v, bool) or not isinstance(v, int) or not 1 <= v <= B.size:
            raise MalformedInputError(f"顶点 {v!r} 不在 1..{B.size}", "subset")
    if len(set(subset)) != len(subset):
        raise MalformedInputError("子集含重复顶点", "subset")
    subset = sorted(subset)
    position = {v: j + 1 for j, v in enumerate(subset)}
    relations = tuple(
        frozenset(tuple(position[x] for x in t) for t in rel if all(x in position for x in t))
        for rel in B.relations
    )
    sub = FinStructure(B.sig, len(subset), relations)
    return sub, Embedding(sub, B, tuple(subset))


def enumerate_copies(A: FinStructure, B: FinStructure) -> List[Tuple[int, ...]]:
    """
    枚举 B 中与 A 同构的诱导子结构的顶点集（升序元组，按字典序）

    满足 |Emb(A, B)| = |copies| · |Aut(A)|。
    """
    _check_same_sig(A, B)
    copies = []
    if A.size > B.size:
        return copies
    for S in itertools.combinations(B.vertices, A.size):
        sub, _ = induced_substructure(B, S)
        if next(_embedding_maps(A, sub, {}), None) is not None:
            copies.append(S)
    return copies


def is_partial_isomorphism(mapping: Mapping[int, int], A: FinStructure,
                           B: Optional[FinStructure] = None) -> bool:
    """
    判断 mapping 是否是 A 的有限子集到 B（默认 A 自身）的部分同构

    部分同构即诱导子结构上的嵌入；空映射总是部分同构。
    """
    B = A if B is None else B
    dom = sorted(mapping)
    sub, inclusion = induced_substructure(A, dom)
    return is_embedding(tuple(mapping[v] for v in inclusion.map), sub, B)


def automorphisms(A: FinStructure) -> List[Embedding]:
    """Aut(A)，以嵌入列表给出，首项为恒等"""
    return list(enumerate_embeddings(A, A))


def relabel(A: FinStructure, perm: Sequence[int]) -> FinStructure:
    """
    按置换重新标号

    Args:
        perm: perm[i-1] 是旧顶点 i 的新标号
    """
    perm = tuple(perm)
    if sorted(perm) != list(A.vertices):
        raise MalformedInputError(f"{list(perm)} 不是 1..{A.size} 的置换", "perm")
    relations = tuple(frozenset(tuple(perm[x - 1] for x in t) for t in rel) for rel in A.relations)
    return FinStructure(A.sig, A.size, relations)


def reduct_to(A: FinStructure, sig: Signature) -> FinStructure:
    """丢弃 sig 之外的符号（sig 必须是 A.sig 的前缀）"""
    if not sig.is_prefix_of(A.sig):
        raise SignatureMismatchError("约化签名必须是原签名的前缀")
    return FinStructure(sig, A.size, A.relations[:len(sig)])


def disjoint_union(A: FinStructure, B: FinStructure) -> FinStructure:
    """不交并：A 占 1..|A|，B 平移到其后"""
    _check_same_sig(A, B)
    shift = A.size
    relations = tuple(
        rel_a | frozenset(tuple(x + shift for x in t) for t in rel_b)
        for rel_a, rel_b in zip(A.relations, B.relations)
    )
    return FinStructure(A.sig, A.size + B.size, relations)


def _vertex_invariants(A: FinStructure) -> Dict[int, tuple]:
    # 每个符号、每个位置上的出现次数，再做一轮邻域细化
    base = {}
    for v in A.vertices:
        counts = []
        for rel, (_, arity) in zip(A.relations, A.sig.symbols):
            per_position = [0] * arity
            repeated = 0
            for t in rel:
                hits = [p for p, x in enumerate(t) if x == v]
                for p in hits:
                    per_position[p] += 1
                if len(hits) > 1:
                    repeated += 1
            counts.append((tuple(per_position), repeated))
        base[v] = tuple(counts)
    refined = {}
    for v in A.vertices:
        context = []
        for idx, rel in enumerate(A.relations):
            for t in rel:
                if v in t:
                    pattern = tuple(x == v for x in t)
                    context.append((idx, pattern, tuple(base[x] for x in t)))
        refined[v] = (base[v], tuple(sorted(context)))
    return refined


@lru_cache(maxsize=1 << 16)
def canonical_form(A: FinStructure) -> CanonicalCode:
    """
    规范形式：在按顶点不变量排序的全部重标号中取编码最小者

    编码按新标号 k = 1..n 分块，第 k 块按签名顺序列出 {1..k} 上最大元为 k 的
    全部元组是否成立；部分编码已大于当前最优时剪枝。
    """
    n = A.size
    header = bytes([n // 256, n % 256])
    if n == 0:
        return CanonicalCode(header, ())
    invariants = _vertex_invariants(A)
    cells = sorted(invariants.values())
    closing = _closing_tuples(A.sig, n)
    ordering: List[int] = []
    used = set()
    blocks: List[bytes] = []
    best = {"code": None, "order": None}

    def block(k: int) -> bytes:
        return bytes(
            1 if tuple(ordering[x - 1] for x in t) in A.relations[idx] else 0
            for idx, t in closing[k]
        )

    def search(k: int):
        if k > n:
            code = b"".join(blocks)
            if best["code"] is None or code < best["code"]:
                best["code"] = code
                best["order"] = tuple(ordering)
            return
        for v in A.vertices:
            if v in used or invariants[v] != cells[k - 1]:
                continue
            ordering.append(v)
            used.add(v)
            blocks.append(block(k))
            prefix = b"".join(blocks)
            if best["code"] is None or prefix <= best["code"][:len(prefix)]:
                search(k + 1)
            blocks.pop()
            used.discard(v)
            ordering.pop()

    search(1)
    relabeling = [0] * n
    for new_label, old in enumerate(best["order"], start=1):
        relabeling[old - 1] = new_label
    return CanonicalCode(header + best["code"], tuple(relabeling))


def canonical_structure(A: FinStructure) -> FinStructure:
    """同构类的规范代表"""
    return relabel(A, canonical_form(A).relabeling)


def is_isomorphic(A: FinStructure, B: FinStructure) -> bool:
    _check_same_sig(A, B)
    return A.size == B.size and canonical_form(A).code == canonical_form(B).code
