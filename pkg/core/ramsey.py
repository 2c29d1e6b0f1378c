"""
Ramsey 箭头关系与着色

- arrow_check / structural_arrow_check：穷举搜索坏着色（DFS，颜色对称性破缺），
  失败时返回字典序最小的坏着色
- find_arrow_witness / degree_report：按大小扫描见证、Ramsey 度的上下界证据
- EmbeddingSet 与 thick/syndetic 的有限视界判定
- 着色代数：乘积、细化、拉回、部分同构的作用
- bad_coloring_tree：沿前缀链逐层计数坏着色（König 论证的有限部分）

着色的下标就是 enumerate_embeddings 的顺序。
"""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from utils.workers import parallel_map

from .classes import FlimPrefix, ClassSpec, generate_structures, is_member, representatives_upto
from .errors import BaseMismatchError, MalformedInputError, PreconditionError
from .structures import (
    Embedding,
    FinStructure,
    automorphisms,
    embedding_fingerprint,
    embedding_index,
    enumerate_copies,
    enumerate_embeddings,
    is_partial_isomorphism,
    iter_embeddings,
)

log = logging.getLogger(__name__)

HOLDS = "holds"
FAILS = "fails"
TRIVIALLY_HOLDS = "trivially-holds"
ESTABLISHED = "established"
INCONCLUSIVE = "inconclusive-at-bound"
INCONSISTENT = "inconsistent"

FRONTIER_DEPTH = 4


@dataclass(frozen=True)
class Coloring:
    """
    Emb(A, C) 上的部分 r-着色；assignment[i] 是第 i 个嵌入的颜色，0 表示未定义
    """
    A: FinStructure
    C: FinStructure
    r: int
    assignment: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(c) for c in self.assignment))
        if self.r < 1:
            raise MalformedInputError(f"颜色数必须 >= 1，得到 {self.r}", "r")
        expected = len(enumerate_embeddings(self.A, self.C))
        if len(self.assignment) != expected:
            raise MalformedInputError(f"着色长度 {len(self.assignment)} 与 |Emb(A, C)|={expected} 不符",
                                      "assignment")
        for i, c in enumerate(self.assignment):
            if not 0 <= c <= self.r:
                raise MalformedInputError(f"颜色 {c} 不在 0..{self.r}", f"assignment[{i}]")

    @classmethod
    def constant(cls, A: FinStructure, C: FinStructure, color: int = 1, r: int = 1) -> "Coloring":
        return cls(A, C, max(r, color), (color,) * len(enumerate_embeddings(A, C)))

    @property
    def is_full(self) -> bool:
        return all(self.assignment)

    @property
    def domain(self) -> FrozenSet[int]:
        return frozenset(i for i, c in enumerate(self.assignment) if c)

    def color_class(self, color: int) -> "EmbeddingSet":
        return EmbeddingSet(self.A, self.C, frozenset(i for i, c in enumerate(self.assignment) if c == color))

    def classes(self) -> Tuple["EmbeddingSet", ...]:
        """非空颜色类，按颜色编号"""
        used = sorted(set(self.assignment) - {0})
        return tuple(self.color_class(c) for c in used)


def _same_base(*colorings: Coloring):
    first = colorings[0]
    for other in colorings[1:]:
        if other.A != first.A or other.C != first.C:
            raise BaseMismatchError("着色的底座 (A, C) 不一致")


def _same_domain(gamma: Coloring, delta: Coloring):
    _same_base(gamma, delta)
    if gamma.domain != delta.domain:
        raise BaseMismatchError("着色的定义域不一致")


@dataclass(frozen=True)
class ArrowQuery:
    C: FinStructure
    B: FinStructure
    A: FinStructure
    r: int
    k: int


@dataclass(frozen=True)
class ArrowResult:
    """
    箭头关系 C ↪ (B)^A_{r,k} 的判定

    verdict 为 fails 时 coloring 是一个完整的坏着色（structural 时也给出按拷贝的着色）。
    """
    query: ArrowQuery
    verdict: str
    fingerprint: str
    coloring: Optional[Coloring] = None
    nodes: int = 0
    prunings: int = 0
    structural: bool = False
    copy_assignment: Optional[Tuple[int, ...]] = None

    @property
    def holds(self) -> bool:
        return self.verdict in (HOLDS, TRIVIALLY_HOLDS)

    def verify(self) -> bool:
        """失败证书的多项式复核；成立的结论无法单独复核，返回 True"""
        if self.holds:
            return True
        q = self.query
        if self.coloring is None or embedding_fingerprint(q.A, q.C) != self.fingerprint:
            return False
        return verify_bad_coloring(self.coloring, q.B, q.k)


def _rows(A: FinStructure, B: FinStructure, C: FinStructure) -> np.ndarray:
    """第 f 行是 f∘Emb(A, B) 在 Emb(A, C) 中的下标"""
    index = embedding_index(A, C)
    inner = enumerate_embeddings(A, B)
    outer = enumerate_embeddings(B, C)
    rows = np.zeros((len(outer), len(inner)), dtype=np.int64)
    for i, f in enumerate(outer):
        for j, e in enumerate(inner):
            rows[i, j] = index[tuple(f.map[x - 1] for x in e.map)]
    return rows


def _distinct_per_row(values: np.ndarray) -> np.ndarray:
    if values.shape[-1] == 0:
        return np.zeros(values.shape[:-1], dtype=np.int64)
    ordered = np.sort(values, axis=-1)
    return 1 + np.count_nonzero(np.diff(ordered, axis=-1), axis=-1)


class _ColoringSearch:
    """
    在 items 个对象上找坏 r-着色：每一行对象的颜色数都 > k

    第一个颜色 c+1 出现在颜色 c 之后（颜色对称性破缺）；一行全部着色后颜色数 <= k 立即剪枝。
    """

    def __init__(self, items: int, rows: np.ndarray, r: int, k: int):
        self.items = items
        self.rows = rows
        self.r = r
        self.k = k
        last = rows.max(axis=1) if rows.size else np.zeros(len(rows), dtype=np.int64)
        self.completing = [rows[last == i] for i in range(items)]

    def violates(self, colors: np.ndarray, i: int) -> bool:
        done = self.completing[i]
        if not len(done):
            return False
        return bool((_distinct_per_row(colors[done]) <= self.k).any())

    def frontier(self, depth: int) -> Tuple[List[Tuple[int, ...]], int, int]:
        prefixes = []
        nodes = prunings = 0
        colors = np.zeros(self.items, dtype=np.int64)

        def walk(i: int, ceiling: int):
            nonlocal nodes, prunings
            if i == depth:
                prefixes.append(tuple(int(c) for c in colors[:depth]))
                return
            for c in range(1, min(self.r, ceiling + 1) + 1):
                colors[i] = c
                nodes += 1
                if self.violates(colors, i):
                    prunings += 1
                    continue
                walk(i + 1, max(ceiling, c))
            colors[i] = 0

        walk(0, 0)
        return prefixes, nodes, prunings

    def run(self, prefix: Tuple[int, ...]) -> Tuple[Optional[Tuple[int, ...]], int, int]:
        n = self.items
        base = len(prefix)
        colors = np.zeros(n, dtype=np.int64)
        colors[:base] = prefix
        ceiling = [0] * (n + 1)
        for i in range(base):
            ceiling[i + 1] = max(ceiling[i], prefix[i])
        nodes = prunings = 0
        i = base
        while i >= base:
            if i == n:
                return tuple(int(c) for c in colors), nodes, prunings
            nxt = int(colors[i]) + 1
            if nxt > min(self.r, ceiling[i] + 1):
                colors[i] = 0
                i -= 1
                continue
            colors[i] = nxt
            nodes += 1
            if self.violates(colors, i):
                prunings += 1
                continue
            ceiling[i + 1] = max(ceiling[i], nxt)
            i += 1
        return None, nodes, prunings


def _run_subtree(task) -> Tuple[Optional[Tuple[int, ...]], int, int]:
    search, prefix = task
    return search.run(prefix)


def _solve(search: _ColoringSearch, jobs: int) -> Tuple[Optional[Tuple[int, ...]], int, int]:
    prefixes, nodes, prunings = search.frontier(min(search.items, FRONTIER_DEPTH))
    tasks = [(search, p) for p in prefixes]
    if jobs > 1:
        outcomes = iter(parallel_map(_run_subtree, tasks, jobs))
    else:
        outcomes = (_run_subtree(task) for task in tasks)
    for found, n, p in outcomes:
        nodes += n
        prunings += p
        if found is not None:
            return found, nodes, prunings
    return None, nodes, prunings


def _validate_query(C: FinStructure, B: FinStructure, A: FinStructure, r: int, k: int):
    if r < 1 or k < 1:
        raise MalformedInputError(f"需要 r >= 1 且 k >= 1，得到 r={r}, k={k}")
    if not enumerate_embeddings(A, C):
        raise PreconditionError("Emb(A, C) 为空")


def arrow_check(C: FinStructure, B: FinStructure, A: FinStructure, r: int, k: int,
                jobs: int = 1) -> ArrowResult:
    """
    判定 C ↪ (B)^A_{r,k}

    嵌入按 enumerate_embeddings 顺序着色；搜索根部按固定深度切成前缀子树，
    jobs > 1 时并行，统计与返回的坏着色都与 jobs 无关。

    Args:
        r: 颜色数
        k: 允许的颜色数上限

    Returns:
        ArrowResult；r <= k 时直接标记 trivially-holds

    Raises:
        PreconditionError: Emb(A, C) 为空
    """
    _validate_query(C, B, A, r, k)
    query = ArrowQuery(C, B, A, r, k)
    fingerprint = embedding_fingerprint(A, C)
    n = len(enumerate_embeddings(A, C))
    rows = _rows(A, B, C)
    if not len(rows):
        return ArrowResult(query, FAILS, fingerprint, Coloring(A, C, r, (1,) * n))
    if r <= k:
        return ArrowResult(query, TRIVIALLY_HOLDS, fingerprint)
    if rows.shape[1] == 0:
        return ArrowResult(query, HOLDS, fingerprint)
    found, nodes, prunings = _solve(_ColoringSearch(n, rows, r, k), jobs)
    log.debug("arrow |Emb(A,C)|=%d r=%d k=%d nodes=%d", n, r, k, nodes)
    if found is None:
        return ArrowResult(query, HOLDS, fingerprint, nodes=nodes, prunings=prunings)
    return ArrowResult(query, FAILS, fingerprint, Coloring(A, C, r, found), nodes, prunings)


def structural_to_embedding(copy_assignment: Sequence[int], A: FinStructure, C: FinStructure,
                            r: int) -> Coloring:
    """按拷贝的着色 γ′ 诱导嵌入着色 γ(e) = γ′(e 的像)"""
    copies = {frozenset(S): i for i, S in enumerate(enumerate_copies(A, C))}
    if len(copy_assignment) != len(copies):
        raise MalformedInputError("拷贝着色长度与拷贝数不符", "copy_assignment")
    values = tuple(copy_assignment[copies[e.image]] for e in enumerate_embeddings(A, C))
    return Coloring(A, C, r, values)


def embedding_to_structural(gamma: Coloring) -> Tuple[int, ...]:
    """
    结构着色（在每个拷贝的全部嵌入上取常值）转成按拷贝的着色

    Raises:
        PreconditionError: γ 在某个拷贝上不是常值
    """
    copies = {frozenset(S): i for i, S in enumerate(enumerate_copies(gamma.A, gamma.C))}
    values: Dict[int, int] = {}
    for e, c in zip(enumerate_embeddings(gamma.A, gamma.C), gamma.assignment):
        i = copies[e.image]
        if values.setdefault(i, c) != c:
            raise PreconditionError("着色在同一拷贝的不同嵌入上取值不同，不是结构着色")
    return tuple(values[i] for i in range(len(copies)))


def structural_arrow_check(C: FinStructure, B: FinStructure, A: FinStructure, r: int, k: int,
                           jobs: int = 1) -> ArrowResult:
    """
    判定 C → (B)^A_{r,k}：给 A 在 C 中的拷贝着色

    失败时同时给出按拷贝的坏着色和它诱导的嵌入着色。
    """
    _validate_query(C, B, A, r, k)
    query = ArrowQuery(C, B, A, r, k)
    fingerprint = embedding_fingerprint(A, C)
    copies = {frozenset(S): i for i, S in enumerate(enumerate_copies(A, C))}
    outer = enumerate_embeddings(B, C)
    inner = enumerate_embeddings(A, B)
    if not outer:
        ones = (1,) * len(copies)
        return ArrowResult(query, FAILS, fingerprint, structural_to_embedding(ones, A, C, r),
                           structural=True, copy_assignment=ones)
    if r <= k:
        return ArrowResult(query, TRIVIALLY_HOLDS, fingerprint, structural=True)
    if not inner:
        return ArrowResult(query, HOLDS, fingerprint, structural=True)
    rows = np.array([
        sorted({copies[frozenset(f.map[x - 1] for x in e.map)] for e in inner}) for f in outer
    ], dtype=np.int64)
    found, nodes, prunings = _solve(_ColoringSearch(len(copies), rows, r, k), jobs)
    if found is None:
        return ArrowResult(query, HOLDS, fingerprint, nodes=nodes, prunings=prunings, structural=True)
    return ArrowResult(query, FAILS, fingerprint, structural_to_embedding(found, A, C, r),
                       nodes, prunings, True, found)


def verify_bad_coloring(gamma: Coloring, B: FinStructure, k: int) -> bool:
    """γ 完整，且每个 f ∈ Emb(B, C) 上 f∘Emb(A, B) 至少用了 k+1 种颜色"""
    if not gamma.is_full:
        return False
    index = embedding_index(gamma.A, gamma.C)
    inner = enumerate_embeddings(gamma.A, B)
    for f in iter_embeddings(B, gamma.C):
        used = {gamma.assignment[index[tuple(f.map[x - 1] for x in e.map)]] for e in inner}
        if len(used) <= k:
            return False
    return True


@dataclass(frozen=True)
class WitnessResult:
    B: FinStructure
    A: FinStructure
    r: int
    k: int
    size_bound: int
    witness: Optional[FinStructure]
    checked: int

    @property
    def found(self) -> bool:
        return self.witness is not None


def find_arrow_witness(spec: ClassSpec, B: FinStructure, A: FinStructure, r: int, k: int,
                       size_bound: int, jobs: int = 1) -> WitnessResult:
    """
    按大小、再按规范编码扫描类成员，返回第一个满足 C ↪ (B)^A_{r,k} 的 C

    Raises:
        PreconditionError: A 或 B 不在类中，或 A 不能嵌入 B
    """
    if not (is_member(spec, A) and is_member(spec, B)):
        raise PreconditionError("A、B 必须都在类中")
    if not enumerate_embeddings(A, B):
        raise PreconditionError("A 不能嵌入 B")
    checked = 0
    for n in range(B.size, size_bound + 1):
        for C in generate_structures(spec, n, jobs):
            if not enumerate_embeddings(B, C):
                continue
            checked += 1
            if arrow_check(C, B, A, r, k, jobs).holds:
                return WitnessResult(B, A, r, k, size_bound, C, checked)
    return WitnessResult(B, A, r, k, size_bound, None, checked)


@dataclass(frozen=True)
class EmbeddingSet:
    """Emb(A, target) 的子集，成员是 enumerate_embeddings 的下标"""
    A: FinStructure
    target: FinStructure
    members: FrozenSet[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(int(i) for i in self.members))
        total = len(enumerate_embeddings(self.A, self.target))
        for i in self.members:
            if not 0 <= i < total:
                raise MalformedInputError(f"下标 {i} 不在 0..{total - 1}", "members")

    @classmethod
    def full(cls, A: FinStructure, target: FinStructure) -> "EmbeddingSet":
        return cls(A, target, frozenset(range(len(enumerate_embeddings(A, target)))))

    @classmethod
    def from_predicate(cls, A: FinStructure, target: FinStructure,
                       predicate: Callable[[Embedding], bool]) -> "EmbeddingSet":
        return cls(A, target, frozenset(i for i, e in enumerate(enumerate_embeddings(A, target)) if predicate(e)))

    def complement(self) -> "EmbeddingSet":
        everything = frozenset(range(len(enumerate_embeddings(self.A, self.target))))
        return EmbeddingSet(self.A, self.target, everything - self.members)

    def embeddings(self) -> List[Embedding]:
        all_embs = enumerate_embeddings(self.A, self.target)
        return [all_embs[i] for i in sorted(self.members)]

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, index: int) -> bool:
        return index in self.members


@dataclass(frozen=True)
class ThicknessResult:
    """thick_at_horizon 的结论：见证是每个 B 的一个 f（像元组），失败时给出阻塞的 B"""
    thick: bool
    s: int
    witnesses: Tuple[Tuple[FinStructure, Tuple[int, ...]], ...] = ()
    blocking: Optional[FinStructure] = None


@dataclass(frozen=True)
class SyndeticResult:
    syndetic: bool
    s: int
    complement: ThicknessResult


def thick_at_horizon(S: EmbeddingSet, prefix: FlimPrefix, s: int) -> ThicknessResult:
    """
    视界 (prefix, s) 上的厚集判定

    对类中每个 |B| <= s 且 Emb(A, B) 非空的 B，要求某个 f ∈ Emb(B, top) 使 f∘Emb(A, B) ⊆ S。
    """
    top = prefix.top
    if S.target != top:
        raise BaseMismatchError("集合的目标结构不是前缀顶层")
    index = embedding_index(S.A, top)
    witnesses = []
    for B in representatives_upto(prefix.spec, s, low=S.A.size):
        inner = enumerate_embeddings(S.A, B)
        if not inner:
            continue
        found = None
        for f in iter_embeddings(B, top):
            if all(index[tuple(f.map[x - 1] for x in e.map)] in S.members for e in inner):
                found = f
                break
        if found is None:
            return ThicknessResult(False, s, tuple(witnesses), B)
        witnesses.append((B, found.map))
    return ThicknessResult(True, s, tuple(witnesses))


def syndetic_at_horizon(S: EmbeddingSet, prefix: FlimPrefix, s: int) -> SyndeticResult:
    """S 在视界上 syndetic 当且仅当补集在同一视界上不厚"""
    complement = thick_at_horizon(S.complement(), prefix, s)
    return SyndeticResult(not complement.thick, s, complement)


def precompose_set(S: EmbeddingSet, f: Embedding) -> EmbeddingSet:
    """{x∘f : x ∈ S}，S ⊆ Emb(B, top)，f: A → B"""
    if f.cod != S.A:
        raise BaseMismatchError("f 的陪域不是集合的底座")
    index = embedding_index(f.dom, S.target)
    members = {index[tuple(x.map[v - 1] for v in f.map)] for x in S.embeddings()}
    return EmbeddingSet(f.dom, S.target, frozenset(members))


def product_coloring(gamma: Coloring, delta: Coloring) -> Coloring:
    """
    乘积着色：颜色对 (γ, δ) 映到 (γ-1)·ℓ + δ，ℓ 为 δ 的颜色数

    这个配对是双射。
    """
    _same_domain(gamma, delta)
    ell = delta.r
    values = tuple((g - 1) * ell + d if g else 0 for g, d in zip(gamma.assignment, delta.assignment))
    return Coloring(gamma.A, gamma.C, gamma.r * ell, values)


def refines(delta: Coloring, gamma: Coloring) -> bool:
    """δ 的类比 γ 的类更细：δ(x) = δ(y) 蕴含 γ(x) = γ(y)"""
    _same_domain(gamma, delta)
    seen: Dict[int, int] = {}
    for d, g in zip(delta.assignment, gamma.assignment):
        if d and seen.setdefault(d, g) != g:
            return False
    return True


def restrict_coloring(gamma: Coloring, h: Embedding) -> Coloring:
    """Emb(A, D) 上的着色 x ↦ γ(h∘x)，h: D → γ.C"""
    if h.cod != gamma.C:
        raise BaseMismatchError("h 的陪域不是着色的目标结构")
    index = embedding_index(gamma.A, gamma.C)
    values = tuple(gamma.assignment[index[tuple(h.map[v - 1] for v in x.map)]]
                   for x in enumerate_embeddings(gamma.A, h.dom))
    return Coloring(gamma.A, h.dom, gamma.r, values)


def pullback_coloring(gamma: Coloring, f: Embedding) -> Coloring:
    """
    沿 f: A_m → A_n 拉回

    Args:
        gamma: Emb(A_m, top) 上的着色
        f: 嵌入 A_m → A_n

    Returns:
        Emb(A_n, top) 上的着色 x ↦ γ(x∘f)；γ(x∘f) 未定义处仍未定义
    """
    if f.dom != gamma.A:
        raise BaseMismatchError("f 的定义域不是着色的底座 A")
    index = embedding_index(gamma.A, gamma.C)
    values = tuple(gamma.assignment[index[tuple(x.map[v - 1] for v in f.map)]]
                   for x in enumerate_embeddings(f.cod, gamma.C))
    return Coloring(f.cod, gamma.C, gamma.r, values)


def act_on_coloring(g: Mapping[int, int], gamma: Coloring) -> Coloring:
    """
    部分同构 g 的左作用：(g·γ)(g∘x) = γ(x)

    像不落在 g 的值域里的嵌入上无定义。

    Raises:
        PreconditionError: g 不是目标结构的部分同构
    """
    C = gamma.C
    if not is_partial_isomorphism(g, C):
        raise PreconditionError("g 不是部分同构")
    inverse = {y: x for x, y in g.items()}
    index = embedding_index(gamma.A, C)
    values = []
    for y in enumerate_embeddings(gamma.A, C):
        if all(v in inverse for v in y.map):
            values.append(gamma.assignment[index[tuple(inverse[v] for v in y.map)]])
        else:
            values.append(0)
    return Coloring(gamma.A, C, gamma.r, tuple(values))


def compose_partial(h: Mapping[int, int], g: Mapping[int, int]) -> Dict[int, int]:
    """部分映射的复合 h∘g（在 g 的像落入 h 定义域处有定义）"""
    return {x: h[y] for x, y in g.items() if y in h}


def order_pattern(image: Sequence[int]) -> Tuple[int, ...]:
    """像元组在标号顺序下的相对次序，例如 (7, 2, 5) → (3, 1, 2)"""
    ranked = sorted(image)
    return tuple(ranked.index(v) + 1 for v in image)


def order_type_coloring(A: FinStructure, target: FinStructure) -> Coloring:
    """按像在标号（构造）顺序下的次序类型给 Emb(A, target) 着色，颜色按类型字典序编号"""
    patterns = [order_pattern(e.map) for e in enumerate_embeddings(A, target)]
    palette = {p: i + 1 for i, p in enumerate(sorted(set(patterns)))}
    return Coloring(A, target, max(1, len(palette)), tuple(palette[p] for p in patterns))


@dataclass(frozen=True)
class UpperEvidence:
    k: int
    verified: bool
    witnesses: Tuple[Tuple[FinStructure, Optional[FinStructure]], ...]
    monotone: bool = True


@dataclass(frozen=True)
class LowerEvidence:
    classes: int
    syndetic: Tuple[bool, ...]
    s: int
    coloring: Optional[Coloring] = None

    @property
    def value(self) -> int:
        return self.classes if self.syndetic and all(self.syndetic) else 1


@dataclass(frozen=True)
class DegreeReport:
    """
    嵌入 Ramsey 度的证据

    upper 是验证了 (k+1, k) 实例的最小 k；lower 来自各类都 syndetic 的着色。
    structural_figure = embedding_figure / |Aut(A)|。
    """
    spec_name: str
    A: FinStructure
    automorphisms: int
    witness_bound: int
    b_size: int
    upper: Optional[int]
    lower: int
    status: str
    embedding_figure: int
    structural_figure: Fraction
    upper_evidence: Tuple[UpperEvidence, ...] = ()
    lower_evidence: Optional[LowerEvidence] = None


def degree_report(spec: ClassSpec, A: FinStructure, witness_bound: int,
                  horizon: Optional[FlimPrefix] = None, s: Optional[int] = None,
                  r_max: Optional[int] = None, b_size: Optional[int] = None,
                  jobs: int = 1) -> DegreeReport:
    """
    Ramsey 度证据报告

    上界：对 k = 1.. r_max-1，检查所有 |A| <= |B| <= b_size 且含 A 的 B 是否在
    witness_bound 内有 (k+1, k) 见证；第一个全部有见证的 k 即上界，并对同一见证复核
    (k+2, k+1) 实例（单调性）。
    下界：给定视界时，用次序类型着色，各类都 syndetic 则类数是下界。

    Args:
        witness_bound: 见证 C 的大小上界
        horizon: 下界证据所用的前缀
        s: 视界大小，默认 |A|+1
        r_max: 默认 |Aut(A)|+1
        b_size: B 的大小上界，默认 |A|+1
    """
    if not is_member(spec, A):
        raise PreconditionError(f"A 不在类 {spec.name} 中")
    aut = len(automorphisms(A))
    r_max = aut + 1 if r_max is None else r_max
    b_size = A.size + 1 if b_size is None else b_size
    targets = [B for B in representatives_upto(spec, b_size, jobs, low=A.size) if enumerate_embeddings(A, B)]

    upper = None
    evidence = []
    for k in range(1, r_max):
        witnesses = []
        for B in targets:
            result = find_arrow_witness(spec, B, A, k + 1, k, witness_bound, jobs)
            witnesses.append((B, result.witness))
            if not result.found:
                break
        verified = all(C is not None for _, C in witnesses) and len(witnesses) == len(targets)
        monotone = True
        if verified:
            monotone = all(arrow_check(C, B, A, k + 2, k + 1, jobs).holds for B, C in witnesses)
        evidence.append(UpperEvidence(k, verified, tuple(witnesses), monotone))
        if verified:
            upper = k
            break

    lower_evidence = None
    lower = 1
    if horizon is not None:
        s = A.size + 1 if s is None else s
        gamma = order_type_coloring(A, horizon.top)
        flags = tuple(syndetic_at_horizon(cls, horizon, s).syndetic for cls in gamma.classes())
        lower_evidence = LowerEvidence(len(flags), flags, s, gamma)
        lower = lower_evidence.value

    if upper is not None and lower == upper:
        status = ESTABLISHED
    elif upper is not None and lower > upper:
        status = INCONSISTENT
    else:
        status = INCONCLUSIVE
    figure = upper if status == ESTABLISHED else lower
    report = DegreeReport(spec.name, A, aut, witness_bound, b_size, upper, lower, status,
                          figure, Fraction(figure, aut), tuple(evidence), lower_evidence)
    log.info("degree %s |A|=%d: lower=%d upper=%s status=%s", spec.name, A.size, lower, upper, status)
    return report


@dataclass(frozen=True)
class TreeLevel:
    """
    第 t 层：Emb(A, A_t) 上的全部坏 r-着色

    parents[i] 是第 i 个着色在上一层的限制的下标；extendable 是能延拓到下一层的着色个数。
    """
    t: int
    size: int
    embeddings: int
    count: int
    colorings: Tuple[Tuple[int, ...], ...]
    parents: Tuple[int, ...]
    extendable: Optional[int] = None


@dataclass(frozen=True)
class KonigTree:
    A: FinStructure
    B: FinStructure
    r: int
    k: int
    levels: Tuple[TreeLevel, ...]

    @property
    def counts(self) -> Tuple[int, ...]:
        return tuple(level.count for level in self.levels)

    @property
    def arrow_level(self) -> Optional[int]:
        """第一个空层：A_t ↪ (B)^A_{r,k} 在此成立"""
        for level in self.levels:
            if level.count == 0:
                return level.t
        return None


def _bad_mask(children: np.ndarray, rows: np.ndarray, k: int) -> np.ndarray:
    if rows.shape[0] == 0:
        return np.ones(len(children), dtype=bool)
    if rows.shape[1] == 0 or not len(children):
        return np.zeros(len(children), dtype=bool)
    distinct = _distinct_per_row(children[:, rows])
    return ~(distinct <= k).any(axis=1)


def bad_coloring_tree(A: FinStructure, B: FinStructure, prefix: FlimPrefix, depth: int,
                      r: int, k: int, max_candidates: int = 1 << 22) -> KonigTree:
    """
    沿前缀链逐层枚举坏着色

    第 t+1 层由第 t 层的坏着色在新嵌入上的全部延拓过滤得到，因此每个着色的限制
    都在上一层；某层为空即证明该层结构满足箭头关系。

    Raises:
        PreconditionError: depth 超过链长，或候选数超过 max_candidates
    """
    if not 1 <= depth <= prefix.steps:
        raise PreconditionError(f"depth 必须在 1..{prefix.steps}")
    if r < 1 or k < 1:
        raise MalformedInputError(f"需要 r >= 1 且 k >= 1，得到 r={r}, k={k}")
    levels: List[dict] = []
    current = np.zeros((1, 0), dtype=np.int64)
    previous_embs: Tuple[Embedding, ...] = ()
    for t in range(1, depth + 1):
        level = prefix.chain[t - 1]
        embs = enumerate_embeddings(A, level)
        index = embedding_index(A, level)
        old = [index[e.map] for e in previous_embs]
        seen = set(old)
        new = [i for i in range(len(embs)) if i not in seen]
        fresh = len(new)
        total = len(current) * r ** fresh
        if total > max_candidates:
            raise PreconditionError(f"第 {t} 层候选着色 {total} 个，超过上限 {max_candidates}")
        options = np.array(list(itertools.product(range(1, r + 1), repeat=fresh)), dtype=np.int64)
        options = options.reshape(r ** fresh, fresh)
        children = np.zeros((total, len(embs)), dtype=np.int64)
        if old:
            children[:, old] = np.repeat(current, len(options), axis=0)
        if new:
            children[:, new] = np.tile(options, (len(current), 1))
        parent_of = np.repeat(np.arange(len(current)), len(options))
        bad = _bad_mask(children, _rows(A, B, level), k)
        current = children[bad]
        parents = parent_of[bad]
        if levels:
            levels[-1]["extendable"] = int(len(set(parents.tolist())))
        levels.append(dict(
            t=t, size=level.size, embeddings=len(embs), count=int(len(current)),
            colorings=tuple(tuple(int(c) for c in row) for row in current),
            parents=tuple(int(p) for p in parents) if t > 1 else (),
        ))
        previous_embs = embs
        log.debug("konig level %d: %d bad colorings", t, len(current))
    return KonigTree(A, B, r, k, tuple(TreeLevel(**level) for level in levels))
