"""
结构类

以有限的禁止诱导子结构列表给出的类：成员判定、同构类生成、JEP/AP 检查（带证书）、
Fraïssé 极限前缀构造，以及前缀上的扩张性质与超齐性覆盖率。

所有搜索共用一个逐顶点扩张器：新顶点按顺序加入，每个顶点的关系元组按
"其余顶点集合"分组，组内选项按 (大小, 字典序) 枚举，因此空选项（自由合并）总是最先出现；
每处理完一个旧顶点 w 就检查同时包含 w 与新顶点的子集，尽早剪枝。
"""
import itertools
import logging
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable, Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple

from utils.workers import parallel_map

from .errors import MalformedInputError, NotAFraisseClassError, PreconditionError, SignatureMismatchError
from .structures import (
    Embedding,
    FinStructure,
    Signature,
    _closing_tuples,
    automorphisms,
    canonical_form,
    canonical_structure,
    extend_embedding,
    induced_substructure,
    is_embedding,
    is_partial_isomorphism,
    iter_embeddings,
)

log = logging.getLogger(__name__)

HOLDS = "holds"
HOLDS_AT_BOUND = "holds-at-bound"
FAILS = "fails"

_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_-]*$")

FixedValue = Callable[[int, Tuple[int, ...]], Optional[bool]]


@dataclass(frozen=True)
class ClassSpec:
    """
    类说明：签名加有限禁止列表

    禁止结构在构造时化为规范代表并按规范编码去重；成员关系天然遗传（HP）。
    """
    name: str
    sig: Signature
    forbidden: Tuple[FinStructure, ...] = ()

    def __post_init__(self):
        if not isinstance(self.name, str) or not _NAME_RE.match(self.name):
            raise MalformedInputError(f"非法类名 {self.name!r}", "name")
        seen = set()
        kept = []
        for i, F in enumerate(self.forbidden):
            if F.sig != self.sig:
                raise SignatureMismatchError(f"forbidden[{i}]: 签名与类签名不一致")
            if F.size == 0:
                raise MalformedInputError("禁止结构不能为空结构", f"forbidden[{i}]")
            code = canonical_form(F).code
            if code in seen:
                log.warning("class %s: forbidden[%d] duplicates an earlier isomorphism type, dropped", self.name, i)
                continue
            seen.add(code)
            kept.append(canonical_structure(F))
        object.__setattr__(self, "forbidden", tuple(kept))

    @cached_property
    def forbidden_codes(self) -> Dict[int, FrozenSet[bytes]]:
        by_size: Dict[int, set] = {}
        for F in self.forbidden:
            by_size.setdefault(F.size, set()).add(canonical_form(F).code)
        return {size: frozenset(codes) for size, codes in sorted(by_size.items())}


def _check_sig(spec: ClassSpec, A: FinStructure):
    if A.sig != spec.sig:
        raise SignatureMismatchError(f"结构签名与类 {spec.name} 不一致")


def _subset_code(sig: Signature, relations: Sequence[set], subset: Sequence[int]) -> bytes:
    position = {v: j + 1 for j, v in enumerate(subset)}
    rels = tuple(
        frozenset(tuple(position[x] for x in t) for t in rel if all(x in position for x in t))
        for rel in relations
    )
    return canonical_form(FinStructure(sig, len(subset), rels)).code


def forbidden_subset(spec: ClassSpec, A: FinStructure) -> Optional[Tuple[int, ...]]:
    """返回 A 中第一个诱导出禁止结构的顶点子集，没有则返回 None"""
    _check_sig(spec, A)
    for size, codes in spec.forbidden_codes.items():
        for S in itertools.combinations(A.vertices, size):
            if _subset_code(A.sig, A.relations, S) in codes:
                return S
    return None


def is_member(spec: ClassSpec, A: FinStructure) -> bool:
    """A 是否属于类（没有子集诱导出禁止结构）"""
    return forbidden_subset(spec, A) is None


@dataclass(frozen=True)
class _Step:
    vertex: int
    forced: Tuple[Tuple[int, Tuple[int, ...]], ...] = ()
    free: Tuple[Tuple[int, Tuple[int, ...]], ...] = ()
    checkpoint: Optional[int] = None


def _plan(sig: Signature, start: int, size: int, fixed_value: Optional[FixedValue]) -> List[_Step]:
    closing = _closing_tuples(sig, size)
    steps = []
    for u in range(start, size + 1):
        groups: Dict[Tuple[int, Tuple[int, ...]], List[Tuple[int, Tuple[int, ...]]]] = {}
        for idx, t in closing[u]:
            others = tuple(sorted(set(t) - {u}))
            key = (others[-1] if others else 0, others)
            groups.setdefault(key, []).append((idx, t))
        for w in range(0, u):
            for key in sorted(k for k in groups if k[0] == w):
                forced, free = [], []
                for idx, t in sorted(groups[key]):
                    value = fixed_value(idx, t) if fixed_value else None
                    if value is None:
                        free.append((idx, t))
                    elif value:
                        forced.append((idx, t))
                steps.append(_Step(u, tuple(forced), tuple(free)))
            steps.append(_Step(u, checkpoint=w))
    return steps


def iter_extensions(sig: Signature, size: int, base: Sequence[FrozenSet], start: int,
                    fixed_value: Optional[FixedValue] = None,
                    spec: Optional[ClassSpec] = None) -> Iterator[FinStructure]:
    """
    在 {1..start-1} 上的已定结构之上，逐个加入顶点 start..size

    Args:
        sig: 签名
        size: 结果的论域大小
        base: 每个符号在 {1..start-1} 上已确定的元组集合
        start: 第一个新顶点
        fixed_value: (符号下标, 元组) → True/False 表示取值已定，None 表示自由
        spec: 给出时只产出类成员（假设 base 本身是成员）

    Returns:
        按候选顺序产出的结构迭代器，第一个总是"只加强制元组"的那个
    """
    codes = spec.forbidden_codes if spec is not None else {}
    steps = _plan(sig, start, size, fixed_value)
    relations = [set(rel) for rel in base]

    def violates(u: int, w: int) -> bool:
        for k, allowed in codes.items():
            if w == 0:
                if k == 1 and _subset_code(sig, relations, (u,)) in allowed:
                    return True
                continue
            if k < 2:
                continue
            for rest in itertools.combinations(range(1, w), k - 2):
                if _subset_code(sig, relations, rest + (w, u)) in allowed:
                    return True
        return False

    def walk(i: int) -> Iterator[FinStructure]:
        if i == len(steps):
            yield FinStructure(sig, size, tuple(frozenset(rel) for rel in relations))
            return
        step = steps[i]
        if step.checkpoint is not None:
            if not codes or not violates(step.vertex, step.checkpoint):
                yield from walk(i + 1)
            return
        for n in range(len(step.free) + 1):
            for option in itertools.combinations(step.free, n):
                added = step.forced + option
                for idx, t in added:
                    relations[idx].add(t)
                yield from walk(i + 1)
                for idx, t in added:
                    relations[idx].discard(t)

    yield from walk(0)


def _one_point_extensions(task: Tuple[ClassSpec, FinStructure]) -> List[Tuple[bytes, FinStructure]]:
    spec, rep = task
    found = {}
    for D in iter_extensions(spec.sig, rep.size + 1, rep.relations, rep.size + 1, spec=spec):
        code = canonical_form(D).code
        if code not in found:
            found[code] = canonical_structure(D)
    return sorted(found.items())


@lru_cache(maxsize=512)
def _generated(spec: ClassSpec, n: int, jobs: int) -> Tuple[FinStructure, ...]:
    if n == 0:
        return (FinStructure.empty(spec.sig),)
    merged = {}
    tasks = [(spec, rep) for rep in _generated(spec, n - 1, jobs)]
    for batch in parallel_map(_one_point_extensions, tasks, jobs):
        for code, D in batch:
            merged.setdefault(code, D)
    reps = tuple(D for _, D in sorted(merged.items()))
    log.debug("class %s: %d isomorphism types of size %d", spec.name, len(reps), n)
    return reps


def generate_structures(spec: ClassSpec, n: int, jobs: int = 1) -> List[FinStructure]:
    """
    生成类中大小为 n 的全部同构类

    Args:
        spec: 类说明
        n: 论域大小
        jobs: 扇出到进程池的 worker 数

    Returns:
        按规范编码排序的规范代表列表（可能为空）
    """
    if n < 0:
        raise MalformedInputError(f"n 必须非负，得到 {n}", "n")
    return list(_generated(spec, n, max(1, jobs)))


def representatives_upto(spec: ClassSpec, bound: int, jobs: int = 1, low: int = 0) -> List[FinStructure]:
    """大小在 low..bound 之间的全部代表，先按大小再按编码"""
    reps = []
    for n in range(low, bound + 1):
        reps.extend(generate_structures(spec, n, jobs))
    return reps


@dataclass(frozen=True)
class APCertificate:
    """
    一个三元组 (A, B, C, f, g) 的合并结果

    成功时 D、r、s 给出且 r∘f = s∘g；失败时 exact 表示搜索是否覆盖了
    全部可能大小（size_bound ≥ |B|+|C|-|A|）。
    """
    verdict: str
    A: FinStructure
    B: FinStructure
    C: FinStructure
    f: Embedding
    g: Embedding
    size_bound: int
    exact: bool
    free_amalgam: FinStructure
    D: Optional[FinStructure] = None
    r: Optional[Embedding] = None
    s: Optional[Embedding] = None
    identifications: int = 0

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    def verify(self, spec: Optional[ClassSpec] = None) -> bool:
        """只用嵌入判定复核证书"""
        if not (is_embedding(self.f.map, self.A, self.B) and is_embedding(self.g.map, self.A, self.C)):
            return False
        if not self.holds:
            return spec is None or not is_member(spec, self.free_amalgam)
        if not (is_embedding(self.r.map, self.B, self.D) and is_embedding(self.s.map, self.C, self.D)):
            return False
        square = all(self.r(self.f(a)) == self.s(self.g(a)) for a in self.A.vertices)
        return square and (spec is None or is_member(spec, self.D))

    def replay(self, spec: ClassSpec) -> bool:
        """重跑同一合并搜索，结论与 D 必须一致"""
        again = amalgamate(spec, self.A, self.B, self.C, self.f, self.g, self.size_bound)
        return again.verdict == self.verdict and again.D == self.D


def free_amalgam(A: FinStructure, B: FinStructure, C: FinStructure,
                 f: Embedding, g: Embedding) -> Tuple[FinStructure, Embedding, Embedding]:
    """
    自由合并：B 占 1..|B|，C 独有的顶点依次追加，不加任何新元组

    Returns:
        (D, r, s)，不检查类成员关系
    """
    s_map = {g(a): f(a) for a in A.vertices}
    for c in C.vertices:
        if c not in s_map:
            s_map[c] = B.size + 1 + len(s_map) - A.size
    relations = tuple(
        rel_b | frozenset(tuple(s_map[x] for x in t) for t in rel_c)
        for rel_b, rel_c in zip(B.relations, C.relations)
    )
    D = FinStructure(B.sig, B.size + C.size - A.size, relations)
    return D, Embedding(B, D, tuple(B.vertices)), Embedding(C, D, tuple(s_map[c] for c in C.vertices))


def _glue_consistent(B: FinStructure, C: FinStructure, s_map: Mapping[int, int]) -> bool:
    inside = [c for c in C.vertices if s_map[c] <= B.size]
    for (_, arity), rel_b, rel_c in zip(C.sig.symbols, B.relations, C.relations):
        for t in itertools.product(inside, repeat=arity):
            if (t in rel_c) != (tuple(s_map[x] for x in t) in rel_b):
                return False
    return True


def _iter_amalgams(spec: ClassSpec, A: FinStructure, B: FinStructure, C: FinStructure,
                   f: Embedding, g: Embedding, bound: int, descending: bool = False
                   ) -> Iterator[Tuple[FinStructure, Dict[int, int], int]]:
    glued = {g(a): f(a) for a in A.vertices}
    c_only = [c for c in C.vertices if c not in glued]
    b_only = [b for b in B.vertices if b not in f.image]
    full = B.size + len(c_only)
    lowest = max(0, full - bound)
    counts = range(lowest, min(len(c_only), len(b_only)) + 1)
    for count in (reversed(counts) if descending else counts):
        for chosen in itertools.combinations(c_only, count):
            for targets in itertools.permutations(b_only, count):
                s_map = dict(glued)
                s_map.update(zip(chosen, targets))
                rest = [c for c in c_only if c not in s_map]
                for j, c in enumerate(rest):
                    s_map[c] = B.size + j + 1
                if not _glue_consistent(B, C, s_map):
                    continue
                inverse = {d: c for c, d in s_map.items()}

                def fixed_value(idx, t, inverse=inverse):
                    if all(x in inverse for x in t):
                        return tuple(inverse[x] for x in t) in C.relations[idx]
                    return None

                size = B.size + len(rest)
                for D in iter_extensions(B.sig, size, B.relations, B.size + 1, fixed_value, spec):
                    yield D, s_map, count


def amalgamate(spec: ClassSpec, A: FinStructure, B: FinStructure, C: FinStructure,
               f: Embedding, g: Embedding, size_bound: Optional[int] = None) -> APCertificate:
    """
    在类中为 f: A→B、g: A→C 寻找合并 D

    候选顺序：先不做顶点等同（第一个候选就是自由合并），再依次等同 1、2、… 对顶点；
    每种等同下按扩张器的顺序加入新元组。

    Args:
        size_bound: D 的大小上界，None 表示 |B|+|C|-|A|（此时搜索是完备的）

    Raises:
        MalformedInputError: f 或 g 不是到 B/C 的嵌入
    """
    for name, e, cod in (("f", f, B), ("g", g, C)):
        if e.dom != A or e.cod != cod or not is_embedding(e.map, A, cod):
            raise MalformedInputError(f"{name} 不是 A 到目标结构的嵌入", name)
    full = B.size + C.size - A.size
    bound = full if size_bound is None else size_bound
    free, _, _ = free_amalgam(A, B, C, f, g)
    for D, s_map, count in _iter_amalgams(spec, A, B, C, f, g, bound):
        return APCertificate(
            HOLDS, A, B, C, f, g, bound, bound >= full, free,
            D=D, r=Embedding(B, D, tuple(B.vertices)),
            s=Embedding(C, D, tuple(s_map[c] for c in C.vertices)),
            identifications=count,
        )
    log.debug("class %s: amalgam search exhausted at size bound %d", spec.name, bound)
    return APCertificate(FAILS, A, B, C, f, g, bound, bound >= full, free)


@dataclass(frozen=True)
class AgeReport:
    """check_age_class 的结果"""
    spec_name: str
    bound: int
    jep_bound: int
    sizes: Tuple[Tuple[int, int], ...]
    missing_sizes: Tuple[int, ...]
    jep_holds: bool
    jep_counterexample: Optional[Tuple[FinStructure, FinStructure]] = None
    pairs_checked: int = 0

    @property
    def ok(self) -> bool:
        return self.jep_holds and not self.missing_sizes


def check_age_class(spec: ClassSpec, bound: int, jep_bound: Optional[int] = None, jobs: int = 1) -> AgeReport:
    """
    年龄类检查：HP 由构造保证，这里检查 JEP 与各大小是否有成员

    JEP 就是空底上的 AP，见证搜索到 |B|+|C|。

    Args:
        bound: 检查大小 1..bound 是否有成员
        jep_bound: JEP 对的大小上界，默认等于 bound
    """
    if bound < 2:
        raise PreconditionError(f"年龄类检查需要 bound >= 2，得到 {bound}")
    jep_bound = bound if jep_bound is None else jep_bound
    sizes = tuple((n, len(generate_structures(spec, n, jobs))) for n in range(1, bound + 1))
    missing = tuple(n for n, count in sizes if count == 0)
    empty = FinStructure.empty(spec.sig)
    reps = representatives_upto(spec, jep_bound, jobs, low=1)
    checked = 0
    counterexample = None
    for i, B in enumerate(reps):
        for C in reps[i:]:
            checked += 1
            cert = amalgamate(spec, empty, B, C, Embedding(empty, B, ()), Embedding(empty, C, ()))
            if not cert.holds:
                counterexample = (B, C)
                break
        if counterexample:
            break
    report = AgeReport(spec.name, bound, jep_bound, sizes, missing, counterexample is None,
                       counterexample, checked)
    log.info("class %s: age check bound=%d ok=%s", spec.name, bound, report.ok)
    return report


@dataclass(frozen=True)
class APReport:
    """check_AP 的结果：holds-at-bound 或第一个失败证书"""
    spec_name: str
    triple_bound: int
    amalgam_bound: Optional[int]
    verdict: str
    triples_checked: int
    certificate: Optional[APCertificate] = None


def _ap_scan(task) -> Tuple[int, Optional[APCertificate]]:
    spec, B, candidates, amalgam_bound = task
    checked = 0
    for n in range(B.size + 1):
        for S in itertools.combinations(B.vertices, n):
            A, f = induced_substructure(B, S)
            for C in candidates:
                if C.size < A.size:
                    continue
                for g in iter_embeddings(A, C):
                    checked += 1
                    cert = amalgamate(spec, A, B, C, f, g, amalgam_bound)
                    if not cert.holds:
                        return checked, cert
    return checked, None


def check_AP(spec: ClassSpec, triple_bound: int, amalgam_bound: Optional[int] = None,
             jobs: int = 1) -> APReport:
    """
    对 |B|,|C| <= triple_bound 的全部三元组运行 amalgamate（f 取包含映射）

    Args:
        triple_bound: B、C 的大小上界
        amalgam_bound: 合并搜索的大小上界，None 表示各自的 |B|+|C|-|A|
        jobs: 按 B 扇出；合并结果时只取顺序上第一个失败
    """
    if triple_bound < 1:
        raise MalformedInputError(f"triple_bound 必须 >= 1，得到 {triple_bound}", "triple_bound")
    reps = representatives_upto(spec, triple_bound, jobs)
    tasks = [(spec, B, tuple(reps), amalgam_bound) for B in reps]
    checked = 0
    if jobs > 1:
        outcomes = parallel_map(_ap_scan, tasks, jobs)
    else:
        outcomes = []
        for task in tasks:
            outcomes.append(_ap_scan(task))
            if outcomes[-1][1] is not None:
                break
    for count, cert in outcomes:
        checked += count
        if cert is not None:
            log.info("class %s: AP fails at triple bound %d", spec.name, triple_bound)
            return APReport(spec.name, triple_bound, amalgam_bound, FAILS, checked, cert)
    return APReport(spec.name, triple_bound, amalgam_bound, HOLDS_AT_BOUND, checked)


@dataclass(frozen=True)
class InclusionPair:
    """同构意义下的包含对 A ⊆ B；A 是 B 在 subset 上的诱导子结构"""
    index: int
    A: FinStructure
    B: FinStructure
    subset: Tuple[int, ...]

    @property
    def inclusion(self) -> Embedding:
        return Embedding(self.A, self.B, self.subset)


def inclusion_pairs(spec: ClassSpec, pair_bound: int) -> List[InclusionPair]:
    """
    |B| <= pair_bound 的全部包含对类型（不含 A = B）

    子集按 Aut(B) 轨道取字典序最小者去重；按 (|B|, 编码(B), |A|, 子集) 排序。
    """
    found = []
    for B in representatives_upto(spec, pair_bound, low=1):
        code = canonical_form(B).code
        autos = automorphisms(B)
        seen = set()
        for n in range(B.size):
            for S in itertools.combinations(B.vertices, n):
                orbit_min = min(tuple(sorted(a(v) for v in S)) for a in autos)
                if orbit_min in seen:
                    continue
                seen.add(orbit_min)
                found.append(((B.size, code, n, orbit_min), B))
    found.sort(key=lambda item: item[0])
    pairs = []
    for i, ((_, _, _, S), B) in enumerate(found):
        A, _ = induced_substructure(B, S)
        pairs.append(InclusionPair(i, A, B, S))
    return pairs


@dataclass(frozen=True)
class FlimConfig:
    """
    flim_prefix 的工作界

    Args:
        age_bound: 前置年龄类检查的大小界
        jep_bound: 前置 JEP 检查的对大小界
        ap_triple_bound: 前置 AP 检查的三元组大小界
        amalgam_bound: 构造步合并搜索的大小界，None 表示完备搜索
        pair_bound: 第 0 轮调度的包含对的 |B| 上界，第 ρ 轮为 pair_bound + ρ
        jep_size_bound: 构造中 JEP 步的见证大小界，None 表示 |top|+|B|
        tie_window: 每次合并最多考察多少个候选
    """
    age_bound: int = 6
    jep_bound: int = 3
    ap_triple_bound: int = 2
    amalgam_bound: Optional[int] = None
    pair_bound: int = 2
    jep_size_bound: Optional[int] = None
    tie_window: int = 4


@dataclass(frozen=True)
class StepRecord:
    """一层的来历；pair 是该轮包含对列表中的下标"""
    step: int
    kind: str
    pair: Optional[int] = None
    amalgams: int = 0
    added: int = 0
    round: int = 0


@dataclass(frozen=True)
class FlimPrefix:
    """
    链 A_1 ⊆ A_2 ⊆ … ⊆ A_T，每个包含映射都是前段包含（标号即构造顺序）
    """
    spec: ClassSpec
    chain: Tuple[FinStructure, ...]
    log: Tuple[StepRecord, ...]
    seed: int = 0
    config: Optional[FlimConfig] = None

    @property
    def top(self) -> FinStructure:
        return self.chain[-1]

    @property
    def steps(self) -> int:
        return len(self.chain)

    @property
    def exhausted(self) -> bool:
        return any(record.kind == "exhausted" for record in self.log)

    @property
    def complete(self) -> bool:
        """构造在有限极限处停止"""
        return any(record.kind == "complete" for record in self.log)

    def inclusion(self, t: int) -> Embedding:
        """A_t → A_{t+1}（t 从 1 开始）"""
        lower, upper = self.chain[t - 1], self.chain[t]
        return Embedding(lower, upper, tuple(lower.vertices))

    def replay(self) -> "FlimPrefix":
        if self.config is None:
            return chain_prefix(self.spec, self.chain)
        return flim_prefix(self.spec, self.steps, self.seed, self.config)


def _pick_amalgam(spec: ClassSpec, A: FinStructure, current: FinStructure, B: FinStructure,
                  f: Embedding, g: Embedding, bound: Optional[int], rng: random.Random,
                  window: int) -> Optional[FinStructure]:
    full = current.size + B.size - A.size
    choices = []
    first_count = None
    for D, _, count in _iter_amalgams(spec, A, current, B, f, g, full if bound is None else bound,
                                      descending=True):
        if first_count is None:
            first_count = count
        elif count != first_count:
            break
        choices.append(D)
        if len(choices) >= window:
            break
    if not choices:
        return None
    weights = [sum(len(rel) for rel in D.relations) for D in choices]
    lightest = [D for D, w in zip(choices, weights) if w == min(weights)]
    if len(lightest) == 1:
        return lightest[0]
    return lightest[rng.randrange(len(lightest))]


def _apply_pair(spec: ClassSpec, pair: InclusionPair, top: FinStructure, config: FlimConfig,
                rng: random.Random) -> Tuple[FinStructure, str, int]:
    """对一个包含对做一步，返回 (新顶层, 种类, 合并次数)；合并次数为 0 表示这一步没有改动"""
    embeddings = list(iter_embeddings(pair.A, top))
    if not embeddings:
        empty = FinStructure.empty(spec.sig)
        D = _pick_amalgam(spec, empty, top, pair.B, Embedding(empty, top, ()),
                          Embedding(empty, pair.B, ()), config.jep_size_bound, rng, config.tie_window)
        if D is None:
            return top, "exhausted", 0
        return D, "jep", 1
    current = top
    amalgams = 0
    for e in embeddings:
        partial = dict(zip(pair.subset, e.map))
        if extend_embedding(partial, pair.B, current) is not None:
            continue
        D = _pick_amalgam(spec, pair.A, current, pair.B, Embedding(pair.A, current, e.map),
                          pair.inclusion, config.amalgam_bound, rng, config.tie_window)
        if D is None:
            return current, "exhausted", amalgams
        current = D
        amalgams += 1
    return current, "amalgam", amalgams


def flim_prefix(spec: ClassSpec, steps: int, seed: int = 0, config: Optional[FlimConfig] = None) -> FlimPrefix:
    """
    构造 Fraïssé 极限的有限前缀

    按轮调度：第 ρ 轮依次处理 |B| <= pair_bound + ρ 的全部包含对类型，因此每个类型在
    之后的每一轮都会再出现。处理一个类型时，对步首时 A 到顶层的每个嵌入，若不能扩张到 B，
    就与 B 在 A 上合并；A 不能嵌入时做一步 JEP。只有改动了顶层的一步才成为新的一层，
    所以各层严格增大。合并时优先等同最多的顶点，再取元组最少的候选，种子只在剩下的
    并列候选之间选择。新顶点总是追加在末尾。

    Args:
        steps: 链的层数 T（>= 1）
        seed: 只在并列候选之间选择时使用

    Returns:
        前缀；某一轮没有改动且类中没有更大的结构时，链在极限处提前结束（记录 complete）

    Raises:
        NotAFraisseClassError: 工作界内不是年龄类或 AP 失败
    """
    if steps < 1:
        raise MalformedInputError(f"steps 必须 >= 1，得到 {steps}", "steps")
    config = config or FlimConfig()
    age = check_age_class(spec, config.age_bound, config.jep_bound)
    if not age.ok:
        raise NotAFraisseClassError(f"类 {spec.name} 在界 {config.age_bound} 内不是年龄类", age)
    ap = check_AP(spec, config.ap_triple_bound, config.amalgam_bound)
    if ap.verdict == FAILS:
        raise NotAFraisseClassError(f"类 {spec.name} 在界 {config.ap_triple_bound} 内不满足 AP", ap)

    rng = random.Random(seed)
    chain = [generate_structures(spec, 1)[0]]
    records = [StepRecord(1, "seed")]
    rnd = 0
    while len(chain) < steps:
        bound = config.pair_bound + rnd
        productive = False
        for pair in inclusion_pairs(spec, bound):
            top = chain[-1]
            current, kind, amalgams = _apply_pair(spec, pair, top, config, rng)
            if kind == "exhausted":
                if current.size > top.size:
                    chain.append(current)
                records.append(StepRecord(len(chain), kind, pair.index, amalgams, current.size - top.size, rnd))
                log.warning("class %s: amalgam search exhausted in round %d, prefix returned as built",
                            spec.name, rnd)
                return FlimPrefix(spec, tuple(chain), tuple(records), seed, config)
            if not amalgams:
                continue
            productive = True
            chain.append(current)
            records.append(StepRecord(len(chain), kind, pair.index, amalgams, current.size - top.size, rnd))
            log.debug("flim %s level %d: %s round=%d pair=%d size=%d",
                      spec.name, len(chain), kind, rnd, pair.index, current.size)
            if len(chain) == steps:
                break
        if not productive and not generate_structures(spec, bound + 1):
            records.append(StepRecord(len(chain), "complete", round=rnd))
            log.info("class %s: nothing of size %d, prefix stops at the limit after %d levels",
                     spec.name, bound + 1, len(chain))
            break
        rnd += 1
    return FlimPrefix(spec, tuple(chain), tuple(records), seed, config)


def chain_prefix(spec: ClassSpec, chain: Sequence[FinStructure]) -> FlimPrefix:
    """
    把显式给出的链包装成前缀

    Raises:
        MalformedInputError: 有层不在类中，或前一层不是后一层的前段
    """
    chain = tuple(chain)
    if not chain:
        raise MalformedInputError("链不能为空", "chain")
    for t, level in enumerate(chain):
        _check_sig(spec, level)
        if not is_member(spec, level):
            raise MalformedInputError(f"第 {t + 1} 层不在类 {spec.name} 中", f"chain[{t}]")
        if t and induced_substructure(level, range(1, chain[t - 1].size + 1))[0] != chain[t - 1]:
            raise MalformedInputError(f"第 {t} 层不是第 {t + 1} 层的前段", f"chain[{t}]")
    records = tuple(StepRecord(t + 1, "given") for t in range(len(chain)))
    return FlimPrefix(spec, chain, records)


@dataclass(frozen=True)
class ExtensionFailure:
    pair: int
    A: FinStructure
    B: FinStructure
    subset: Tuple[int, ...]
    g: Tuple[int, ...]


@dataclass(frozen=True)
class ExtensionReport:
    s: int
    one_point_only: bool
    instances: int
    extendable: int
    failures: Tuple[ExtensionFailure, ...] = ()

    @property
    def coverage(self) -> Fraction:
        return Fraction(self.extendable, self.instances) if self.instances else Fraction(1)

    @property
    def complete(self) -> bool:
        return self.extendable == self.instances


def check_extension_property(prefix: FlimPrefix, s: int, one_point_only: bool = False,
                             max_listed: int = 20) -> ExtensionReport:
    """
    扩张性质覆盖率

    对 |B| <= s 的每个包含对类型 A ⊆ B 与每个 g: A → 顶层，检查 g 能否扩张到 B。

    Args:
        one_point_only: 只看 |B| = |A| + 1 的包含对
        max_listed: 报告里最多列出的不可扩张实例数
    """
    if s < 1:
        raise MalformedInputError(f"s 必须 >= 1，得到 {s}", "s")
    top = prefix.top
    instances = extendable = 0
    failures = []
    for pair in inclusion_pairs(prefix.spec, s):
        if one_point_only and pair.B.size != pair.A.size + 1:
            continue
        for g in iter_embeddings(pair.A, top):
            instances += 1
            if extend_embedding(dict(zip(pair.subset, g.map)), pair.B, top) is not None:
                extendable += 1
            elif len(failures) < max_listed:
                failures.append(ExtensionFailure(pair.index, pair.A, pair.B, pair.subset, g.map))
    return ExtensionReport(s, one_point_only, instances, extendable, tuple(failures))


@dataclass(frozen=True)
class UltrahomogeneityReport:
    s: int
    depth: int
    partial_isomorphisms: int
    successes: int
    max_depth_reached: int

    @property
    def coverage(self) -> Fraction:
        if not self.partial_isomorphisms:
            return Fraction(1)
        return Fraction(self.successes, self.partial_isomorphisms)

    @property
    def complete(self) -> bool:
        return self.successes == self.partial_isomorphisms


def _back_and_forth(top: FinStructure, mapping: Dict[int, int], depth: int) -> bool:
    if depth == 0:
        return True
    vertices = set(top.vertices)
    free_dom = sorted(vertices - set(mapping))
    free_im = sorted(vertices - set(mapping.values()))

    def step_ok(x: int, y: int) -> bool:
        extended = {**mapping, x: y}
        return is_partial_isomorphism(extended, top) and _back_and_forth(top, extended, depth - 1)

    # forth
    for x in free_dom:
        if not any(step_ok(x, y) for y in free_im):
            return False
    # back
    for y in free_im:
        if not any(step_ok(x, y) for x in free_dom):
            return False
    return True


def check_ultrahomogeneity(prefix: FlimPrefix, s: int, depth: int = 1) -> UltrahomogeneityReport:
    """
    对顶层中 <= s 元子集之间的每个部分同构做有界的来回扩张

    Returns:
        成功比例与所达到的最大来回深度
    """
    if s < 1 or depth < 0:
        raise MalformedInputError("s 必须 >= 1 且 depth >= 0")
    top = prefix.top
    total = successes = deepest = 0
    for n in range(1, min(s, top.size) + 1):
        for X in itertools.combinations(top.vertices, n):
            for Y in itertools.permutations(top.vertices, n):
                mapping = dict(zip(X, Y))
                if not is_partial_isomorphism(mapping, top):
                    continue
                total += 1
                reached = 0
                while reached < depth and _back_and_forth(top, mapping, reached + 1):
                    reached += 1
                deepest = max(deepest, reached)
                if reached == depth:
                    successes += 1
    return UltrahomogeneityReport(s, depth, total, successes, deepest)


def superpose(name: str, *specs: ClassSpec) -> ClassSpec:
    """
    叠加类：签名是各分量签名的拼接，结构属于叠加类当且仅当每个分量的约化都在对应类中

    禁止列表 = 每个分量的禁止结构配上其余符号的任意取值。
    """
    if not specs:
        raise MalformedInputError("至少需要一个分量类")
    symbols = tuple(sym for spec in specs for sym in spec.sig.symbols)
    sig = Signature(symbols)
    forbidden = []
    offset = 0
    for spec in specs:
        width = len(spec.sig)
        for F in spec.forbidden:
            def fixed_value(idx, t, F=F, offset=offset, width=width):
                if offset <= idx < offset + width:
                    return t in F.relations[idx - offset]
                return None

            empty_base = tuple(frozenset() for _ in symbols)
            forbidden.extend(iter_extensions(sig, F.size, empty_base, 1, fixed_value))
        offset += width
    unique = {}
    for F in forbidden:
        unique.setdefault(canonical_form(F).code, F)
    return ClassSpec(name, sig, tuple(unique[code] for code in sorted(unique)))
