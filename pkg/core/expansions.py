"""
扩张类

基类 K（签名 L）与扩张类 K*（签名 L*，L 是 L* 的前缀，新符号在后）：
约化、带标号的扩张枚举、拉回扩张 A(f, B*)、reasonable / precompact / ExpP 检查、
前缀上的有限逻辑作用，以及"度 = 扩张个数"的一致性检查。
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from utils.workers import parallel_map

from .classes import (
    ClassSpec,
    ExtensionReport,
    FlimConfig,
    FlimPrefix,
    StepRecord,
    check_extension_property,
    flim_prefix,
    is_member,
    iter_extensions,
    representatives_upto,
)
from .errors import MalformedInputError, PreconditionError, SignatureMismatchError
from .ramsey import Coloring, DegreeReport, degree_report, syndetic_at_horizon
from .structures import (
    Embedding,
    FinStructure,
    Signature,
    canonical_form,
    enumerate_embeddings,
    is_embedding,
    is_partial_isomorphism,
    iter_embeddings,
    reduct_to,
)

log = logging.getLogger(__name__)

WITNESS = "witness"
REFUTED = "refuted"
EXHAUSTED = "exhausted"
CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"
INCONCLUSIVE = "inconclusive-at-bound"


@dataclass(frozen=True)
class ExpansionSpec:
    """扩张说明：extended 的签名以 base 的签名为前缀"""
    name: str
    base: ClassSpec
    extended: ClassSpec

    def __post_init__(self):
        if not self.base.sig.is_prefix_of(self.extended.sig):
            raise SignatureMismatchError(f"扩张 {self.name}: 基类签名必须是扩张签名的前缀")

    @property
    def new_symbols(self) -> Tuple[Tuple[str, int], ...]:
        return self.extended.sig.symbols[len(self.base.sig):]


@dataclass(frozen=True)
class ExpandedStructure:
    """L* 结构及其 L 约化"""
    star: FinStructure
    base_sig: Signature

    @property
    def reduct(self) -> FinStructure:
        return reduct_to(self.star, self.base_sig)


def reduct(A_star: ExpandedStructure) -> FinStructure:
    """丢掉新符号，保留 L 关系原样"""
    return A_star.reduct


def reduct_closure_holds(spec: ExpansionSpec, bound: int) -> bool:
    """扩张类中 <= bound 的每个代表的约化都在基类中"""
    return all(is_member(spec.base, reduct_to(D, spec.base.sig))
               for D in representatives_upto(spec.extended, bound))


def expansions_of(spec: ExpansionSpec, A: FinStructure) -> List[ExpandedStructure]:
    """
    A 在论域不变时的全部扩张（带标号，不按同构合并）

    Raises:
        PreconditionError: A 不在基类中
    """
    if A.sig != spec.base.sig:
        raise SignatureMismatchError("A 的签名不是基类签名")
    if not is_member(spec.base, A):
        raise PreconditionError(f"A 不在基类 {spec.base.name} 中")
    width = len(spec.base.sig)

    def fixed_value(idx, t):
        if idx < width:
            return t in A.relations[idx]
        return None

    sig = spec.extended.sig
    empty = tuple(frozenset() for _ in sig.symbols)
    return [ExpandedStructure(D, spec.base.sig)
            for D in iter_extensions(sig, A.size, empty, 1, fixed_value, spec.extended)]


def pullback_expansion(f: Embedding, B_star: ExpandedStructure) -> ExpandedStructure:
    """
    A(f, B*)：沿 f 把新符号拉回到 A 上，使 f 成为 L* 嵌入

    Raises:
        MalformedInputError: f 不是 A → B*|L 的嵌入
    """
    B = B_star.reduct
    if f.dom.sig != B.sig or not is_embedding(f.map, f.dom, B):
        raise MalformedInputError("f 不是到 B* 约化的 L 嵌入", "f")
    A = f.dom
    width = len(B_star.base_sig)
    new_relations = []
    for (_, arity), rel in zip(B_star.star.sig.symbols[width:], B_star.star.relations[width:]):
        new_relations.append(frozenset(
            t for t in itertools.product(A.vertices, repeat=arity) if f.apply(t) in rel
        ))
    star = FinStructure(B_star.star.sig, A.size, A.relations + tuple(new_relations))
    if not is_embedding(f.map, star, B_star.star):
        raise MalformedInputError("拉回后 f 不是 L* 嵌入", "f")
    return ExpandedStructure(star, B_star.base_sig)


@dataclass(frozen=True)
class ReasonableReport:
    """
    reasonable 检查；blocking 是第一个无法延拓的 (A*, B, f)

    prefix_coverage 是扩张类前缀约化后在基类中的扩张性质覆盖率（可选的交叉检查）。
    """
    spec_name: str
    bound: int
    instances: int
    reasonable: bool
    blocking: Optional[Tuple[ExpandedStructure, FinStructure, Tuple[int, ...]]] = None
    prefix_coverage: Optional[ExtensionReport] = None


def check_reasonable(spec: ExpansionSpec, bound: int, prefix_star: Optional[FlimPrefix] = None,
                     s: int = 2) -> ReasonableReport:
    """
    对 |A| <= |B| <= bound、f: A → B、A* ∈ expansions_of(A)，找 B* 使 f 成为 A* → B* 的嵌入

    Args:
        prefix_star: 给出时附带交叉检查：其约化前缀在基类中的扩张性质覆盖率（视界 s）
    """
    if bound < 1:
        raise MalformedInputError(f"bound 必须 >= 1，得到 {bound}", "bound")
    instances = 0
    blocking = None
    reps = representatives_upto(spec.base, bound)
    for B in reps:
        B_stars = expansions_of(spec, B)
        for A in reps:
            if A.size > B.size:
                break
            A_stars = expansions_of(spec, A)
            for f in iter_embeddings(A, B):
                reachable = {pullback_expansion(f, B_star).star for B_star in B_stars}
                for A_star in A_stars:
                    instances += 1
                    if A_star.star not in reachable:
                        blocking = (A_star, B, f.map)
                        break
                if blocking:
                    break
            if blocking:
                break
        if blocking:
            break
    coverage = None
    if prefix_star is not None:
        coverage = check_extension_property(reduct_prefix(prefix_star, spec), s)
    return ReasonableReport(spec.name, bound, instances, blocking is None, blocking, coverage)


@dataclass(frozen=True)
class PrecompactReport:
    """每个基类代表的扩张个数：(A, 带标号个数, 同构类个数)"""
    spec_name: str
    bound: int
    counts: Tuple[Tuple[FinStructure, int, int], ...]

    @property
    def precompact(self) -> bool:
        return all(labeled > 0 for _, labeled, _ in self.counts)


def check_precompact(spec: ExpansionSpec, bound: int) -> PrecompactReport:
    if bound < 1:
        raise MalformedInputError(f"bound 必须 >= 1，得到 {bound}", "bound")
    counts = []
    for A in representatives_upto(spec.base, bound, low=1):
        stars = expansions_of(spec, A)
        iso_types = {canonical_form(S.star).code for S in stars}
        counts.append((A, len(stars), len(iso_types)))
    return PrecompactReport(spec.name, bound, tuple(counts))


@dataclass(frozen=True)
class ExpPEntry:
    A_star: FinStructure
    verdict: str
    witness: Optional[FinStructure] = None
    scheme: Optional[Tuple[bool, ...]] = None


@dataclass(frozen=True)
class ExpPReport:
    """
    ExpP 检查：对每个 A*，witness / refuted（均匀方案证明对所有 B 都失败）/ exhausted
    """
    spec_name: str
    bound: int
    a_size: int
    entries: Tuple[ExpPEntry, ...]

    @property
    def holds_at_bound(self) -> bool:
        return all(entry.verdict == WITNESS for entry in self.entries)

    @property
    def refuted(self) -> bool:
        return any(entry.verdict == REFUTED for entry in self.entries)


def _conforms(D: FinStructure, width: int, scheme: Tuple[bool, ...]) -> bool:
    for complete, (_, arity), rel in zip(scheme, D.sig.symbols[width:], D.relations[width:]):
        expected = len(D.vertices) ** arity if complete else 0
        if len(rel) != expected:
            return False
    return True


def _uniform_refutation(spec: ExpansionSpec, A_star: FinStructure) -> Optional[Tuple[bool, ...]]:
    # 没有禁止结构符合的方案 σ：每个 B 的 σ 扩张都在 K* 中；不符合 σ 的 A* 永远嵌不进去
    width = len(spec.base.sig)
    for scheme in itertools.product((False, True), repeat=len(spec.new_symbols)):
        if any(_conforms(F, width, scheme) for F in spec.extended.forbidden):
            continue
        if not _conforms(A_star, width, scheme):
            return scheme
    return None


def _all_expansions_embed(task) -> bool:
    spec, A_star, B = task
    return all(next(iter_embeddings(A_star, B_star.star), None) is not None
               for B_star in expansions_of(spec, B))


def check_expP(spec: ExpansionSpec, bound: int, a_size: int = 2, jobs: int = 1) -> ExpPReport:
    """
    对扩张类中 1 <= |A*| <= a_size 的每个代表，找基类中 |B| <= bound 的 B，
    使 B 的每个扩张都包含 A*

    第一个见证按 (大小, 规范编码) 选出，与 jobs 无关。
    """
    if bound < 1:
        raise MalformedInputError(f"bound 必须 >= 1，得到 {bound}", "bound")
    entries = []
    for A_star in representatives_upto(spec.extended, a_size, low=1):
        scheme = _uniform_refutation(spec, A_star)
        if scheme is not None:
            entries.append(ExpPEntry(A_star, REFUTED, scheme=scheme))
            continue
        candidates = representatives_upto(spec.base, bound, low=A_star.size)
        tasks = [(spec, A_star, B) for B in candidates]
        if jobs > 1:
            flags = parallel_map(_all_expansions_embed, tasks, jobs)
        else:
            flags = (_all_expansions_embed(task) for task in tasks)
        witness = next((B for B, ok in zip(candidates, flags) if ok), None)
        entries.append(ExpPEntry(A_star, WITNESS if witness is not None else EXHAUSTED, witness))
    return ExpPReport(spec.name, bound, a_size, tuple(entries))


def reduct_prefix(prefix_star: FlimPrefix, spec: ExpansionSpec) -> FlimPrefix:
    """扩张类前缀的逐层约化，作为基类的前缀"""
    if prefix_star.spec.sig != spec.extended.sig:
        raise SignatureMismatchError("前缀不在扩张签名上")
    chain = tuple(reduct_to(level, spec.base.sig) for level in prefix_star.chain)
    records = tuple(StepRecord(r.step, "reduct", r.pair, r.amalgams, r.added, r.round) for r in prefix_star.log)
    return FlimPrefix(spec.base, chain, records, prefix_star.seed)


def expansion_type_coloring(spec: ExpansionSpec, A: FinStructure, prefix_star: FlimPrefix) -> Coloring:
    """
    按拉回扩张类型给 Emb(A, 约化顶层) 着色

    颜色 i 对应 expansions_of(A) 的第 i 项；每个嵌入都恰好落在一类中。
    """
    stars = [S.star for S in expansions_of(spec, A)]
    position = {S: i + 1 for i, S in enumerate(stars)}
    top_star = ExpandedStructure(prefix_star.top, spec.base.sig)
    top = top_star.reduct
    values = tuple(position[pullback_expansion(x, top_star).star] for x in enumerate_embeddings(A, top))
    return Coloring(A, top, max(1, len(stars)), values)


@dataclass(frozen=True)
class ConsistencyReport:
    """
    扩张个数与度证据的对照

    classes_syndetic[i] 对应出现过的第 i 个扩张类型。
    """
    spec_name: str
    A: FinStructure
    count: int
    occurring: int
    classes_syndetic: Tuple[bool, ...]
    s: int
    degree: DegreeReport
    status: str

    @property
    def all_syndetic(self) -> bool:
        return self.occurring == self.count and all(self.classes_syndetic)


def degree_equals_expansion_count(spec: ExpansionSpec, A: FinStructure, prefix_star: FlimPrefix,
                                  s: Optional[int] = None, witness_bound: Optional[int] = None,
                                  b_size: Optional[int] = None, r_max: Optional[int] = None,
                                  jobs: int = 1) -> ConsistencyReport:
    """
    count = |expansions_of(A)| 与 Ramsey 度证据对照

    上方向：按拉回扩张类型着色后每一类都在视界上 syndetic；
    下方向：度证据里是否出现了比 count 更少的颜色即可避免的结论。

    Args:
        prefix_star: 扩张类的前缀，其约化作为基类视界
        s: 视界大小，默认 |A|+1
        witness_bound: 度上界证据的见证大小界，默认 |A|+2
    """
    if not is_member(spec.base, A):
        raise PreconditionError(f"A 不在基类 {spec.base.name} 中")
    s = A.size + 1 if s is None else s
    witness_bound = A.size + 2 if witness_bound is None else witness_bound
    count = len(expansions_of(spec, A))
    horizon = reduct_prefix(prefix_star, spec)
    gamma = expansion_type_coloring(spec, A, prefix_star)
    flags = tuple(syndetic_at_horizon(cls, horizon, s).syndetic for cls in gamma.classes())
    degree = degree_report(spec.base, A, witness_bound, horizon, s, r_max, b_size, jobs)
    all_syndetic = len(flags) == count and all(flags)
    if degree.lower > count or (degree.upper is not None and degree.upper < count):
        status = INCONSISTENT
    elif all_syndetic:
        status = CONSISTENT
    else:
        status = INCONCLUSIVE
    log.info("consistency %s |A|=%d count=%d status=%s", spec.name, A.size, count, status)
    return ConsistencyReport(spec.name, A, count, len(flags), flags, s, degree, status)


def finite_logic_action(prefix_star: FlimPrefix, spec: ExpansionSpec, m: int,
                        g: Mapping[int, int]) -> ExpandedStructure:
    """
    深度 m 的点 A_m(g, top*)：沿 g 拉回顶层的扩张

    Args:
        m: 链的层号（从 1 开始）
        g: 约化顶层的部分同构，定义域包含 A_m 的全部顶点

    Raises:
        PreconditionError: g 不是部分同构或没有覆盖 A_m
    """
    if not 1 <= m <= prefix_star.steps:
        raise PreconditionError(f"m 必须在 1..{prefix_star.steps}")
    top_star = ExpandedStructure(prefix_star.top, spec.base.sig)
    top = top_star.reduct
    level = reduct_to(prefix_star.chain[m - 1], spec.base.sig)
    if any(v not in g for v in level.vertices):
        raise PreconditionError("g 没有定义在 A_m 的全部顶点上")
    if not is_partial_isomorphism(dict(g), top):
        raise PreconditionError("g 不是部分同构")
    mapping = tuple(g[v] for v in level.vertices)
    if not is_embedding(mapping, level, top):
        raise PreconditionError("g 限制在 A_m 上不是嵌入")
    return pullback_expansion(Embedding(level, top, mapping), top_star)


@dataclass(frozen=True)
class ReachableReport:
    """深度 m 上可达的点（按首次出现顺序）与 expansions_of(A_m) 中没有到达的扩张"""
    m: int
    partial_isomorphisms: int
    points: Tuple[FinStructure, ...]
    missed: Tuple[FinStructure, ...]


def reachable_points(prefix_star: FlimPrefix, spec: ExpansionSpec, m: int) -> ReachableReport:
    """遍历 A_m 到约化顶层的全部部分同构（即嵌入），收集 finite_logic_action 的结果"""
    level = reduct_to(prefix_star.chain[m - 1], spec.base.sig)
    top_star = ExpandedStructure(prefix_star.top, spec.base.sig)
    seen: Dict[FinStructure, None] = {}
    total = 0
    for x in iter_embeddings(level, top_star.reduct):
        total += 1
        seen.setdefault(pullback_expansion(x, top_star).star, None)
    missed = tuple(S.star for S in expansions_of(spec, level) if S.star not in seen)
    return ReachableReport(m, total, tuple(seen), missed)


@dataclass(frozen=True)
class FunctorReport:
    ok: bool
    checked: int
    failure: Optional[str] = None


def verify_expansion_functor(first: ExpansionSpec, second: ExpansionSpec,
                             object_map: Callable[[ExpandedStructure], ExpandedStructure],
                             bound: int) -> FunctorReport:
    """
    检查对象映射 Φ 是否给出两个扩张之间的同构（在 |A| <= bound 的片段上）

    Φ 必须保持约化、在每个 expansions_of(A) 上是双射，并且 Emb(A*, B*) = Emb(ΦA*, ΦB*)。
    """
    if first.base != second.base:
        raise MalformedInputError("两个扩张的基类不同")
    reps = representatives_upto(first.base, bound)
    images: Dict[FinStructure, List[Tuple[ExpandedStructure, ExpandedStructure]]] = {}
    checked = 0
    for A in reps:
        sources = expansions_of(first, A)
        targets = {S.star for S in expansions_of(second, A)}
        mapped = [(S, object_map(S)) for S in sources]
        for S, T in mapped:
            if T.reduct != A:
                return FunctorReport(False, checked, f"Φ 不保持约化（|A|={A.size}）")
        if {T.star for _, T in mapped} != targets or len(targets) != len(sources):
            return FunctorReport(False, checked, f"Φ 在 |A|={A.size} 的扩张上不是双射")
        images[A] = mapped
    for A in reps:
        for B in reps:
            if A.size > B.size:
                continue
            for S, T in images[A]:
                for S2, T2 in images[B]:
                    checked += 1
                    left = {e.map for e in iter_embeddings(S.star, S2.star)}
                    right = {e.map for e in iter_embeddings(T.star, T2.star)}
                    if left != right:
                        return FunctorReport(False, checked, f"嵌入集合不一致（|A|={A.size}, |B|={B.size}）")
    return FunctorReport(True, checked)


def expanded_prefix(spec: ExpansionSpec, steps: int, seed: int = 0,
                    config: Optional[FlimConfig] = None) -> FlimPrefix:
    """扩张类的 Fraïssé 前缀；默认用较小的前置检查界"""
    config = config or FlimConfig(age_bound=3, jep_bound=2, ap_triple_bound=2)
    return flim_prefix(spec.extended, steps, seed, config)
