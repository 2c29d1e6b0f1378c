#!/usr/bin/env python3
"""
kptkit - 命令行工具

退出码：0 得到结论（成立或不成立），2 在给定界内无结论，1 输入错误。
"""
import argparse
import dataclasses
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from core.classes import (
    APCertificate,
    APReport,
    FlimConfig,
    FlimPrefix,
    chain_prefix,
    check_AP,
    check_age_class,
    check_extension_property,
    check_ultrahomogeneity,
    flim_prefix,
    forbidden_subset,
    generate_structures,
)
from core.errors import KptError, NotAFraisseClassError
from core.expansions import (
    INCONCLUSIVE as CONSISTENCY_INCONCLUSIVE,
    ConsistencyReport,
    ExpPReport,
    check_expP,
    check_precompact,
    check_reasonable,
    degree_equals_expansion_count,
    expanded_prefix,
    expansions_of,
    reachable_points,
)
from core.ramsey import (
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    ArrowResult,
    DegreeReport,
    EmbeddingSet,
    WitnessResult,
    arrow_check,
    bad_coloring_tree,
    degree_report,
    find_arrow_witness,
    order_pattern,
    structural_arrow_check,
    syndetic_at_horizon,
    thick_at_horizon,
    verify_bad_coloring,
)
from core.sat_bridge import (
    export_bad_coloring_cnf,
    import_sat_model,
    read_cnf_query,
    sat_arrow_check,
    solve_cnf_file,
    write_model_file,
)
from core.structures import automorphisms, embedding_fingerprint, enumerate_embeddings
from utils.cache import ResultCache
from utils.io_format import load_json
from utils.library import resolve_class, resolve_expansion, resolve_structure
from utils.report import FORMATS, TEXT, emit_report
from utils.results import (
    AutomorphismResult,
    CnfExportResult,
    EmbeddingsResult,
    ExpansionListResult,
    GenerateResult,
    MembershipResult,
    ModelImportResult,
    VerifyResult,
)
from utils.serialization import parse

log = logging.getLogger("kptkit")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INCONCLUSIVE = 2

# 与结果无关的选项不进缓存键
_NON_SEMANTIC = {"command", "format", "output", "verbose", "cache_dir", "jobs", "handler"}


@dataclass(frozen=True)
class RunConfig:
    """
    一次运行的完整配置

    Args:
        subcommand: 子命令名
        options: 子命令自己的参数（输入路径、界、开关）
        seed: 构造前缀时的种子
        jobs: worker 数量，只影响耗时
        fmt: text 或 structured
        cache_dir: 缓存目录，None 时看环境变量 KPTKIT_CACHE_DIR
    """
    subcommand: str
    options: Dict[str, object] = field(default_factory=dict)
    seed: int = 0
    jobs: int = 1
    fmt: str = TEXT
    cache_dir: Optional[str] = None

    def __post_init__(self):
        if self.jobs < 1:
            raise ValueError(f"--jobs 必须 >= 1，得到 {self.jobs}")
        if self.fmt not in FORMATS:
            raise ValueError(f"未知输出格式 {self.fmt!r}")
        for name, value in self.options.items():
            if isinstance(value, int) and not isinstance(value, bool) and value < 0:
                raise ValueError(f"--{name.replace('_', '-')} 不能为负数")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        options = {k: v for k, v in vars(args).items() if k not in _NON_SEMANTIC and k != "seed"}
        return cls(args.command, options, args.seed, args.jobs, args.format, args.cache_dir)

    def __getattr__(self, name):
        options = self.__dict__.get("options", {})
        if name in options:
            return options[name]
        raise AttributeError(name)


class _Context:
    def __init__(self, config: RunConfig):
        self.config = config
        self.cache = ResultCache.from_environment(config.cache_dir)

    def cached(self, operation: str, inputs: dict, compute: Callable[[], object],
               verifier: Callable[[object], bool] = lambda _: True):
        key = self.cache.key(operation, inputs)
        hit = self.cache.get(key, verifier)
        if hit is not None:
            return hit
        result = compute()
        self.cache.put(key, operation, result)
        return result


# ---------------------------------------------------------------- 证书复核

def _walk(obj):
    yield obj
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        for f in dataclasses.fields(obj):
            yield from _walk(getattr(obj, f.name))
    elif isinstance(obj, (tuple, list)):
        for item in obj:
            yield from _walk(item)


def verify_certificates(result) -> VerifyResult:
    """
    复核结果里的全部证书：箭头关系的坏着色、AP 证书、导入的模型着色

    只依赖嵌入判定与嵌入枚举。
    """
    checked = 0
    failures = []
    for node in _walk(result):
        if isinstance(node, ArrowResult):
            checked += 1
            if not node.verify():
                failures.append(f"箭头关系证书不成立: verdict={node.verdict}")
        elif isinstance(node, APCertificate):
            checked += 1
            if not node.verify():
                failures.append("AP 证书不成立")
        elif isinstance(node, ModelImportResult) and node.coloring is not None:
            checked += 1
            q = node.query
            if not verify_bad_coloring(node.coloring, q.B, q.k):
                failures.append("导入的着色不是坏着色")
    return VerifyResult(not failures, checked, tuple(failures))


# ---------------------------------------------------------------- 子命令

def _flim_config(cfg: RunConfig) -> FlimConfig:
    defaults = FlimConfig()
    return FlimConfig(
        age_bound=cfg.age_bound or defaults.age_bound,
        jep_bound=cfg.jep_bound or defaults.jep_bound,
        ap_triple_bound=cfg.ap_triple_bound or defaults.ap_triple_bound,
        amalgam_bound=cfg.flim_amalgam_bound,
        pair_bound=cfg.pair_bound or defaults.pair_bound,
    )


def _prefix(ctx: _Context, spec) -> FlimPrefix:
    cfg = ctx.config
    if cfg.chain:
        return chain_prefix(spec, [resolve_structure(ref) for ref in cfg.chain])
    if not cfg.steps:
        raise ValueError("需要 --steps 或 --chain 来给出前缀")
    config = _flim_config(cfg)
    return ctx.cached("flim", {"spec": spec, "steps": cfg.steps, "seed": cfg.seed, "config": config},
                      lambda: flim_prefix(spec, cfg.steps, cfg.seed, config))


def cmd_gen(ctx: _Context):
    cfg = ctx.config
    spec = resolve_class(cfg.class_name)
    return ctx.cached("gen", {"spec": spec, "n": cfg.size},
                      lambda: GenerateResult(spec.name, cfg.size,
                                             tuple(generate_structures(spec, cfg.size, cfg.jobs))))


def cmd_emb(ctx: _Context):
    A, B = resolve_structure(ctx.config.A), resolve_structure(ctx.config.B)
    maps = tuple(e.map for e in enumerate_embeddings(A, B))
    return EmbeddingsResult(A, B, maps, embedding_fingerprint(A, B))


def cmd_aut(ctx: _Context):
    A = resolve_structure(ctx.config.A)
    return AutomorphismResult(A, tuple(e.map for e in automorphisms(A)))


def cmd_member(ctx: _Context):
    spec = resolve_class(ctx.config.class_name)
    A = resolve_structure(ctx.config.A)
    witness = forbidden_subset(spec, A)
    return MembershipResult(spec.name, A, witness is None, witness)


def cmd_check_age(ctx: _Context):
    cfg = ctx.config
    spec = resolve_class(cfg.class_name)
    return ctx.cached("check-age", {"spec": spec, "bound": cfg.bound, "jep_bound": cfg.jep_bound},
                      lambda: check_age_class(spec, cfg.bound, cfg.jep_bound, cfg.jobs))


def cmd_check_ap(ctx: _Context):
    cfg = ctx.config
    spec = resolve_class(cfg.class_name)

    def verifier(report: APReport) -> bool:
        return report.certificate is None or report.certificate.verify(spec)

    return ctx.cached("check-ap", {"spec": spec, "triple_bound": cfg.triple_bound,
                                   "amalgam_bound": cfg.amalgam_bound},
                      lambda: check_AP(spec, cfg.triple_bound, cfg.amalgam_bound, cfg.jobs), verifier)


def cmd_flim(ctx: _Context):
    return _prefix(ctx, resolve_class(ctx.config.class_name))


def cmd_ext_prop(ctx: _Context):
    cfg = ctx.config
    prefix = _prefix(ctx, resolve_class(cfg.class_name))
    return check_extension_property(prefix, cfg.s, cfg.one_point)


def cmd_ultra(ctx: _Context):
    cfg = ctx.config
    prefix = _prefix(ctx, resolve_class(cfg.class_name))
    return check_ultrahomogeneity(prefix, cfg.s, cfg.depth)


def _arrow_operands(cfg: RunConfig):
    return (resolve_structure(cfg.C), resolve_structure(cfg.B), resolve_structure(cfg.A))


def cmd_arrow(ctx: _Context):
    cfg = ctx.config
    C, B, A = _arrow_operands(cfg)
    if cfg.sat:
        check, method = (lambda: sat_arrow_check(C, B, A, cfg.r, cfg.k)), "sat"
    elif cfg.structural:
        check, method = (lambda: structural_arrow_check(C, B, A, cfg.r, cfg.k, cfg.jobs)), "structural"
    else:
        check, method = (lambda: arrow_check(C, B, A, cfg.r, cfg.k, cfg.jobs)), "embedding"
    return ctx.cached("arrow", {"C": C, "B": B, "A": A, "r": cfg.r, "k": cfg.k, "method": method},
                      check, lambda result: result.verify())


def cmd_witness(ctx: _Context):
    cfg = ctx.config
    spec = resolve_class(cfg.class_name)
    B, A = resolve_structure(cfg.B), resolve_structure(cfg.A)
    return ctx.cached("witness", {"spec": spec, "B": B, "A": A, "r": cfg.r, "k": cfg.k,
                                  "size_bound": cfg.size_bound},
                      lambda: find_arrow_witness(spec, B, A, cfg.r, cfg.k, cfg.size_bound, cfg.jobs))


def cmd_degree(ctx: _Context):
    cfg = ctx.config
    spec = resolve_class(cfg.class_name)
    A = resolve_structure(cfg.A)
    horizon = _prefix(ctx, spec) if (cfg.steps or cfg.chain) else None
    inputs = {"spec": spec, "A": A, "witness_bound": cfg.witness_bound, "horizon": horizon,
              "s": cfg.s, "r_max": cfg.r_max, "b_size": cfg.b_size}
    return ctx.cached("degree", inputs,
                      lambda: degree_report(spec, A, cfg.witness_bound, horizon, cfg.s, cfg.r_max,
                                            cfg.b_size, cfg.jobs))


def _members(cfg: RunConfig, A, top) -> EmbeddingSet:
    if cfg.members_file:
        indices = load_json(cfg.members_file)
        if not isinstance(indices, list):
            raise ValueError("--members-file 必须是下标列表")
        return EmbeddingSet(A, top, frozenset(indices))
    identity = tuple(range(1, A.size + 1))
    predicates = {
        "all": lambda e: True,
        "none": lambda e: False,
        "increasing": lambda e: order_pattern(e.map) == identity,
        "decreasing": lambda e: order_pattern(e.map) == identity[::-1],
        "even": lambda e: all(v % 2 == 0 for v in e.map),
    }
    return EmbeddingSet.from_predicate(A, top, predicates[cfg.members])


def cmd_thick(ctx: _Context):
    cfg = ctx.config
    prefix = _prefix(ctx, resolve_class(cfg.class_name))
    S = _members(cfg, resolve_structure(cfg.A), prefix.top)
    return thick_at_horizon(S, prefix, cfg.s)


def cmd_syndetic(ctx: _Context):
    cfg = ctx.config
    prefix = _prefix(ctx, resolve_class(cfg.class_name))
    S = _members(cfg, resolve_structure(cfg.A), prefix.top)
    return syndetic_at_horizon(S, prefix, cfg.s)


def cmd_tree(ctx: _Context):
    cfg = ctx.config
    prefix = _prefix(ctx, resolve_class(cfg.class_name))
    A, B = resolve_structure(cfg.A), resolve_structure(cfg.B)
    return bad_coloring_tree(A, B, prefix, cfg.depth, cfg.r, cfg.k)


def cmd_cnf_export(ctx: _Context):
    cfg = ctx.config
    C, B, A = _arrow_operands(cfg)
    path, variables, clauses = export_bad_coloring_cnf(C, B, A, cfg.r, cfg.k, cfg.cnf)
    query, fingerprint = read_cnf_query(path)
    satisfiable = None
    if cfg.solve:
        model = solve_cnf_file(path)
        write_model_file(model, cfg.solve)
        satisfiable = model is not None
    return CnfExportResult(query, str(path), variables, clauses, fingerprint, cfg.solve, satisfiable)


def cmd_import_model(ctx: _Context):
    cfg = ctx.config
    query, _ = read_cnf_query(cfg.cnf)
    coloring = import_sat_model(cfg.model, cfg.cnf)
    return ModelImportResult(query, HOLDS if coloring is None else FAILS, coloring)


def cmd_expansions(ctx: _Context):
    cfg = ctx.config
    spec = resolve_expansion(cfg.expansion)
    A = resolve_structure(cfg.A)
    return ExpansionListResult(spec.name, A, tuple(S.star for S in expansions_of(spec, A)))


def cmd_check_expp(ctx: _Context):
    cfg = ctx.config
    spec = resolve_expansion(cfg.expansion)
    return ctx.cached("check-expp", {"spec": spec, "bound": cfg.bound, "a_size": cfg.a_size},
                      lambda: check_expP(spec, cfg.bound, cfg.a_size, cfg.jobs))


def cmd_check_reasonable(ctx: _Context):
    cfg = ctx.config
    spec = resolve_expansion(cfg.expansion)
    prefix_star = expanded_prefix(spec, cfg.steps, cfg.seed) if cfg.steps else None
    return check_reasonable(spec, cfg.bound, prefix_star, cfg.s or 2)


def cmd_check_precompact(ctx: _Context):
    cfg = ctx.config
    return check_precompact(resolve_expansion(cfg.expansion), cfg.bound)


def _expanded_prefix(ctx: _Context, spec):
    cfg = ctx.config
    if cfg.chain:
        return chain_prefix(spec.extended, [resolve_structure(ref) for ref in cfg.chain])
    return ctx.cached("expanded-prefix", {"spec": spec, "steps": cfg.steps, "seed": cfg.seed},
                      lambda: expanded_prefix(spec, cfg.steps, cfg.seed))


def cmd_consistency(ctx: _Context):
    cfg = ctx.config
    spec = resolve_expansion(cfg.expansion)
    A = resolve_structure(cfg.A)
    prefix_star = _expanded_prefix(ctx, spec)
    inputs = {"spec": spec, "A": A, "prefix": prefix_star, "s": cfg.s, "witness_bound": cfg.witness_bound,
              "b_size": cfg.b_size, "r_max": cfg.r_max}
    return ctx.cached("consistency", inputs,
                      lambda: degree_equals_expansion_count(spec, A, prefix_star, cfg.s, cfg.witness_bound,
                                                            cfg.b_size, cfg.r_max, cfg.jobs))


def cmd_reachable(ctx: _Context):
    cfg = ctx.config
    spec = resolve_expansion(cfg.expansion)
    return reachable_points(_expanded_prefix(ctx, spec), spec, cfg.m)


def cmd_verify(ctx: _Context):
    try:
        data = Path(ctx.config.report).read_bytes()
    except OSError as e:
        raise ValueError(f"无法读取报告: {e}") from None
    return verify_certificates(parse(data))


# ---------------------------------------------------------------- 退出码

def exit_status(result) -> int:
    if isinstance(result, VerifyResult):
        return EXIT_OK if result.ok else EXIT_INPUT
    if isinstance(result, DegreeReport):
        return EXIT_INCONCLUSIVE if result.status == INCONCLUSIVE else EXIT_OK
    if isinstance(result, ConsistencyReport):
        return EXIT_INCONCLUSIVE if result.status == CONSISTENCY_INCONCLUSIVE else EXIT_OK
    if isinstance(result, WitnessResult):
        return EXIT_OK if result.found else EXIT_INCONCLUSIVE
    if isinstance(result, ExpPReport):
        return EXIT_OK if (result.refuted or result.holds_at_bound) else EXIT_INCONCLUSIVE
    if isinstance(result, FlimPrefix):
        return EXIT_INCONCLUSIVE if result.exhausted else EXIT_OK
    return EXIT_OK


def run(config: RunConfig) -> Tuple[int, bytes]:
    """
    执行一条子命令

    Returns:
        (退出码, 报告字节)

    Raises:
        KptError / ValueError: 输入错误，由 main 转成退出码 1
    """
    handler = COMMANDS[config.subcommand][0]
    ctx = _Context(config)
    result = handler(ctx)
    return exit_status(result), emit_report(result, config.fmt)


COMMANDS: Dict[str, Tuple[Callable[[_Context], object], str]] = {
    "gen": (cmd_gen, "生成类中大小为 n 的全部同构类型"),
    "emb": (cmd_emb, "按字典序列出 Emb(A, B)"),
    "aut": (cmd_aut, "列出 Aut(A)"),
    "member": (cmd_member, "判定 A 是否属于类"),
    "check-age": (cmd_check_age, "年龄类检查（各大小非空 + JEP）"),
    "check-ap": (cmd_check_ap, "合并性质检查，失败时给出证书"),
    "flim": (cmd_flim, "构造 Fraïssé 极限的有限前缀"),
    "ext-prop": (cmd_ext_prop, "前缀上的扩张性质覆盖率"),
    "ultra": (cmd_ultra, "前缀上的超齐性覆盖率"),
    "arrow": (cmd_arrow, "判定 C ↪ (B)^A_{r,k}"),
    "witness": (cmd_witness, "在类中找箭头关系的最小见证 C"),
    "degree": (cmd_degree, "嵌入 Ramsey 度的上下界证据"),
    "thick": (cmd_thick, "视界上的厚集判定"),
    "syndetic": (cmd_syndetic, "视界上的 syndetic 判定"),
    "tree": (cmd_tree, "沿前缀逐层枚举坏着色（König 树）"),
    "cnf-export": (cmd_cnf_export, "导出坏着色的 DIMACS CNF"),
    "import-model": (cmd_import_model, "导入外部 SAT 模型并复核"),
    "expansions": (cmd_expansions, "列出 A 的全部扩张"),
    "check-expp": (cmd_check_expp, "扩张性质 ExpP 检查"),
    "check-reasonable": (cmd_check_reasonable, "reasonable 检查"),
    "check-precompact": (cmd_check_precompact, "precompact 检查"),
    "consistency": (cmd_consistency, "度证据与扩张个数的一致性检查"),
    "reachable": (cmd_reachable, "前缀上深度 m 的可达点"),
    "verify": (cmd_verify, "复核结构化报告中的证书"),
}


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', choices=FORMATS, default=TEXT, help='输出格式（默认：text）')
    common.add_argument('-o', '--output', help='报告写入文件（默认：标准输出）')
    common.add_argument('--jobs', type=int, default=1, help='worker 数量（默认：1）')
    common.add_argument('--seed', type=int, default=0, help='构造前缀的种子（默认：0）')
    common.add_argument('--cache-dir', help='结果缓存目录（默认：环境变量 KPTKIT_CACHE_DIR，未设置则不缓存）')
    common.add_argument('-v', '--verbose', action='store_true', help='输出调试日志')
    return common


def _prefix_options(p: argparse.ArgumentParser, steps_default: Optional[int] = None):
    p.add_argument('--steps', type=int, default=steps_default, help='前缀层数')
    p.add_argument('--chain', nargs='+', help='显式给出的链（结构名或文件），代替 --steps')
    p.add_argument('--age-bound', type=int, help='前置年龄类检查的大小界')
    p.add_argument('--jep-bound', type=int, help='前置 JEP 检查的大小界')
    p.add_argument('--ap-triple-bound', type=int, help='前置 AP 检查的三元组大小界')
    p.add_argument('--flim-amalgam-bound', type=int, help='构造步合并搜索的大小界')
    p.add_argument('--pair-bound', type=int, help='调度的包含对 |B| 上界')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='kptkit',
        description='有限 KPT 组合工具：嵌入 Ramsey 判定、Fraïssé 前缀与扩张类检查',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
  python main.py gen --class graphs -n 4
  python main.py arrow --C lo6 --B lo3 --A lo2 -r 2 -k 1
  python main.py check-ap --class c3c5free --triple-bound 4 --amalgam-bound 7
  python main.py degree --class graphs --A k2 --witness-bound 3
  python main.py check-expp --expansion sets-lo --bound 3

结构可以写成文件路径，或内置名称 lo<n> / k<n> / c<n> / p<n> / i<n> / set<n>；
类与扩张可以写成类库名称（library/ 目录）或文件路径。
退出码：0 得到结论，2 在界内无结论，1 输入错误。
        """
    )
    common = _common_options()
    sub = parser.add_subparsers(dest='command', required=True)

    def add(name: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=COMMANDS[name][1])

    p = add('gen')
    p.add_argument('--class', dest='class_name', required=True, help='类名或类文件')
    p.add_argument('-n', '--size', type=int, required=True, help='结构大小')

    p = add('emb')
    p.add_argument('--A', required=True)
    p.add_argument('--B', required=True)

    p = add('aut')
    p.add_argument('--A', required=True)

    p = add('member')
    p.add_argument('--class', dest='class_name', required=True)
    p.add_argument('--A', required=True)

    p = add('check-age')
    p.add_argument('--class', dest='class_name', required=True)
    p.add_argument('--bound', type=int, required=True, help='检查大小 1..bound')
    p.add_argument('--jep-bound', type=int, help='JEP 对的大小界（默认：bound）')

    p = add('check-ap')
    p.add_argument('--class', dest='class_name', required=True)
    p.add_argument('--triple-bound', type=int, required=True)
    p.add_argument('--amalgam-bound', type=int, help='合并搜索的大小界（默认：完备）')

    p = add('flim')
    p.add_argument('--class', dest='class_name', required=True)
    _prefix_options(p, steps_default=8)

    for name in ('ext-prop', 'ultra'):
        p = add(name)
        p.add_argument('--class', dest='class_name', required=True)
        p.add_argument('-s', type=int, default=2, help='视界大小（默认：2）')
        if name == 'ext-prop':
            p.add_argument('--one-point', action='store_true', help='只看 |B| = |A|+1 的包含对')
        else:
            p.add_argument('--depth', type=int, default=1, help='来回延拓的深度（默认：1）')
        _prefix_options(p, steps_default=8)

    for name in ('arrow', 'cnf-export'):
        p = add(name)
        p.add_argument('--C', required=True)
        p.add_argument('--B', required=True)
        p.add_argument('--A', required=True)
        p.add_argument('-r', type=int, required=True, help='颜色数')
        p.add_argument('-k', type=int, required=True, help='允许的颜色数上限')
        if name == 'arrow':
            p.add_argument('--structural', action='store_true', help='给拷贝着色（结构版本）')
            p.add_argument('--sat', action='store_true', help='用 SAT 求解器判定')
        else:
            p.add_argument('--cnf', required=True, help='DIMACS 输出路径')
            p.add_argument('--solve', metavar='MODEL', help='同时用 python-sat 求解并写出模型文件')

    p = add('witness')
    p.add_argument('--class', dest='class_name', required=True)
    p.add_argument('--B', required=True)
    p.add_argument('--A', required=True)
    p.add_argument('-r', type=int, required=True)
    p.add_argument('-k', type=int, required=True)
    p.add_argument('--size-bound', type=int, required=True, help='见证大小上界')

    p = add('degree')
    p.add_argument('--class', dest='class_name', required=True)
    p.add_argument('--A', required=True)
    p.add_argument('--witness-bound', type=int, required=True)
    p.add_argument('-s', type=int, help='下界证据的视界大小（默认：|A|+1）')
    p.add_argument('--r-max', type=int, help='上界搜索的颜色数上限（默认：|Aut(A)|+1）')
    p.add_argument('--b-size', type=int, help='B 的大小上界（默认：|A|+1）')
    _prefix_options(p)

    for name in ('thick', 'syndetic'):
        p = add(name)
        p.add_argument('--class', dest='class_name', required=True)
        p.add_argument('--A', required=True)
        p.add_argument('-s', type=int, required=True, help='视界大小')
        p.add_argument('--members', choices=['all', 'none', 'increasing', 'decreasing', 'even'],
                       default='all', help='集合 S 的谓词（默认：all）')
        p.add_argument('--members-file', help='S 的成员下标（JSON 列表），优先于 --members')
        _prefix_options(p, steps_default=8)

    p = add('tree')
    p.add_argument('--class', dest='class_name', required=True)
    p.add_argument('--A', required=True)
    p.add_argument('--B', required=True)
    p.add_argument('--depth', type=int, required=True)
    p.add_argument('-r', type=int, required=True)
    p.add_argument('-k', type=int, required=True)
    _prefix_options(p)

    p = add('import-model')
    p.add_argument('--model', required=True, help='外部求解器输出的模型文件')
    p.add_argument('--cnf', required=True, help='cnf-export 写出的 DIMACS 文件')

    p = add('expansions')
    p.add_argument('--expansion', required=True)
    p.add_argument('--A', required=True)

    p = add('check-expp')
    p.add_argument('--expansion', required=True)
    p.add_argument('--bound', type=int, required=True, help='B 的大小界')
    p.add_argument('--a-size', type=int, default=2, help='A* 的大小界（默认：2）')

    p = add('check-reasonable')
    p.add_argument('--expansion', required=True)
    p.add_argument('--bound', type=int, required=True)
    p.add_argument('-s', type=int, help='交叉检查的视界大小（默认：2）')
    p.add_argument('--steps', type=int, help='交叉检查所用扩张前缀的层数')

    p = add('check-precompact')
    p.add_argument('--expansion', required=True)
    p.add_argument('--bound', type=int, required=True)

    p = add('consistency')
    p.add_argument('--expansion', required=True)
    p.add_argument('--A', required=True)
    p.add_argument('--steps', type=int, default=8, help='扩张前缀层数（默认：8）')
    p.add_argument('--chain', nargs='+', help='显式给出的扩张链，代替 --steps')
    p.add_argument('-s', type=int)
    p.add_argument('--witness-bound', type=int)
    p.add_argument('--b-size', type=int)
    p.add_argument('--r-max', type=int)

    p = add('reachable')
    p.add_argument('--expansion', required=True)
    p.add_argument('-m', type=int, required=True, help='链的层号')
    p.add_argument('--steps', type=int, default=8)
    p.add_argument('--chain', nargs='+')

    p = add('verify')
    p.add_argument('--report', required=True, help='structured 格式的报告文件')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # 用法错误按输入错误处理
        return EXIT_INPUT if e.code else EXIT_OK
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
    )

    try:
        config = RunConfig.from_args(args)
        status, report = run(config)
    except NotAFraisseClassError as e:
        print(f"错误: 拒绝构造前缀: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (KptError, ValueError) as e:
        print(f"错误: {e}", file=sys.stderr)
        return EXIT_INPUT

    if args.output:
        output_path = Path(args.output)
        output_path.write_bytes(report)
        print(f"报告已写入: {output_path}", file=sys.stderr)
    else:
        sys.stdout.write(report.decode('utf-8'))
        sys.stdout.flush()
    return status


if __name__ == '__main__':
    sys.exit(main())
