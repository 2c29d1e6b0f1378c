"""
坏着色的 CNF 编码

变量 x(e, c) 表示第 e 个嵌入取颜色 c（编号 e·r + c）；每个嵌入恰好一种颜色；
对每个 f ∈ Emb(B, C) 与每个 k 元颜色集 T，子句 ⋁_{e ∈ f∘Emb(A,B)} ⋁_{c ∉ T} x(e, c)。
公式可满足当且仅当箭头关系不成立。
"""
import itertools
import json
import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

from pysat.formula import CNF, IDPool
from pysat.solvers import Solver

from .errors import MalformedInputError, PreconditionError, SolverIntegrationError
from .ramsey import (
    FAILS,
    HOLDS,
    TRIVIALLY_HOLDS,
    ArrowQuery,
    ArrowResult,
    Coloring,
    _rows,
    _validate_query,
    verify_bad_coloring,
)
from .structures import FinStructure, embedding_fingerprint, enumerate_embeddings

log = logging.getLogger(__name__)

DEFAULT_SOLVER = "minisat22"

PathLike = Union[str, Path]


def _variables(n: int, r: int) -> Tuple[IDPool, List[List[int]]]:
    pool = IDPool()
    table = [[pool.id(("x", e, c)) for c in range(1, r + 1)] for e in range(n)]
    return pool, table


def encode_bad_coloring(C: FinStructure, B: FinStructure, A: FinStructure, r: int, k: int
                        ) -> Tuple[CNF, List[List[int]]]:
    """
    Returns:
        (CNF, 变量表)，变量表[e][c-1] 是 x(e, c)

    Raises:
        PreconditionError: r <= k（箭头关系平凡成立，不生成公式）或 Emb(A, C) 为空
    """
    if r <= k:
        raise PreconditionError(f"r={r} <= k={k}：箭头关系平凡成立")
    n = len(enumerate_embeddings(A, C))
    if not n:
        raise PreconditionError("Emb(A, C) 为空")
    _, table = _variables(n, r)
    clauses = []
    for lits in table:
        clauses.append(list(lits))
        clauses.extend([-a, -b] for a, b in itertools.combinations(lits, 2))
    for row in _rows(A, B, C):
        for T in itertools.combinations(range(1, r + 1), k):
            outside = [c for c in range(1, r + 1) if c not in T]
            clauses.append([table[int(e)][c - 1] for e in row for c in outside])
    return CNF(from_clauses=clauses), table


def _query_document(C: FinStructure, B: FinStructure, A: FinStructure, r: int, k: int) -> dict:
    return {"C": C.to_document(), "B": B.to_document(), "A": A.to_document(), "r": r, "k": k}


def export_bad_coloring_cnf(C: FinStructure, B: FinStructure, A: FinStructure, r: int, k: int,
                            destination: PathLike) -> Tuple[Path, int, int]:
    """
    写出 DIMACS 文件，注释行记录变量含义、查询本身和嵌入枚举指纹

    Returns:
        (写出的路径, 变量数, 子句数)
    """
    cnf, table = encode_bad_coloring(C, B, A, r, k)
    comments = [f"c query {json.dumps(_query_document(C, B, A, r, k), sort_keys=True)}",
                f"c fingerprint {embedding_fingerprint(A, C)}"]
    for e, lits in enumerate(table):
        for c, var in enumerate(lits, start=1):
            comments.append(f"c x {var} = emb {e} color {c}")
    destination = Path(destination)
    cnf.to_file(str(destination), comments=comments)
    log.info("wrote %d clauses over %d variables to %s", len(cnf.clauses), cnf.nv, destination)
    return destination, cnf.nv, len(cnf.clauses)


def read_cnf_query(cnf_path: PathLike) -> Tuple[ArrowQuery, str]:
    """从 CNF 注释中取回查询与指纹"""
    query = fingerprint = None
    try:
        lines = Path(cnf_path).read_text().splitlines()
    except OSError as e:
        raise SolverIntegrationError(f"无法读取 CNF 文件: {e}") from e
    for line in lines:
        if line.startswith("c query "):
            doc = json.loads(line[len("c query "):])
            try:
                query = ArrowQuery(
                    FinStructure.from_document(doc["C"], "C"),
                    FinStructure.from_document(doc["B"], "B"),
                    FinStructure.from_document(doc["A"], "A"),
                    int(doc["r"]), int(doc["k"]),
                )
            except (KeyError, TypeError, MalformedInputError) as e:
                raise SolverIntegrationError(f"CNF 查询注释损坏: {e}") from e
        elif line.startswith("c fingerprint "):
            fingerprint = line.split()[2]
    if query is None or fingerprint is None:
        raise SolverIntegrationError("CNF 文件缺少 query 或 fingerprint 注释")
    return query, fingerprint


def _parse_model(text: str) -> Optional[List[int]]:
    values = []
    has_v_lines = any(line.startswith("v ") for line in text.splitlines())
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("s "):
            if "UNSAT" in line:
                return None
            continue
        if has_v_lines and not line.startswith("v "):
            continue
        for token in line.lstrip("v").split():
            try:
                values.append(int(token))
            except ValueError:
                raise SolverIntegrationError(f"模型文件中有非整数项 {token!r}") from None
    return [v for v in values if v != 0]


def decode_model(model: List[int], query: ArrowQuery) -> Coloring:
    """把模型还原成着色并复核；每个嵌入必须恰好一种颜色"""
    n = len(enumerate_embeddings(query.A, query.C))
    _, table = _variables(n, query.r)
    truth = {abs(v): v > 0 for v in model}
    colors = []
    for e, lits in enumerate(table):
        missing = [var for var in lits if var not in truth]
        if missing:
            raise SolverIntegrationError(f"模型缺少变量 {missing[0]}")
        chosen = [c for c, var in enumerate(lits, start=1) if truth[var]]
        if len(chosen) != 1:
            raise SolverIntegrationError(f"嵌入 {e} 的颜色不是恰好一种: {chosen}")
        colors.append(chosen[0])
    gamma = Coloring(query.A, query.C, query.r, tuple(colors))
    if not verify_bad_coloring(gamma, query.B, query.k):
        raise SolverIntegrationError("模型对应的着色不是坏着色")
    return gamma


def import_sat_model(model_path: PathLike, cnf_path: Optional[PathLike] = None,
                     query: Optional[ArrowQuery] = None) -> Optional[Coloring]:
    """
    读入外部求解器的模型文件（``s``/``v`` 行格式或纯整数列表）

    查询从 cnf_path 的注释里取回（并核对嵌入枚举指纹），或由调用方直接给出 query；
    两者恰好给一个。

    Returns:
        复核过的坏着色；模型文件声明 UNSATISFIABLE 时返回 None（箭头关系成立）

    Raises:
        MalformedInputError: cnf_path 与 query 没有恰好给出一个
        SolverIntegrationError: 文件格式错误、指纹不符或着色未通过复核
    """
    if (cnf_path is None) == (query is None):
        raise MalformedInputError("cnf_path 与 query 需要恰好给出一个", "cnf_path")
    if cnf_path is not None:
        query, fingerprint = read_cnf_query(cnf_path)
        if embedding_fingerprint(query.A, query.C) != fingerprint:
            raise SolverIntegrationError("嵌入枚举指纹与 CNF 文件不符")
    try:
        text = Path(model_path).read_text()
    except OSError as e:
        raise SolverIntegrationError(f"无法读取模型文件: {e}") from e
    model = _parse_model(text)
    if model is None:
        return None
    return decode_model(model, query)


def solve_cnf_file(cnf_path: PathLike, solver_name: str = DEFAULT_SOLVER) -> Optional[List[int]]:
    """用 python-sat 求解 DIMACS 文件，返回模型或 None（不可满足）"""
    cnf = CNF(from_file=str(cnf_path))
    with Solver(name=solver_name, bootstrap_with=cnf.clauses) as solver:
        if solver.solve():
            return list(solver.get_model())
    return None


def write_model_file(model: Optional[List[int]], destination: PathLike) -> Path:
    """按 SAT 竞赛格式写出模型"""
    destination = Path(destination)
    if model is None:
        destination.write_text("s UNSATISFIABLE\n")
    else:
        destination.write_text("s SATISFIABLE\nv " + " ".join(map(str, model)) + " 0\n")
    return destination


def sat_arrow_check(C: FinStructure, B: FinStructure, A: FinStructure, r: int, k: int,
                    solver_name: str = DEFAULT_SOLVER) -> ArrowResult:
    """用进程内 SAT 求解器判定箭头关系，与 arrow_check 的结论应当一致"""
    _validate_query(C, B, A, r, k)
    query = ArrowQuery(C, B, A, r, k)
    fingerprint = embedding_fingerprint(A, C)
    if not enumerate_embeddings(B, C):
        n = len(enumerate_embeddings(A, C))
        return ArrowResult(query, FAILS, fingerprint, Coloring(A, C, r, (1,) * n))
    if r <= k:
        return ArrowResult(query, TRIVIALLY_HOLDS, fingerprint)
    cnf, _ = encode_bad_coloring(C, B, A, r, k)
    if any(not clause for clause in cnf.clauses):
        return ArrowResult(query, HOLDS, fingerprint)
    with Solver(name=solver_name, bootstrap_with=cnf.clauses) as solver:
        satisfiable = solver.solve()
        model = solver.get_model() if satisfiable else None
    if not satisfiable:
        return ArrowResult(query, HOLDS, fingerprint)
    return ArrowResult(query, FAILS, fingerprint, decode_model(list(model), query))
