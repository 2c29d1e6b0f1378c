"""命令行子命令的结果类型（核心模块已有结果类型的不在此列）"""
from dataclasses import dataclass
from typing import Optional, Tuple

from core.ramsey import ArrowQuery, Coloring
from core.structures import FinStructure


@dataclass(frozen=True)
class GenerateResult:
    spec_name: str
    n: int
    structures: Tuple[FinStructure, ...]


@dataclass(frozen=True)
class EmbeddingsResult:
    A: FinStructure
    B: FinStructure
    maps: Tuple[Tuple[int, ...], ...]
    fingerprint: str


@dataclass(frozen=True)
class AutomorphismResult:
    A: FinStructure
    maps: Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class MembershipResult:
    spec_name: str
    A: FinStructure
    member: bool
    forbidden_subset: Optional[Tuple[int, ...]] = None


@dataclass(frozen=True)
class CnfExportResult:
    query: ArrowQuery
    path: str
    variables: int
    clauses: int
    fingerprint: str
    model_path: Optional[str] = None
    satisfiable: Optional[bool] = None


@dataclass(frozen=True)
class ModelImportResult:
    """外部模型的导入结论：coloring 为 None 表示模型声明不可满足（箭头关系成立）"""
    query: ArrowQuery
    verdict: str
    coloring: Optional[Coloring] = None


@dataclass(frozen=True)
class ExpansionListResult:
    spec_name: str
    A: FinStructure
    expansions: Tuple[FinStructure, ...]


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    checked: int
    failures: Tuple[str, ...] = ()
