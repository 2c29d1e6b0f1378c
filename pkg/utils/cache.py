"""
结果缓存

每个条目一个 JSON 文件，文件名是键。键 = SHA-256(操作名, 规范化输入, 代码版本)，
条目里存报告字节与其摘要。命中时先比对摘要、再用调用方给的复核函数检查证书，
任一失败就删除条目按未命中处理。读写出现 I/O 错误时本次运行关闭缓存。
"""
import hashlib
import json
import logging
import os
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Optional, Union

from core import __version__
from core.errors import MalformedInputError

from .serialization import emit, encode, parse

log = logging.getLogger(__name__)

CACHE_ENV = "KPTKIT_CACHE_DIR"


@dataclass(frozen=True)
class CacheEntry:
    key: str
    operation: str
    version: str
    digest: str
    payload: str


def cache_key(operation: str, inputs: dict, version: str = __version__) -> str:
    """输入用结构化报告编码规范化后取哈希，与 --jobs、输出格式无关"""
    material = json.dumps({"operation": operation, "inputs": encode(inputs), "version": version},
                          sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


class ResultCache:
    """
    单写多读的目录缓存

    Args:
        directory: 缓存目录；None 表示关闭
    """

    def __init__(self, directory: Optional[Union[str, Path]] = None, version: str = __version__):
        self.directory = Path(directory) if directory else None
        self.version = version
        self.enabled = self.directory is not None
        self.hits = 0
        self.misses = 0
        if self.enabled:
            try:
                self.directory.mkdir(parents=True, exist_ok=True)
            except OSError as e:
                self._disable(e)

    @classmethod
    def from_environment(cls, directory: Optional[str] = None) -> "ResultCache":
        """--cache-dir 优先，其次环境变量 KPTKIT_CACHE_DIR，都没有则关闭"""
        return cls(directory or os.environ.get(CACHE_ENV) or None)

    def _disable(self, error: Exception):
        log.warning("cache disabled for this run: %s", error)
        self.enabled = False

    def key(self, operation: str, inputs: dict) -> str:
        return cache_key(operation, inputs, self.version)

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def evict(self, key: str):
        try:
            self._path(key).unlink()
        except FileNotFoundError:
            pass
        except OSError as e:
            self._disable(e)

    def get(self, key: str, verifier: Callable[[object], bool] = lambda _: True):
        """
        读取并复核条目

        Returns:
            结果对象；未命中、版本不符或复核失败时返回 None
        """
        if not self.enabled:
            return None
        path = self._path(key)
        try:
            raw = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            self.misses += 1
            return None
        except OSError as e:
            self._disable(e)
            return None
        try:
            entry = CacheEntry(**json.loads(raw))
        except (json.JSONDecodeError, TypeError) as e:
            log.warning("corrupt cache entry %s evicted: %s", key[:12], e)
            self.evict(key)
            self.misses += 1
            return None
        if entry.version != self.version or entry.key != key:
            self.misses += 1
            return None
        if hashlib.sha256(entry.payload.encode("utf-8")).hexdigest() != entry.digest:
            log.warning("cache entry %s failed digest check, evicted", key[:12])
            self.evict(key)
            self.misses += 1
            return None
        try:
            result = parse(entry.payload.encode("utf-8"))
            ok = verifier(result)
        except (MalformedInputError, TypeError, ValueError) as e:
            log.warning("cache entry %s unreadable, evicted: %s", key[:12], e)
            ok = False
        if not ok:
            log.warning("cache entry %s failed certificate re-verification, evicted", key[:12])
            self.evict(key)
            self.misses += 1
            return None
        self.hits += 1
        log.debug("cache hit %s (%s)", key[:12], entry.operation)
        return result

    def put(self, key: str, operation: str, result) -> bool:
        """原子写入（临时文件 + rename）；失败时关闭缓存并返回 False"""
        if not self.enabled:
            return False
        payload = emit(result).decode("utf-8")
        entry = CacheEntry(key, operation, self.version,
                           hashlib.sha256(payload.encode("utf-8")).hexdigest(), payload)
        try:
            fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-", suffix=".json")
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(asdict(entry), fh, sort_keys=True)
            os.replace(tmp, self._path(key))
        except OSError as e:
            self._disable(e)
            return False
        return True
