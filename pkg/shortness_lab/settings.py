import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional

try:
    import tomllib
except ImportError:
    try:
        import tomli as tomllib
    except ImportError:
        print("Error: Neither tomllib (Python 3.11+) nor tomli package is available.", file=sys.stderr)
        print("Please install tomli: pip install tomli", file=sys.stderr)
        sys.exit(1)

from shortness_lab.analysis.oracle import DEFAULT_NODE_LIMIT, DEFAULT_SECONDS, SearchBudget
from shortness_lab.graphs.assembly import DEFAULT_MAX_VERTICES

SEED_ENV = "SHORTNESS_LAB_SEED"
SUPPORTED_TABLES = ['md', 'csv']
SIZE_CAP_RANGE = (4, 14)


def parse_fraction(text: Any) -> Fraction:
    """Parse "p/q" (or an integer) into a positive fraction with q > 0."""
    raw = str(text).strip()
    try:
        if '/' in raw:
            p, q = raw.split('/', 1)
            numerator, denominator = int(p), int(q)
        else:
            numerator, denominator = int(raw), 1
    except ValueError:
        raise ValueError(f"Invalid rational '{text}'. Expected the form p/q")
    if denominator <= 0:
        raise ValueError(f"Invalid rational '{text}'. The denominator must be positive")
    value = Fraction(numerator, denominator)
    if value <= 0:
        raise ValueError(f"Invalid rational '{text}'. Thresholds must be positive")
    return value


@dataclass(frozen=True)
class GluelabSettings:
    t: Fraction = Fraction(3, 2)
    size_cap: int = 12
    instances: int = 200
    cuts_per_instance: int = 100


@dataclass(frozen=True)
class ReportSettings:
    table: str = 'md'
    n_max: int = 3


class LabSettings:

    def __init__(self, config_path: str = "config.toml"):
        self.config_path = Path(config_path)
        if not self.config_path.is_absolute():
            self.config_path = self.config_path.resolve()
        self.project_root = self.config_path.parent
        self.budget = SearchBudget(DEFAULT_NODE_LIMIT, DEFAULT_SECONDS)
        self.max_vertices = DEFAULT_MAX_VERTICES
        self.threads = os.cpu_count() or 1
        self.config_seed: Optional[int] = None
        self.gluelab = GluelabSettings()
        self.report = ReportSettings()

    def load_toml_config(self) -> Dict[str, Any]:
        try:
            with open(self.config_path, 'rb') as f:
                return tomllib.load(f)
        except FileNotFoundError:
            raise FileNotFoundError(f"Configuration file not found: {self.config_path}")
        except tomllib.TOMLDecodeError as e:
            raise ValueError(f"Invalid TOML configuration: {e}")

    def validate_budget_config(self, config: Dict[str, Any]) -> SearchBudget:
        nodes = config.get('nodes', DEFAULT_NODE_LIMIT)
        seconds = config.get('seconds', DEFAULT_SECONDS)
        if not isinstance(nodes, int) or nodes <= 0:
            raise ValueError(f"Invalid budget nodes: {nodes}. Must be a positive integer")
        if not isinstance(seconds, (int, float)) or seconds <= 0:
            raise ValueError(f"Invalid budget seconds: {seconds}. Must be a positive number")
        return SearchBudget(nodes, float(seconds))

    def validate_build_config(self, config: Dict[str, Any]) -> int:
        max_vertices = config.get('max_vertices', DEFAULT_MAX_VERTICES)
        if not isinstance(max_vertices, int) or max_vertices < 4:
            raise ValueError(f"Invalid max_vertices: {max_vertices}. Must be an integer >= 4")
        return max_vertices

    def validate_search_config(self, config: Dict[str, Any]) -> None:
        threads = config.get('threads', os.cpu_count() or 1)
        if not isinstance(threads, int) or threads < 1:
            raise ValueError(f"Invalid threads: {threads}. Must be a positive integer")
        seed = config.get('seed')
        if seed is not None and (not isinstance(seed, int) or seed < 0):
            raise ValueError(f"Invalid seed: {seed}. Must be a non-negative integer")
        self.threads = threads
        self.config_seed = seed

    def validate_gluelab_config(self, config: Dict[str, Any]) -> GluelabSettings:
        t = parse_fraction(config.get('t', '3/2'))
        size_cap = config.get('size_cap', 12)
        instances = config.get('instances', 200)
        cuts = config.get('cuts_per_instance', 100)
        low, high = SIZE_CAP_RANGE
        if not isinstance(size_cap, int) or not low <= size_cap <= high:
            raise ValueError(f"Invalid size_cap: {size_cap}. Must be between {low} and {high}")
        if not isinstance(instances, int) or instances < 1:
            raise ValueError(f"Invalid instances: {instances}. Must be a positive integer")
        if not isinstance(cuts, int) or cuts < 1:
            raise ValueError(f"Invalid cuts_per_instance: {cuts}. Must be a positive integer")
        return GluelabSettings(t, size_cap, instances, cuts)

    def validate_report_config(self, config: Dict[str, Any]) -> ReportSettings:
        table = config.get('table', 'md')
        n_max = config.get('n_max', 3)
        if table not in SUPPORTED_TABLES:
            raise ValueError(f"Unsupported table format: {table}. Supported formats: {', '.join(SUPPORTED_TABLES)}")
        if not isinstance(n_max, int) or n_max < 0:
            raise ValueError(f"Invalid n_max: {n_max}. Must be a non-negative integer")
        return ReportSettings(table, n_max)

    def load(self) -> 'LabSettings':
        config = self.load_toml_config()
        lab = config.get('lab', {})
        self.budget = self.validate_budget_config(lab.get('budget', {}))
        self.max_vertices = self.validate_build_config(lab.get('build', {}))
        self.validate_search_config(lab.get('search', {}))
        self.gluelab = self.validate_gluelab_config(lab.get('gluelab', {}))
        self.report = self.validate_report_config(lab.get('report', {}))
        return self

    def resolve_seed(self, cli_seed: Optional[int] = None) -> int:
        if cli_seed is not None:
            return cli_seed
        env_seed = os.environ.get(SEED_ENV)
        if env_seed:
            try:
                return int(env_seed)
            except ValueError:
                raise ValueError(f"Invalid {SEED_ENV}: {env_seed}. Must be an integer")
        if self.config_seed is not None:
            return self.config_seed
        return 0

    def search_budget(self, nodes: Optional[int] = None, seconds: Optional[float] = None,
                      seed: Optional[int] = None) -> SearchBudget:
        return SearchBudget(nodes if nodes is not None else self.budget.nodes,
                            seconds if seconds is not None else self.budget.seconds,
                            seed)


def load_settings(config_path: str = "config.toml", required: bool = False) -> LabSettings:
    """Settings from ``config_path``; defaults when the file is absent and not required."""
    settings = LabSettings(config_path)
    if not settings.config_path.exists() and not required:
        return settings
    return settings.load()
