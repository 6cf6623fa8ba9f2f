"""
Helper utility functions for the pick-freeze estimator.
"""

import hashlib
import json
import platform
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List

import numpy as np


# Stream tags keep the (seed, tag, ...) keys of unrelated draws disjoint.
STREAM_DESIGN = 1
STREAM_X = 2
STREAM_X_PRIME = 3
STREAM_UDP = 4
STREAM_NOISE = 5


def stream_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator keyed by ``(seed, *key)``.

    Draws made from distinct keys are independent and do not depend on the
    order in which the keys are visited, so callers can split work across
    threads and still get bit-identical results.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(k) for k in key]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def index_set(indices: Iterable[int]) -> FrozenSet[int]:
    """Frozen set of 1-based variable labels from 0-based positions."""
    return frozenset(int(i) + 1 for i in indices)


def positions(labels: Iterable[int]) -> List[int]:
    """Sorted 0-based positions from 1-based variable labels."""
    return sorted(int(i) - 1 for i in labels)


def config_hash(pairs: Dict[str, str]) -> str:
    """SHA-256 of the canonical ``key=value`` form of a run config."""
    canonical = "\n".join(f"{k}={pairs[k]}" for k in sorted(pairs))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def environment_versions() -> Dict[str, str]:
    """Versions of the interpreter and numerical stack."""
    import scipy
    import pandas
    from .. import __version__

    return {
        'rpf_sobol': __version__,
        'python': platform.python_version(),
        'numpy': np.__version__,
        'scipy': scipy.__version__,
        'pandas': pandas.__version__,
    }


def ensure_directory(path: str) -> Path:
    """Create ``path`` (and parents) if needed."""
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def write_json(path: Path, payload: Dict[str, Any]) -> None:
    """Write ``payload`` as sorted, indented JSON."""
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(payload, f, indent=2, sort_keys=True, default=_json_default)
        f.write("\n")


def _json_default(value: Any) -> Any:
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def format_count(count: int) -> str:
    """Format a large evaluation count, e.g. ``6.10e+09``."""
    if count < 1_000_000:
        return f"{count:,}"
    return f"{count:.2e}"
