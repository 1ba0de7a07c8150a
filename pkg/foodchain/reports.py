"""
Run manifests and JSON report files.

Every report embeds the manifest that produced it. Apart from the two
timestamps, equal manifests give byte-identical files.
"""
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .environment import RNG_ALGORITHM
from .tz_utils import format_utc, now_utc

logger = logging.getLogger(__name__)


@dataclass
class RunManifest:
    command: str
    flags: dict
    config_path: Optional[str] = None
    config_sha256: Optional[str] = None
    seed: Optional[int] = None
    rng_algorithm: str = RNG_ALGORITHM
    version: str = __version__
    started_at: str = field(default_factory=lambda: format_utc(now_utc()))
    finished_at: Optional[str] = None

    def finish(self):
        self.finished_at = format_utc(now_utc())
        return self

    def to_dict(self):
        return asdict(self)


def _plain(value):
    """numpy scalars/arrays to builtins; non-finite floats to None"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def dumps(payload) -> str:
    """Canonical JSON text: sorted keys, two-space indent, repr floats"""
    return json.dumps(_plain(payload), sort_keys=True, indent=2, allow_nan=False) + '\n'


def build_report(payload, manifest: Optional[RunManifest]):
    report = dict(payload)
    if manifest is not None:
        report['manifest'] = manifest.to_dict()
    return report


def write_report(out_dir, name, payload, manifest: Optional[RunManifest] = None):
    """Write <out_dir>/<name>.json and return its path"""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f'{name}.json')
    with open(path, 'w', encoding='utf-8') as f:
        f.write(dumps(build_report(payload, manifest)))
    logger.info(f"📄 Wrote {path}")
    return path
