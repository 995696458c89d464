"""
A/B benchmark over a corpus directory.

Every image is encoded with the four feature-flag combinations. The report has
one row per (image, configuration) and a summary of total bytes per
unique-color bucket, with percentages relative to the configuration using both
modifications.
"""

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd

from ..codec import SCFDecoder, SCFEncoder
from ..core.config import CodecConfig
from ..core.image import read_ppm
from ..core.logger import Logger

CONFIG_ORDER = ('baseline', 'stage2_only', 'stage3_only', 'both')
REFERENCE_CONFIG = 'both'
BUCKET_EDGES = (0.0, 0.03, 0.07, 0.17, 1.0)
BUCKET_LABELS = ('<=3%', '<=7%', '<=17%', '>17%')
BITS_TOLERANCE = 1.0
# The coder state never holds more than two unemitted bits between symbols.
MAX_REGISTER_BITS = 2.0


def bucket_of(unique_fraction: float) -> str:
    for upper, label in zip(BUCKET_EDGES[1:], BUCKET_LABELS):
        if unique_fraction <= upper:
            return label
    return BUCKET_LABELS[-1]


def bench_image(path: Union[str, Path], verify: bool = True, tolerance: int = 0) -> List[Dict]:
    """Encode one image with all four configurations; one result row per configuration."""
    img = read_ppm(path)
    rows = []
    for cfg in CodecConfig.matrix(similarity_tolerance=tolerance):
        started = time.perf_counter()
        data, stats = SCFEncoder(cfg).encode_with_stats(img)
        elapsed = time.perf_counter() - started
        row = {
            'image': Path(path).name,
            'config': cfg.label,
            'bytes': len(data),
            'bucket': bucket_of(stats.unique_fraction),
            'encode_seconds': round(elapsed, 4),
        }
        row.update(stats.as_row())
        balance = stats.bits_balance()
        row['bits_balance'] = balance
        row['bits_check_ok'] = (abs(balance) <= BITS_TOLERANCE
                                and -1e-6 <= stats.register_bits < MAX_REGISTER_BITS)
        if verify:
            row['roundtrip_ok'] = SCFDecoder().decode(data) == img
        rows.append(row)
    return rows


def _bench_image_job(args) -> List[Dict]:
    return bench_image(*args)


@dataclass
class BenchReport:
    rows: pd.DataFrame
    summary: pd.DataFrame

    @classmethod
    def from_rows(cls, rows: List[Dict]) -> 'BenchReport':
        frame = pd.DataFrame(rows)
        frame['config'] = pd.Categorical(frame['config'], categories=CONFIG_ORDER, ordered=True)
        frame = frame.sort_values(['image', 'config']).reset_index(drop=True)
        return cls(frame, summarize(frame))

    def sizes(self) -> pd.DataFrame:
        """Bytes per image (rows) and configuration (columns)."""
        return self.rows.pivot(index='image', columns='config', values='bytes')[list(CONFIG_ORDER)]

    def saving(self, bucket: str, versus: str = 'baseline') -> float:
        """Relative size reduction of the reference configuration against another one in a bucket."""
        row = self.summary.loc[bucket]
        return 1.0 - row[f'{REFERENCE_CONFIG}_bytes'] / row[f'{versus}_bytes']

    def to_csv(self, path: Union[str, Path]) -> Path:
        """Write the per-image rows to path and the bucket summary next to it."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.rows.to_csv(path, index=False)
        summary_path = path.with_name(f'{path.stem}_summary{path.suffix or ".csv"}')
        self.summary.to_csv(summary_path)
        logger = Logger()
        logger.log_report_saved(str(path), len(self.rows))
        logger.log_report_saved(str(summary_path), len(self.summary))
        return summary_path

    def format_summary(self) -> str:
        return self.summary.to_string(float_format=lambda v: f'{v:.1f}')


def summarize(frame: pd.DataFrame) -> pd.DataFrame:
    """
    Total bytes per bucket and configuration, plus percentages normalized to
    the reference configuration. A 'total' row covers the whole corpus.
    """
    totals = frame.pivot_table(index='bucket', columns='config', values='bytes',
                               aggfunc='sum', observed=True)
    counts = frame[frame['config'] == REFERENCE_CONFIG].groupby('bucket').size()
    totals = totals.reindex([b for b in BUCKET_LABELS if b in totals.index])
    totals.loc['total'] = totals.sum()
    counts.loc['total'] = counts.sum()

    summary = pd.DataFrame(index=totals.index)
    summary['images'] = counts.reindex(totals.index).astype(int)
    for name in CONFIG_ORDER:
        summary[f'{name}_bytes'] = totals[name].astype(np.int64)
    for name in CONFIG_ORDER:
        summary[f'{name}_pct'] = 100.0 * totals[name] / totals[REFERENCE_CONFIG]
    summary.index.name = 'bucket'
    return summary


def run_bench(corpus_dir: Union[str, Path], jobs: Optional[int] = None, verify: bool = True,
              tolerance: int = 0) -> BenchReport:
    """
    Benchmark every PPM in a corpus directory.

    Args:
        corpus_dir: Directory with .ppm files
        jobs: Worker processes; defaults to SCF_BENCH_JOBS or 1
        verify: Decode every bitstream and compare with the input

    Raises:
        FileNotFoundError: If the directory holds no PPM files
    """
    logger = Logger()
    paths = sorted(Path(corpus_dir).glob('*.ppm'))
    if not paths:
        raise FileNotFoundError(f"No .ppm files in {corpus_dir}")
    jobs = jobs or int(os.getenv('SCF_BENCH_JOBS', '1'))
    logger.log_codec_start('bench', f"{corpus_dir} ({len(paths)} images, {jobs} jobs)")
    started = time.perf_counter()

    work = [(p, verify, tolerance) for p in paths]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_bench_image_job, work))
    else:
        results = [_bench_image_job(w) for w in work]

    rows = [row for image_rows in results for row in image_rows]
    report = BenchReport.from_rows(rows)

    failed = report.rows[~report.rows['bits_check_ok']]
    if len(failed):
        logger.warning(f"Bit accounting off by more than {BITS_TOLERANCE} bit for {len(failed)} rows")
    if verify and not report.rows['roundtrip_ok'].all():
        logger.error("Round-trip mismatch in bench: " + ', '.join(
            f"{r.image}/{r.config}" for r in report.rows[~report.rows['roundtrip_ok']].itertuples()))

    logger.log_codec_end('bench', int(report.rows['bytes'].sum()), time.perf_counter() - started)
    return report
