"""
Benchmark tooling: synthetic corpus generation and the four-way A/B report.
"""

from .corpus import CorpusSpec, generate_corpus, write_corpus
from .report import BenchReport, run_bench

__all__ = ["CorpusSpec", "generate_corpus", "write_corpus", "BenchReport", "run_bench"]
