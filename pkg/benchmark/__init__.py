"""
Benchmark and Command Layer
File I/O, table-style accuracy benchmarks, timing comparison and the
command implementations behind run_trigfit.py
"""

# Keep package import lightweight. The command and runner modules pull in
# pandas and the process pool; import them directly when needed.
__all__ = [
    'FitReport',
    'BenchCell',
    'TimingRow',
    'SignalRepo',
    'TableRegistry',
    'BenchRunner',
    'TimingRunner',
]


def __getattr__(name: str):
    if name in ('FitReport', 'BenchCell', 'TimingRow'):
        from . import reports

        return getattr(reports, name)
    if name == 'SignalRepo':
        from .signal_repo import SignalRepo

        return SignalRepo
    if name == 'TableRegistry':
        from .table_registry import TableRegistry

        return TableRegistry
    if name == 'BenchRunner':
        from .bench_runner import BenchRunner

        return BenchRunner
    if name == 'TimingRunner':
        from .timing import TimingRunner

        return TimingRunner
    raise AttributeError(name)
