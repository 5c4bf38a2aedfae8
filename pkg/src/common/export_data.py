import logging
from dataclasses import asdict, fields
from os import PathLike
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import pandas as pd

from .compute import sweep_flop_estimate
from .errors import InvalidArgumentError
from .typings import Algorithm, ExperimentConfig, TrialRecord

logger = logging.getLogger(__name__)

RECORD_COLUMNS = [f.name for f in fields(TrialRecord)]
GROUP_KEYS = ["snr_db", "n_samples", "algorithm"]
LIST_SEPARATOR = ";"


def records_frame(records: Sequence[TrialRecord], record_timing: bool = False) -> pd.DataFrame:
    """One row per record, columns in TrialRecord field order.

    Trajectories are joined into LIST_SEPARATOR-delimited strings; wall_time
    stays empty unless record_timing is set.
    """
    rows = []
    for record in records:
        row = asdict(record)
        row["cost_trajectory"] = _join(record.cost_trajectory)
        row["sinr_trajectory"] = _join(record.sinr_trajectory)
        if not record_timing:
            row["wall_time"] = None
        rows.append(row)
    return pd.DataFrame(rows, columns=RECORD_COLUMNS)


def write_records(
    records: Sequence[TrialRecord],
    path: Union[str, PathLike[str]],
    record_timing: bool = False
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    records_frame(records, record_timing).to_csv(path, index=False)
    logger.info("%d trial record(s) saved to %s", len(records), path)
    return path


def summarize(
    records: Sequence[TrialRecord],
    cfg: Optional[ExperimentConfig] = None
) -> pd.DataFrame:
    """
    Aggregate records per operating point and algorithm.

    Args:
        records: trial records, failed ones included
        cfg: when given, adds the per-sweep flop estimate of every algorithm

    Returns:
        pd.DataFrame: snr_db, n_samples, algorithm, mean_sinr_db (averaged in
        dB), mean_ser, n_ok, n_failed, available and optionally flops_per_sweep;
        means skip failed trials and a point without any success is unavailable

    Raises:
        InvalidArgumentError: if records is empty
    """
    if not records:
        raise InvalidArgumentError("cannot summarize an empty record list")

    df = pd.DataFrame([asdict(record) for record in records])
    ok = df["error"] == ""
    df = df.assign(
        sinr_ok=df["sinr_db"].where(ok),
        ser_ok=df["ser"].where(ok),
        ok=ok.astype(int),
        failed=(~ok).astype(int),
    )

    summary = (
        df.groupby(GROUP_KEYS, sort=False)
        .agg(mean_sinr_db=("sinr_ok", "mean"),
             mean_ser=("ser_ok", "mean"),
             n_ok=("ok", "sum"),
             n_failed=("failed", "sum"))
        .reset_index()
    )
    summary["available"] = summary["n_ok"] > 0

    if cfg is not None:
        algorithm_of: Dict[str, Algorithm] = {a.label: a.algorithm for a in cfg.algorithms}
        summary["flops_per_sweep"] = [
            sweep_flop_estimate(algorithm_of[label], cfg.n_tx, n_samples)
            if label in algorithm_of else None
            for label, n_samples in zip(summary["algorithm"], summary["n_samples"])
        ]

    for row in summary.itertuples(index=False):
        if not row.available:
            logger.warning("no successful trial for %s at snr=%s, N_s=%d",
                           row.algorithm, row.snr_db, row.n_samples)
    return summary


def write_summary(summary: pd.DataFrame, path: Union[str, PathLike[str]]) -> Path:
    """CSV, or a JSON list of objects when the path ends in .json."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix.lower() == ".json":
        summary.to_json(path, orient="records", indent=2)
    else:
        summary.to_csv(path, index=False)
    logger.info("summary saved to %s", path)
    return path


def format_report(summary: pd.DataFrame) -> str:
    return summary.to_string(index=False, float_format=lambda x: f"{x:.3f}")


def _join(values: List[float]) -> str:
    return LIST_SEPARATOR.join(f"{value:.10g}" for value in values)
