import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from algorithms.separation import separate

from .metrics import compute_sinr, demap_and_ser, resolve_ambiguity
from .signal_model import build_constellation, calibrate_noise, draw_channel, draw_sources, transmit
from .typings import (
    AlgorithmConfig,
    ChannelInstance,
    ConstellationSpec,
    ExperimentConfig,
    SampleBlock,
    StructuredSeparator,
    TrialRecord,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrialSeeds:
    trial: int      # recorded with every result of the trial
    channel: int
    sources: int
    noise: int


@dataclass(frozen=True)
class TrialJob:
    snr_index: int
    ns_index: int
    trial: int


def derive_seeds(base_seed: int, ns_index: int, snr_index: int, trial: int) -> TrialSeeds:
    """Seeds of one trial.

    Channel and sources depend on (base_seed, block length, trial) only, so
    every SNR point of a trial sees the same mixture; the noise seed adds the
    SNR index. Every algorithm of the trial shares all three.
    """
    trial_seed = int(np.random.SeedSequence([base_seed, ns_index, trial]).generate_state(1)[0])
    channel_seed, source_seed = (int(x) for x in
                                 np.random.SeedSequence(trial_seed).generate_state(2))
    noise_seed = int(np.random.SeedSequence([trial_seed, snr_index]).generate_state(1)[0])
    return TrialSeeds(trial=trial_seed, channel=channel_seed, sources=source_seed,
                      noise=noise_seed)


def evaluate_separator(
    w: np.ndarray,
    channel: ChannelInstance,
    sources: SampleBlock,
    separated: Optional[SampleBlock],
    spec: ConstellationSpec
) -> Tuple[float, float]:
    """(SINR in dB, SER) of a combined separator W; SER is nan without separated data."""
    system = resolve_ambiguity(w, channel.mixing)
    noise_cov = channel.noise_variance * np.eye(channel.n_rx)
    sinr_db = compute_sinr(system, w, sources, noise_cov)
    ser = math.nan if separated is None else demap_and_ser(separated, sources, system, spec)
    return sinr_db, ser


def run_algorithm(
    algo: AlgorithmConfig,
    channel: ChannelInstance,
    sources: SampleBlock,
    received: SampleBlock,
    spec: ConstellationSpec,
    record: TrialRecord,
    record_timing: bool = False
) -> TrialRecord:
    """Separate one received block and fill the metrics of record."""
    snapshots: List[np.ndarray] = []

    def keep_snapshot(_sweep: int, sep: StructuredSeparator) -> None:
        snapshots.append(sep.complex_matrix())

    report, whitener = separate(received, channel.n_tx, algo, spec, sweep_hook=keep_snapshot)
    record.sinr_db, record.ser = evaluate_separator(
        report.combined_w, channel, sources, report.separated, spec)
    record.sinr_trajectory = [
        evaluate_separator(v @ whitener.matrix_b, channel, sources, None, spec)[0]
        for v in snapshots
    ]
    record.sweeps_used = report.sweeps_used
    record.cost_trajectory = list(report.cost_per_sweep)
    record.wall_time = report.wall_time if record_timing else None
    return record


def run_trial(cfg: ExperimentConfig, spec: ConstellationSpec, job: TrialJob) -> List[TrialRecord]:
    """Every algorithm of cfg on one shared draw of channel, sources and noise."""
    n_samples = cfg.n_samples[job.ns_index]
    snr_db = cfg.snr_db[job.snr_index]
    seeds = derive_seeds(cfg.base_seed, job.ns_index, job.snr_index, job.trial)
    records = [
        TrialRecord(trial_index=job.trial, seed=seeds.trial, algorithm=algo.label,
                    snr_db=snr_db, n_samples=n_samples, sinr_db=math.nan, ser=math.nan,
                    sweeps_used=0)
        for algo in cfg.algorithms
    ]

    try:
        channel = draw_channel(cfg.n_rx, cfg.n_tx, cfg.condition_bound, seeds.channel)
        sources = draw_sources(spec, cfg.n_tx, n_samples, seeds.sources)
        channel = calibrate_noise(channel, sources, snr_db)
        received = transmit(channel, sources, snr_db, seeds.noise)
    except Exception as e:
        logger.exception("trial %d (snr=%s, N_s=%d): drawing the mixture failed",
                         job.trial, snr_db, n_samples)
        for record in records:
            record.error = _describe(e)
        return records

    for algo, record in zip(cfg.algorithms, records):
        try:
            run_algorithm(algo, channel, sources, received, spec, record, cfg.record_timing)
        except Exception as e:
            logger.exception("trial %d (snr=%s, N_s=%d): %s failed",
                             job.trial, snr_db, n_samples, algo.label)
            record.error = _describe(e)
    return records


def run_experiment(cfg: ExperimentConfig) -> List[TrialRecord]:
    """
    Run every (SNR, block length, trial) job and collect one record per algorithm.

    Args:
        cfg (ExperimentConfig): validated experiment configuration

    Returns:
        List[TrialRecord]: ordered by SNR, block length, trial, then the
        configured algorithm order, whatever the thread scheduling
    """
    spec = build_constellation(cfg.constellation_order)
    jobs = [TrialJob(snr_index, ns_index, trial)
            for snr_index in range(len(cfg.snr_db))
            for ns_index in range(len(cfg.n_samples))
            for trial in range(cfg.n_trials)]
    logger.info("running %d job(s) x %d algorithm(s) on %d thread(s)",
                len(jobs), len(cfg.algorithms), cfg.n_threads)

    with ThreadPoolExecutor(max_workers=cfg.n_threads) as executor:
        futures = [executor.submit(run_trial, cfg, spec, job) for job in jobs]
        batches = [future.result() for future in futures]

    records = [record for batch in batches for record in batch]
    failed = sum(1 for record in records if record.error)
    logger.info("experiment finished: %d record(s), %d failed", len(records), failed)
    return records


def _describe(error: Exception) -> str:
    return f"{type(error).__name__}: {error}"
