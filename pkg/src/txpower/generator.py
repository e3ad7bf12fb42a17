"""Synthetic drive-trace generator with known ground truth.

Builds labeled datasets whose TX-power labels come from the exact power
control law, so every learner and evaluator can be checked against a
verifiable oracle. The radio environment is a log-distance path loss
model with shadowing; the indicator features are noisy functions of path
loss and neighbor counts; the allocated resource blocks follow a TCP
slow-start proxy capped by the cell size and by the power headroom the
scheduler sees.

All randomness is per sample: sample i draws from the stream
(seed, "sample", i), so generation order never matters and identical
configs reproduce byte-identical traces.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._rand import derive_rng
from .data import Dataset, Sample
from .tpc import P_MAX_CLASS3_DBM, TpcParams, tx_power

# log-distance path loss, urban macro shape, d in km
PL_REF_DB = 128.1
PL_SLOPE_DB = 37.6

# serving cell bandwidth mix and the RB count per bandwidth
BW_CHOICES_MHZ = (5.0, 10.0, 15.0, 20.0)
BW_PROBS = (0.10, 0.20, 0.20, 0.50)
RBS_PER_BW = {5.0: 25, 10.0: 50, 15.0: 75, 20.0: 100}

BAND_CODES = (1, 3, 7, 20)
BAND_PROBS = (0.35, 0.30, 0.20, 0.15)

# SINR proxy: improves with RSRP, degrades with intra-frequency load
SINR_OFFSET_DB = 121.45
SINR_PER_NEIGHBOR_DB = 2.2
SINR_NOISE_DB = 1.5
SINR_RANGE_DB = (-10.0, 30.0)

RSRQ_BASE_DB = -10.79
RSRQ_PER_NEIGHBOR_DB = 0.35
RSRQ_NOISE_DB = 1.0
RSRQ_RANGE_DB = (-19.5, -3.0)

RSSI_NOISE_DB = 1.0

# MCS offset rises linearly over the usable SINR range, capped at 6 dB
DELTA_MCS_MAX_DB = 6.0

SLOW_START_KAPPA_MB = 2.0
RB_BANDWIDTH_MHZ = 0.18
LINK_EFFICIENCY = 0.75
MAX_SPECTRAL_EFF = 6.0

VELOCITY_MAX_KMH = 130.0


@dataclass(frozen=True)
class GeneratorConfig:
    """Parameters of one generated campaign.

    alpha and p0 are single constants for the whole dataset, as an
    operator would configure them. ref_power_dbm is the per resource
    element transmit power of the cell, which ties RSRP to path loss.
    headroom_limited caps the RB allocation at the count that keeps the
    unclamped TX-power at or below p_max, mimicking a scheduler that
    reads the UE's power headroom reports.
    """

    n_samples: int
    seed: int = 0
    distance_range: tuple = (50.0, 5000.0)
    shadowing_sigma: float = 8.0
    delta_cl_sigma: float = 1.0
    cell_rb_capacity: int = 100
    upload_sizes: tuple = (1.0, 3.0, 5.0)
    p0: float = -100.0
    alpha: float = 0.9
    ref_power_dbm: float = 15.0
    headroom_limited: bool = True

    def validate(self):
        if self.n_samples <= 0:
            raise ValueError(f"n_samples must be > 0, got {self.n_samples}")
        d_min, d_max = self.distance_range
        if not (0.0 < d_min <= d_max):
            raise ValueError(f"invalid distance_range {self.distance_range}")
        if self.shadowing_sigma < 0.0 or self.delta_cl_sigma < 0.0:
            raise ValueError("sigmas must be >= 0")
        if not (6 <= self.cell_rb_capacity <= 100):
            raise ValueError(f"cell_rb_capacity must lie in [6, 100], got {self.cell_rb_capacity}")
        if len(self.upload_sizes) == 0 or any(u <= 0.0 for u in self.upload_sizes):
            raise ValueError("upload_sizes must be positive and non-empty")
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")


@dataclass(frozen=True)
class SyntheticTrace:
    """Observable dataset plus the hidden per-sample law parameters."""

    dataset: Dataset
    ground_truth: tuple


def _draw_sample(cfg, index):
    rng = derive_rng(cfg.seed, "sample", index)
    d_min, d_max = cfg.distance_range
    distance_m = math.exp(rng.uniform(math.log(d_min), math.log(d_max)))
    shadowing = rng.normal(0.0, cfg.shadowing_sigma) if cfg.shadowing_sigma > 0 else 0.0
    upload = float(cfg.upload_sizes[rng.integers(0, len(cfg.upload_sizes))])
    bw = BW_CHOICES_MHZ[rng.choice(len(BW_CHOICES_MHZ), p=BW_PROBS)]
    n_intra = int(min(rng.poisson(3.0), 12))
    n_inter = int(min(rng.poisson(1.2), 8))
    velocity = rng.uniform(0.0, VELOCITY_MAX_KMH)
    band = BAND_CODES[rng.choice(len(BAND_CODES), p=BAND_PROBS)]
    sinr_noise = rng.normal(0.0, SINR_NOISE_DB)
    rsrq_noise = rng.normal(0.0, RSRQ_NOISE_DB)
    rssi_noise = rng.normal(0.0, RSSI_NOISE_DB)
    delta_cl = rng.normal(0.0, cfg.delta_cl_sigma) if cfg.delta_cl_sigma > 0 else 0.0
    utilization = rng.uniform(0.7, 1.0)

    # path_loss must stay positive for the law; extreme shadowing draws are floored
    path_loss = max(PL_REF_DB + PL_SLOPE_DB * math.log10(distance_m / 1000.0) + shadowing, 1.0)
    rsrp = cfg.ref_power_dbm - path_loss

    sinr = rsrp + SINR_OFFSET_DB - SINR_PER_NEIGHBOR_DB * n_intra + sinr_noise
    sinr = min(max(sinr, SINR_RANGE_DB[0]), SINR_RANGE_DB[1])
    delta_mcs = DELTA_MCS_MAX_DB * min(max((sinr + 5.0) / 25.0, 0.0), 1.0)

    rsrq = RSRQ_BASE_DB - RSRQ_PER_NEIGHBOR_DB * n_intra + rsrq_noise
    rsrq = min(max(rsrq, RSRQ_RANGE_DB[0]), RSRQ_RANGE_DB[1])

    cell_rbs = RBS_PER_BW[bw]
    rssi = max(rsrp + 10.0 * math.log10(12.0 * cell_rbs) + rssi_noise, rsrp)

    capacity = min(cell_rbs, cfg.cell_rb_capacity)
    m_target = capacity * (1.0 - math.exp(-upload / SLOW_START_KAPPA_MB))
    m = int(round(utilization * m_target))
    if cfg.headroom_limited:
        headroom_db = P_MAX_CLASS3_DBM - cfg.p0 - cfg.alpha * path_loss - delta_mcs - delta_cl
        # exponent capped: any headroom past 10^4 RBs exceeds every cell anyway
        m_feasible = math.floor(10.0 ** min(headroom_db / 10.0, 4.0))
        m = min(m, int(m_feasible))
    m = max(1, min(m, capacity))

    spectral_eff = min(math.log2(1.0 + 10.0 ** (sinr / 10.0)), MAX_SPECTRAL_EFF)
    datarate = m * RB_BANDWIDTH_MHZ * LINK_EFFICIENCY * spectral_eff

    params = TpcParams(
        p_max=P_MAX_CLASS3_DBM,
        p0=cfg.p0,
        alpha=cfg.alpha,
        path_loss=path_loss,
        m_rbs=m,
        delta_mcs=delta_mcs,
        delta_cl=delta_cl,
    )
    sample = Sample(
        velocity=velocity,
        upload_size=upload,
        rsrp=rsrp,
        rsrq=rsrq,
        sinr=sinr,
        datarate=datarate,
        rssi=rssi,
        freq_band=band,
        neighbors_intra=n_intra,
        neighbors_inter=n_inter,
        cell_bandwidth=bw,
        tx_power=tx_power(params),
    )
    return sample, params


def generate(config):
    """Generate a labeled synthetic trace.

    Args:
        config: GeneratorConfig, validated before any drawing.

    Returns:
        SyntheticTrace with a Dataset (provenance "synthetic") and the
        per-sample TpcParams ground truth in the same order.
    """
    config.validate()
    samples = []
    truth = []
    for i in range(config.n_samples):
        sample, params = _draw_sample(config, i)
        samples.append(sample)
        truth.append(params)
    return SyntheticTrace(Dataset(tuple(samples), "synthetic"), tuple(truth))


def bayes_floor(config):
    """Irreducible MAE of the closed loop noise, in dB.

    An ideal predictor of the noise-free law value still misses each
    label by |delta_cl| wherever the cap is inactive, and the mean
    absolute value of N(0, sigma) is sigma * sqrt(2/pi). Clamped samples
    (label at p_max) pin the label regardless of delta_cl, so the floor
    scales by the unclamped fraction.
    """
    config.validate()
    trace = generate(config)
    frac_unclamped = float(np.mean(trace.dataset.labels() < P_MAX_CLASS3_DBM))
    return config.delta_cl_sigma * math.sqrt(2.0 / math.pi) * frac_unclamped
