"""LTE uplink open plus closed loop power control.

The UE sets its uplink transmission power to

    P_tx = min(P_max, P0 + 10 log10(M) + alpha * PL + delta_mcs + delta_cl)

where M is the number of allocated resource blocks, PL the downlink path
loss estimate, alpha the fractional path loss compensation factor, P0 the
operator's target received power per resource block, delta_mcs the offset
for the modulation and coding scheme, and delta_cl the accumulated closed
loop correction commanded by the eNodeB. P_max is 23 dBm for a class 3 UE.
"""

import math
from dataclasses import dataclass

P_MAX_CLASS3_DBM = 23.0


@dataclass(frozen=True)
class TpcParams:
    """Full symbol set of the power control law.

    Units: powers in dBm, path_loss and offsets in dB, m_rbs a count.
    """

    p_max: float = P_MAX_CLASS3_DBM
    p0: float = -100.0
    alpha: float = 1.0
    path_loss: float = 0.0
    m_rbs: int = 1
    delta_mcs: float = 0.0
    delta_cl: float = 0.0


def tx_power(params):
    """Evaluate the power control law for one parameter set.

    Args:
        params: TpcParams with m_rbs >= 1, alpha in [0, 1], path_loss >= 0,
            all fields finite.

    Returns:
        Transmission power in dBm, clamped to params.p_max.

    Raises:
        ValueError: on any violated precondition.
    """
    m = params.m_rbs
    if m < 1:
        raise ValueError(f"m_rbs must be >= 1, got {m}")
    if not (0.0 <= params.alpha <= 1.0):
        raise ValueError(f"alpha must lie in [0, 1], got {params.alpha}")
    if params.path_loss < 0.0:
        raise ValueError(f"path_loss must be >= 0, got {params.path_loss}")
    total = (
        params.p0
        + 10.0 * math.log10(m)
        + params.alpha * params.path_loss
        + params.delta_mcs
        + params.delta_cl
    )
    # total is NaN if any term is non-finite; min() would silently pass NaN through
    if not (math.isfinite(total) and math.isfinite(params.p_max)):
        raise ValueError("tpc parameters must be finite")
    return min(params.p_max, total)
