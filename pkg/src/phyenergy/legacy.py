"""Classic base-station power/energy models for side-by-side comparison.

Six closed-form models from the RAN energy-efficiency literature,
selectable by first-author name.  All are pure arithmetic over a small
parameter set; each model reads its parameters from the same
structured-text mapping format the scenario uses, with unknown keys
rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Optional, Sequence

from .errors import ConfigError, DomainError


@dataclass(frozen=True)
class AuerParams:
    """Load-proportional transceiver model with a sleep state."""

    n_trx: int          # transceiver chains
    p0_w: float         # per-chain power at minimum non-zero load
    delta_p: float      # load slope (dimensionless)
    p_out_w: float      # radiated output power
    p_max_w: float      # maximum radiated power
    p_sleep_w: float    # per-chain sleep power


def auer_power(p: AuerParams) -> float:
    """Input power: n_trx*(p0 + delta_p*p_out), or n_trx*p_sleep at zero load.

    The active branch covers 0 < p_out <= p_max; output above p_max is
    outside the model's domain.
    """
    if p.p_out_w > p.p_max_w:
        raise DomainError(
            f"p_out_w={p.p_out_w} exceeds p_max_w={p.p_max_w}")
    if p.p_out_w == 0:
        return p.n_trx * p.p_sleep_w
    return p.n_trx * (p.p0_w + p.delta_p * p.p_out_w)


@dataclass(frozen=True)
class DessetComponents:
    """Additive breakdown: baseband, RF transceiver, PA, overhead."""

    p_bbu_w: float
    p_rf_w: float
    p_pa_w: float
    p_oh_w: float


def desset_power(c: DessetComponents) -> float:
    return c.p_bbu_w + c.p_rf_w + c.p_pa_w + c.p_oh_w


@dataclass(frozen=True)
class YanSegments:
    """Network-wide energy split: terminals, base stations, wireline, DC."""

    e_ue_j: float
    e_bs_j: float
    e_wireline_j: float
    e_dc_j: float


def yan_energy(s: YanSegments) -> float:
    return s.e_ue_j + s.e_bs_j + s.e_wireline_j + s.e_dc_j


@dataclass(frozen=True)
class ComponentCarrier:
    p_tx_w: float               # transmit power on this carrier
    bandwidth_mhz: float
    p_cp_var_w_per_mhz: float   # bandwidth-proportional processing power


@dataclass(frozen=True)
class YuParams:
    """Carrier-aggregation model: per-carrier terms plus shared static power."""

    carriers: Sequence[ComponentCarrier]
    p_cp_static_w: float


def yu_power(p: YuParams) -> float:
    total = p.p_cp_static_w
    for cc in p.carriers:
        total += cc.p_tx_w + cc.bandwidth_mhz * cc.p_cp_var_w_per_mhz
    return total


@dataclass(frozen=True)
class TombazParams:
    """Sectorized model with RF chains and optional cell DTX."""

    n_sectors: int
    p_tx_sector_w: float
    eta_pa: float       # PA efficiency, in (0, 1]
    n_rf_chains: int
    p_c_w: float        # per-chain circuit power
    p_b_w: float        # baseband/idle floor
    dtx_enabled: bool = False
    delta: float = 1.0  # DTX sleep factor, in [0, 1]


def tombaz_power(p: TombazParams) -> float:
    """Per-sector power, three branches: transmitting, idle, DTX sleep."""
    if not 0 < p.eta_pa <= 1:
        raise ConfigError("eta_pa must be in (0, 1]")
    if not 0 <= p.delta <= 1:
        raise ConfigError("delta must be in [0, 1]")
    if p.p_tx_sector_w > 0:
        per_sector = (p.p_tx_sector_w / p.eta_pa
                      + p.n_rf_chains * p.p_c_w + p.p_b_w)
    elif p.dtx_enabled:
        per_sector = p.delta * p.p_b_w
    else:
        per_sector = p.p_b_w
    return p.n_sectors * per_sector


@dataclass(frozen=True)
class FuBasebandUnit:
    l_beams: int        # spatial streams processed
    q_enc_gops: float
    q_net_gops: float
    q_ctrl_gops: float


@dataclass(frozen=True)
class FuRfChain:
    m_antennas: int
    q_mod_gops: float
    q_mix_gops: float
    q_vga_gops: float
    q_lna_gops: float
    q_adc_gops: float
    q_clk_gops: float   # shared clock, scales with sqrt(m)


@dataclass(frozen=True)
class FuParams:
    """Complexity-based model: GOPS workloads over a technology efficiency."""

    rho_gops_per_w: float
    bb: Optional[FuBasebandUnit] = None
    rf: Optional[FuRfChain] = None


def fu_bb_power(p: FuParams) -> float:
    """Baseband power: l*(q_enc + q_net + q_ctrl)/rho."""
    if p.bb is None:
        raise ConfigError("fu-bb requires a 'bb' parameter section")
    if p.rho_gops_per_w <= 0:
        raise ConfigError("rho_gops_per_w must be positive")
    bb = p.bb
    return bb.l_beams * (bb.q_enc_gops + bb.q_net_gops
                         + bb.q_ctrl_gops) / p.rho_gops_per_w


def fu_rf_power(p: FuParams) -> float:
    """RF power: m*(per-chain GOPS)/rho + sqrt(m)*q_clk/rho."""
    if p.rf is None:
        raise ConfigError("fu-rf requires an 'rf' parameter section")
    if p.rho_gops_per_w <= 0:
        raise ConfigError("rho_gops_per_w must be positive")
    rf = p.rf
    chain = (rf.q_mod_gops + rf.q_mix_gops + rf.q_vga_gops
             + rf.q_lna_gops + rf.q_adc_gops)
    return (rf.m_antennas * chain
            + math.sqrt(rf.m_antennas) * rf.q_clk_gops) / p.rho_gops_per_w


# ---------------------------------------------------------------------------
# Parameter-file loading


def _take(mapping: Mapping[str, Any], fields: dict[str, Callable],
          context: str) -> dict[str, Any]:
    if not isinstance(mapping, Mapping):
        raise ConfigError(f"{context}: expected a key/value mapping")
    unknown = sorted(set(mapping) - set(fields))
    if unknown:
        raise ConfigError(f"{context}: unknown keys: " + ", ".join(unknown))
    out = {}
    for key, conv in fields.items():
        if key not in mapping:
            raise ConfigError(f"{context}: missing key {key}")
        out[key] = conv(mapping[key])
    return out


def _num(value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ConfigError(f"expected a number, got {value!r}")
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"expected a number, got {value!r}") from None


def _count(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ConfigError(f"expected an integer, got {value!r}")
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"expected an integer, got {value!r}") from None


def _flag(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    raise ConfigError(f"expected true/false, got {value!r}")


def _load_auer(m: Mapping[str, Any]) -> AuerParams:
    got = _take(m, {"n_trx": _count, "p0_w": _num, "delta_p": _num,
                    "p_out_w": _num, "p_max_w": _num, "p_sleep_w": _num},
                "auer")
    for key in ("p0_w", "p_out_w", "p_max_w", "p_sleep_w"):
        if got[key] < 0:
            raise ConfigError(f"auer: {key} must be >= 0")
    return AuerParams(**got)


def _load_desset(m: Mapping[str, Any]) -> DessetComponents:
    return DessetComponents(**_take(
        m, {"p_bbu_w": _num, "p_rf_w": _num, "p_pa_w": _num, "p_oh_w": _num},
        "desset"))


def _load_yan(m: Mapping[str, Any]) -> YanSegments:
    return YanSegments(**_take(
        m, {"e_ue_j": _num, "e_bs_j": _num, "e_wireline_j": _num,
            "e_dc_j": _num}, "yan"))


def _load_yu(m: Mapping[str, Any]) -> YuParams:
    if not isinstance(m, Mapping):
        raise ConfigError("yu: expected a key/value mapping")
    unknown = sorted(set(m) - {"carriers", "p_cp_static_w"})
    if unknown:
        raise ConfigError("yu: unknown keys: " + ", ".join(unknown))
    if "p_cp_static_w" not in m:
        raise ConfigError("yu: missing key p_cp_static_w")
    raw_ccs = m.get("carriers", [])
    if raw_ccs is None:
        raw_ccs = []
    if not isinstance(raw_ccs, Sequence) or isinstance(raw_ccs, (str, bytes)):
        raise ConfigError("yu: carriers must be a list")
    carriers = tuple(
        ComponentCarrier(**_take(
            cc, {"p_tx_w": _num, "bandwidth_mhz": _num,
                 "p_cp_var_w_per_mhz": _num}, f"yu.carriers[{i}]"))
        for i, cc in enumerate(raw_ccs)
    )
    return YuParams(carriers=carriers, p_cp_static_w=_num(m["p_cp_static_w"]))


def _load_tombaz(m: Mapping[str, Any]) -> TombazParams:
    fields = {"n_sectors": _count, "p_tx_sector_w": _num, "eta_pa": _num,
              "n_rf_chains": _count, "p_c_w": _num, "p_b_w": _num}
    optional = {"dtx_enabled": _flag, "delta": _num}
    if not isinstance(m, Mapping):
        raise ConfigError("tombaz: expected a key/value mapping")
    unknown = sorted(set(m) - set(fields) - set(optional))
    if unknown:
        raise ConfigError("tombaz: unknown keys: " + ", ".join(unknown))
    got = {}
    for key, conv in fields.items():
        if key not in m:
            raise ConfigError(f"tombaz: missing key {key}")
        got[key] = conv(m[key])
    for key, conv in optional.items():
        if key in m:
            got[key] = conv(m[key])
    return TombazParams(**got)


def _load_fu(m: Mapping[str, Any]) -> FuParams:
    if not isinstance(m, Mapping):
        raise ConfigError("fu: expected a key/value mapping")
    unknown = sorted(set(m) - {"rho_gops_per_w", "bb", "rf"})
    if unknown:
        raise ConfigError("fu: unknown keys: " + ", ".join(unknown))
    if "rho_gops_per_w" not in m:
        raise ConfigError("fu: missing key rho_gops_per_w")
    bb = rf = None
    if "bb" in m:
        bb = FuBasebandUnit(**_take(
            m["bb"], {"l_beams": _count, "q_enc_gops": _num,
                      "q_net_gops": _num, "q_ctrl_gops": _num}, "fu.bb"))
    if "rf" in m:
        rf = FuRfChain(**_take(
            m["rf"], {"m_antennas": _count, "q_mod_gops": _num,
                      "q_mix_gops": _num, "q_vga_gops": _num,
                      "q_lna_gops": _num, "q_adc_gops": _num,
                      "q_clk_gops": _num}, "fu.rf"))
    return FuParams(rho_gops_per_w=_num(m["rho_gops_per_w"]), bb=bb, rf=rf)


# model name -> (loader, evaluator, unit)
MODELS: dict[str, tuple] = {
    "auer": (_load_auer, auer_power, "W"),
    "desset": (_load_desset, desset_power, "W"),
    "yan": (_load_yan, yan_energy, "J"),
    "yu": (_load_yu, yu_power, "W"),
    "tombaz": (_load_tombaz, tombaz_power, "W"),
    "fu-bb": (_load_fu, fu_bb_power, "W"),
    "fu-rf": (_load_fu, fu_rf_power, "W"),
}


def evaluate_model(name: str, mapping: Mapping[str, Any]) -> tuple[float, str]:
    """Evaluate a named model on a parameter mapping; returns (value, unit)."""
    try:
        loader, evaluator, unit = MODELS[name]
    except KeyError:
        raise ConfigError(
            f"unknown model {name!r}; valid: " + ", ".join(sorted(MODELS))
        ) from None
    return evaluator(loader(mapping)), unit
