"""Downlink scenario configuration and derived air-interface parameters.

A :class:`Scenario` captures the user-facing knobs of one downlink run
(grid size, modulation, coding rate, antenna counts, clock, ...).
:func:`derive` expands it into the quantities the counting formulas
need: resource elements, transport block size, code block segmentation,
LDPC lifting size and so on.  Sizing conventions (lifting-size set,
code block limits, base graph selection thresholds) follow 3GPP
TS 38.212; the transport block size uses a deliberately simplified
byte-aligned capacity rule rather than the full TS 38.214 procedure.

Everything here is a pure value computation: no I/O except
:func:`select_base_graph`, which reads a bundled base-graph descriptor.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Optional

import yaml

from .errors import ConfigError, DataFileError

# OFDM symbols per slot, normal cyclic prefix (TS 38.211).
SYMBOLS_PER_SLOT = 14

# Subcarriers per physical resource block (TS 38.211).
SC_PER_PRB = 12

SUPPORTED_SCS_KHZ = (15, 30, 60, 120)

# LDPC lifting sizes Z = a * 2^j, a in {2,3,5,7,9,11,13,15}, Z <= 384
# (TS 38.212 Table 5.3.2-1).
LIFTING_SIZES = tuple(sorted(
    a * (1 << j)
    for a in (2, 3, 5, 7, 9, 11, 13, 15)
    for j in range(8)
    if a * (1 << j) <= 384
))

# Per base graph: systematic columns, max code block payload, and the
# coded-length multiple (columns minus the two punctured ones).
INFO_COLS = {1: 22, 2: 10}
MAX_CB_BITS = {1: 8448, 2: 3840}
CODED_COLS = {1: 66, 2: 50}

TB_CRC_BITS = 24   # fixed-width CRC prefix used for both TB and CB

_BG_FILES = {1: "bg1.txt", 2: "bg2.txt"}
_BG_DIMS = {1: (46, 68), 2: (42, 52)}


class Modulation(enum.Enum):
    """Downlink modulation order."""

    QPSK = 2
    QAM16 = 4
    QAM64 = 6
    QAM256 = 8

    @property
    def bits_per_symbol(self) -> int:
        return self.value


_MODULATION_ALIASES = {
    "QPSK": Modulation.QPSK,
    "QAM16": Modulation.QAM16,
    "16QAM": Modulation.QAM16,
    "QAM64": Modulation.QAM64,
    "64QAM": Modulation.QAM64,
    "QAM256": Modulation.QAM256,
    "256QAM": Modulation.QAM256,
}


def parse_modulation(value: Any) -> Modulation:
    """Accept canonical names (QAM16) and common aliases (16QAM)."""
    if isinstance(value, Modulation):
        return value
    name = str(value).strip().upper()
    try:
        return _MODULATION_ALIASES[name]
    except KeyError:
        valid = ", ".join(sorted(set(_MODULATION_ALIASES)))
        raise ConfigError(f"unknown modulation {value!r}; valid: {valid}") from None


@dataclass(frozen=True)
class DecodeConfig:
    """Belief-propagation decoder shape assumptions."""

    deg_cn: int = 19      # check-node degree
    deg_vn: int = 3       # variable-node degree
    iterations: int = 8


@dataclass(frozen=True)
class Scenario:
    """One downlink transmission configuration."""

    n_slots: int                    # slots simulated
    snr_db: float                   # recorded for reporting only
    scs_khz: int                    # subcarrier spacing
    n_prb: int                      # resource blocks in the grid
    modulation: Modulation
    code_rate: int                  # numerator of rate/1024
    n_tx: int                       # transmit antennas
    n_rx: int                       # receive antennas
    n_layers: int                   # spatial layers v
    n_ports: int                    # antenna ports fed by precoding
    clock_hz: float = 2.1e9
    kappa: float = 1.0e-25          # J*s^2, energy-per-cycle scale
    channel_len: int = 8            # channel taps assumed by estimation
    pilot_sc_per_prb: int = 6       # pilot subcarriers per PRB
    pilot_symbols_per_slot: int = 1
    tbs_override: Optional[int] = None       # force transport block bits
    rx_fft_antennas: Optional[int] = None    # receive-FFT antenna count
    decode: DecodeConfig = field(default_factory=DecodeConfig)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.code_rate, 1024)


@dataclass(frozen=True)
class DerivedParams:
    """Air-interface quantities expanded from a Scenario."""

    qm: int             # bits per modulation symbol
    n_f: int            # occupied subcarriers
    g: int              # OFDM symbols per slot
    n_fft: int          # transform size
    k_p: int            # pilot subcarriers per pilot symbol
    n_re: int           # data resource elements per slot
    n_symbols: int      # modulation symbols per codeword
    m_cw: int           # codeword bits
    m_symb_layer: int   # modulation symbols per layer
    a: int              # transport block bits
    bg: int             # base graph id (1 or 2)
    c: int              # code blocks
    b: int              # TB bits plus per-CB CRC bits
    z: int              # lifting size
    k: int              # information bits per code block
    n_ccb: int          # coded bits per code block
    l_crc: int = TB_CRC_BITS


@dataclass(frozen=True)
class BaseGraphSpec:
    """Shape summary of a bundled LDPC base graph descriptor."""

    bg: int
    rows: int
    cols: int
    n1: int             # non-null entries
    info_cols: int


def base_graph_id(a_bits: int, code_rate_num: int) -> int:
    """Base graph selection rule (TS 38.212 clause 7.2.2).

    Graph 2 serves short blocks and low rates; graph 1 everything else.
    Rate comparisons are exact: rate <= 2/3 iff 3*num <= 2*1024.
    """
    if a_bits <= 292:
        return 2
    if a_bits <= 3824 and 3 * code_rate_num <= 2 * 1024:
        return 2
    if 4 * code_rate_num <= 1024:
        return 2
    return 1


def _fft_size(n_f: int) -> int:
    # Smallest power of two strictly above the occupied bandwidth,
    # never below 128.
    size = 1
    while size <= n_f:
        size <<= 1
    return max(size, 128)


def validate(s: Scenario) -> list[str]:
    """Return a list of violated configuration rules (empty when valid)."""
    problems: list[str] = []

    for name in ("n_slots", "n_prb", "n_tx", "n_rx", "n_layers", "n_ports",
                 "channel_len"):
        if getattr(s, name) < 1:
            problems.append(f"{name} must be >= 1")

    if s.scs_khz not in SUPPORTED_SCS_KHZ:
        problems.append("scs_khz not one of 15, 30, 60, 120")
    if not 1 <= s.code_rate <= 1023:
        problems.append("code_rate out of range (numerator must be in 1..1023)")
    if s.n_layers > min(s.n_tx, s.n_rx):
        problems.append("n_layers exceeds min(n_tx,n_rx)")
    if s.n_ports < s.n_layers:
        problems.append("n_ports must be >= n_layers")
    if s.clock_hz <= 0:
        problems.append("clock_hz must be positive")
    if s.kappa <= 0:
        problems.append("kappa must be positive")
    if not 1 <= s.pilot_sc_per_prb <= SC_PER_PRB:
        problems.append("pilot_sc_per_prb must be in 1..12")
    if not 0 <= s.pilot_symbols_per_slot < SYMBOLS_PER_SLOT:
        problems.append("pilot_symbols_per_slot must be in 0..13")
    if s.tbs_override is not None and s.tbs_override < 0:
        problems.append("tbs_override must be >= 0")
    if s.rx_fft_antennas is not None and s.rx_fft_antennas < 1:
        problems.append("rx_fft_antennas must be >= 1")
    if s.decode.deg_cn < 1:
        problems.append("decode.deg_cn must be >= 1")
    if s.decode.deg_vn < 1:
        problems.append("decode.deg_vn must be >= 1")
    if s.decode.iterations < 0:
        problems.append("decode.iterations must be >= 0")

    return problems


def derive(s: Scenario) -> DerivedParams:
    """Expand a valid scenario into counting-formula inputs.

    Raises ConfigError when the scenario fails :func:`validate` or the
    pilot configuration leaves no data resource elements.
    """
    problems = validate(s)
    if problems:
        raise ConfigError("; ".join(problems))

    qm = s.modulation.bits_per_symbol
    v = s.n_layers
    n_f = SC_PER_PRB * s.n_prb
    g = SYMBOLS_PER_SLOT
    n_fft = _fft_size(n_f)
    k_p = s.pilot_sc_per_prb * s.n_prb
    n_re = n_f * g - k_p * s.pilot_symbols_per_slot
    if n_re <= 0:
        raise ConfigError("pilot configuration leaves no data resource elements")

    n_symbols = n_re * v            # single codeword carries every layer
    m_cw = n_symbols * qm
    m_symb_layer = n_re

    if s.tbs_override is not None:
        a = s.tbs_override
    else:
        # Largest byte-aligned payload not exceeding the raw bit capacity
        # n_re * qm * v * rate.
        a = 8 * (n_re * qm * v * s.code_rate // (1024 * 8))

    bg = base_graph_id(a, s.code_rate)
    k_cb = MAX_CB_BITS[bg]
    if a + TB_CRC_BITS <= k_cb:
        c = 1
    else:
        c = -((a + TB_CRC_BITS) // -(k_cb - TB_CRC_BITS))
    b = a + TB_CRC_BITS * c

    info_cols = INFO_COLS[bg]
    # Smallest lifting size with info_cols * z >= b / c, kept in integers.
    z = next((cand for cand in LIFTING_SIZES if info_cols * cand * c >= b), None)
    if z is None:
        raise ConfigError(
            f"no lifting size fits {b} bits in {c} code blocks on graph {bg}")
    k = info_cols * z
    n_ccb = CODED_COLS[bg] * z

    return DerivedParams(
        qm=qm, n_f=n_f, g=g, n_fft=n_fft, k_p=k_p, n_re=n_re,
        n_symbols=n_symbols, m_cw=m_cw, m_symb_layer=m_symb_layer,
        a=a, bg=bg, c=c, b=b, z=z, k=k, n_ccb=n_ccb,
    )


@lru_cache(maxsize=None)
def _load_base_graph(bg: int) -> BaseGraphSpec:
    name = _BG_FILES[bg]
    text = resources.files("phyenergy").joinpath("data", name).read_text()
    seen: set[tuple[int, int]] = set()
    max_row = -1
    max_col = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise DataFileError(f"{name}:{lineno}: expected 'row col shift'")
        try:
            row, col = int(parts[0]), int(parts[1])
            int(parts[2])
        except ValueError:
            raise DataFileError(f"{name}:{lineno}: non-integer field") from None
        if row < 0 or col < 0:
            raise DataFileError(f"{name}:{lineno}: negative index")
        if (row, col) in seen:
            raise DataFileError(f"{name}:{lineno}: duplicate entry ({row},{col})")
        seen.add((row, col))
        max_row = max(max_row, row)
        max_col = max(max_col, col)
    if not seen:
        raise DataFileError(f"{name}: no entries")
    rows, cols = max_row + 1, max_col + 1
    if (rows, cols) != _BG_DIMS[bg]:
        raise DataFileError(
            f"{name}: dimensions {rows}x{cols} do not match the expected "
            f"{_BG_DIMS[bg][0]}x{_BG_DIMS[bg][1]}")
    return BaseGraphSpec(bg=bg, rows=rows, cols=cols, n1=len(seen),
                         info_cols=INFO_COLS[bg])


def select_base_graph(a_bits: int, code_rate_num: int) -> BaseGraphSpec:
    """Pick the base graph for a payload and load its bundled descriptor."""
    return _load_base_graph(base_graph_id(a_bits, code_rate_num))


# ---------------------------------------------------------------------------
# Configuration file loading.  YAML 1.1 resolves "2.1e9" to a string, so
# every field is coerced explicitly instead of trusting the parser's types.

def _as_int(key: str, value: Any) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected an integer, got a boolean")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError:
            pass
    raise ConfigError(f"{key}: expected an integer, got {value!r}")


def _as_float(key: str, value: Any) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value.strip())
        except ValueError:
            pass
    raise ConfigError(f"{key}: expected a number, got {value!r}")


def _as_rate(key: str, value: Any) -> int:
    """Code rate as the numerator of n/1024; accepts 490 or '490/1024'."""
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected numerator or 'n/1024'")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, _, den = text.partition("/")
            try:
                numerator, denominator = int(num), int(den)
            except ValueError:
                raise ConfigError(f"{key}: malformed rate {value!r}") from None
            if denominator != 1024:
                raise ConfigError(f"{key}: rate denominator must be 1024")
            return numerator
        try:
            return int(text)
        except ValueError:
            pass
    raise ConfigError(f"{key}: expected numerator or 'n/1024', got {value!r}")


_REQUIRED_FIELDS = ("n_slots", "snr_db", "scs_khz", "n_prb", "modulation",
                    "code_rate", "n_tx", "n_rx", "n_layers", "n_ports")

_FIELD_PARSERS = {
    "n_slots": _as_int,
    "snr_db": _as_float,
    "scs_khz": _as_int,
    "n_prb": _as_int,
    "modulation": lambda key, v: parse_modulation(v),
    "code_rate": _as_rate,
    "n_tx": _as_int,
    "n_rx": _as_int,
    "n_layers": _as_int,
    "n_ports": _as_int,
    "clock_hz": _as_float,
    "kappa": _as_float,
    "channel_len": _as_int,
    "pilot_sc_per_prb": _as_int,
    "pilot_symbols_per_slot": _as_int,
    "tbs_override": _as_int,
    "rx_fft_antennas": _as_int,
}

_DECODE_PARSERS = {
    "deg_cn": _as_int,
    "deg_vn": _as_int,
    "iterations": _as_int,
}


def scenario_from_mapping(mapping: Mapping[str, Any]) -> Scenario:
    """Build a Scenario from a parsed config mapping, rejecting unknown keys."""
    if not isinstance(mapping, Mapping):
        raise ConfigError("scenario config must be a key/value mapping")

    known = set(_FIELD_PARSERS) | {"decode"}
    unknown = sorted(set(mapping) - known)
    if unknown:
        raise ConfigError("unknown scenario keys: " + ", ".join(unknown))
    missing = sorted(k for k in _REQUIRED_FIELDS if k not in mapping)
    if missing:
        raise ConfigError("missing scenario keys: " + ", ".join(missing))

    kwargs: dict[str, Any] = {}
    for key, parser in _FIELD_PARSERS.items():
        if key in mapping:
            kwargs[key] = parser(key, mapping[key])

    if "decode" in mapping:
        section = mapping["decode"]
        if not isinstance(section, Mapping):
            raise ConfigError("decode: expected a key/value mapping")
        unknown = sorted(set(section) - set(_DECODE_PARSERS))
        if unknown:
            raise ConfigError("unknown decode keys: " + ", ".join(unknown))
        dec = {k: _DECODE_PARSERS[k](f"decode.{k}", v)
               for k, v in section.items()}
        kwargs["decode"] = DecodeConfig(**dec)

    return Scenario(**kwargs)


def load_scenario(path: str | Path) -> Scenario:
    """Read a scenario config file (YAML mapping)."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"scenario file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: malformed config: {exc}") from None
    if raw is None:
        raise ConfigError(f"{path}: empty scenario file")
    return scenario_from_mapping(raw)


def with_overrides(s: Scenario, *, kappa: Optional[float] = None,
                   clock_hz: Optional[float] = None) -> Scenario:
    """Scenario copy with energy-model knobs replaced (CLI overrides)."""
    updates: dict[str, float] = {}
    if kappa is not None:
        updates["kappa"] = kappa
    if clock_hz is not None:
        updates["clock_hz"] = clock_hz
    return replace(s, **updates) if updates else s
