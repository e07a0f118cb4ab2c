"""Arithmetic/logic operation counts for the downlink baseband chain.

The transmitter and receiver are modelled as eight blocks:

======  ====  =====================================================
block   side  processing
======  ====  =====================================================
A       BS    CRC attach, code block segmentation, LDPC encoding
B       BS    scrambling, modulation mapping, layer mapping
C       BS    antenna-port mapping (precoding)
D       BS    OFDM modulation (inverse FFT per symbol and antenna)
E       UE    FFT per symbol and antenna
F       UE    channel estimation (least squares) + MMSE equalization
G       UE    layer demapping, demodulation, descrambling
H       UE    LDPC decoding (normalized min-sum) and CRC checks
======  ====  =====================================================

Each counter returns an :class:`OperationTally`, a multiset of
(operation kind, data class) pairs.  Counts are closed-form in the
scenario's derived parameters; nothing here touches sample data.

Data classes follow the block split: the bit-oriented stages (block A,
block G, and the scrambling/modulation inputs of block B) count as
integer or logical operands, the signal-processing stages as doubles.
Composite floating-point operations are recorded as FLOP and expanded
into one addition plus one multiplication when costs are attached.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, Iterator, Mapping, Tuple

from .errors import DomainError
from .scenario import DecodeConfig, DerivedParams, Scenario, BaseGraphSpec
from .scenario import derive, select_base_graph


class OpKind(enum.Enum):
    ADD = "ADD"
    MUL = "MUL"
    DIV = "DIV"
    XOR = "XOR"
    AND = "AND"
    SHIFT = "SHIFT"
    CMP = "CMP"
    LOOKUP = "LOOKUP"
    SET = "SET"
    LOG = "LOG"
    FLOP = "FLOP"       # one addition plus one multiplication


class DataClass(enum.Enum):
    LOGICAL_SCALAR = "logical_scalar"
    LOGICAL_VECTOR = "logical_vector"
    INT_SCALAR = "int_scalar"
    INT_VECTOR = "int_vector"
    DOUBLE_SCALAR = "double_scalar"
    DOUBLE_VECTOR = "double_vector"
    STRUCT = "struct"


class BlockId(enum.Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    E = "E"
    F = "F"
    G = "G"
    H = "H"

    @property
    def side(self) -> str:
        """Transmitter (BS) or receiver (UE) half of the chain."""
        return "BS" if self.value in "ABCD" else "UE"


OpKey = Tuple[OpKind, DataClass]

_KIND_ORDER = {kind: i for i, kind in enumerate(OpKind)}
_CLASS_ORDER = {cls: i for i, cls in enumerate(DataClass)}


class OperationTally:
    """Immutable multiset of (operation kind, data class) counts.

    Merging is commutative and associative with the empty tally as
    identity; scaling by a non-negative integer distributes over it.
    Zero counts are dropped so equal tallies compare equal regardless
    of construction order.
    """

    __slots__ = ("_counts",)

    def __init__(self, counts: Mapping[OpKey, int] | None = None):
        cleaned: Dict[OpKey, int] = {}
        for key, value in (counts or {}).items():
            kind, cls = key
            if not isinstance(kind, OpKind) or not isinstance(cls, DataClass):
                raise DomainError(f"bad tally key {key!r}")
            if not isinstance(value, int) or isinstance(value, bool):
                raise DomainError(f"tally count for {key} must be an integer")
            if value < 0:
                raise DomainError(f"tally count for {key} is negative")
            if value:
                cleaned[key] = value
        self._counts = cleaned

    def get(self, kind: OpKind, cls: DataClass) -> int:
        return self._counts.get((kind, cls), 0)

    def items(self) -> Iterator[Tuple[OpKey, int]]:
        """Entries in a fixed (kind, class) declaration order."""
        return iter(sorted(
            self._counts.items(),
            key=lambda kv: (_KIND_ORDER[kv[0][0]], _CLASS_ORDER[kv[0][1]]),
        ))

    def as_dict(self) -> Dict[OpKey, int]:
        return dict(self._counts)

    def merged(self, other: "OperationTally") -> "OperationTally":
        counts = dict(self._counts)
        for key, value in other._counts.items():
            counts[key] = counts.get(key, 0) + value
        return OperationTally(counts)

    def scaled(self, factor: int) -> "OperationTally":
        if not isinstance(factor, int) or isinstance(factor, bool) or factor < 0:
            raise DomainError("tally scale factor must be a non-negative integer")
        return OperationTally({k: v * factor for k, v in self._counts.items()})

    def total_ops(self, expand_flops: bool = False) -> int:
        """Total operation count; FLOPs count double when expanded."""
        total = sum(self._counts.values())
        if expand_flops:
            total += sum(v for (kind, _), v in self._counts.items()
                         if kind is OpKind.FLOP)
        return total

    def __add__(self, other: "OperationTally") -> "OperationTally":
        if not isinstance(other, OperationTally):
            return NotImplemented
        return self.merged(other)

    def __mul__(self, factor: int) -> "OperationTally":
        return self.scaled(factor)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OperationTally):
            return NotImplemented
        return self._counts == other._counts

    def __bool__(self) -> bool:
        return bool(self._counts)

    def __repr__(self) -> str:
        inner = ", ".join(f"{kind.value}/{cls.value}={n}"
                          for (kind, cls), n in self.items())
        return f"OperationTally({inner})"


EMPTY_TALLY = OperationTally()


def _ilog2(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise DomainError(f"{n} is not a power of two")
    return n.bit_length() - 1


# ---------------------------------------------------------------------------
# Block A: CRC attach, segmentation, LDPC encoding


def count_crc(a_bits: int, p: int = 32) -> OperationTally:
    """Table-driven CRC over ``a_bits`` payload bits, ``p`` bits per step.

    Each full word costs five logical operations in each of AND, XOR
    and shift; one trailing operation of each kind finishes the digest:
    5*floor(a_bits/p) + 1 per kind.
    """
    if a_bits < 0:
        raise DomainError("CRC payload length must be >= 0")
    if p < 1:
        raise DomainError("CRC word width must be >= 1")
    per_kind = 5 * (a_bits // p) + 1
    return OperationTally({
        (OpKind.AND, DataClass.LOGICAL_SCALAR): per_kind,
        (OpKind.XOR, DataClass.LOGICAL_SCALAR): per_kind,
        (OpKind.SHIFT, DataClass.LOGICAL_SCALAR): per_kind,
    })


def count_segmentation(c: int) -> OperationTally:
    """Code block segmentation bookkeeping: nine ops per transport block.

    The cost is per TB and does not grow with the number of code
    blocks.  The nine operations are generic integer arithmetic,
    recorded as FLOPs in the integer class.
    """
    if c < 1:
        raise DomainError("segmentation needs at least one code block")
    return OperationTally({(OpKind.FLOP, DataClass.INT_SCALAR): 9})


def count_ldpc_encode(k: int, z: int, n1: int, rows: int, cols: int,
                      n_ccb: int, c: int) -> OperationTally:
    """LDPC systematic encoding cost for ``c`` identical code blocks.

    Per code block:

    * validation of the non-filler payload: 2*(k - 2z) compares
    * base graph expansion: rows*cols replacements
    * one modulo (costed as a division) per non-null entry: n1
    * generator-matrix product, schoolbook: each of the rows*z output
      elements takes cols*z multiplies and cols*z - 1 additions
    * writing the rate-matched output: n_ccb + 2z - k stores
    """
    if min(k, z, rows, cols, c) < 1 or n1 < 0 or n_ccb < 1:
        raise DomainError("LDPC encode arguments must be positive")
    if k < 2 * z:
        raise DomainError("LDPC encode needs k >= 2z")
    if n_ccb + 2 * z < k:
        raise DomainError("LDPC encode needs n_ccb + 2z >= k")
    out_elems = rows * z
    inner = cols * z
    per_cb = {
        (OpKind.CMP, DataClass.INT_SCALAR): 2 * (k - 2 * z),
        (OpKind.SET, DataClass.INT_SCALAR): rows * cols + (n_ccb + 2 * z - k),
        (OpKind.DIV, DataClass.INT_SCALAR): n1,
        (OpKind.MUL, DataClass.INT_SCALAR): out_elems * inner,
        (OpKind.ADD, DataClass.INT_SCALAR): out_elems * (inner - 1),
    }
    return OperationTally(per_cb).scaled(c)


def count_block_a(d: DerivedParams, bg: BaseGraphSpec) -> OperationTally:
    """Transport channel encoding: TB CRC, segmentation, CB CRCs, LDPC.

    The per-code-block CRCs are costed as one pass over the total
    payload ``b`` (the sum of all code block sizes).  Rate matching and
    concatenation are index bookkeeping and contribute no operations.
    """
    return (
        count_crc(d.a)
        + count_segmentation(d.c)
        + count_crc(d.b)
        + count_ldpc_encode(k=d.k, z=d.z, n1=bg.n1, rows=bg.rows,
                            cols=bg.cols, n_ccb=d.n_ccb, c=d.c)
    )


# ---------------------------------------------------------------------------
# Blocks B and G: scrambling, modulation mapping, layer mapping


def count_block_b(m_cw: int, n_symbols: int) -> OperationTally:
    """Scrambling, modulation and layer mapping for one codeword.

    Scrambling costs six vectorized XORs per codeword bit (Gold
    sequence update plus the masking itself).  Modulation is one table
    lookup per symbol; layer mapping shifts each symbol into place.
    """
    if m_cw < 0 or n_symbols < 0:
        raise DomainError("block B sizes must be >= 0")
    return OperationTally({
        (OpKind.XOR, DataClass.LOGICAL_VECTOR): 6 * m_cw,
        (OpKind.LOOKUP, DataClass.INT_SCALAR): n_symbols,
        (OpKind.SHIFT, DataClass.INT_SCALAR): n_symbols,
    })


def count_block_g(m_cw: int, n_symbols: int) -> OperationTally:
    """Receiver mirror of block B; identical counts, integer/logical."""
    return count_block_b(m_cw, n_symbols)


# ---------------------------------------------------------------------------
# Block C: antenna-port mapping


def count_block_c(p: int, v: int, m_symb_layer: int) -> OperationTally:
    """Precoding over ``p`` ports and ``v`` layers.

    Per layer-mapped symbol: an SVD of the p-by-v channel estimate
    (2pv^2 + v^3 flops), singular-value regularization (v), forming
    the precoder (pv), and applying it (2pv - p).
    """
    if v < 1 or p < v:
        raise DomainError("precoding needs p >= v >= 1")
    if m_symb_layer < 0:
        raise DomainError("symbol count must be >= 0")
    per_symbol = 2 * p * v * v + v ** 3 + v + p * v + (2 * p * v - p)
    return OperationTally({
        (OpKind.FLOP, DataClass.DOUBLE_SCALAR): m_symb_layer * per_symbol,
    })


# ---------------------------------------------------------------------------
# Blocks D and E: OFDM transforms


def count_block_d(g: int, n_ant: int, n_fft: int) -> OperationTally:
    """Radix-2 transforms for ``g`` symbols on ``n_ant`` antennas.

    5*n_fft*log2(n_fft) real flops per transform.  ``n_fft`` must be a
    power of two.
    """
    if g < 1 or n_ant < 1:
        raise DomainError("transform counts need g >= 1 and n_ant >= 1")
    flops = 5 * g * n_ant * n_fft * _ilog2(n_fft)
    return OperationTally({(OpKind.FLOP, DataClass.DOUBLE_SCALAR): flops})


def count_block_e(g: int, n_ant: int, n_fft: int) -> OperationTally:
    """Receiver FFT bank; same cost shape as block D."""
    return count_block_d(g, n_ant, n_fft)


# ---------------------------------------------------------------------------
# Block F: channel estimation and equalization


def count_ls(v: int, n_r: int, n_t: int, l: int, g: int,
             k_p: int) -> OperationTally:
    """Least-squares channel estimation from pilot observations.

    Solves, per layer/receive-antenna pair, a linear system with
    l*n_t unknowns from g*k_p pilot equations via the normal
    equations: Gram matrix build, Gauss-Jordan inversion, and the
    pseudo-inverse application.
    """
    if v < 0 or n_r < 0:
        raise DomainError("ls: v and n_r must be >= 0")
    if min(l, n_t, g, k_p) < 1:
        raise DomainError("ls: l, n_t, g, k_p must be >= 1")
    unknowns = l * n_t
    pilots = g * k_p
    bracket = (
        unknowns ** 2 * (2 * pilots - 1)     # A^H A
        + unknowns ** 3                      # inversion
        + pilots * unknowns * (2 * unknowns - 1)   # (A^H A)^-1 A^H
    )
    return OperationTally({
        (OpKind.FLOP, DataClass.DOUBLE_SCALAR): v * n_r * bracket,
    })


def count_mmse(n_r: int, n_t: int, n_f: int, g: int) -> OperationTally:
    """MMSE equalization across ``n_f`` subcarriers and ``g`` symbols.

    One SVD-based filter setup per slot (2*n_r*n_t^2 + n_r^3 + n_r +
    n_r*n_t), then per subcarrier: diagonal loading, two small matrix
    products, and applying the filter to g received vectors.
    """
    if min(n_r, n_t, g) < 1 or n_f < 0:
        raise DomainError("mmse: n_r, n_t, g must be >= 1 and n_f >= 0")
    setup = 2 * n_r * n_t ** 2 + n_r ** 3 + n_r + n_r * n_t
    per_sc = (
        3 * n_t
        + n_t * n_r * (2 * n_t - 1)
        + n_t * n_r * (2 * n_r - 1)
        + n_t * g * (2 * n_r - 1)
    )
    return OperationTally({
        (OpKind.FLOP, DataClass.DOUBLE_SCALAR): setup + n_f * per_sc,
    })


def count_block_f(d: DerivedParams, s: Scenario) -> OperationTally:
    return (
        count_ls(v=s.n_layers, n_r=s.n_rx, n_t=s.n_tx, l=s.channel_len,
                 g=d.g, k_p=d.k_p)
        + count_mmse(n_r=s.n_rx, n_t=s.n_tx, n_f=d.n_f, g=d.g)
    )


# ---------------------------------------------------------------------------
# Block H: LDPC decoding and CRC checks


def count_ldpc_decode(n_vn: int, w_cn: int, deg_cn: int, deg_vn: int,
                      iters: int, c: int) -> OperationTally:
    """Normalized min-sum decoding for ``c`` code blocks.

    Initialization computes one LLR per variable node (a division and
    a logarithm each).  Every iteration then runs the horizontal step
    (one product per check-node edge), the vertical step (deg_vn
    additions per variable node), and the decision step (deg_vn + 1
    additions per variable node plus one sign XOR per check-node
    edge).  Check/variable node degrees are taken as constants.
    """
    if n_vn < 0 or w_cn < 0:
        raise DomainError("decode: node counts must be >= 0")
    if deg_cn < 1 or deg_vn < 1:
        raise DomainError("decode: node degrees must be >= 1")
    if iters < 0 or c < 1:
        raise DomainError("decode: iters >= 0 and c >= 1 required")
    edges = w_cn * deg_cn
    per_cb = {
        (OpKind.DIV, DataClass.DOUBLE_SCALAR): n_vn,
        (OpKind.LOG, DataClass.DOUBLE_SCALAR): n_vn,
        (OpKind.MUL, DataClass.DOUBLE_SCALAR): iters * edges,
        (OpKind.ADD, DataClass.DOUBLE_SCALAR):
            iters * (n_vn * deg_vn + n_vn * (deg_vn + 1)),
        (OpKind.XOR, DataClass.DOUBLE_SCALAR): iters * edges,
    }
    return OperationTally(per_cb).scaled(c)


def count_crc_decode(bits: int, p: int = 32) -> OperationTally:
    """CRC check: recompute the digest, then one compare."""
    return count_crc(bits, p) + OperationTally({
        (OpKind.CMP, DataClass.LOGICAL_SCALAR): 1,
    })


def count_block_h(d: DerivedParams, decode: DecodeConfig) -> OperationTally:
    """LDPC decoding plus CB and TB CRC checks.

    The decoder sees the full coded block (n_ccb variable nodes); the
    redundancy handled per check node is the coded length minus the
    systematic payload.
    """
    return (
        count_ldpc_decode(n_vn=d.n_ccb, w_cn=d.n_ccb - d.k,
                          deg_cn=decode.deg_cn, deg_vn=decode.deg_vn,
                          iters=decode.iterations, c=d.c)
        + count_crc_decode(d.b)
        + count_crc_decode(d.a)
    )


# ---------------------------------------------------------------------------
# Full pipeline


@dataclass(frozen=True)
class PipelineTallies:
    """Per-block operation tallies for a whole run."""

    per_block: Mapping[BlockId, OperationTally]
    bits_transmitted: int

    @property
    def total(self) -> OperationTally:
        merged = EMPTY_TALLY
        for block in BlockId:
            merged = merged + self.per_block[block]
        return merged


def tally_pipeline(s: Scenario) -> PipelineTallies:
    """Count every block of the chain for a scenario, scaled by n_slots."""
    d = derive(s)
    bg = select_base_graph(d.a, s.code_rate)
    e_antennas = s.rx_fft_antennas if s.rx_fft_antennas is not None else s.n_tx
    per_slot = {
        BlockId.A: count_block_a(d, bg),
        BlockId.B: count_block_b(d.m_cw, d.n_symbols),
        BlockId.C: count_block_c(s.n_ports, s.n_layers, d.m_symb_layer),
        BlockId.D: count_block_d(d.g, s.n_tx, d.n_fft),
        BlockId.E: count_block_e(d.g, e_antennas, d.n_fft),
        BlockId.F: count_block_f(d, s),
        BlockId.G: count_block_g(d.m_cw, d.n_symbols),
        BlockId.H: count_block_h(d, s.decode),
    }
    per_block = {blk: tally.scaled(s.n_slots) for blk, tally in per_slot.items()}
    return PipelineTallies(per_block=per_block,
                           bits_transmitted=d.a * s.n_slots)
