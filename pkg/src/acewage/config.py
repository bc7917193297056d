"""Cipher constants for ACE and WAGE, with JSON load/save and validation.

Everything the two ciphers need beyond their structure lives here: S-box
tables, LFSR taps and seeds, the GF(2^7) reduction polynomial, domain
separator values, rate layouts and loading regions.  The cores are driven
entirely by a :class:`CipherConfig`, so dropping the official tables into a
config file is all it takes to switch from the placeholder defaults.

Conventions fixed here and used throughout the package:

* ACE global bit ``64*r + j`` is bit ``j`` of register ``r`` (A=0 .. E=4);
  byte index 7 of a register is its most significant byte.
* WAGE global bit ``7*i + j`` is bit ``j`` of stage ``S_i``.
* 64-bit blocks are absorbed most-significant bit first.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import random
from dataclasses import dataclass, field

ACE_REGISTERS = ("A", "B", "C", "D", "E")
WAGE_STAGES = 37

# Placeholder tables: NOT the official WAGE S-boxes.  WGP is a shuffle of
# range(128) by random.Random(WGP_PLACEHOLDER_SEED); SB is the iterated
# generator below evaluated on every input.
WGP_PLACEHOLDER_SEED = 0x3A6E
_WGP_PLACEHOLDER_HEX = (
    "5457436a3f6b4a0b347d7e6e1c5859152a5c492d47133826754800303a7b2464"
    "677652793136046c710e412f3216784d074570022c223b3e1b56374f062b3569"
    "091f61407c205d420a0f21330129774c1e6519255562463c68051d080d4b1028"
    "503966146d27725f2311513d03187f17447a635a600c6f5b127473532e5e4e1a"
)


class ConfigError(ValueError):
    """Raised when a config document cannot be parsed or fails validation."""

    def __init__(self, message, fields=()):
        super().__init__(message)
        self.fields = tuple(fields)


@dataclass(frozen=True)
class LfsrSpec:
    """Fibonacci LFSR over GF(2).

    The state holds ``width`` consecutive sequence elements, bit ``k`` being
    the ``k``-th oldest.  Each feedback appends the XOR of the elements at
    ``taps`` and drops the oldest one.
    """

    width: int = 7
    taps: tuple = (0, 1)
    initial_state: int = 0x7F
    parallel_degree: int = 1


@dataclass(frozen=True)
class SboxGenerator:
    """Iterated 7-bit S-box: per iteration, ``bit[t] ^= bit[a] & bit[b]``
    for each ``(t, a, b)`` in ``ops``, then a left rotation."""

    iterations: int = 5
    ops: tuple = ((0, 2, 3), (3, 5, 6), (6, 0, 1))
    rotation: int = 1
    final_xor: int = 0


@dataclass(frozen=True)
class Schedule:
    """Init/final action lists; items are ``"perm"``, ``"k0"`` or ``"k1"``."""

    init: tuple = ("perm", "k0", "perm", "k1", "perm")
    final: tuple = ("k0", "perm", "k1", "perm")


def sbox_from_generator(gen):
    table = []
    for x in range(128):
        for _ in range(gen.iterations):
            for t, a, b in gen.ops:
                x ^= (((x >> a) & (x >> b)) & 1) << t
            r = gen.rotation % 7
            x = ((x << r) | (x >> (7 - r))) & 0x7F
        table.append(x ^ gen.final_xor)
    return tuple(table)


def placeholder_wgp(seed=WGP_PLACEHOLDER_SEED):
    table = list(range(128))
    random.Random(seed).shuffle(table)
    return tuple(table)


def _default_sb():
    return sbox_from_generator(SboxGenerator())


def _default_wgp():
    return tuple(bytes.fromhex(_WGP_PLACEHOLDER_HEX))


@dataclass(frozen=True)
class CipherConfig:
    # ACE
    simeck_rotations: tuple = (5, 0, 1)
    simeck_const_template: int = 0xFFFFFFFE
    ace_step_const_mask: int = 0xFFFFFFFFFFFFFF00
    ace_register_permutation: tuple = ("D", "C", "A", "E", "B")
    ace_mix_map: tuple = (("B", "C"), ("D", "E"), ("E", "A"))
    ace_rounds_per_step: int = 8
    ace_steps: int = 16
    ace_const_lfsr: LfsrSpec = LfsrSpec(7, (0, 1), 0x7F, 3)
    ace_sc_windows: tuple = (0, 1, 2)
    ace_domain_sep_positions: tuple = (256, 257)
    ace_padding_flag_position: int = 258
    ace_init_final_schedule: Schedule = Schedule()
    rate_bytes_ace: tuple = (
        ("A", 7), ("A", 6), ("A", 5), ("A", 4),
        ("C", 7), ("C", 6), ("C", 5), ("C", 4),
    )
    hash_iv_bytes: tuple = (("B", 7, 0x80), ("B", 6, 0x40), ("B", 5, 0x40))
    hash_init_permute: bool = True
    hash_squeeze_blocks: int = 4
    # WAGE
    wage_field_poly: int = 0x83
    wage_feedback_taps: tuple = (31, 30, 26, 24, 19, 13, 12, 8, 6)
    wage_wgp_table: tuple = field(default_factory=_default_wgp)
    wage_sb_table: tuple = field(default_factory=_default_sb)
    wage_sb_generator: SboxGenerator | None = SboxGenerator()
    # (function, source stage, destination stage after the shift)
    wage_nonlinear_update_map: tuple = (
        ("wgp", 36, 36), ("wgp", 18, 18),
        ("sb", 34, 29), ("sb", 27, 23), ("sb", 15, 10), ("sb", 8, 4),
    )
    wage_rc_stages: tuple = (36, 18)
    wage_const_lfsr: LfsrSpec = LfsrSpec(7, (0, 3), 0x7F, 2)
    wage_rounds: int = 111
    # (stage, bits taken from the stage's low end), block MSB first
    wage_rate_stages: tuple = (
        (36, 1), (35, 7), (34, 7), (28, 7), (27, 7),
        (18, 7), (16, 7), (15, 7), (9, 7), (8, 7),
    )
    # (input port D_k, entry stage, length)
    wage_load_regions: tuple = (
        (9, 36, 9), (5, 27, 9), (4, 18, 2), (3, 16, 8), (0, 8, 9),
    )
    # (output port O_k, exit stage, length)
    wage_tag_regions: tuple = ((6, 28, 9), (4, 18, 9), (1, 9, 1))
    wage_domain_sep_positions: tuple = (0, 1)
    wage_padding_flag_position: int = 2
    # shared
    domain_separators: tuple = (("init", 0), ("ad", 1), ("payload", 2), ("final", 3))
    tag_msw_first: bool = True

    def ds(self, phase):
        return dict(self.domain_separators)[phase]

    def digest(self):
        """SHA-256 of the canonical serialization; identifies KAT files."""
        return hashlib.sha256(dump_config(self).encode()).hexdigest()


DEFAULT_CONFIG = CipherConfig()

_TABLE_FIELDS = ("wage_wgp_table", "wage_sb_table")
_HEX_FIELDS = ("simeck_const_template", "ace_step_const_mask", "wage_field_poly")


def _is_bijection(table):
    return len(table) == 128 and sorted(table) == list(range(128))


def _lfsr_violations(name, spec):
    out = []
    if spec.width < 1:
        out.append((name, "width must be >= 1"))
    if not spec.taps or any(not 0 <= t < spec.width for t in spec.taps):
        out.append((name, "taps must be nonempty and below width"))
    if not 0 <= spec.initial_state < (1 << max(spec.width, 0)):
        out.append((name, "initial_state does not fit width"))
    if spec.parallel_degree < 1:
        out.append((name, "parallel_degree must be >= 1"))
    return out


def validate_config(cfg):
    """Return a list of ``(field, message)`` violations; empty means valid."""
    v = []
    if len(cfg.simeck_rotations) != 3 or any(not 0 <= r < 32 for r in cfg.simeck_rotations):
        v.append(("simeck_rotations", "need three rotations in [0, 32)"))
    if not 0 <= cfg.simeck_const_template < 1 << 32 or cfg.simeck_const_template & 1:
        v.append(("simeck_const_template", "32-bit mask with a free least significant bit"))
    if not 0 <= cfg.ace_step_const_mask < 1 << 64 or cfg.ace_step_const_mask & 0xFF:
        v.append(("ace_step_const_mask", "64-bit mask with a free low byte"))
    if sorted(cfg.ace_register_permutation) != list(ACE_REGISTERS):
        v.append(("ace_register_permutation", "must be a permutation of A..E"))
    targets = [t for t, _ in cfg.ace_mix_map]
    if (
        len(cfg.ace_mix_map) != 3
        or len(set(targets)) != 3
        or any(t not in ACE_REGISTERS or s not in ("A", "C", "E") for t, s in cfg.ace_mix_map)
        or _mix_order(cfg.ace_mix_map) is None
    ):
        v.append(("ace_mix_map", "three distinct targets fed by A/C/E outputs, acyclic"))
    if cfg.ace_rounds_per_step != 8:
        v.append(("ace_rounds_per_step", "ACE steps have 8 rounds"))
    if cfg.ace_steps < 1:
        v.append(("ace_steps", "must be positive"))
    v += _lfsr_violations("ace_const_lfsr", cfg.ace_const_lfsr)
    if len(cfg.ace_sc_windows) != 3 or any(not 0 <= w <= 2 for w in cfg.ace_sc_windows):
        v.append(("ace_sc_windows", "three offsets in [0, 2]"))
    for name, width, positions in (
        ("ace_domain_sep_positions", 320, cfg.ace_domain_sep_positions),
        ("wage_domain_sep_positions", 259, cfg.wage_domain_sep_positions),
    ):
        if len(positions) != 2 or any(not 0 <= b < width for b in positions):
            v.append((name, "two state bit positions"))
    if not 0 <= cfg.ace_padding_flag_position < 320:
        v.append(("ace_padding_flag_position", "must be a state bit"))
    if not 0 <= cfg.wage_padding_flag_position < 259:
        v.append(("wage_padding_flag_position", "must be a state bit"))
    v += _schedule_violations(cfg.ace_init_final_schedule)
    if len(cfg.rate_bytes_ace) != 8 or len(set(cfg.rate_bytes_ace)) != 8 or any(
        r not in ACE_REGISTERS or not 0 <= b < 8 for r, b in cfg.rate_bytes_ace
    ):
        v.append(("rate_bytes_ace", "exactly 8 distinct register bytes"))
    if any(r not in ACE_REGISTERS or not 0 <= b < 8 or not 0 <= x < 256 for r, b, x in cfg.hash_iv_bytes):
        v.append(("hash_iv_bytes", "entries are (register, byte 0..7, value 0..255)"))
    if cfg.hash_squeeze_blocks < 1:
        v.append(("hash_squeeze_blocks", "must be positive"))

    poly = cfg.wage_field_poly
    if poly.bit_length() != 8 or not poly & 1:
        v.append(("wage_field_poly", "degree exactly 7 with nonzero constant term"))
    if not cfg.wage_feedback_taps or any(not 1 <= t < WAGE_STAGES for t in cfg.wage_feedback_taps):
        v.append(("wage_feedback_taps", "taps in [1, 37)"))
    if not _is_bijection(cfg.wage_wgp_table):
        v.append(("wage_wgp_table", "not a bijection on [0, 128)"))
    if not _is_bijection(cfg.wage_sb_table):
        v.append(("wage_sb_table", "not a bijection on [0, 128)"))
    elif cfg.wage_sb_generator is not None and sbox_from_generator(cfg.wage_sb_generator) != tuple(cfg.wage_sb_table):
        v.append(("wage_sb_generator", "generator disagrees with wage_sb_table"))
    v += _nonlinear_map_violations(cfg)
    if len(cfg.wage_rc_stages) != 2 or any(not 0 <= s < WAGE_STAGES for s in cfg.wage_rc_stages):
        v.append(("wage_rc_stages", "two stage indices"))
    v += _lfsr_violations("wage_const_lfsr", cfg.wage_const_lfsr)
    if cfg.wage_const_lfsr.width != 7:
        v.append(("wage_const_lfsr", "round constants are 7 bits wide"))
    if cfg.wage_rounds < 1:
        v.append(("wage_rounds", "must be positive"))
    stages = [s for s, _ in cfg.wage_rate_stages]
    if (
        sum(b for _, b in cfg.wage_rate_stages) != 64
        or len(set(stages)) != len(stages)
        or any(not 0 <= s < WAGE_STAGES or not 1 <= b <= 7 for s, b in cfg.wage_rate_stages)
    ):
        v.append(("wage_rate_stages", "distinct stages totalling exactly 64 bits"))
    covered = sorted(s for _, top, n in cfg.wage_load_regions for s in range(top - n + 1, top + 1))
    if covered != list(range(WAGE_STAGES)) or max((n for *_, n in cfg.wage_load_regions), default=0) != 9:
        v.append(("wage_load_regions", "must cover all 37 stages once, longest region 9"))
    tag_stages = [s for _, low, n in cfg.wage_tag_regions for s in range(low, low + n)]
    if (
        len(tag_stages) * 7 < 128
        or len(set(tag_stages)) != len(tag_stages)
        or any(not 0 <= s < WAGE_STAGES for s in tag_stages)
        or max((n for *_, n in cfg.wage_tag_regions), default=0) > 9
    ):
        v.append(("wage_tag_regions", "disjoint regions of length <= 9 holding >= 128 bits"))
    phases = dict(cfg.domain_separators)
    if sorted(phases) != ["ad", "final", "init", "payload"] or any(not 0 <= x < 4 for x in phases.values()):
        v.append(("domain_separators", "2-bit values for init, ad, payload, final"))
    return v


def _mix_order(mix_map):
    """Order in which mixed registers can be un-mixed, or None if cyclic."""
    targets = {t: s for t, s in mix_map}
    order, known = [], set(ACE_REGISTERS) - set(targets)
    while len(order) < len(targets):
        ready = [t for t, s in targets.items() if t not in known and (s in known or s == t)]
        if not ready:
            return None
        order += ready
        known.update(ready)
    return tuple(order)


def _schedule_violations(sched):
    v = []
    for name, items in (("init", sched.init), ("final", sched.final)):
        body = list(items)
        if name == "init" and body[:1] == ["perm"]:
            body = body[1:]
        pairs = [tuple(body[i:i + 2]) for i in range(0, len(body), 2)]
        if any(len(p) != 2 or p[0] not in ("k0", "k1") or p[1] != "perm" for p in pairs):
            v.append(("ace_init_final_schedule", f"{name} must be [perm] then (k0|k1, perm) pairs"))
    return v


def _nonlinear_map_violations(cfg):
    entries = cfg.wage_nonlinear_update_map
    dsts = {d for _, _, d in entries} | set(cfg.wage_rc_stages)
    ok = all(
        f in ("wgp", "sb") and 1 <= src < WAGE_STAGES and 0 <= dst < WAGE_STAGES and src - 1 not in dsts
        for f, src, dst in entries
    )
    if not ok or len({d for _, _, d in entries}) != len(entries):
        return [("wage_nonlinear_update_map", "sources >= 1, distinct destinations, no source read after a write")]
    return []


# -- serialization -----------------------------------------------------------

def _to_jsonable(cfg):
    out = {}
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if f.name in _TABLE_FIELDS:
            value = bytes(value).hex()
        elif f.name in _HEX_FIELDS:
            value = hex(value)
        elif dataclasses.is_dataclass(value):
            value = dataclasses.asdict(value)
        out[f.name] = value
    return out


def dump_config(cfg):
    """Serialize to the canonical JSON document."""
    return json.dumps(_to_jsonable(cfg), indent=2, sort_keys=True) + "\n"


def _tuplify(x):
    if isinstance(x, list):
        return tuple(_tuplify(i) for i in x)
    return x


def _parse_int(name, value):
    if isinstance(value, str):
        try:
            return int(value, 0)
        except ValueError:
            raise ConfigError(f"{name}: not an integer: {value!r}", [name]) from None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name}: not an integer: {value!r}", [name])
    return value


def _parse_table(name, value):
    if isinstance(value, str):
        try:
            return tuple(bytes.fromhex(value))
        except ValueError:
            raise ConfigError(f"{name}: bad hex table", [name]) from None
    return tuple(_parse_int(name, x) for x in value)


def _parse_record(name, value, cls, int_fields):
    if not isinstance(value, dict):
        raise ConfigError(f"{name}: expected an object", [name])
    kw = {}
    for k, v in value.items():
        if k in int_fields:
            v = _parse_int(f"{name}.{k}", v)
        elif isinstance(v, list):
            v = _tuplify(v)
        kw[k] = v
    try:
        return cls(**kw)
    except TypeError as exc:
        raise ConfigError(f"{name}: {exc}", [name]) from None


def _parse_lfsr(name, value):
    spec = _parse_record(name, value, LfsrSpec, ("width", "initial_state", "parallel_degree"))
    return dataclasses.replace(spec, taps=tuple(_parse_int(f"{name}.taps", t) for t in _seq(name, spec.taps)))


def _seq(name, value):
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{name}: expected a list", [name])
    return value


def config_from_dict(doc):
    names = {f.name: f for f in dataclasses.fields(CipherConfig)}
    unknown = sorted(set(doc) - set(names))
    if unknown:
        raise ConfigError(f"unknown config fields: {', '.join(unknown)}", unknown)
    kwargs = {}
    for name, value in doc.items():
        if name in _TABLE_FIELDS:
            value = _parse_table(name, value)
        elif name in _HEX_FIELDS or name in (
            "ace_rounds_per_step", "ace_steps", "wage_rounds", "hash_squeeze_blocks",
            "ace_padding_flag_position", "wage_padding_flag_position",
        ):
            value = _parse_int(name, value)
        elif name in ("ace_const_lfsr", "wage_const_lfsr"):
            value = _parse_lfsr(name, value)
        elif name == "wage_sb_generator":
            value = None if value is None else _parse_record(
                name, value, SboxGenerator, ("iterations", "rotation", "final_xor"))
        elif name == "ace_init_final_schedule":
            value = _parse_record(name, value, Schedule, ())
        else:
            value = _tuplify(value)
        kwargs[name] = value
    # a replacement SB table without a generator must not be checked against the default one
    if "wage_sb_table" in kwargs and "wage_sb_generator" not in kwargs:
        kwargs["wage_sb_generator"] = None
    try:
        return CipherConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(source):
    """Parse a JSON config document; omitted fields take their defaults."""
    try:
        doc = json.loads(source) if source.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config does not parse: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    cfg = config_from_dict(doc)
    try:
        problems = validate_config(cfg)
    except (TypeError, ValueError, KeyError, IndexError) as exc:
        raise ConfigError(f"invalid config: malformed value ({exc})") from None
    if problems:
        msg = "; ".join(f"{name}: {why}" for name, why in problems)
        raise ConfigError(f"invalid config: {msg}", [name for name, _ in problems])
    return cfg


def load_config_file(path):
    with open(path) as fh:
        return load_config(fh.read())
