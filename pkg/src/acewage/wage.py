"""The 259-bit WAGE permutation: a 37-stage LFSR over GF(2^7).

A round computes the linear feedback from the stages, shifts every stage
down by one, and XORs the configured WGP/SB outputs and the two round
constants into their destination stages (indices after the shift).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .config import WAGE_STAGES
from .constants import check_degree, wage_cycle_schedule, wage_serial_constants


@dataclass(frozen=True)
class WageState:
    s: tuple = (0,) * WAGE_STAGES

    def __post_init__(self):
        if len(self.s) != WAGE_STAGES or any(not 0 <= x < 128 for x in self.s):
            raise ValueError("WAGE state is 37 stages of 7 bits")

    def to_int(self):
        return sum(x << (7 * i) for i, x in enumerate(self.s))

    @classmethod
    def from_int(cls, x):
        return cls(tuple((x >> (7 * i)) & 0x7F for i in range(WAGE_STAGES)))


def gf7_mul_omega(x, cfg):
    """Multiply by the field generator (the class of ``x``) modulo the poly."""
    x <<= 1
    if x & 0x80:
        x ^= cfg.wage_field_poly
    return x


def gf7_mul_omega_inverse(x, cfg):
    if x & 1:
        x ^= cfg.wage_field_poly
    return x >> 1


def sb_generate(x, gen):
    for _ in range(gen.iterations):
        for t, a, b in gen.ops:
            x ^= (((x >> a) & (x >> b)) & 1) << t
        r = gen.rotation % 7
        x = ((x << r) | (x >> (7 - r))) & 0x7F
    return x ^ gen.final_xor


def wgp_eval(x, cfg):
    return cfg.wage_wgp_table[x]


def sb_eval(x, cfg, use_generator=False):
    if use_generator:
        if cfg.wage_sb_generator is None:
            raise ValueError("config carries no SB generator")
        return sb_generate(x, cfg.wage_sb_generator)
    return cfg.wage_sb_table[x]


@lru_cache(maxsize=32)
def _tables(cfg):
    inv_wgp = [0] * 128
    for x, y in enumerate(cfg.wage_wgp_table):
        inv_wgp[y] = x
    mul = tuple(gf7_mul_omega(x, cfg) for x in range(128))
    imul = tuple(gf7_mul_omega_inverse(x, cfg) for x in range(128))
    funcs = {"wgp": cfg.wage_wgp_table, "sb": cfg.wage_sb_table}
    nl = tuple((funcs[f], src, dst) for f, src, dst in cfg.wage_nonlinear_update_map)
    return tuple(inv_wgp), mul, imul, nl


def wgp_inverse(y, cfg):
    return _tables(cfg)[0][y]


def wage_feedback(s, cfg):
    """XOR of the tap stages and omega times S0."""
    stages = s.s if isinstance(s, WageState) else s
    fb = _tables(cfg)[1][stages[0]]
    for t in cfg.wage_feedback_taps:
        fb ^= stages[t]
    return fb


def _round(s, rc1, rc0, cfg):
    _, mul, _, nl = _tables(cfg)
    fb = mul[s[0]]
    for t in cfg.wage_feedback_taps:
        fb ^= s[t]
    out = list(s[1:])
    out.append(fb)
    for table, src, dst in nl:
        out[dst] ^= table[s[src]]
    hi, lo = cfg.wage_rc_stages
    out[hi] ^= rc1
    out[lo] ^= rc0
    return out


def wage_round(s, rc_pair, cfg):
    return WageState(tuple(_round(s.s, rc_pair[0], rc_pair[1], cfg)))


def _round_inverse(t, rc1, rc0, cfg):
    _, _, imul, nl = _tables(cfg)
    s = [0] + list(t[:36])
    last = WAGE_STAGES - 1
    hi, lo = cfg.wage_rc_stages
    for stage, rc in ((hi, rc1), (lo, rc0)):
        if stage < last:
            s[stage + 1] ^= rc
    for table, src, dst in nl:
        if dst < last:
            s[dst + 1] ^= table[t[src - 1]]
    acc = t[last]
    for table, src, dst in nl:
        if dst == last:
            acc ^= table[s[src]]
    for stage, rc in ((hi, rc1), (lo, rc0)):
        if stage == last:
            acc ^= rc
    for tap in cfg.wage_feedback_taps:
        acc ^= s[tap]
    s[0] = imul[acc]
    return s


def wage_round_inverse(s, rc_pair, cfg):
    return WageState(tuple(_round_inverse(s.s, rc_pair[0], rc_pair[1], cfg)))


def wage_cycle(s, pairs, cfg):
    """Evaluate ``len(pairs)`` rounds the way the unrolled datapath does.

    The register is viewed as a sliding window over a growing buffer: copy
    ``k`` of the feedback reads stages ``t + k`` of the cycle-start register
    and writes stage ``37 + k``, and every nonlinear copy lands at offset
    ``k + 1 + dst``.  No per-round shifting takes place.
    """
    _, mul, _, nl = _tables(cfg)
    taps = cfg.wage_feedback_taps
    hi, lo = cfg.wage_rc_stages
    buf = list(s.s)
    for k, (rc1, rc0) in enumerate(pairs):
        fb = mul[buf[k]]
        for t in taps:
            fb ^= buf[k + t]
        updates = [(k + 1 + dst, table[buf[k + src]]) for table, src, dst in nl]
        buf.append(fb)
        for idx, val in updates:
            buf[idx] ^= val
        buf[k + 1 + hi] ^= rc1
        buf[k + 1 + lo] ^= rc0
    n = len(pairs)
    return WageState(tuple(buf[n:n + WAGE_STAGES]))


def wage_permutation(s, cfg, p=1):
    """``cfg.wage_rounds`` rounds; ``p > 1`` composes up to ``p`` per cycle."""
    check_degree("wage", p)
    if p == 1:
        st = s.s
        for rc1, rc0 in wage_serial_constants(cfg):
            st = _round(st, rc1, rc0, cfg)
        return WageState(tuple(st))
    for cc in wage_cycle_schedule(cfg, p):
        s = wage_cycle(s, cc.groups, cfg)
    return s


def wage_inverse_permutation(s, cfg):
    st = s.s
    for rc1, rc0 in reversed(wage_serial_constants(cfg)):
        st = _round_inverse(st, rc1, rc0, cfg)
    return WageState(tuple(st))
