"""The 320-bit ACE permutation.

Each round applies one Simeck-box round to registers A, C and E.  After
eight rounds the step mixes Simeck outputs and step constants into the
configured target registers, then relabels all five registers.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import ACE_REGISTERS, _mix_order
from .constants import (
    ace_cycle_schedule,
    ace_serial_constants,
    check_degree,
    step_constants_from_elements,
)

M32 = 0xFFFFFFFF
M64 = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class AceState:
    a: int = 0
    b: int = 0
    c: int = 0
    d: int = 0
    e: int = 0

    def regs(self):
        return {"A": self.a, "B": self.b, "C": self.c, "D": self.d, "E": self.e}

    @classmethod
    def from_regs(cls, regs):
        return cls(regs["A"], regs["B"], regs["C"], regs["D"], regs["E"])

    def to_int(self):
        return self.a | self.b << 64 | self.c << 128 | self.d << 192 | self.e << 256

    @classmethod
    def from_int(cls, x):
        return cls(*((x >> (64 * i)) & M64 for i in range(5)))


def _rotl32(x, r):
    return ((x << r) | (x >> (32 - r))) & M32 if r else x


def _simeck_f(x, rot):
    r0, r1, r2 = rot
    return (_rotl32(x, r0) & _rotl32(x, r1)) ^ _rotl32(x, r2)


def simeck_round(x, rc, cfg):
    """One round of SB-64 on a 64-bit word (high half is the Feistel input)."""
    hi, lo = x >> 32, x & M32
    new_hi = _simeck_f(hi, cfg.simeck_rotations) ^ lo ^ cfg.simeck_const_template ^ rc
    return (new_hi << 32) | hi


def simeck_round_inverse(y, rc, cfg):
    new_hi, hi = y >> 32, y & M32
    lo = new_hi ^ _simeck_f(hi, cfg.simeck_rotations) ^ cfg.simeck_const_template ^ rc
    return (hi << 32) | lo


def ace_round(s, rc, cfg):
    return AceState(
        simeck_round(s.a, rc[0], cfg), s.b,
        simeck_round(s.c, rc[1], cfg), s.d,
        simeck_round(s.e, rc[2], cfg),
    )


def ace_round_inverse(s, rc, cfg):
    return AceState(
        simeck_round_inverse(s.a, rc[0], cfg), s.b,
        simeck_round_inverse(s.c, rc[1], cfg), s.d,
        simeck_round_inverse(s.e, rc[2], cfg),
    )


def _mix_and_permute(regs, sc, cfg):
    mask = cfg.ace_step_const_mask
    mixed = dict(regs)
    for (target, source), k in zip(cfg.ace_mix_map, sc):
        mixed[target] = regs[target] ^ regs[source] ^ mask ^ k
    return {new: mixed[old] for new, old in zip(ACE_REGISTERS, cfg.ace_register_permutation)}


def _unpermute_and_unmix(regs, sc, cfg):
    mask = cfg.ace_step_const_mask
    mixed = {old: regs[new] for new, old in zip(ACE_REGISTERS, cfg.ace_register_permutation)}
    plain = dict(mixed)
    consts = {t: (s, k) for (t, s), k in zip(cfg.ace_mix_map, sc)}
    for target in _mix_order(cfg.ace_mix_map):
        source, k = consts[target]
        plain[target] = mixed[target] ^ plain[source] ^ mask ^ k
    return plain


def ace_step(s, k, cfg):
    for rc in k.rc:
        s = ace_round(s, rc, cfg)
    return AceState.from_regs(_mix_and_permute(s.regs(), k.sc, cfg))


def ace_step_inverse(s, k, cfg):
    s = AceState.from_regs(_unpermute_and_unmix(s.regs(), k.sc, cfg))
    for rc in reversed(k.rc):
        s = ace_round_inverse(s, rc, cfg)
    return s


def ace_cycle(s, cc, cfg, windows=None):
    """One clock cycle of the p-way datapath: ``len(cc.groups)`` Simeck rounds
    in series on A, C and E, plus the step mixing when ``cc.extra`` is set."""
    rot, const = cfg.simeck_rotations, cfg.simeck_const_template
    a, c, e = s.a, s.c, s.e
    for r0, r1, r2 in cc.groups:
        a = ((_simeck_f(a >> 32, rot) ^ (a & M32) ^ const ^ r0) << 32) | (a >> 32)
        c = ((_simeck_f(c >> 32, rot) ^ (c & M32) ^ const ^ r1) << 32) | (c >> 32)
        e = ((_simeck_f(e >> 32, rot) ^ (e & M32) ^ const ^ r2) << 32) | (e >> 32)
    if not cc.extra:
        return AceState(a, s.b, c, s.d, e)
    sc = step_constants_from_elements(cc.extra + cc.groups[-1], windows or cfg.ace_sc_windows)
    regs = {"A": a, "B": s.b, "C": c, "D": s.d, "E": e}
    return AceState.from_regs(_mix_and_permute(regs, sc, cfg))


def ace_permutation(s, cfg, p=1):
    """All steps of the permutation; the result does not depend on ``p``.

    ``p == 1`` runs step by step from serially generated constants; larger
    degrees run ``8/p`` unrolled cycles per step from the p-way generator.
    """
    check_degree("ace", p)
    if p == 1:
        for k in ace_serial_constants(cfg):
            s = ace_step(s, k, cfg)
        return s
    for cc in ace_cycle_schedule(cfg, p):
        s = ace_cycle(s, cc, cfg)
    return s


def ace_inverse_permutation(s, cfg):
    for k in reversed(ace_serial_constants(cfg)):
        s = ace_step_inverse(s, k, cfg)
    return s
