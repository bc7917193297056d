"""Round and step constants from the 7-bit constant LFSRs.

Sequence semantics: an :class:`LfsrState` at position ``i`` holds elements
``q_i .. q_{i+6}`` (bit ``k`` is ``q_{i+k}``).  One feedback produces
``q_{i+7}`` and moves to position ``i+1``; the "emitted" bits of a step are
the feedback values, so the serial stream is ``q_7, q_8, ...``.

ACE consumes three feedbacks per round (the round constants of A, C and E).
At the last round of a step the seven state bits together with that round's
three feedbacks form ten consecutive elements, from which the three 8-bit
step constants are cut.  WAGE consumes two feedbacks per round; its two
7-bit constants are the state before and after the first feedback.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

ACE_DEGREES = (1, 2, 4, 8)
WAGE_DEGREES = (1, 2, 3, 4, 6, 8)


class UnsupportedDegree(ValueError):
    pass


def check_degree(cipher, p):
    allowed = ACE_DEGREES if cipher == "ace" else WAGE_DEGREES
    if cipher not in ("ace", "wage"):
        raise ValueError(f"unknown cipher {cipher!r}")
    if p not in allowed:
        raise UnsupportedDegree(f"{cipher} supports p in {allowed}, got {p!r}")


@dataclass(frozen=True)
class LfsrState:
    spec: object
    state: int

    @classmethod
    def seeded(cls, spec):
        return cls(spec, spec.initial_state)

    def bits(self):
        return tuple((self.state >> k) & 1 for k in range(self.spec.width))


@dataclass(frozen=True)
class AceStepConstants:
    rc: tuple  # eight (rc0, rc1, rc2) triples
    sc: tuple  # (sc0, sc1, sc2), 8 bits each


@dataclass(frozen=True)
class CycleConstants:
    """Constants generated in one clock cycle of a p-way datapath.

    ``groups`` holds one triple (ACE) or ``(rc1, rc0)`` pair (WAGE) per
    unrolled round; ``extra`` holds the seven additional ACE bits needed on
    the last cycle of a step.
    """

    groups: tuple
    extra: tuple = ()
    cipher: str = "ace"

    @property
    def bit_count(self):
        """Constant bits produced this cycle (WAGE: feedbacks)."""
        per_round = 3 if self.cipher == "ace" else 2
        return per_round * len(self.groups) + len(self.extra)


def lfsr_step(l, feedback_count=1):
    """Advance by ``feedback_count`` feedbacks; return the new state and bits."""
    if feedback_count < 1:
        raise ValueError("feedback_count must be >= 1")
    w, taps, s = l.spec.width, l.spec.taps, l.state
    out = []
    for _ in range(feedback_count):
        fb = 0
        for t in taps:
            fb ^= (s >> t) & 1
        out.append(fb)
        s = (s >> 1) | (fb << (w - 1))
    return LfsrState(l.spec, s), tuple(out)


def ace_round_constants(l):
    l, bits = lfsr_step(l, 3)
    return l, bits


def step_constants_from_elements(elements, windows=(0, 1, 2)):
    """Cut three 8-bit constants out of ten consecutive sequence elements.

    Element ``w + k`` becomes bit ``k`` of the constant with window offset ``w``.
    """
    if len(elements) != 10:
        raise ValueError("need 10 sequence elements")
    return tuple(sum(elements[w + k] << k for k in range(8)) for w in windows)


def ace_step_constants(l, rounds=8, windows=(0, 1, 2)):
    rc = []
    for r in range(rounds):
        if r == rounds - 1:
            window = l.bits()
        l, triple = ace_round_constants(l)
        rc.append(triple)
    sc = step_constants_from_elements(window + rc[-1], windows)
    return l, AceStepConstants(tuple(rc), sc)


def wage_round_constants(l):
    """Return the state advanced two feedbacks and ``(rc1, rc0)``."""
    rc0 = l.state
    l, _ = lfsr_step(l, 1)
    rc1 = l.state
    l, _ = lfsr_step(l, 1)
    return l, (rc1, rc0)


def _unrolled_sequence(l, count):
    """State bits followed by ``count`` feedbacks, each computed from the
    cycle-start state by its own replicated feedback function."""
    seq = list(l.bits())
    for j in range(count):
        fb = 0
        for t in l.spec.taps:
            fb ^= seq[j + t]
        seq.append(fb)
    return seq


def parallel_constants(l, p, cipher="ace", close_step=False, rounds=None):
    """Constants for one cycle of a p-way unrolled permutation.

    ``rounds`` (default ``p``) lets the last WAGE cycle run short.  For ACE,
    ``close_step`` marks the final cycle of a step, which also emits the seven
    extra elements used for the step constants.
    """
    check_degree(cipher, p)
    n = p if rounds is None else rounds
    w = l.spec.width
    if cipher == "ace":
        seq = _unrolled_sequence(l, 3 * n)
        groups = tuple(tuple(seq[w + 3 * k: w + 3 * k + 3]) for k in range(n))
        extra = tuple(seq[3 * (n - 1): 3 * (n - 1) + 7]) if close_step else ()
        new = sum(b << k for k, b in enumerate(seq[3 * n: 3 * n + w]))
        return LfsrState(l.spec, new), CycleConstants(groups, extra)
    seq = _unrolled_sequence(l, 2 * n)

    def pack(start):
        return sum(b << k for k, b in enumerate(seq[start: start + w]))

    groups = tuple((pack(2 * k + 1), pack(2 * k)) for k in range(n))
    return LfsrState(l.spec, pack(2 * n)), CycleConstants(groups, cipher="wage")


@lru_cache(maxsize=32)
def ace_cycle_schedule(cfg, p):
    """Per-cycle constant bundles for one ACE permutation at degree ``p``."""
    check_degree("ace", p)
    l = LfsrState.seeded(cfg.ace_const_lfsr)
    per_step = cfg.ace_rounds_per_step // p
    out = []
    for _ in range(cfg.ace_steps):
        for c in range(per_step):
            l, cc = parallel_constants(l, p, "ace", close_step=(c == per_step - 1))
            out.append(cc)
    return tuple(out)


@lru_cache(maxsize=32)
def wage_cycle_schedule(cfg, p):
    """Per-cycle constant bundles for one WAGE permutation evaluated as
    ``ceil(rounds/p)`` compositions of up to ``p`` rounds."""
    check_degree("wage", p)
    l = LfsrState.seeded(cfg.wage_const_lfsr)
    out, left = [], cfg.wage_rounds
    while left:
        n = min(p, left)
        l, cc = parallel_constants(l, p, "wage", rounds=n)
        out.append(cc)
        left -= n
    return tuple(out)


@lru_cache(maxsize=32)
def ace_serial_constants(cfg):
    """The 16 step-constant records of one permutation (LFSR reseeded per call)."""
    l = LfsrState.seeded(cfg.ace_const_lfsr)
    steps = []
    for _ in range(cfg.ace_steps):
        l, k = ace_step_constants(l, cfg.ace_rounds_per_step, cfg.ace_sc_windows)
        steps.append(k)
    return tuple(steps)


@lru_cache(maxsize=32)
def wage_serial_constants(cfg):
    l = LfsrState.seeded(cfg.wage_const_lfsr)
    pairs = []
    for _ in range(cfg.wage_rounds):
        l, pair = wage_round_constants(l)
        pairs.append(pair)
    return tuple(pairs)

