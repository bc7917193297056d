"""Cycle model of the ACE/WAGE top-level module and its valid-bit protocol.

One call to :func:`sim_step` is one rising clock edge.  A block is accepted
on a cycle where the core is idle and ``i_valid`` is high; that cycle also
absorbs the block, drives the payload output and computes the first slot of
the following permutation, so ``o_ready`` is already low on it.  ``pcount``
then walks through the remaining cycles of the permutation and wraps to 0.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace

from .ace import AceState, ace_cycle
from .config import DEFAULT_CONFIG
from .constants import LfsrState, check_degree, parallel_constants
from .sponge import (
    AeadRequest,
    M64,
    apply_domain_separator,
    apply_padding_flag,
    extract_rate,
    inject_rate,
    key_words,
    load_hash_iv,
    pad_blocks,
    pad_word,
    padded_prefix_mask,
    rate_view,
    wage_load_words,
    wage_shift_in,
    wage_tag_shift_step,
)
from .wage import WageState, wage_cycle

MODE_ENC, MODE_DEC, MODE_HASH, MODE_SQUEEZE = 0, 1, 2, 3


def cycles_per_permutation(cipher, p, cfg=DEFAULT_CONFIG):
    """ACE: rounds/p.  WAGE: ceil((rounds + 1)/p), the extra slot being I/O."""
    check_degree(cipher, p)
    if cipher == "ace":
        return cfg.ace_steps * cfg.ace_rounds_per_step // p
    return -(-(cfg.wage_rounds + 1) // p)


def load_cycles(cipher, cfg=DEFAULT_CONFIG):
    if cipher == "ace":
        return 4
    return max(length for _, _, length in cfg.wage_load_regions)


@dataclass(frozen=True)
class Inputs:
    reset: int = 0
    i_mode: int = 0
    i_dom_sep: int = 0
    i_padding: int = 0
    i_valid: int = 0
    i_data: int = 0


@dataclass(frozen=True)
class Outputs:
    o_ready: int = 0
    o_valid: int = 0
    o_data: int = 0


@dataclass(frozen=True)
class SimCore:
    cipher: str
    p: int
    cfg: object
    state: object
    pcount: int = 0
    phase: str = "load"  # load, init, data, final, tag, hash, squeeze, done
    const_lfsr: LfsrState | None = None
    cycle_total: int = 0
    busy: bool = False
    pending: tuple = ()  # remaining init/final schedule items
    loaded: int = 0
    squeezes: int = 0
    emit: tuple = ()  # tag words still to send (ACE)
    tag_t: int = -1  # WAGE shift-out cycle, -1 when not emitting
    diagnostics: tuple = ()

    @property
    def ready(self):
        """True when the next cycle can accept a block."""
        return (not self.busy and self.tag_t < 0 and not self.emit
                and not (self.pending and self.pending[0] == "perm")
                and self.phase not in ("tag", "done"))


def sim_reset(cipher, p, cfg=DEFAULT_CONFIG, mode=MODE_ENC):
    check_degree(cipher, p)
    if cipher == "ace" and mode & 2:
        pending = ("perm",) if cfg.hash_init_permute else ()
        return SimCore(cipher, p, cfg, load_hash_iv(cfg), phase="hash", pending=pending)
    state = AceState() if cipher == "ace" else WageState()
    return SimCore(cipher, p, cfg, state)


# -- permutation datapath -------------------------------------------------------

def _perm_cycle(core):
    """Evaluate the rounds scheduled for slot ``core.pcount`` and advance it."""
    cfg, p, k = core.cfg, core.p, core.pcount
    total = cycles_per_permutation(core.cipher, p, cfg)
    lfsr = core.const_lfsr
    if k == 0:
        lfsr = LfsrState.seeded(cfg.ace_const_lfsr if core.cipher == "ace" else cfg.wage_const_lfsr)
    state = core.state
    if core.cipher == "ace":
        per_step = cfg.ace_rounds_per_step // p
        lfsr, cc = parallel_constants(lfsr, p, "ace", close_step=(k % per_step == per_step - 1))
        state = ace_cycle(state, cc, cfg)
    else:
        lo, hi = max(k * p, 1), min(k * p + p, cfg.wage_rounds + 1)
        if hi > lo:
            lfsr, cc = parallel_constants(lfsr, p, "wage", rounds=hi - lo)
            state = wage_cycle(state, cc.groups, cfg)
    if k + 1 == total:
        return _after_perm(replace(core, state=state, const_lfsr=lfsr, pcount=0, busy=False))
    return replace(core, state=state, const_lfsr=lfsr, pcount=k + 1, busy=True)


def _start_perm(core):
    return _perm_cycle(replace(core, pcount=0, busy=True))


def _after_perm(core):
    if core.pending and core.pending[0] == "perm":
        return core
    if core.phase == "init" and not core.pending:
        return replace(core, phase="data")
    if core.phase == "final" and not core.pending:
        return _begin_tag(core)
    return core


def _begin_tag(core):
    if core.cipher == "ace":
        words = (core.state.a, core.state.c)
        return replace(core, phase="tag", emit=words if core.cfg.tag_msw_first else words[::-1])
    return replace(core, phase="tag", tag_t=0)


def _continue_schedule(core):
    if core.pending and core.pending[0] == "perm":
        return _start_perm(replace(core, pending=core.pending[1:]))
    return _after_perm(core)


# -- block acceptance -----------------------------------------------------------

def _note(core, msg):
    return replace(core, diagnostics=core.diagnostics + ((core.cycle_total, msg),))


def _accept_load(core, inp):
    t = core.loaded
    if core.cipher == "ace":
        reg = ("a", "c", "b", "e")[t]
        core = replace(core, state=replace(core.state, **{reg: inp.i_data & M64}))
        if t == 0:
            core = replace(core, state=replace(core.state, d=0))
    else:
        stages = list(core.state.s)
        wage_shift_in(stages, inp.i_data, t, core.cfg)
        core = replace(core, state=WageState(tuple(stages)))
    core = replace(core, loaded=t + 1)
    if t + 1 < load_cycles(core.cipher, core.cfg):
        return core, Outputs()
    core = replace(core, phase="init", loaded=0, pending=tuple(core.cfg.ace_init_final_schedule.init))
    return _continue_schedule(core), Outputs()


def _role(cfg, ds):
    for name, value in cfg.domain_separators:
        if value == ds:
            return name
    return None


def _accept_block(core, inp):
    cfg = core.cfg
    rv = rate_view(core.cipher, cfg)
    role = _role(cfg, inp.i_dom_sep)
    if role == "final" and core.phase == "data":
        core = replace(core, phase="final", pending=tuple(cfg.ace_init_final_schedule.final))
    if core.phase in ("init", "final"):
        want = "init" if core.phase == "init" else "final"
        if role != want or not core.pending:
            return _note(core, f"unexpected domain separator {inp.i_dom_sep} in {core.phase}"), Outputs()
        state = inject_rate(core.state, rv, inp.i_data & M64, "absorb")
        state = apply_domain_separator(state, inp.i_dom_sep, cfg)
        core = replace(core, state=state, pending=core.pending[1:])
        return _continue_schedule(core), Outputs()
    if role == "ad":
        state = inject_rate(core.state, rv, inp.i_data & M64, "absorb")
        out = Outputs()
    elif role == "payload":
        data = inp.i_data & M64
        rate = extract_rate(core.state, rv)
        o = rate ^ data
        if inp.i_padding:
            o &= padded_prefix_mask(data)
        out = Outputs(o_valid=1, o_data=o)
        if inp.i_mode & 1 == MODE_ENC:
            state = inject_rate(core.state, rv, data, "absorb")
        elif inp.i_padding:
            low = (data & -data).bit_length() - 1
            nbytes = (63 - low) // 8
            state = inject_rate(core.state, rv, pad_word(o, nbytes), "absorb")
        else:
            state = inject_rate(core.state, rv, data, "replace")
    else:
        return _note(core, f"unexpected domain separator {inp.i_dom_sep} in {core.phase}"), Outputs()
    state = apply_domain_separator(state, inp.i_dom_sep, cfg)
    state = apply_padding_flag(state, bool(inp.i_padding), cfg)
    return _start_perm(replace(core, state=state)), out


def _accept_hash(core, inp):
    cfg = core.cfg
    rv = rate_view("ace", cfg)
    if inp.i_mode == MODE_HASH and core.phase == "hash":
        state = inject_rate(core.state, rv, inp.i_data & M64, "absorb")
        state = apply_padding_flag(state, bool(inp.i_padding), cfg)
        return _start_perm(replace(core, state=state)), Outputs()
    if inp.i_mode == MODE_SQUEEZE:
        out = Outputs(o_valid=1, o_data=extract_rate(core.state, rv))
        n = core.squeezes + 1
        core = replace(core, phase="squeeze", squeezes=n)
        if n < cfg.hash_squeeze_blocks:
            return _start_perm(core), out
        return replace(core, phase="done"), out
    return _note(core, f"mode {inp.i_mode} not accepted in {core.phase}"), Outputs()


def _accept(core, inp):
    if core.phase == "load":
        if core.cipher == "wage" and inp.i_mode & 2:
            core = _note(core, "WAGE has no hash mode; bit 1 of i_mode ignored")
        return _accept_load(core, inp)
    if core.phase in ("hash", "squeeze"):
        return _accept_hash(core, inp)
    return _accept_block(core, inp)


# -- clock -------------------------------------------------------------------------

def sim_step(core, inp=Inputs()):
    """One clock cycle; returns the updated core and this cycle's outputs."""
    if inp.reset:
        new = sim_reset(core.cipher, core.p, core.cfg, inp.i_mode)
        return replace(new, cycle_total=core.cycle_total + 1, diagnostics=core.diagnostics), Outputs()
    busy_valid = inp.i_valid and not core.ready
    if core.busy:
        core, out = _perm_cycle(core), Outputs()
    elif core.emit:
        out = Outputs(o_valid=1, o_data=core.emit[0])
        core = replace(core, emit=core.emit[1:])
        if not core.emit:
            core = replace(core, phase="load")
    elif core.tag_t >= 0:
        stages = list(core.state.s)
        word = wage_tag_shift_step(stages, core.tag_t, core.cfg)
        t = core.tag_t + 1
        done = t >= max(length for _, _, length in core.cfg.wage_tag_regions)
        core = replace(core, state=WageState(tuple(stages)), tag_t=-1 if done else t,
                       phase="load" if done else "tag")
        out = Outputs(o_valid=1, o_data=word)
    elif core.pending and core.pending[0] == "perm":
        core, out = _start_perm(replace(core, pending=core.pending[1:])), Outputs()
    elif core.phase == "done":
        out = Outputs()
    elif inp.i_valid:
        core, out = _accept(core, inp)
    else:
        out = Outputs(o_ready=1)
    if busy_valid:
        core = _note(core, "i_valid while not ready; input dropped")
    return replace(core, cycle_total=core.cycle_total + 1), out


# -- scripts and traces ----------------------------------------------------------------

@dataclass(frozen=True)
class Reset:
    mode: int = 0


@dataclass(frozen=True)
class Send:
    mode: int = 0
    ds: int = 0
    pad: int = 0
    data: int = 0
    delay: int = 0


@dataclass(frozen=True)
class Idle:
    cycles: int = 1


@dataclass(frozen=True)
class TraceRecord:
    cycle: int
    reset: int
    i_mode: int
    i_dom_sep: int
    i_padding: int
    i_valid: int
    i_data: int
    o_ready: int
    o_valid: int
    o_data: int
    pcount: int
    phase: str
    note: str = ""


@dataclass
class ProtocolTrace:
    records: list = field(default_factory=list)
    core: SimCore | None = None

    def outputs(self):
        """Words on ``o_data`` for every cycle with ``o_valid`` high."""
        return [r.o_data for r in self.records if r.o_valid]

    def to_text(self):
        return trace_to_text(self)

    def to_json(self):
        return trace_to_json(self)


COLUMNS = ("cycle", "reset", "i_mode", "i_dom_sep", "i_padding", "i_valid", "i_data",
           "o_ready", "o_valid", "o_data", "pcount", "phase")

MAX_WAIT = 1 << 16


def _record(trace, core_before, inp, out, core_after):
    notes = core_after.diagnostics[len(core_before.diagnostics):]
    trace.records.append(TraceRecord(
        core_before.cycle_total, inp.reset, inp.i_mode, inp.i_dom_sep, inp.i_padding,
        inp.i_valid, inp.i_data, out.o_ready, out.o_valid, out.o_data,
        core_before.pcount, core_before.phase, "; ".join(m for _, m in notes),
    ))


def _clock(trace, core, inp):
    new, out = sim_step(core, inp)
    _record(trace, core, inp, out, new)
    return new


def _settle(trace, core):
    """Clock idle cycles until the core has shown ``o_ready`` (or finished).

    The environment reacts to ``o_ready`` on the cycle after it sees it.
    """
    for _ in range(MAX_WAIT):
        if core.phase == "done" or (core.ready and trace.records and trace.records[-1].o_ready):
            return core
        core = _clock(trace, core, Inputs())
    raise RuntimeError("core never became ready")


def sim_run(core, script, drain=True):
    """Drive ``core`` through a script of Reset/Send/Idle items.

    For each Send the environment waits for a cycle with ``o_ready`` high,
    idles ``delay`` more cycles, then presents the block with ``i_valid``
    for one cycle.  With ``drain`` the run continues until the core is quiescent.
    """
    trace = ProtocolTrace()
    for item in script:
        if isinstance(item, Reset):
            core = _clock(trace, core, Inputs(reset=1, i_mode=item.mode))
        elif isinstance(item, Idle):
            for _ in range(item.cycles):
                core = _clock(trace, core, Inputs())
        elif isinstance(item, Send):
            core = _settle(trace, core)
            for _ in range(item.delay):
                core = _clock(trace, core, Inputs())
            core = _clock(trace, core, Inputs(0, item.mode, item.ds, item.pad, 1, item.data))
        else:
            raise TypeError(f"unknown script item {item!r}")
    if drain:
        core = _settle(trace, core)
    trace.core = core
    return trace


def aead_script(req, cipher, cfg=DEFAULT_CONFIG, delays=None, reset=True):
    """The block sequence an environment sends for one AEAD request.

    ``delays`` is an optional iterator of per-block stall lengths.
    """
    delays = iter(delays) if delays is not None else None
    mode = MODE_ENC if req.direction == "encrypt" else MODE_DEC

    def d():
        return next(delays, 0) if delays is not None else 0

    out = [Reset(mode)] if reset else []
    if cipher == "ace":
        load = [*key_words(req.key), *key_words(req.nonce)]
    else:
        load = wage_load_words(req.key, req.nonce, cfg)
    out += [Send(mode, 0, 0, w, d()) for w in load]
    kw = dict(zip(("k0", "k1"), key_words(req.key)))
    sched = cfg.ace_init_final_schedule
    out += [Send(mode, cfg.ds("init"), 0, kw[i], d()) for i in sched.init if i != "perm"]
    out += [Send(mode, cfg.ds("ad"), int(b.padded), b.bits, d()) for b in pad_blocks(req.associated_data)]
    out += [Send(mode, cfg.ds("payload"), int(b.padded), b.bits, d()) for b in pad_blocks(req.payload)]
    out += [Send(mode, cfg.ds("final"), 0, kw[i], d()) for i in sched.final if i != "perm"]
    return out


def hash_script(message, cfg=DEFAULT_CONFIG, delays=None):
    delays = iter(delays) if delays is not None else None

    def d():
        return next(delays, 0) if delays is not None else 0

    out = [Reset(MODE_HASH)]
    out += [Send(MODE_HASH, 0, int(b.padded), b.bits, d()) for b in pad_blocks(message)]
    out += [Send(MODE_SQUEEZE, 0, 0, 0, d()) for _ in range(cfg.hash_squeeze_blocks)]
    return out


def timing_example_script():
    """Two payload blocks of an ACE encryption with no associated data."""
    req = AeadRequest(bytes(range(16)), bytes(range(16, 32)), b"", bytes(range(32, 48)))
    return aead_script(req, "ace")


# -- script text format -----------------------------------------------------------

class ScriptError(ValueError):
    def __init__(self, line, msg):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def _int(text):
    return int(text, 0)


def parse_script(text):
    """Parse ``reset``, ``send`` and ``idle`` lines; ``#`` starts a comment."""
    items = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "idle":
                if len(rest) != 1:
                    raise ValueError("idle takes one cycle count")
                items.append(Idle(_int(rest[0])))
                continue
            kv = {}
            for tok in rest:
                key, sep, val = tok.partition("=")
                if not sep:
                    raise ValueError(f"expected key=value, got {tok!r}")
                kv[key] = _int(val)
            if head == "reset":
                items.append(Reset(**kv))
            elif head == "send":
                items.append(Send(**kv))
            else:
                raise ValueError(f"unknown command {head!r}")
        except (TypeError, ValueError) as e:
            raise ScriptError(n, str(e)) from None
    return items


def format_script(items):
    lines = []
    for it in items:
        if isinstance(it, Reset):
            lines.append(f"reset mode={it.mode}")
        elif isinstance(it, Idle):
            lines.append(f"idle {it.cycles}")
        else:
            lines.append(f"send mode={it.mode} ds={it.ds} pad={it.pad} "
                         f"data=0x{it.data:016x} delay={it.delay}")
    return "\n".join(lines) + "\n"


def trace_to_text(trace):
    lines = [" ".join(COLUMNS) + " note"]
    for r in trace.records:
        lines.append(
            f"{r.cycle} {r.reset} {r.i_mode} {r.i_dom_sep} {r.i_padding} {r.i_valid} "
            f"{r.i_data:016x} {r.o_ready} {r.o_valid} {r.o_data:016x} {r.pcount} {r.phase}"
            + (f" # {r.note}" if r.note else "")
        )
    return "\n".join(lines) + "\n"


def trace_to_json(trace):
    return json.dumps([asdict(r) for r in trace.records], indent=None, separators=(",", ":"))
