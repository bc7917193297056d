import json
import random
from importlib import resources

import pytest
from hypothesis import given
from hypothesis import strategies as st

from acewage.config import DEFAULT_CONFIG as CFG
from acewage.constants import UnsupportedDegree
from acewage.hwsim import (
    COLUMNS,
    Idle,
    Inputs,
    Reset,
    ScriptError,
    Send,
    aead_script,
    cycles_per_permutation,
    timing_example_script,
    format_script,
    hash_script,
    parse_script,
    sim_reset,
    sim_run,
    sim_step,
)
from acewage.sponge import AeadRequest, aead, encrypt, hash_state, pad_blocks, tag_words

DEGREES = {"ace": (1, 2, 4, 8), "wage": (1, 2, 3, 4, 6, 8)}
CASES = [(c, p) for c, ps in DEGREES.items() for p in ps]


def low_runs(trace):
    """Lengths of maximal o_ready-low stretches that begin with an accepted block."""
    runs, n, started = [], 0, False
    for r in trace.records:
        if r.i_valid and r.o_ready == 0 and not started:
            started, n = True, 0
        if started:
            if r.o_ready:
                runs.append(n)
                started = False
            else:
                n += 1
    return runs


def expected_outputs(req, cipher, res):
    blocks = pad_blocks(req.payload)
    out = [int.from_bytes(res.output[8 * i: 8 * i + b.nbytes].ljust(8, b"\0"), "big")
           for i, b in enumerate(blocks)] if res.output is not None else []
    return out + tag_words(res.state, CFG)


@pytest.mark.parametrize("c,p,n", [("ace", 1, 128), ("ace", 2, 64), ("ace", 4, 32), ("ace", 8, 16),
                                   ("wage", 1, 112), ("wage", 2, 56), ("wage", 3, 38),
                                   ("wage", 4, 28), ("wage", 6, 19), ("wage", 8, 14)])
def test_cycles_per_permutation(c, p, n):
    assert cycles_per_permutation(c, p) == n


def test_cycles_unsupported():
    with pytest.raises(UnsupportedDegree):
        cycles_per_permutation("wage", 5)


def test_reset_state():
    core = sim_reset("ace", 1, CFG)
    assert core.cycle_total == 0 and core.pcount == 0 and core.phase == "load"
    core, out = sim_step(core, Inputs())
    assert (out.o_ready, out.o_valid) == (1, 0)


@pytest.mark.parametrize("c,p", CASES)
def test_busy_period_per_block(c, p):
    req = AeadRequest(bytes(16), bytes(16), b"ad", bytes(24))
    tr = sim_run(sim_reset(c, p, CFG), aead_script(req, c))
    runs = [x for x in low_runs(tr) if x > 1]  # load words that start no permutation take 1 cycle
    n = cycles_per_permutation(c, p)
    tag_cycles = 2 if c == "ace" else 9
    # the last run also covers the tag emission
    assert runs[:-1] and set(runs[:-1]) == {n}
    assert runs[-1] == n + tag_cycles


def test_wage_serial_has_111_round_cycles():
    req = AeadRequest(bytes(16), bytes(16), b"", bytes(8))
    tr = sim_run(sim_reset("wage", 1, CFG), aead_script(req, "wage"))
    accepts = [i for i, r in enumerate(tr.records) if r.i_valid and r.phase == "data"]
    busy = [r for r in tr.records[accepts[0] + 1:] if r.o_ready == 0 and r.pcount > 0]
    assert len(busy[:111]) == 111 and busy[110].pcount == 111


def test_pcount_wraps_127_to_0():
    tr = sim_run(sim_reset("ace", 1, CFG), timing_example_script())
    pc = [r.pcount for r in tr.records]
    wraps = [i for i in range(1, len(pc)) if pc[i - 1] == 127 and pc[i] == 0]
    assert wraps
    assert max(pc) == 127


@pytest.mark.parametrize("c,p", CASES)
def test_pcount_period(c, p):
    tr = sim_run(sim_reset(c, p, CFG), aead_script(AeadRequest(bytes(16), bytes(16)), c))
    n = cycles_per_permutation(c, p)
    assert max(r.pcount for r in tr.records) == n - 1


@pytest.mark.parametrize("c", ["ace", "wage"])
@pytest.mark.parametrize("k", [0, 1, 7, 100])
def test_stall_invariance(c, k):
    req = AeadRequest(bytes(range(16)), bytes(16), b"abc", b"0123456789")
    base = sim_run(sim_reset(c, 2, CFG), aead_script(req, c))
    tr = sim_run(sim_reset(c, 2, CFG), aead_script(req, c, delays=[k] * 40))
    assert tr.core.state == base.core.state
    assert tr.outputs() == base.outputs()


@pytest.mark.parametrize("c,p", CASES)
@pytest.mark.parametrize("direction", ["encrypt", "decrypt"])
def test_matches_functional_model(c, p, direction):
    r = random.Random(hash((c, p, direction)) & 0xFFFF)
    k, n = r.randbytes(16), r.randbytes(16)
    ad, m = r.randbytes(r.randrange(20)), r.randbytes(r.randrange(30))
    if direction == "encrypt":
        req = AeadRequest(k, n, ad, m)
    else:
        ct, tag = encrypt(k, n, ad, m, c, CFG)
        req = AeadRequest(k, n, ad, ct, "decrypt", tag)
    res = aead(req, c, CFG)
    tr = sim_run(sim_reset(c, p, CFG), aead_script(req, c, delays=[r.randrange(4) for _ in range(50)]))
    assert tr.core.state == res.state
    assert tr.outputs() == expected_outputs(req, c, res)
    assert tr.core.diagnostics == ()


@given(st.binary(max_size=30), st.sampled_from([1, 2, 4, 8]))
def test_hash_matches_functional_model(msg, p):
    st_, words = hash_state(msg, CFG)
    tr = sim_run(sim_reset("ace", p, CFG), hash_script(msg))
    assert tr.outputs() == words and tr.core.state == st_


def test_output_zero_unless_valid():
    tr = sim_run(sim_reset("wage", 3, CFG), aead_script(AeadRequest(bytes(16), bytes(16), b"", b"x" * 9), "wage"))
    assert all(r.o_data == 0 for r in tr.records if not r.o_valid)
    assert all(r.phase in ("data", "tag") for r in tr.records if r.o_valid)


def test_empty_script_is_idle():
    tr = sim_run(sim_reset("ace", 1, CFG), [])
    assert tr.records and all(r.o_ready == 1 and not r.o_valid for r in tr.records)


def test_cycle_indices_increase_by_one():
    tr = sim_run(sim_reset("ace", 4, CFG), timing_example_script())
    assert [r.cycle for r in tr.records] == list(range(len(tr.records)))


def test_valid_while_busy_is_diagnosed():
    core = sim_reset("ace", 1, CFG)
    for _ in range(3):
        core, _ = sim_step(core, Inputs(i_valid=1, i_data=1))
    core, _ = sim_step(core, Inputs(i_valid=1, i_data=1))  # fourth load word starts a permutation
    assert core.busy
    core, _ = sim_step(core, Inputs(i_valid=1, i_data=5))
    assert core.diagnostics and "not ready" in core.diagnostics[-1][1]


def test_reset_mid_permutation_returns_to_idle():
    core = sim_reset("wage", 1, CFG)
    for _ in range(9):
        core, _ = sim_step(core, Inputs(i_valid=1))
    assert core.busy
    core, out = sim_step(core, Inputs(reset=1))
    assert not core.busy and core.phase == "load" and out.o_ready == 0
    core, out = sim_step(core, Inputs())
    assert out.o_ready == 1


def test_wrong_phase_block_is_diagnosed():
    script = aead_script(AeadRequest(bytes(16), bytes(16)), "ace")
    script = script[:5] + [Send(0, 1, 0, 0)] + script[5:]
    tr = sim_run(sim_reset("ace", 1, CFG), script)
    assert any("unexpected domain separator" in m for _, m in tr.core.diagnostics)


def test_wage_rejects_hash_mode():
    core = sim_reset("wage", 1, CFG)
    core, _ = sim_step(core, Inputs(i_mode=2, i_valid=1))
    assert core.diagnostics


def test_unsupported_degree():
    with pytest.raises(UnsupportedDegree):
        sim_reset("ace", 3, CFG)


def test_script_round_trip_and_errors():
    items = [Reset(1), Send(1, 2, 1, 0xAB, 3), Idle(4)]
    assert parse_script(format_script(items)) == items
    assert parse_script("# only a comment\n\n") == []
    with pytest.raises(ScriptError) as e:
        parse_script("idle 2\nsend mode=0 foo=1\n")
    assert e.value.line == 2
    with pytest.raises(ScriptError):
        parse_script("jump 3")
    with pytest.raises(ScriptError):
        parse_script("send mode=zz")


def test_trace_exports():
    tr = sim_run(sim_reset("ace", 8, CFG), timing_example_script())
    lines = tr.to_text().splitlines()
    assert lines[0].split()[:len(COLUMNS)] == list(COLUMNS)
    assert len(lines) == len(tr.records) + 1
    doc = json.loads(tr.to_json())
    assert len(doc) == len(tr.records) and set(COLUMNS) <= set(doc[0])


def test_bundled_example_reproduces_documented_trace():
    data = resources.files("acewage.data")
    script = parse_script(data.joinpath("timing_example.script").read_text())
    tr = sim_run(sim_reset("ace", 1, CFG), script)
    assert tr.to_text() == data.joinpath("timing_example.trace").read_text()
    # two payload blocks: each ready -> valid -> o_valid in the same cycle, then 128 busy cycles
    payload = [r for r in tr.records if r.i_valid and r.i_dom_sep == 2]
    assert len(payload) == 2 and all(r.o_valid for r in payload)
    i = tr.records.index(payload[0])
    assert tr.records[i - 1].o_ready == 1
    assert all(r.o_ready == 0 for r in tr.records[i:i + 128])
    assert tr.records[i + 127].pcount == 127 and tr.records[i + 128].o_ready == 1
