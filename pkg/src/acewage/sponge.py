"""Unified duplex sponge mode shared by ACE and WAGE, plus ACE-Hash.

Blocks are 64-bit words read most significant bit first.  A rate view lists
the 64 global state bits a block touches, in block order.  Global bit
numbering: ACE bit ``64*r + j`` is bit ``j`` of register ``r`` (A=0 .. E=4);
WAGE bit ``7*i + j`` is bit ``j`` of stage ``S_i``.
"""

from __future__ import annotations

import hmac
from dataclasses import dataclass
from functools import lru_cache

from .ace import AceState, ace_permutation
from .config import ACE_REGISTERS, DEFAULT_CONFIG
from .wage import WageState, wage_permutation

M64 = (1 << 64) - 1
CIPHERS = ("ace", "wage")


@dataclass(frozen=True)
class Block:
    bits: int
    padded: bool = False
    nbytes: int = 8

    def __post_init__(self):
        if self.padded and self.nbytes >= 8:
            raise ValueError("a padded block carries fewer than 8 bytes")


@dataclass(frozen=True)
class RateView:
    cipher: str
    positions: tuple

    def __post_init__(self):
        if len(self.positions) != 64 or len(set(self.positions)) != 64:
            raise ValueError("a rate view has exactly 64 distinct positions")


@dataclass(frozen=True)
class AeadRequest:
    key: bytes
    nonce: bytes
    associated_data: bytes = b""
    payload: bytes = b""
    direction: str = "encrypt"
    tag: bytes | None = None

    def __post_init__(self):
        if len(self.key) != 16 or len(self.nonce) != 16:
            raise ValueError("key and nonce must be 16 bytes each")
        if self.direction not in ("encrypt", "decrypt"):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.direction == "decrypt" and (self.tag is None or len(self.tag) != 16):
            raise ValueError("decryption needs a 16-byte tag")


@dataclass(frozen=True)
class AeadResult:
    output: bytes | None  # None when decryption fails verification
    tag: bytes
    verified: bool | None  # None for encryption
    state: object


def cipher_of(state):
    return "ace" if isinstance(state, AceState) else "wage"


def _from_int(cipher, x):
    return AceState.from_int(x) if cipher == "ace" else WageState.from_int(x)


def permute(state, cfg=DEFAULT_CONFIG, p=1):
    if isinstance(state, AceState):
        return ace_permutation(state, cfg, p)
    return wage_permutation(state, cfg, p)


# -- blocks -----------------------------------------------------------------

def pad_blocks(data):
    """Split into 64-bit blocks; a short final block gets 10* padding."""
    out = []
    for i in range(0, len(data), 8):
        chunk = data[i:i + 8]
        n = len(chunk)
        word = int.from_bytes(chunk.ljust(8, b"\0"), "big")
        if n < 8:
            word |= 1 << (63 - 8 * n)
        out.append(Block(word, n < 8, n))
    return out


def pad_word(word, nbytes):
    """Keep the first ``nbytes`` of ``word`` and append the 10* pad."""
    if nbytes >= 8:
        return word
    keep = M64 ^ ((1 << (64 - 8 * nbytes)) - 1)
    return (word & keep) | (1 << (63 - 8 * nbytes))


def padded_prefix_mask(word):
    """Mask of the data bits above the 10* marker (lowest set bit) of ``word``."""
    if word == 0:
        return 0
    low = word & -word
    return M64 ^ ((low << 1) - 1)


def word_to_bytes(word, nbytes=8):
    return word.to_bytes(8, "big")[:nbytes]


# -- rate, separator, padding flag -------------------------------------------

@lru_cache(maxsize=64)
def rate_view(cipher, cfg=DEFAULT_CONFIG):
    pos = []
    if cipher == "ace":
        for reg, byte in cfg.rate_bytes_ace:
            base = 64 * ACE_REGISTERS.index(reg) + 8 * byte
            pos.extend(base + 7 - i for i in range(8))
    else:
        for stage, nbits in cfg.wage_rate_stages:
            pos.extend(7 * stage + nbits - 1 - i for i in range(nbits))
    return RateView(cipher, tuple(pos))


@lru_cache(maxsize=64)
def _rate_mask(rv):
    m = 0
    for p in rv.positions:
        m |= 1 << p
    return m


def _spread(rv, word):
    x = 0
    for i, p in enumerate(rv.positions):
        x |= ((word >> (63 - i)) & 1) << p
    return x


def extract_rate(state, rv):
    x = state.to_int()
    w = 0
    for p in rv.positions:
        w = (w << 1) | ((x >> p) & 1)
    return w


def inject_rate(state, rv, word, mode="absorb"):
    x = state.to_int()
    if mode == "absorb":
        x ^= _spread(rv, word)
    elif mode == "replace":
        x = (x & ~_rate_mask(rv)) | _spread(rv, word)
    else:
        raise ValueError(f"unknown inject mode {mode!r}")
    return _from_int(rv.cipher, x)


def _xor_bits(state, positions, value):
    delta = 0
    for k, p in enumerate(positions):
        delta |= ((value >> k) & 1) << p
    if not delta:
        return state
    return _from_int(cipher_of(state), state.to_int() ^ delta)


def apply_domain_separator(state, ds, cfg=DEFAULT_CONFIG):
    if isinstance(state, AceState):
        return _xor_bits(state, cfg.ace_domain_sep_positions, ds)
    return _xor_bits(state, cfg.wage_domain_sep_positions, ds)


def apply_padding_flag(state, padded, cfg=DEFAULT_CONFIG):
    """Mark a padded block in the capacity so that M and M||10* differ."""
    if not padded:
        return state
    if isinstance(state, AceState):
        return _xor_bits(state, (cfg.ace_padding_flag_position,), 1)
    return _xor_bits(state, (cfg.wage_padding_flag_position,), 1)


# -- loading and tag extraction ------------------------------------------------

def key_words(key):
    k = int.from_bytes(key, "big")
    return k >> 64, k & M64


def _wage_chunks(key, nonce):
    x = (int.from_bytes(key, "big") << 131) | (int.from_bytes(nonce, "big") << 3)
    return [(x >> (7 * j)) & 0x7F for j in range(37)]


def wage_load_direct(key, nonce):
    """Direct placement: S_j is 7-bit chunk j of K || N || 000 (S_36 on top)."""
    return WageState(tuple(_wage_chunks(key, nonce)))


def wage_load_words(key, nonce, cfg=DEFAULT_CONFIG):
    """The load-cycle words: fragment of each region packed into the low bits,
    first region most significant."""
    chunks = _wage_chunks(key, nonce)
    regions = cfg.wage_load_regions
    cycles = max(length for _, _, length in regions)
    words = []
    for t in range(cycles):
        w = 0
        for _, entry, length in regions:
            frag = chunks[entry - length + 1 + t] if t < length else 0
            w = (w << 7) | frag
        words.append(w)
    return words


def wage_shift_in(stages, word, t, cfg=DEFAULT_CONFIG):
    """One load cycle: every region still loading shifts down and takes its
    fragment at the entry stage.  ``stages`` is modified in place."""
    regions = cfg.wage_load_regions
    n = len(regions)
    for r, (_, entry, length) in enumerate(regions):
        if t >= length:
            continue
        base = entry - length + 1
        stages[base:entry] = stages[base + 1:entry + 1]
        stages[entry] = (word >> (7 * (n - 1 - r))) & 0x7F


def wage_load_shift_in(key, nonce, cfg=DEFAULT_CONFIG):
    stages = [0] * 37
    for t, w in enumerate(wage_load_words(key, nonce, cfg)):
        wage_shift_in(stages, w, t, cfg)
    return WageState(tuple(stages))


def load_ae(key, nonce, cipher, cfg=DEFAULT_CONFIG):
    if cipher == "ace":
        k0, k1 = key_words(key)
        n0, n1 = key_words(nonce)
        return AceState(a=k0, b=n0, c=k1, d=0, e=n1)
    if cipher == "wage":
        return wage_load_shift_in(key, nonce, cfg)
    raise ValueError(f"unknown cipher {cipher!r}")


def load_hash_iv(cfg=DEFAULT_CONFIG):
    regs = dict.fromkeys(ACE_REGISTERS, 0)
    for reg, byte, value in cfg.hash_iv_bytes:
        regs[reg] |= value << (8 * byte)
    return AceState.from_regs(regs)


def wage_tag_direct(state, cfg=DEFAULT_CONFIG):
    chunks = [state.s[exit_ + j] for _, exit_, length in cfg.wage_tag_regions for j in range(length)]
    x = 0
    for c in chunks:
        x = (x << 7) | c
    return x >> (7 * len(chunks) - 128)


def wage_tag_shift_step(stages, t, cfg=DEFAULT_CONFIG):
    """One shift-out cycle; returns the output word with each fragment at its
    O_k port slot.  Regions rotate, so the state is restored once every
    region has been emitted in full."""
    word = 0
    for port, exit_, length in cfg.wage_tag_regions:
        if t >= length:
            continue
        top = exit_ + length - 1
        out = stages[exit_]
        stages[exit_:top] = stages[exit_ + 1:top + 1]
        stages[top] = out
        word |= out << (7 * port)
    return word


def wage_tag_words(state, cfg=DEFAULT_CONFIG):
    stages = list(state.s)
    cycles = max(length for _, _, length in cfg.wage_tag_regions)
    return [wage_tag_shift_step(stages, t, cfg) for t in range(cycles)]


def wage_tag_from_words(words, cfg=DEFAULT_CONFIG):
    x, nbits = 0, 0
    for port, _, length in cfg.wage_tag_regions:
        for t in range(length):
            x = (x << 7) | ((words[t] >> (7 * port)) & 0x7F)
            nbits += 7
    return x >> (nbits - 128)


def tag_words(state, cfg=DEFAULT_CONFIG):
    """The words the hardware emits for the tag."""
    if isinstance(state, AceState):
        words = [state.a, state.c]
        return words if cfg.tag_msw_first else words[::-1]
    return wage_tag_words(state, cfg)


def tag_extract(state, cipher=None, cfg=DEFAULT_CONFIG):
    cipher = cipher or cipher_of(state)
    if cipher == "ace":
        return (state.a << 64) | state.c
    return wage_tag_from_words(wage_tag_words(state, cfg), cfg)


# -- AEAD and hash ---------------------------------------------------------------

def _absorb(state, rv, block, ds, cfg, p, mode="absorb"):
    state = inject_rate(state, rv, block.bits, mode)
    state = apply_domain_separator(state, ds, cfg)
    state = apply_padding_flag(state, block.padded, cfg)
    return permute(state, cfg, p)


def _run_schedule(state, rv, items, ds, kw, cfg, p):
    for item in items:
        if item == "perm":
            state = permute(state, cfg, p)
        else:
            state = inject_rate(state, rv, kw[item], "absorb")
            state = apply_domain_separator(state, ds, cfg)
    return state


def duplex(state, blocks, ds, direction, cfg=DEFAULT_CONFIG, p=1):
    """Encrypt or decrypt a sequence of payload blocks; returns (state, words)."""
    rv = rate_view(cipher_of(state), cfg)
    out = []
    for blk in blocks:
        rate = extract_rate(state, rv)
        o = rate ^ blk.bits
        if blk.padded:
            o &= padded_prefix_mask(blk.bits)
        out.append(o)
        if direction == "encrypt":
            state = _absorb(state, rv, blk, ds, cfg, p)
        elif blk.padded:
            state = _absorb(state, rv, Block(pad_word(o, blk.nbytes), True, blk.nbytes), ds, cfg, p)
        else:
            state = _absorb(state, rv, blk, ds, cfg, p, mode="replace")
    return state, out


def aead(req, cipher, cfg=DEFAULT_CONFIG, p=1):
    rv = rate_view(cipher, cfg)
    k0, k1 = key_words(req.key)
    kw = {"k0": k0, "k1": k1}
    sched = cfg.ace_init_final_schedule
    state = load_ae(req.key, req.nonce, cipher, cfg)
    state = _run_schedule(state, rv, sched.init, cfg.ds("init"), kw, cfg, p)
    for blk in pad_blocks(req.associated_data):
        state = _absorb(state, rv, blk, cfg.ds("ad"), cfg, p)
    blocks = pad_blocks(req.payload)
    state, words = duplex(state, blocks, cfg.ds("payload"), req.direction, cfg, p)
    output = b"".join(word_to_bytes(w, b.nbytes) for w, b in zip(words, blocks))
    state = _run_schedule(state, rv, sched.final, cfg.ds("final"), kw, cfg, p)
    tag = tag_extract(state, cipher, cfg).to_bytes(16, "big")
    if req.direction == "encrypt":
        return AeadResult(output, tag, None, state)
    ok = hmac.compare_digest(tag, req.tag)
    return AeadResult(output if ok else None, tag, ok, state)


def encrypt(key, nonce, ad, msg, cipher="ace", cfg=DEFAULT_CONFIG, p=1):
    res = aead(AeadRequest(key, nonce, ad, msg, "encrypt"), cipher, cfg, p)
    return res.output, res.tag


def decrypt(key, nonce, ad, ct, tag, cipher="ace", cfg=DEFAULT_CONFIG, p=1):
    """Plaintext, or None when the tag does not verify."""
    return aead(AeadRequest(key, nonce, ad, ct, "decrypt", tag), cipher, cfg, p).output


def hash_state(message, cfg=DEFAULT_CONFIG, p=1):
    """State after absorption, and the squeezed words."""
    rv = rate_view("ace", cfg)
    state = load_hash_iv(cfg)
    if cfg.hash_init_permute:
        state = ace_permutation(state, cfg, p)
    for blk in pad_blocks(message):
        state = inject_rate(state, rv, blk.bits, "absorb")
        state = apply_padding_flag(state, blk.padded, cfg)
        state = ace_permutation(state, cfg, p)
    words = []
    for i in range(cfg.hash_squeeze_blocks):
        words.append(extract_rate(state, rv))
        if i < cfg.hash_squeeze_blocks - 1:
            state = ace_permutation(state, cfg, p)
    return state, words


def ace_hash(message, cfg=DEFAULT_CONFIG, p=1):
    _, words = hash_state(message, cfg, p)
    return b"".join(w.to_bytes(8, "big") for w in words)
