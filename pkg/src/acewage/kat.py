"""Known-answer test files: ``field = hex`` records separated by blank lines.

The header records the SHA-256 of the configuration, so a file only claims
to be valid for the configuration it was generated with.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .constants import ACE_DEGREES, WAGE_DEGREES
from .sponge import ace_hash, encrypt

AEAD_FIELDS = ("Count", "cipher", "p", "key", "nonce", "ad", "pt", "ct", "tag")
HASH_FIELDS = ("Count", "cipher", "p", "msg", "digest")
HEX_FIELDS = {"key", "nonce", "ad", "pt", "ct", "tag", "msg", "digest"}

# (associated data length, payload length) in bytes
AEAD_GRID = ((0, 0), (0, 1), (0, 8), (1, 0), (3, 13), (8, 16), (9, 17), (16, 31))
HASH_GRID = (0, 1, 7, 8, 9, 32)
KAT_KEY = bytes(range(16))
KAT_NONCE = bytes(range(16, 32))


class KatFormatError(ValueError):
    pass


@dataclass
class KatRecord:
    fields: dict = field(default_factory=dict)

    @property
    def kind(self):
        return "hash" if "digest" in self.fields else "aead"

    def __getitem__(self, key):
        return self.fields[key]


@dataclass
class KatFile:
    config_digest: str
    records: list


def generate(cfg):
    recs, n = [], 0
    for cipher, degrees in (("ace", ACE_DEGREES), ("wage", WAGE_DEGREES)):
        for p in degrees:
            for ad_len, pt_len in AEAD_GRID:
                ad, pt = bytes(range(ad_len)), bytes(range(pt_len))
                ct, tag = encrypt(KAT_KEY, KAT_NONCE, ad, pt, cipher, cfg, p)
                recs.append(KatRecord({
                    "Count": str(n), "cipher": cipher, "p": str(p), "key": KAT_KEY.hex(),
                    "nonce": KAT_NONCE.hex(), "ad": ad.hex(), "pt": pt.hex(),
                    "ct": ct.hex(), "tag": tag.hex(),
                }))
                n += 1
    for p in ACE_DEGREES:
        for m_len in HASH_GRID:
            msg = bytes(range(m_len))
            recs.append(KatRecord({
                "Count": str(n), "cipher": "ace", "p": str(p), "msg": msg.hex(),
                "digest": ace_hash(msg, cfg, p).hex(),
            }))
            n += 1
    return KatFile(cfg.digest(), recs)


def recompute(rec, cfg):
    f = rec.fields
    cipher, p = f["cipher"], int(f["p"])
    if rec.kind == "hash":
        return KatRecord({**f, "digest": ace_hash(bytes.fromhex(f["msg"]), cfg, p).hex()})
    ct, tag = encrypt(bytes.fromhex(f["key"]), bytes.fromhex(f["nonce"]), bytes.fromhex(f["ad"]),
                      bytes.fromhex(f["pt"]), cipher, cfg, p)
    return KatRecord({**f, "ct": ct.hex(), "tag": tag.hex()})


def verify(kat, cfg):
    """Return a list of (Count, field, expected, got) mismatches."""
    bad = []
    if kat.config_digest != cfg.digest():
        bad.append(("header", "config-sha256", kat.config_digest, cfg.digest()))
    for rec in kat.records:
        want = recompute(rec, cfg)
        for name in ("ct", "tag", "digest"):
            if name in rec.fields and rec[name] != want[name]:
                bad.append((rec["Count"], name, rec[name], want[name]))
    return bad


def dumps(kat):
    out = [f"# config-sha256 = {kat.config_digest}", ""]
    for rec in kat.records:
        order = HASH_FIELDS if rec.kind == "hash" else AEAD_FIELDS
        out.extend(f"{k} = {rec[k]}" for k in order)
        out.append("")
    return "\n".join(out)


def loads(text):
    digest, recs, cur = None, [], {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            key, _, val = line[1:].partition("=")
            if key.strip() == "config-sha256":
                digest = val.strip()
            continue
        if not line:
            if cur:
                recs.append(KatRecord(cur))
                cur = {}
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not key:
            raise KatFormatError(f"line {n}: expected 'field = value'")
        if key in HEX_FIELDS:
            if len(val) % 2:
                raise KatFormatError(f"line {n}: odd-length hex in {key}")
            try:
                bytes.fromhex(val)
            except ValueError:
                raise KatFormatError(f"line {n}: bad hex in {key}") from None
        cur[key] = val
    if cur:
        recs.append(KatRecord(cur))
    if digest is None:
        raise KatFormatError("missing config-sha256 header")
    for rec in recs:
        need = HASH_FIELDS if rec.kind == "hash" else AEAD_FIELDS
        missing = [k for k in need if k not in rec.fields]
        if missing:
            raise KatFormatError(f"record {rec.fields.get('Count', '?')}: missing {', '.join(missing)}")
    return KatFile(digest, recs)
