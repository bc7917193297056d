"""Gate inventories, gate-equivalent area, throughput and optimality.

Inventories count gates per datapath component as ``(kind, width) -> n``;
a 7-bit XOR is ``("xor2", 7)``.  Everything structural is derived from the
same :class:`CipherConfig` the cores run on.  The GE table and the WGP
inventory are calibration data, not measurements.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .config import DEFAULT_CONFIG
from .constants import ACE_DEGREES, WAGE_DEGREES, check_degree
from .hwsim import cycles_per_permutation

KINDS = ("inv", "nand2", "and2", "or2", "xor2", "mux2", "ff")
BLOCK_BITS = 64


@dataclass(frozen=True)
class GeCostTable:
    inv: float = 0.67
    nand2: float = 1.0
    and2: float = 1.5
    or2: float = 1.5
    xor2: float = 2.5
    mux2: float = 2.25
    ff: float = 4.5
    name: str = "generic"

    def __post_init__(self):
        for k in KINDS:
            if getattr(self, k) <= 0:
                raise ValueError(f"GE value for {k} must be positive")

    def __getitem__(self, kind):
        return getattr(self, kind)


DEFAULT_GE = GeCostTable()


@dataclass
class GateInventory:
    components: dict = field(default_factory=dict)

    def add(self, component, kind, width=1, count=1):
        if kind not in KINDS:
            raise ValueError(f"unknown gate kind {kind!r}")
        if count < 0 or width < 1:
            raise ValueError("counts are nonnegative and widths positive")
        if count:
            self.components.setdefault(component, Counter())[(kind, width)] += count
        return self

    def add_many(self, component, gates, times=1):
        for (kind, width), n in gates.items():
            self.add(component, kind, width, n * times)
        return self

    def merge(self, other):
        for comp, gates in other.components.items():
            self.add_many(comp, gates)
        return self

    def scaled(self, k):
        out = GateInventory()
        for comp, gates in self.components.items():
            out.add_many(comp, gates, k)
        return out

    def bits(self, component=None):
        """Single-bit gate counts by kind (widths multiplied out)."""
        out = Counter()
        comps = [component] if component else list(self.components)
        for comp in comps:
            for (kind, width), n in self.components.get(comp, {}).items():
                out[kind] += width * n
        return out

    def count(self, kind, width=None):
        return sum(n for gates in self.components.values() for (k, w), n in gates.items()
                   if k == kind and (width is None or w == width))

    def difference(self, other):
        """Per-component, per-gate ``self - other`` (may be negative)."""
        out = {}
        for comp in set(self.components) | set(other.components):
            d = Counter(self.components.get(comp, {}))
            d.subtract(other.components.get(comp, {}))
            d = {g: n for g, n in d.items() if n}
            if d:
                out[comp] = d
        return out


@dataclass(frozen=True)
class AreaEstimate:
    cipher: str
    p: int
    components: tuple  # (name, GE)
    total: float

    def component(self, name):
        return dict(self.components).get(name, 0.0)


# -- building blocks ----------------------------------------------------------------

def sb64_round_gates(cfg=DEFAULT_CONFIG):
    """One Simeck round on a 32-bit half: AND of two rotations, two XOR
    layers and the one-bit round constant.  The fixed constant is wiring
    into XNORs and costs nothing extra here."""
    return Counter({("and2", 32): 1, ("xor2", 32): 2, ("xor2", 1): 1})


def sb_gates(cfg=DEFAULT_CONFIG):
    """The WAGE SB from its generator: one AND and one XOR per bit update."""
    gen = cfg.wage_sb_generator
    if gen is None:
        raise ValueError("SB inventory needs a generator description")
    n = gen.iterations * len(gen.ops)
    gates = Counter({("and2", 1): n, ("xor2", 1): n})
    if gen.final_xor:
        gates[("inv", 1)] += bin(gen.final_xor).count("1")
    return gates


# Calibration inventory for one 7-bit WGP (power map, trace and decimation
# lumped together).  Sized so that the ACE and WAGE datapaths relate as the
# published gate counts do.
WGP_GATES = Counter({("and2", 1): 98, ("xor2", 1): 193})


def wgp_gates(cfg=DEFAULT_CONFIG):
    return Counter(WGP_GATES)


def omega_mul_xors(cfg):
    # bits of the reduction polynomial below x^7, minus the one that is a wire
    return bin(cfg.wage_field_poly & 0x7F).count("1") - 1


def wage_sponge_support_inventory(cfg=DEFAULT_CONFIG):
    inv = GateInventory()
    rate = len(cfg.wage_rate_stages)
    n_sb = sum(1 for f, _, _ in cfg.wage_nonlinear_update_map if f == "sb")
    ds_bits = len(cfg.wage_domain_sep_positions)
    inv.add("absorb_mux", "mux2", 7, rate)
    inv.add("replace_load_mux", "mux2", 7, rate)
    inv.add("sb_mux", "mux2", 7, n_sb)
    inv.add("ds_mux", "mux2", ds_bits, 1)
    inv.add("absorb_xor", "xor2", 7, rate)
    inv.add("ds_xor", "xor2", ds_bits, 1)
    inv.add("input_and", "and2", 7, len(cfg.wage_tag_regions))
    return inv


def _fsm_ffs(cipher):
    # phase (3) + mode (2) + load/tag slot counter (4)
    return 9


def permutation_inventory(cipher, p, cfg=DEFAULT_CONFIG):
    """Gate inventory of the full datapath unrolled ``p`` times."""
    check_degree(cipher, p)
    inv = GateInventory()
    if cipher == "ace":
        lfsr = cfg.ace_const_lfsr
        inv.add_many("sb64", sb64_round_gates(cfg), 3 * p)
        inv.add("const_lfsr", "xor2", 1, 3 * p * (len(lfsr.taps) - 1))
        inv.add("step", "xor2", 64, len(cfg.ace_mix_map))
        inv.add("step", "xor2", 8, len(cfg.ace_mix_map))
        inv.add("round_step_mux", "mux2", 64, 5)
        inv.add("load_mux", "mux2", 64, 4)
        inv.add("load_mux", "and2", 64, 1)
        inv.add("io", "xor2", 64, 1)  # rate xor data
        inv.add("io", "and2", 64, 2)  # output forcing, padding mask
        inv.add("io", "mux2", 64, 2)  # absorb / replace
        inv.add("io", "xor2", len(cfg.ace_domain_sep_positions) + 1, 1)
        inv.add("registers", "ff", 320)
        inv.add("registers", "ff", lfsr.width)
    else:
        lfsr = cfg.wage_const_lfsr
        taps = len(cfg.wage_feedback_taps)
        inv.add_many("wgp", wgp_gates(cfg), 2 * p)
        inv.add_many("sb", sb_gates(cfg), 4 * p)
        inv.add("feedback", "xor2", 7, taps * p)
        inv.add("feedback", "xor2", 1, omega_mul_xors(cfg) * p)
        inv.add("nonlinear_xor", "xor2", 7, len(cfg.wage_nonlinear_update_map) * p)
        inv.add("rc_xor", "xor2", 7, len(cfg.wage_rc_stages) * p)
        inv.add("const_lfsr", "xor2", 1, 2 * p * (len(lfsr.taps) - 1))
        inv.merge(wage_sponge_support_inventory(cfg))
        inv.add("hold_mux", "mux2", 7, 37)  # lfsr_en
        if p > 1:
            inv.add("slot_mux", "mux2", 7, 37)  # I/O cycle runs one round short
        inv.add("registers", "ff", 7 * 37)
        inv.add("registers", "ff", lfsr.width)
    inv.add("registers", "ff", max(cycles_per_permutation(cipher, 1, cfg) - 1, 1).bit_length())
    inv.add("registers", "ff", _fsm_ffs(cipher))
    return inv


# -- estimates ---------------------------------------------------------------------

def estimate_area(inv, ge=DEFAULT_GE, cipher="", p=0):
    comps = []
    for name in sorted(inv.components):
        comps.append((name, sum(ge[kind] * width * n for (kind, width), n in inv.components[name].items())))
    return AreaEstimate(cipher, p, tuple(comps), sum(a for _, a in comps))


def datapath_area(est):
    """Permutation plus multiplexers: everything except the registers."""
    return est.total - est.component("registers")


def throughput_bpc(cipher, p, cfg=DEFAULT_CONFIG):
    return Fraction(BLOCK_BITS, cycles_per_permutation(cipher, p, cfg))


def optimality(tput, area):
    if area <= 0:
        raise ValueError("area must be positive")
    return float(tput) / float(area) ** 2


def degrees(cipher):
    return ACE_DEGREES if cipher == "ace" else WAGE_DEGREES


def reference_table():
    """Published post-layout areas, keyed by cipher, library and p."""
    text = resources.files("acewage.data").joinpath("reference_areas.json").read_text()
    return json.loads(text)


def reference_area(cipher, p, library="st65"):
    return reference_table()["areas"][cipher][library].get(str(p))


@dataclass(frozen=True)
class ReportRow:
    cipher: str
    p: int
    cycles: int
    bpc: Fraction
    area_ge: float
    datapath_ge: float
    ratio_to_p1: float
    optimality: float
    reference_ge: float | None
    reference_optimality: float | None


def scaling_report(cipher, cfg=DEFAULT_CONFIG, ge=DEFAULT_GE, library="st65"):
    rows, base = [], None
    for p in degrees(cipher):
        est = estimate_area(permutation_inventory(cipher, p, cfg), ge, cipher, p)
        base = base or est.total
        tput = throughput_bpc(cipher, p, cfg)
        ref = reference_area(cipher, p, library)
        rows.append(ReportRow(
            cipher, p, cycles_per_permutation(cipher, p, cfg), tput, est.total,
            datapath_area(est), est.total / base, optimality(tput, est.total), ref,
            optimality(tput, ref) if ref else None,
        ))
    return rows


def calibration_ratio(cfg=DEFAULT_CONFIG, ge=DEFAULT_GE):
    """ACE over WAGE datapath area at p = 1."""
    a = datapath_area(estimate_area(permutation_inventory("ace", 1, cfg), ge))
    w = datapath_area(estimate_area(permutation_inventory("wage", 1, cfg), ge))
    return a / w


# -- rendering -------------------------------------------------------------------------

REPORT_COLUMNS = ("cipher", "p", "cycles", "bpc", "area_ge", "datapath_ge", "ratio_to_p1",
                  "optimality", "reference_ge", "reference_optimality")


def _cells(row):
    return [
        row.cipher, str(row.p), str(row.cycles), f"{float(row.bpc):.2f}", f"{row.area_ge:.1f}",
        f"{row.datapath_ge:.1f}", f"{row.ratio_to_p1:.3f}", f"{row.optimality:.4e}",
        "" if row.reference_ge is None else f"{row.reference_ge:g}",
        "" if row.reference_optimality is None else f"{row.reference_optimality:.4e}",
    ]


def report_text(rows):
    table = [list(REPORT_COLUMNS)] + [_cells(r) for r in rows]
    widths = [max(len(r[i]) for r in table) for i in range(len(REPORT_COLUMNS))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in table) + "\n"


def report_csv(rows):
    lines = [",".join(REPORT_COLUMNS)] + [",".join(_cells(r)) for r in rows]
    return "\n".join(lines) + "\n"


def report_json(rows, components=None):
    doc = {"rows": [dict(zip(REPORT_COLUMNS, _cells(r))) for r in rows]}
    if components:
        doc["components"] = components
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
