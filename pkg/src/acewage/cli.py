"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 bad config.
"""

from __future__ import annotations

import argparse
import os
import sys
from importlib import resources
from pathlib import Path

from . import cost, kat
from .config import DEFAULT_CONFIG, ConfigError, load_config_file
from .constants import UnsupportedDegree, check_degree
from .hwsim import ScriptError, parse_script, sim_reset, sim_run
from .sponge import AeadRequest, aead, ace_hash

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_CONFIG = 0, 1, 2, 3
CONFIG_ENV = "ACEWAGE_CONFIG"
EXAMPLE_SCRIPT = "timing_example.script"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _hex(name, text, nbytes=None):
    try:
        data = bytes.fromhex(text)
    except ValueError:
        raise UsageError(f"--{name}: not a hex string") from None
    if nbytes is not None and len(data) != nbytes:
        raise UsageError(f"--{name}: need {2 * nbytes} hex digits, got {len(text)}")
    return data


def _read_input(args):
    if args.msg is not None:
        return _hex("msg", args.msg)
    if args.input in (None, "-"):
        return sys.stdin.buffer.read()
    return Path(args.input).read_bytes()


def _write_output(args, data):
    if args.hex:
        data = (data.hex() + "\n").encode()
    if args.output in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(args.output).write_bytes(data)


def _config(args):
    path = args.config or os.environ.get(CONFIG_ENV)
    return load_config_file(path) if path else DEFAULT_CONFIG


def cmd_aead(args, cfg):
    check_degree(args.cipher, args.p)
    key, nonce = _hex("key", args.key, 16), _hex("nonce", args.nonce, 16)
    ad = _hex("ad", args.ad)
    data = _read_input(args)
    if args.direction == "enc":
        res = aead(AeadRequest(key, nonce, ad, data, "encrypt"), args.cipher, cfg, args.p)
        _write_output(args, res.output + res.tag)
        return EXIT_OK
    if len(data) < 16:
        raise UsageError("decryption input must end with the 16-byte tag")
    res = aead(AeadRequest(key, nonce, ad, data[:-16], "decrypt", data[-16:]), args.cipher, cfg, args.p)
    if not res.verified:
        print("verification failed: tag mismatch", file=sys.stderr)
        return EXIT_VERIFY
    _write_output(args, res.output)
    return EXIT_OK


def cmd_hash(args, cfg):
    if args.cipher != "ace":
        raise UsageError("hashing is defined for ace only")
    check_degree("ace", args.p)
    args.hex = True
    _write_output(args, ace_hash(_read_input(args), cfg, args.p))
    return EXIT_OK


def cmd_kat(args, cfg):
    if args.action == "generate":
        Path(args.file).write_text(kat.dumps(kat.generate(cfg)))
        return EXIT_OK
    try:
        kf = kat.loads(Path(args.file).read_text())
    except kat.KatFormatError as e:
        raise UsageError(f"{args.file}: {e}") from None
    bad = kat.verify(kf, cfg)
    if bad:
        count, name, want, got = bad[0]
        print(f"mismatch in record Count = {count}: {name} in file {want}, computed {got}",
              file=sys.stderr)
        print(f"{len(bad)} mismatching field(s)", file=sys.stderr)
        return EXIT_VERIFY
    print(f"{len(kf.records)} records verified")
    return EXIT_OK


def example_script_text():
    return resources.files("acewage.data").joinpath(EXAMPLE_SCRIPT).read_text()


def cmd_simulate(args, cfg):
    check_degree(args.cipher, args.p)
    if args.script == "example":
        text = example_script_text()
    else:
        text = Path(args.script).read_text()
    try:
        script = parse_script(text)
    except ScriptError as e:
        raise UsageError(f"{args.script}: {e}") from None
    trace = sim_run(sim_reset(args.cipher, args.p, cfg), script)
    args.hex = False
    _write_output(args, trace.to_text().encode())
    if args.json:
        Path(args.json).write_text(trace.to_json() + "\n")
    if args.plot:
        from .plots import waveform

        waveform(trace, args.plot)
    return EXIT_OK


def cmd_report(args, cfg):
    ciphers = ("ace", "wage") if args.cipher == "both" else (args.cipher,)
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    for c in ciphers:
        rows = cost.scaling_report(c, cfg, cost.DEFAULT_GE, args.library)
        sys.stdout.write(cost.report_text(rows))
        if out_dir:
            comps = {
                str(r.p): dict(cost.estimate_area(cost.permutation_inventory(c, r.p, cfg)).components)
                for r in rows
            }
            (out_dir / f"{c}_scaling.csv").write_text(cost.report_csv(rows))
            (out_dir / f"{c}_scaling.json").write_text(cost.report_json(rows, comps))
            if not args.no_plots:
                from .plots import area_breakdown

                area_breakdown(c, cost.degrees(c), cfg, cost.DEFAULT_GE, out_dir / f"{c}_area.png")
    ratio = cost.calibration_ratio(cfg)
    print(f"ace/wage datapath area at p=1: {ratio:.3f}")
    return EXIT_OK


def build_parser():
    base = argparse.ArgumentParser(add_help=False)
    base.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV} or built-in)")
    common = argparse.ArgumentParser(add_help=False, parents=[base])
    common.add_argument("--cipher", choices=("ace", "wage"), default="ace")
    common.add_argument("--p", type=int, default=1, help="parallel degree")

    io = argparse.ArgumentParser(add_help=False)
    io.add_argument("--in", dest="input", help="input file, '-' for stdin")
    io.add_argument("--msg", help="input given inline as hex")
    io.add_argument("--out", dest="output", help="output file (default stdout)")
    io.add_argument("--hex", action="store_true", help="write hex instead of raw bytes")

    ap = _Parser(prog="acewage", description="ACE and WAGE workbench")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("aead", parents=[common, io], help="encrypt or decrypt")
    a.add_argument("--direction", choices=("enc", "dec"), default="enc")
    a.add_argument("--key", required=True)
    a.add_argument("--nonce", required=True)
    a.add_argument("--ad", default="", help="associated data as hex")
    a.set_defaults(func=cmd_aead)

    h = sub.add_parser("hash", parents=[common, io], help="ACE-Hash-256 digest (hex)")
    h.set_defaults(func=cmd_hash)

    k = sub.add_parser("kat", parents=[base], help="generate or verify known-answer tests")
    k.add_argument("action", choices=("generate", "verify"))
    k.add_argument("file")
    k.set_defaults(func=cmd_kat)

    s = sub.add_parser("simulate", parents=[common], help="run a cycle-model script")
    s.add_argument("script", help="script file, or 'example' for the bundled one")
    s.add_argument("--out", dest="output", help="trace text file (default stdout)")
    s.add_argument("--json", help="also write the trace as JSON")
    s.add_argument("--plot", help="also render a waveform PNG")
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("report", parents=[base], help="area / throughput scaling tables")
    r.add_argument("--cipher", choices=("ace", "wage", "both"), default="both")
    r.add_argument("--library", default="st65", choices=("st65", "tsmc65", "st90", "ibm130"))
    r.add_argument("--out-dir", help="write CSV, JSON and PNG files here")
    r.add_argument("--no-plots", action="store_true")
    r.set_defaults(func=cmd_report)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
    except (ConfigError, OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args, cfg)
    except (UsageError, UnsupportedDegree) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
