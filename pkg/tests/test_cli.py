import json
from importlib import resources

import pytest

from acewage.cli import main
from acewage.config import DEFAULT_CONFIG, dump_config

KEY = "00112233445566778899aabbccddeeff"
NONCE = "0f" * 16


def run(capsysbinary, *argv):
    code = main(list(argv))
    out, err = capsysbinary.readouterr()
    return code, out, err


@pytest.mark.parametrize("c", ["ace", "wage"])
def test_aead_round_trip(tmp_path, capsysbinary, c):
    msg = tmp_path / "m"
    msg.write_bytes(b"attack at dawn, bring snacks")
    ct = tmp_path / "ct"
    assert main(["aead", "--cipher", c, "--key", KEY, "--nonce", NONCE, "--ad", "aa",
                 "--in", str(msg), "--out", str(ct)]) == 0
    assert len(ct.read_bytes()) == 28 + 16
    code, out, _ = run(capsysbinary, "aead", "--cipher", c, "--direction", "dec", "--key", KEY,
                       "--nonce", NONCE, "--ad", "aa", "--in", str(ct))
    assert code == 0 and out == msg.read_bytes()


def test_aead_unrolled_gives_same_output(capsysbinary):
    outs = []
    for p in ("1", "8"):
        code, out, _ = run(capsysbinary, "aead", "--p", p, "--key", KEY, "--nonce", NONCE,
                           "--msg", "0102", "--hex")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_corrupted_tag_exits_2(tmp_path, capsysbinary):
    code, out, _ = run(capsysbinary, "aead", "--key", KEY, "--nonce", NONCE, "--msg", "00" * 9)
    bad = bytearray(out)
    bad[-1] ^= 1
    f = tmp_path / "ct"
    f.write_bytes(bytes(bad))
    code, out, err = run(capsysbinary, "aead", "--direction", "dec", "--key", KEY,
                         "--nonce", NONCE, "--in", str(f))
    assert code == 2 and out == b"" and b"verification failed" in err


@pytest.mark.parametrize("argv", [
    ["aead", "--key", KEY[:-2], "--nonce", NONCE, "--msg", ""],
    ["aead", "--key", "zz" * 16, "--nonce", NONCE, "--msg", ""],
    ["aead", "--key", KEY, "--nonce", NONCE, "--p", "3", "--msg", ""],
    ["aead", "--direction", "dec", "--key", KEY, "--nonce", NONCE, "--msg", "00"],
    ["hash", "--cipher", "wage", "--msg", ""],
    ["frobnicate"],
    ["aead", "--nonce", NONCE],
])
def test_usage_errors_exit_1(capsysbinary, argv):
    try:
        code = main(argv)
    except SystemExit as e:  # argparse rejects before dispatch
        code = e.code
    assert code == 1


def test_hash_hex(capsysbinary):
    code, out, _ = run(capsysbinary, "hash", "--msg", "616263")
    assert code == 0 and len(out.strip()) == 64
    code, out2, _ = run(capsysbinary, "hash", "--msg", "616263", "--p", "4")
    assert out2 == out


def test_kat_generate_verify_and_edit(tmp_path, capsys):
    f = tmp_path / "kat.txt"
    assert main(["kat", "generate", str(f)]) == 0
    assert main(["kat", "verify", str(f)]) == 0
    assert "104 records verified" in capsys.readouterr().out
    lines = f.read_text().splitlines()
    i = next(n for n, l in enumerate(lines) if l.startswith("tag = "))
    last = lines[i][-1]
    lines[i] = lines[i][:-1] + ("0" if last != "0" else "1")
    f.write_text("\n".join(lines))
    assert main(["kat", "verify", str(f)]) == 2
    assert "mismatch in record Count = 0: tag" in capsys.readouterr().err


def test_kat_malformed_file(tmp_path):
    f = tmp_path / "kat.txt"
    f.write_text("this is not a kat file\n")
    assert main(["kat", "verify", str(f)]) == 1


def test_simulate_example_matches_bundled_trace(tmp_path):
    out = tmp_path / "trace.txt"
    js = tmp_path / "trace.json"
    assert main(["simulate", "example", "--out", str(out), "--json", str(js)]) == 0
    want = resources.files("acewage.data").joinpath("timing_example.trace").read_text()
    assert out.read_text() == want
    assert len(json.loads(js.read_text())) == len(want.splitlines()) - 1


def test_simulate_plot(tmp_path):
    png = tmp_path / "wave.png"
    assert main(["simulate", "example", "--out", str(tmp_path / "t"), "--plot", str(png)]) == 0
    assert png.read_bytes()[:4] == b"\x89PNG"


def test_simulate_empty_and_malformed_scripts(tmp_path, capsys):
    empty = tmp_path / "empty.script"
    empty.write_text("")
    assert main(["simulate", str(empty)]) == 0
    bad = tmp_path / "bad.script"
    bad.write_text("reset mode=0\nsend mode=0 ds=9x\n")
    assert main(["simulate", str(bad)]) == 1
    assert "line 2" in capsys.readouterr().err


def test_report_files(tmp_path, capsys):
    assert main(["report", "--out-dir", str(tmp_path)]) == 0
    text = capsys.readouterr().out
    assert "ace/wage datapath area at p=1: 1.0" in text
    for c in ("ace", "wage"):
        csv = (tmp_path / f"{c}_scaling.csv").read_text().splitlines()
        assert csv[0].startswith("cipher,p,cycles,bpc")
        assert (tmp_path / f"{c}_area.png").exists()
    bpc = [l.split(",")[3] for l in (tmp_path / "wage_scaling.csv").read_text().splitlines()[1:]]
    assert bpc == ["0.57", "1.14", "1.68", "2.29", "3.37", "4.57"]


def test_report_without_plots(tmp_path):
    assert main(["report", "--cipher", "ace", "--no-plots", "--out-dir", str(tmp_path)]) == 0
    assert not list(tmp_path.glob("*.png"))


def test_config_errors_exit_3(tmp_path, monkeypatch):
    bad = tmp_path / "cfg.json"
    bad.write_text("{not json")
    assert main(["hash", "--config", str(bad), "--msg", ""]) == 3
    assert main(["hash", "--config", str(tmp_path / "missing.json"), "--msg", ""]) == 3
    monkeypatch.setenv("ACEWAGE_CONFIG", str(bad))
    assert main(["hash", "--msg", ""]) == 3


def test_config_file_is_honoured(tmp_path, capsys):
    good = tmp_path / "cfg.json"
    good.write_text(dump_config(DEFAULT_CONFIG))
    assert main(["hash", "--config", str(good), "--msg", "00"]) == 0
    a = capsys.readouterr().out
    assert main(["hash", "--msg", "00"]) == 0
    assert capsys.readouterr().out == a
