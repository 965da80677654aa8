import json
import subprocess
import sys

import numpy as np
import pytest

from fase import read_pgm, write_pgm
from fase.cli import main


@pytest.fixture
def scene(tmp_path):
    """A smooth test image, a damaged copy, and a central loss mask on disk."""
    h = w = 24
    m = np.arange(h)[:, None] / h
    n = np.arange(w)[None, :] / w
    clean = 120 + 60 * np.cos(2 * np.pi * (m + 2 * n)) + 25 * np.cos(2 * np.pi * 3 * n)
    lost = np.zeros((h, w), dtype=bool)
    lost[9:15, 10:16] = True
    damaged = clean.copy()
    damaged[lost] = 0.0
    paths = {
        "clean": tmp_path / "clean.pgm",
        "damaged": tmp_path / "damaged.pgm",
        "mask": tmp_path / "mask.pgm",
    }
    write_pgm(paths["clean"], clean)
    write_pgm(paths["damaged"], damaged)
    write_pgm(paths["mask"], np.where(lost, 0, 255))
    return tmp_path, paths, lost


def test_conceal_restores_and_reports(scene, capsys):
    tmp_path, paths, lost = scene
    out = tmp_path / "fixed.pgm"
    report_path = tmp_path / "report.json"
    rc = main(
        [
            "conceal",
            str(paths["damaged"]),
            str(paths["mask"]),
            "-o",
            str(out),
            "--report",
            str(report_path),
            "--reference",
            str(paths["clean"]),
            "--dict",
            "dft",
            "--iters",
            "60",
        ]
    )
    assert rc == 0
    printed = capsys.readouterr().out
    assert "PSNR" in printed
    restored = read_pgm(out)
    damaged = read_pgm(paths["damaged"])
    assert np.array_equal(restored[~lost], damaged[~lost])
    report = json.loads(report_path.read_text())
    assert report["schema"] == "fase-conceal-report/1"
    assert report["lost_pixels"] == 36
    assert report["psnr_db"] > 25.0
    assert len(report["blocks"][0]["trace"]) == 60
    # every trace entry is (atom index, complex coefficient as [re, im])
    entry = report["blocks"][0]["trace"][0]
    assert set(entry) == {"atom", "coefficient"}
    assert len(entry["coefficient"]) == 2


def test_conceal_default_output_path(scene, capsys):
    tmp_path, paths, _ = scene
    rc = main(["conceal", str(paths["damaged"]), str(paths["mask"]), "--iters", "5"])
    assert rc == 0
    default_out = paths["damaged"].with_suffix(".restored.pgm")
    assert default_out.exists()
    assert str(default_out) in capsys.readouterr().out


def test_conceal_runs_are_identical(scene):
    tmp_path, paths, _ = scene
    out_a = tmp_path / "a.pgm"
    out_b = tmp_path / "b.pgm"
    base = ["conceal", str(paths["damaged"]), str(paths["mask"]), "--iters", "30"]
    assert main(base + ["-o", str(out_a)]) == 0
    assert main(base + ["-o", str(out_b), "--single-thread"]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()


def test_conceal_blocked_with_tables_reuse(scene, capsys):
    tmp_path, paths, _ = scene
    tables_path = tmp_path / "area.fgrm"
    # tables for a whole-image extrapolation with the same mask and decay
    rc = main(
        [
            "tables",
            "--mask",
            str(paths["mask"]),
            "--dict",
            "dct",
            "--out",
            str(tables_path),
        ]
    )
    assert rc == 0
    assert "built tables for 576 atoms" in capsys.readouterr().out
    out = tmp_path / "fixed.pgm"
    report_path = tmp_path / "report.json"
    rc = main(
        [
            "conceal",
            str(paths["damaged"]),
            str(paths["mask"]),
            "--dict",
            "dct",
            "--iters",
            "20",
            "--tables",
            str(tables_path),
            "-o",
            str(out),
            "--report",
            str(report_path),
        ]
    )
    assert rc == 0
    assert json.loads(report_path.read_text())["tables_reused"] == 1


def test_conceal_fft_flag(scene):
    tmp_path, paths, _ = scene
    out_direct = tmp_path / "direct.pgm"
    out_fft = tmp_path / "fft.pgm"
    base = ["conceal", str(paths["damaged"]), str(paths["mask"]), "--iters", "40"]
    assert main(base + ["-o", str(out_direct)]) == 0
    assert main(base + ["-o", str(out_fft), "--fft"]) == 0
    assert out_direct.read_bytes() == out_fft.read_bytes()


def test_conceal_rejects_mismatched_mask(scene, tmp_path, capsys):
    _, paths, _ = scene
    small_mask = tmp_path / "small.pgm"
    write_pgm(small_mask, np.full((4, 4), 255))
    rc = main(["conceal", str(paths["damaged"]), str(small_mask)])
    assert rc == 2
    assert "fase conceal:" in capsys.readouterr().err


def test_conceal_missing_file_exits_2(tmp_path, capsys):
    rc = main(["conceal", str(tmp_path / "nope.pgm"), str(tmp_path / "mask.pgm")])
    assert rc == 2
    assert "fase conceal:" in capsys.readouterr().err


def test_verify_reports_each_trial(capsys):
    rc = main(["verify", "--size", "8x8", "--dict", "dct", "--iters", "20", "--trials", "3"])
    assert rc == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert len(lines) == 4  # one per trial + summary
    assert all("selections=match" in line for line in lines[:3])
    assert "3 trials, 0 failure(s)" in lines[3]


def test_verify_impossible_tolerance_fails(capsys):
    rc = main(
        ["verify", "--size", "8x8", "--dict", "dft", "--iters", "10", "--trials", "2", "--tol", "0"]
    )
    assert rc == 1
    assert "[FAIL]" in capsys.readouterr().out


def test_verify_caps_problem_size(capsys):
    rc = main(["verify", "--size", "512x512"])
    assert rc == 2
    assert "limited" in capsys.readouterr().err


def test_bench_csv_to_stdout(capsys):
    rc = main(
        [
            "bench",
            "--sizes",
            "8x8",
            "--dicts",
            "dct",
            "--iters",
            "2,4",
            "--repeats",
            "1",
        ]
    )
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == (
        "algo,M,N,dict,iters,seconds,mul_pred,add_pred,other_pred,"
        "mul_meas,add_meas,other_meas"
    )
    assert len(lines) == 5
    for line in lines[1:]:
        cells = line.split(",")
        assert cells[0] in ("se", "fase")
        assert (cells[6], cells[7], cells[8]) == (cells[9], cells[10], cells[11])


def test_bench_csv_to_file(tmp_path, capsys):
    out = tmp_path / "rows.csv"
    rc = main(
        [
            "bench",
            "--sizes",
            "8x8",
            "--dicts",
            "dct",
            "--iters",
            "3",
            "--repeats",
            "1",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "wrote 2 rows" in captured.err
    assert out.read_text().startswith("algo,M,N,dict,iters,seconds,")


def test_bench_rejects_malformed_size(capsys):
    assert main(["bench", "--sizes", "8by8"]) == 2
    assert "ROWSxCOLS" in capsys.readouterr().err


def test_tables_from_size_and_loss(tmp_path, capsys):
    out = tmp_path / "t.fgrm"
    rc = main(
        ["tables", "--size", "8x8", "--loss", "4x4", "--dict", "union:dct+wht", "--out", str(out)]
    )
    assert rc == 0
    assert "128 atoms" in capsys.readouterr().out
    k = 128
    assert out.stat().st_size == 24 + 16 * k * k + 8 * k


def test_tables_fft_matches_direct(tmp_path):
    direct = tmp_path / "direct.fgrm"
    via_fft = tmp_path / "fft.fgrm"
    base = ["tables", "--size", "8x8", "--loss", "2x2", "--dict", "dft"]
    assert main(base + ["--out", str(direct)]) == 0
    assert main(base + ["--fft", "--out", str(via_fft)]) == 0
    from fase import load_gram_table

    a = load_gram_table(direct)
    b = load_gram_table(via_fft)
    assert a.provenance == b.provenance
    assert np.allclose(a.c, b.c, rtol=1e-12, atol=1e-12)


def test_tables_fft_rejects_untagged(tmp_path, capsys):
    rc = main(["tables", "--size", "4x4", "--dict", "dct", "--fft", "--out", str(tmp_path / "t.fgrm")])
    assert rc == 2
    assert "fase tables:" in capsys.readouterr().err


def test_tables_requires_geometry(tmp_path, capsys):
    rc = main(["tables", "--dict", "dct", "--out", str(tmp_path / "t.fgrm")])
    assert rc == 2
    assert "--size" in capsys.readouterr().err


def test_console_entry_point_runs(scene):
    tmp_path, paths, _ = scene
    out = tmp_path / "sub.pgm"
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "fase",
            "conceal",
            str(paths["damaged"]),
            str(paths["mask"]),
            "--iters",
            "5",
            "-o",
            str(out),
        ],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
    assert "concealed" in proc.stdout
