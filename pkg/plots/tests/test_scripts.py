"""Command-line wrappers: flags, exit codes, stderr wording."""

import subprocess
import sys

from symplots import attractor3d, entropy_profile, return_map, sweep_panel, timeseries


def test_attractor3d_script(trajectory_csv, tmp_path):
    out = tmp_path / "a.png"
    rc = attractor3d.main(["--input", str(trajectory_csv),
                           "--output", str(out), "--dots", "x"])
    assert rc == 0
    assert out.exists()


def test_timeseries_script(trajectory_csv, tmp_path):
    out = tmp_path / "t.png"
    rc = timeseries.main(["--input", str(trajectory_csv),
                          "--output", str(out), "--columns", "x,z"])
    assert rc == 0
    assert out.exists()


def test_entropy_profile_script(profile_csv, tmp_path):
    out = tmp_path / "e.png"
    rc = entropy_profile.main(["--input", str(profile_csv),
                               "--output", str(out)])
    assert rc == 0
    assert out.exists()


def test_sweep_panel_script_with_windows(sweep_csv, windows_csv, tmp_path):
    out = tmp_path / "s.png"
    rc = sweep_panel.main(["--input", str(sweep_csv),
                           "--windows", str(windows_csv),
                           "--output", str(out)])
    assert rc == 0
    assert out.exists()


def test_return_map_script_with_overlay(map_csv, tmp_path):
    overlay = tmp_path / "o.csv"
    overlay.write_text("z_n,z_np1\n31.0,32.0\n32.0,30.5\n")
    out = tmp_path / "m.png"
    rc = return_map.main(["--input", str(map_csv),
                          "--overlay", str(overlay),
                          "--output", str(out)])
    assert rc == 0
    assert out.exists()


def test_schema_error_exits_2_and_names_column(map_csv, tmp_path, capsys):
    out = tmp_path / "never.png"
    rc = sweep_panel.main(["--input", str(map_csv), "--output", str(out)])
    assert rc == 2
    err = capsys.readouterr().err
    assert "missing column(s)" in err
    assert "param" in err
    assert not out.exists()


def test_empty_input_exits_2_without_output(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    out = tmp_path / "never.png"
    rc = return_map.main(["--input", str(empty), "--output", str(out)])
    assert rc == 2
    assert "empty file" in capsys.readouterr().err
    assert not out.exists()


def test_missing_input_exits_2(tmp_path, capsys):
    rc = timeseries.main(["--input", str(tmp_path / "ghost.csv"),
                          "--output", str(tmp_path / "never.png")])
    assert rc == 2
    assert "cannot read" in capsys.readouterr().err


def test_unwritable_output_exits_2(map_csv, tmp_path, capsys):
    out = tmp_path / "no_such_dir" / "m.png"
    rc = return_map.main(["--input", str(map_csv), "--output", str(out)])
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_module_invocation_works(map_csv, tmp_path):
    out = tmp_path / "m.png"
    proc = subprocess.run([sys.executable, "-m", "symplots.return_map",
                           "--input", str(map_csv), "--output", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
