"""Synthesized CSV inputs in the documented export schemas."""

import numpy as np
import pytest


def _write(path, header, rows):
    path.write_text(header + "\n" + "\n".join(rows) + "\n")
    return path


@pytest.fixture
def trajectory_csv(tmp_path):
    t = np.arange(300) * 0.01
    x = 12 * np.sin(5 * t)
    y = 12 * np.cos(5 * t)
    z = 25 + 9 * np.sin(11 * t)
    rows = [f"{a:.6f},{b:.6f},{c:.6f},{d:.6f}"
            for a, b, c, d in zip(t, x, y, z)]
    return _write(tmp_path / "trajectory.csv", "t,x,y,z", rows)


@pytest.fixture
def profile_csv(tmp_path):
    rows = [f"{m},{0.9 * (m + 1):.4f},{max(0.9 - 0.12 * m, 0.0):.4f},"
            f"{2 ** min(m, 6)}" for m in range(13)]
    return _write(tmp_path / "entropy_profile.csv", "m,H_m,h_m,M_m", rows)


@pytest.fixture
def table_csv(tmp_path):
    rows = [f"{m},{0.9 - 0.05 * m:.4f},{0.88 - 0.05 * m:.4f},0.02"
            for m in range(7)]
    return _write(tmp_path / "entropy_table.csv",
                  "m,h_true,h_surrogate,delta", rows)


@pytest.fixture
def sweep_csv(tmp_path):
    rows = []
    for i in range(50):
        r = 28.0 + 1.5 * i
        if 20 <= i < 24:           # a stability window: blank flags, period set
            rows.append(f"{r:.2f},0.0001,0.0000,0.003,0.667,0.333,0.667,"
                        f"0.333,6,10000,")
        else:
            rows.append(f"{r:.2f},0.85,0.92,1.01,0.42,0.58,0.40,0.60,"
                        f",10000,")
    return _write(tmp_path / "sweep.csv",
                  "param,lambda_tau,h6,lz,p11,p01,p00,p10,period,"
                  "n_symbols,flags", rows)


@pytest.fixture
def windows_csv(tmp_path):
    return _write(tmp_path / "windows.csv",
                  "param_lo,param_hi,period,code,symmetric",
                  ["58.00,62.50,6,000111,True"])


@pytest.fixture
def map_csv(tmp_path):
    z = 30 + 10 * np.abs(np.sin(0.7 * np.arange(200)))
    rows = [f"{a:.4f},{b:.4f}" for a, b in zip(z[:-1], z[1:])]
    return _write(tmp_path / "map.csv", "z_n,z_np1", rows)
