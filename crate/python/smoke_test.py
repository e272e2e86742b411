"""Smoke test for the coarse_bell_py extension module.

Uses an installed module if one is importable; otherwise builds the
extension with cargo and loads it from a temporary directory.
"""

import math
import pathlib
import shutil
import subprocess
import sys
import sysconfig
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import coarse_bell_py

        return coarse_bell_py
    except ImportError:
        pass
    subprocess.run(
        ["cargo", "build", "--release", "-p", "coarse-bell-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = {"darwin": "libcoarse_bell_py.dylib", "win32": "coarse_bell_py.dll"}.get(sys.platform, "libcoarse_bell_py.so")
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    dest = pathlib.Path(tempfile.mkdtemp()) / f"coarse_bell_py{suffix}"
    shutil.copy(ROOT / "target" / "release" / lib, dest)
    sys.path.insert(0, str(dest.parent))
    import coarse_bell_py

    return coarse_bell_py


def main():
    cb = load()

    # Sharp settings reach the quantum bound.
    sharp = cb.BellConfig((0.0, math.pi / 4, -math.pi / 8, math.pi / 8), cb.FuzzinessModel.frequency(0.0), 1.0)
    r = cb.bell_value(sharp)
    assert abs(r.b - (r.e1 + r.e2 + r.e3 - r.e4)) < 1e-12
    print(f"sharp |B| = {r.abs_b:.6f}")

    # The fig1 geometry: sqrt(2) sharp, 1.5 at its maximum.
    fig1 = cb.BellConfig((0.0, math.pi / 8, 0.0, -math.pi / 8), cb.FuzzinessModel.frequency(0.0), math.sqrt(2) * math.pi / 8)
    assert abs(cb.bell_value(fig1).abs_b - math.sqrt(2)) < 1e-12
    peak = cb.bell_value(fig1.with_delta_w(math.sqrt(math.log(math.sqrt(2))))).abs_b
    assert abs(peak - 1.5) < 1e-12, peak
    print(f"fig1 peak |B| = {peak:.9f}")

    assert abs(cb.coarsened_correlation(0.1, 0.2, 0.0, 0.0) + math.cos(0.6)) < 1e-15

    sigma = cb.effective_sigma(math.pi, 1.0, cb.FuzzinessModel.frequency(0.5))
    assert abs(sigma - math.pi / 2) < 1e-12

    noisy = cb.decohered_bell(fig1.with_delta_w(0.5), cb.NoiseSpec(0.0, ["a"]))
    assert abs(noisy.abs_b - cb.bell_value(fig1.with_delta_w(0.5)).abs_b) < 1e-9

    value, err = cb.joint_angle_density(0.5, 1.0, math.pi / 4, 0.6, 0.6)
    assert value > 0 and err >= 0
    print(f"joint density at 0.5 = {value:.6f}")

    ids = [s["id"] for s in cb.list_scenarios()]
    assert "fig1" in ids and "fig7" in ids
    scan = cb.run_scenario("fig1", overrides=["grid.points=11"], threads=2)
    assert len(scan["rows"]["rows"]) == 11
    csv = cb.scenario_csv(config_toml=cb.preset_toml("smallangle"))
    assert csv.startswith("lambda,")

    report = cb.oracle_check("smallangle", samples=20_000, seed=3)
    assert report["pass"], report
    print(f"oracle smallangle max z = {report['max_z']:.2f}")

    try:
        cb.run_scenario("no-such-scenario")
    except cb.UsageError as e:
        assert isinstance(e, cb.CoarseBellError)
    else:
        raise AssertionError("expected UsageError")

    print("smoke test OK")


if __name__ == "__main__":
    main()
