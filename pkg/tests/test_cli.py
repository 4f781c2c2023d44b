import math
import subprocess
import sys

import numpy as np
import pytest

from tomokit.cli import main, parse_pi_value
from tomokit.io import read_image_raw, read_sinogram


def run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "tomokit.cli", *args],
        cwd=cwd, capture_output=True, text=True)


class TestParsePiValue:
    def test_plain_float(self):
        assert parse_pi_value("180") == 180.0

    def test_multiple_of_pi(self):
        assert parse_pi_value("50pi") == pytest.approx(50 * math.pi)

    def test_fraction(self):
        assert parse_pi_value("pi/3") == pytest.approx(math.pi / 3)

    def test_bad_input(self):
        with pytest.raises(ValueError):
            parse_pi_value("fifty")


class TestInProcess:
    def test_phantom_and_compare(self, tmp_path):
        out = tmp_path / "ph.img"
        assert main(["phantom", "--name", "unit-ball", "--size", "32",
                     "--output", str(out)]) == 0
        img = read_image_raw(out)
        assert img.values.shape == (32, 32)
        assert main(["compare", str(out), str(out)]) == 0

    def test_sinogram_analytic_vs_discrete(self, tmp_path):
        a = tmp_path / "a.sino"
        b = tmp_path / "d.sino"
        base = ["sinogram", "--name", "unit-ball", "--bandwidth", "8pi"]
        assert main(base + ["--output", str(a)]) == 0
        assert main(base + ["--discrete", "--size", "128", "--output", str(b)]) == 0
        sa, sb = read_sinogram(a), read_sinogram(b)
        assert sa.geometry == sb.geometry
        dev = np.linalg.norm(sa.values - sb.values) / np.linalg.norm(sa.values)
        assert dev < 0.05

    def test_fbp_pipeline(self, tmp_path):
        sino = tmp_path / "s.sino"
        rec = tmp_path / "r.img"
        truth = tmp_path / "t.img"
        main(["sinogram", "--name", "unit-ball", "--bandwidth", "50pi",
              "--output", str(sino)])
        main(["phantom", "--name", "unit-ball", "--size", "128",
              "--output", str(truth)])
        assert main(["fbp", "--input", str(sino), "--size", "128",
                     "--output", str(rec)]) == 0
        a = read_image_raw(rec)
        b = read_image_raw(truth)
        err = np.linalg.norm(a.values - b.values) / np.linalg.norm(b.values)
        assert err < 0.1

    def test_config_error_exit_code(self, tmp_path, capsys):
        code = main(["sinogram", "--name", "unit-ball", "--bandwidth", "7.3",
                     "--output", str(tmp_path / "x.sino")])
        assert code == 2
        err = capsys.readouterr().err
        assert "multiple of pi" in err
        assert len(err.strip().splitlines()) == 1

    def test_missing_input_exit_code(self, tmp_path):
        assert main(["fbp", "--input", str(tmp_path / "nope.sino"),
                     "--output", str(tmp_path / "r.img")]) == 2

    def test_fan_flag_mismatch(self, tmp_path):
        sino = tmp_path / "s.sino"
        main(["sinogram", "--name", "unit-ball", "--bandwidth", "8pi",
              "--output", str(sino)])
        assert main(["fbp", "--input", str(sino), "--fan", "--bandwidth", "20",
                     "--output", str(tmp_path / "r.img")]) == 2

    def test_art_exit_on_sweep_limit(self, tmp_path):
        sino = tmp_path / "s.sino"
        main(["sinogram", "--name", "unit-ball", "--bandwidth", "4pi",
              "--output", str(sino)])
        code = main(["art", "--input", str(sino), "--size", "16",
                     "--max-sweeps", "1", "--delta", "1e-14",
                     "--output", str(tmp_path / "r.img")])
        assert code == 3
        assert (tmp_path / "r.img").exists()  # result still written

    def test_compare_csv_output(self, tmp_path):
        out = tmp_path / "ph.img"
        main(["phantom", "--name", "unit-ball", "--size", "16",
              "--output", str(out)])
        csv = tmp_path / "m.csv"
        assert main(["compare", str(out), str(out), "--output", str(csv)]) == 0
        lines = csv.read_text().splitlines()
        assert lines[0] == "metric,value"
        assert lines[1].startswith("relative_l2,")

    def test_phantom_from_file(self, tmp_path):
        src = tmp_path / "ph.txt"
        src.write_text("# ball\n0.5 0.5 0 0 0 1.0\n", encoding="utf-8")
        out = tmp_path / "p.img"
        assert main(["phantom", "--file", str(src), "--size", "16",
                     "--output", str(out)]) == 0
        img = read_image_raw(out)
        assert img.values[8, 8] == 1.0

    def test_noise_prints_realized_ratio(self, tmp_path, capsys):
        sino = tmp_path / "s.sino"
        main(["sinogram", "--name", "unit-ball", "--bandwidth", "8pi",
              "--output", str(sino)])
        assert main(["noise", "--input", str(sino), "--level", "0.1",
                     "--seed", "4", "--output", str(tmp_path / "n.sino")]) == 0
        assert "realized ratio" in capsys.readouterr().out

    def test_tikhonov_runs(self, tmp_path):
        sino = tmp_path / "s.sino"
        main(["sinogram", "--name", "unit-ball", "--bandwidth", "4pi",
              "--output", str(sino)])
        assert main(["tikhonov", "--input", str(sino), "--size", "16",
                     "--gamma", "0.05", "--output", str(tmp_path / "t.img")]) == 0

    def test_matrix_dump(self, tmp_path):
        sino = tmp_path / "s.sino"
        main(["sinogram", "--name", "unit-ball", "--bandwidth", "2pi",
              "--output", str(sino)])
        dump = tmp_path / "A.txt"
        main(["art", "--input", str(sino), "--size", "8", "--max-sweeps", "50",
              "--output", str(tmp_path / "r.img"), "--dump-matrix", str(dump)])
        header = dump.read_text().splitlines()[0].split()
        assert header[0] == "30" and header[1] == "64"


class TestSubprocessRoundTrip:
    def test_figures_and_data_written(self, tmp_path):
        res = run_cli(["sinogram", "--name", "shepp-logan", "--bandwidth", "10pi",
                       "--output", "s.sino", "--figure", "s.png"], tmp_path)
        assert res.returncode == 0, res.stderr
        assert (tmp_path / "s.sino").exists()
        assert (tmp_path / "s.png").stat().st_size > 0

    def test_exit_code_two_from_subprocess(self, tmp_path):
        res = run_cli(["sinogram", "--name", "unit-ball", "--bandwidth", "1.7",
                       "--output", "s.sino"], tmp_path)
        assert res.returncode == 2
        assert res.stderr.strip()
