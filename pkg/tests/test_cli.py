"""Driver behavior: config precedence, outputs, determinism, exit codes."""

import glob
import json
import os

import pytest

from arithmix.cli import (
    ExperimentConfig,
    _joint_bins,
    build_parser,
    load_config_file,
    main,
    resolve_config,
    run_mix,
    sweep_ds,
)


def read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


class TestConfig:
    def test_defaults_valid(self):
        ExperimentConfig().validate()

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"d_min": 10, "d_max": 5},
            {"l_max": 17},
            {"tau_cutoff": 10**7 + 1},
            {"tau_cutoff": 0},
            {"shift_policy": "bogus"},
            {"shift_policy": "explicit", "shifts": ""},
            {"workers": 0},
            {"prime_cap": 2},
        ],
    )
    def test_rejections(self, kwargs):
        with pytest.raises(ValueError):
            ExperimentConfig(**kwargs).validate()

    def test_explicit_shifts_parse(self):
        cfg = ExperimentConfig(shift_policy="explicit", shifts="0, 2,5")
        assert cfg.explicit_shifts() == [0, 2, 5]


class TestConfigFile:
    def test_parse(self, tmp_path):
        p = tmp_path / "cfg.txt"
        p.write_text("# comment\nd_max = 40\nsquarefree_only = false\n\nl_max=3\n")
        got = load_config_file(str(p))
        assert got == {"d_max": 40, "squarefree_only": False, "l_max": 3}

    def test_unknown_key(self, tmp_path):
        p = tmp_path / "cfg.txt"
        p.write_text("bogus = 1\n")
        with pytest.raises(ValueError):
            load_config_file(str(p))

    def test_malformed_line(self, tmp_path):
        p = tmp_path / "cfg.txt"
        p.write_text("d_max 40\n")
        with pytest.raises(ValueError):
            load_config_file(str(p))

    def test_bad_bool(self, tmp_path):
        p = tmp_path / "cfg.txt"
        p.write_text("squarefree_only = maybe\n")
        with pytest.raises(ValueError):
            load_config_file(str(p))

    def test_precedence(self, tmp_path, monkeypatch):
        p = tmp_path / "cfg.txt"
        p.write_text("d_max = 40\ncache_dir = fromfile\n")
        monkeypatch.setenv("ARITHMIX_CACHE_DIR", "fromenv")
        args = build_parser().parse_args(["mix", "--config", str(p)])
        assert resolve_config(args).cache_dir == "fromenv"
        args = build_parser().parse_args(
            ["mix", "--config", str(p), "--cache-dir", "fromflag"]
        )
        cfg = resolve_config(args)
        assert cfg.cache_dir == "fromflag"
        assert cfg.d_max == 40  # file survives where no flag overrides
        monkeypatch.delenv("ARITHMIX_CACHE_DIR")
        args = build_parser().parse_args(["mix", "--config", str(p)])
        assert resolve_config(args).cache_dir == "fromfile"


class TestSweep:
    def test_admissibility_and_squarefree(self):
        cfg = ExperimentConfig(d_min=1, d_max=20)
        ds = sweep_ds(cfg)
        assert all(d % 8 not in (0, 4, 7) for d in ds)
        assert 9 not in ds and 18 not in ds  # 9 = 3^2, 18 = 2*3^2
        loose = sweep_ds(ExperimentConfig(d_min=1, d_max=20, squarefree_only=False))
        assert 9 in loose and 18 in loose

    def test_empty(self):
        assert sweep_ds(ExperimentConfig(d_min=7, d_max=7)) == []

    def test_joint_bins_empty(self):
        bins = _joint_bins([])
        assert all(b["count"] == 0 and b["median_abs_joint"] is None for b in bins)


@pytest.fixture(scope="module")
def mix_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("out")
    cache = tmp_path_factory.mktemp("cache")
    code = main(
        [
            "mix",
            "--d-min", "3", "--d-max", "40",
            "--l-max", "3",
            "--output-dir", str(out),
            "--cache-dir", str(cache),
        ]
    )
    return code, out, cache


class TestMixOutputs:
    def test_exit_zero(self, mix_out):
        code, _, _ = mix_out
        assert code == 0

    def test_files(self, mix_out):
        _, out, _ = mix_out
        for name in ("mixing.csv", "mixing_summary.json", "mixing_verify.json", "mixing.png"):
            assert (out / name).stat().st_size > 0

    def test_csv_provenance_columns(self, mix_out):
        _, out, _ = mix_out
        lines = read(out / "mixing.csv").splitlines()
        header = lines[0].split(",")
        for col in ("d", "packet_id", "q", "shift_index"):
            assert col in header
        assert len(lines) > 10

    def test_summary_parseval(self, mix_out):
        _, out, _ = mix_out
        summary = json.loads(read(out / "mixing_summary.json"))
        assert summary["parseval_max"] < 1e-9
        assert summary["d_count"] > 0
        assert summary["skipped"] == []

    def test_verify_rows_shape(self, mix_out):
        _, out, _ = mix_out
        rows = json.loads(read(out / "mixing_verify.json"))
        for row in rows:
            assert set(row) == {"name", "params", "lhs", "rhs", "residual", "pass"}
            assert row["pass"] is True

    def test_rerun_byte_identical(self, mix_out, tmp_path):
        _, out, cache = mix_out
        out2 = tmp_path / "again"
        code = main(
            [
                "mix",
                "--d-min", "3", "--d-max", "40",
                "--l-max", "3",
                "--output-dir", str(out2),
                "--cache-dir", str(cache),
            ]
        )
        assert code == 0
        for name in os.listdir(out):
            assert read(out / name) == read(out2 / name) if name.endswith((".csv", ".json")) else (
                (out / name).read_bytes() == (out2 / name).read_bytes()
            )

    def test_empty_range_header_only(self, tmp_path):
        out = tmp_path / "empty"
        code = main(
            ["mix", "--d-min", "7", "--d-max", "7",
             "--output-dir", str(out), "--cache-dir", str(tmp_path / "c")]
        )
        assert code == 0
        lines = read(out / "mixing.csv").splitlines()
        assert len(lines) == 1 and lines[0].startswith("d,")


class TestPolicies:
    def test_minimal_q(self, tmp_path):
        out = tmp_path / "o"
        code = main(
            ["mix", "--d-min", "59", "--d-max", "59", "--shift-policy", "minimal-q",
             "--output-dir", str(out), "--cache-dir", str(tmp_path / "c")]
        )
        assert code == 0
        rows = read(out / "mixing.csv").splitlines()[1:]
        shift_cols = {r.split(",")[6] for r in rows if r.split(",")[6] != ""}
        assert len(shift_cols) == 2 and "0" in shift_cols  # identity + one class

    def test_explicit_out_of_range_falls_back(self, tmp_path):
        out = tmp_path / "o"
        code = main(
            ["mix", "--d-min", "3", "--d-max", "3", "--shift-policy", "explicit",
             "--shifts", "9",
             "--output-dir", str(out), "--cache-dir", str(tmp_path / "c")]
        )
        assert code == 0  # h = 1 at d = 3: falls back to the identity shift


class TestErrorPaths:
    def test_unknown_config_key_exit_2(self, tmp_path):
        p = tmp_path / "cfg.txt"
        p.write_text("nope = 1\n")
        assert main(["mix", "--config", str(p)]) == 2

    def test_invalid_range_exit_2(self, tmp_path):
        assert main(["mix", "--d-min", "9", "--d-max", "3",
                     "--output-dir", str(tmp_path)]) == 2

    def test_corrupt_tau_cache_refused(self, tmp_path):
        out = tmp_path / "o"
        cache = tmp_path / "c"
        code = main(
            ["sums", "--d-max", "20", "--tau-cutoff", "500",
             "--output-dir", str(out), "--cache-dir", str(cache)]
        )
        assert code == 0
        path = glob.glob(str(cache / "tau_*.txt"))[0]
        lines = read(path).splitlines()
        lines[3] = "garbage"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        code = main(
            ["sums", "--d-max", "20", "--tau-cutoff", "500",
             "--output-dir", str(out), "--cache-dir", str(cache)]
        )
        assert code == 2  # refuses; does not silently rebuild
        assert read(path).splitlines()[3] == "garbage"

    def test_missing_subcommand_usage_error(self):
        with pytest.raises(SystemExit):
            main([])


class TestOtherRunners:
    def test_forms_and_sphere(self, tmp_path):
        out = tmp_path / "o"
        cache = str(tmp_path / "c")
        assert main(["forms", "--d-max", "30",
                     "--output-dir", str(out), "--cache-dir", cache]) == 0
        assert main(["sphere", "--d-max", "30",
                     "--output-dir", str(out), "--cache-dir", cache]) == 0
        assert main(["orbit", "--d-max", "30",
                     "--output-dir", str(out), "--cache-dir", cache]) == 0
        forms = read(out / "forms.csv").splitlines()
        assert forms[0].split(",")[:2] == ["disc", "class_index"]
        assert all(r.endswith(",1") for r in forms[1:])  # every class within bound
        sphere_rows = read(out / "sphere_points.csv").splitlines()
        assert sphere_rows[0] == "d,x,y,z,is_canonical,orbit_size"
        packets = read(out / "packets.csv").splitlines()
        assert len(packets) > 1
        for row in packets[1:]:
            vals = row.split(",")
            assert int(vals[2]) == int(vals[3])  # h_class == packet_size
        for name in ("forms_verify.json", "sphere_verify.json", "packets_verify.json"):
            rows = json.loads(read(out / name))
            assert rows and all(r["pass"] for r in rows)

    def test_local_runner(self, tmp_path):
        out = tmp_path / "o"
        assert main(["local", "--output-dir", str(out),
                     "--cache-dir", str(tmp_path / "c")]) == 0
        rows = json.loads(read(out / "local_verify.json"))
        names = {r["name"] for r in rows}
        assert {"recovering_mismatches", "equivariance_failures", "tate_truncation",
                "arch_tate", "arch_bessel_mellin", "orthonormality_residual"} <= names
        assert all(r["pass"] for r in rows)
        table = read(out / "local.csv").splitlines()
        assert table[0] == "p,k,f,j,chi_r,check,samples,failures"
        assert all(r.endswith(",0") for r in table[1:])

    def test_sums_runner(self, tmp_path):
        out = tmp_path / "o"
        assert main(["sums", "--d-max", "30", "--tau-cutoff", "3000",
                     "--output-dir", str(out), "--cache-dir", str(tmp_path / "c")]) == 0
        rows = json.loads(read(out / "sums_verify.json"))
        assert all(r["pass"] for r in rows)
        table = read(out / "sums.csv").splitlines()
        assert table[0].startswith("disc,a,b,c,")
        assert len(table) > 1
        assert (out / "sums.png").stat().st_size > 0
