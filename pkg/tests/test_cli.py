import json

import pytest

from dfsqst.cli import parse_config, run_sweep, run_verify, run_phases, main


class TestParseConfig:
    def test_defaults(self):
        cfg = parse_config(["sweep"])
        assert cfg.command == "sweep"
        assert cfg.n == 2
        assert cfg.channel_lengths == [101, 151, 201]
        assert cfg.ratio_min == 1e-3 and cfg.ratio_max == 1.0
        assert cfg.ratio_steps == 40
        assert cfg.encoding == "both"
        assert cfg.time == "tau"
        assert cfg.sigma_lambda == 0.0
        assert cfg.shots == 200
        assert cfg.seed == 42
        assert cfg.format == "csv"

    def test_flags(self):
        cfg = parse_config(["sweep", "--channel-lengths", "101",
                            "--ratio-steps", "10"])
        assert cfg.channel_lengths == [101]
        assert cfg.ratio_steps == 10

    def test_even_channel_length_rejected(self):
        with pytest.raises(SystemExit) as exc:
            parse_config(["sweep", "--channel-lengths", "100"])
        assert exc.value.code == 2

    def test_unknown_flag_rejected(self):
        with pytest.raises(SystemExit) as exc:
            parse_config(["sweep", "--frobnicate"])
        assert exc.value.code == 2

    def test_bad_time_rejected(self):
        with pytest.raises(SystemExit) as exc:
            parse_config(["sweep", "--time", "soon"])
        assert exc.value.code == 2

    def test_explicit_time_parsed(self):
        cfg = parse_config(["sweep", "--time", "12.5"])
        assert cfg.time == 12.5

    def test_config_file_and_override(self, tmp_path):
        cfg_file = tmp_path / "run.json"
        cfg_file.write_text(json.dumps({"ratio_steps": 7, "seed": 9}))
        cfg = parse_config(["sweep", "--config", str(cfg_file)])
        assert cfg.ratio_steps == 7 and cfg.seed == 9
        # explicit flag wins over the file
        cfg = parse_config(["sweep", "--config", str(cfg_file), "--seed", "3"])
        assert cfg.ratio_steps == 7 and cfg.seed == 3

    def test_config_file_unknown_key(self, tmp_path):
        cfg_file = tmp_path / "run.json"
        cfg_file.write_text(json.dumps({"bogus": 1}))
        with pytest.raises(SystemExit) as exc:
            parse_config(["sweep", "--config", str(cfg_file)])
        assert exc.value.code == 2


class TestSweepCommand:
    def test_default_grid_row_count(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = main(["sweep", "--output", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "N,n,ratio,time,encoding,fidelity"
        assert len(lines) == 1 + 3 * 40 * 2  # header + 240 rows
        for line in lines[1:]:
            fid = float(line.split(",")[5])
            assert -1e-9 <= fid <= 1 + 1e-9

    def test_byte_identical_rerun(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["sweep", "--channel-lengths", "5", "--ratio-steps", "5"]
        main(args + ["--output", str(a)])
        main(args + ["--output", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_csv_round_trip(self, tmp_path):
        from dfsqst.fidelity import sweep_fidelity, default_ratio_grid
        out = tmp_path / "s.csv"
        main(["sweep", "--channel-lengths", "5", "--ratio-steps", "6",
              "--output", str(out)])
        rows = out.read_text().splitlines()[1:]
        expected = sweep_fidelity(2, [5], default_ratio_grid(1e-3, 1.0, 6)).rows
        assert len(rows) == len(expected)
        for line, row in zip(rows, expected):
            N, n, ratio, t, enc, fid = line.split(",")
            assert (int(N), int(n), float(ratio), float(t), enc, float(fid)) == \
                (row.N, row.n, row.ratio, row.t, row.encoding, row.fidelity)

    def test_json_format(self, tmp_path):
        out = tmp_path / "s.json"
        main(["sweep", "--channel-lengths", "3", "--ratio-steps", "3",
              "--format", "json", "--output", str(out)])
        objs = json.loads(out.read_text())
        assert len(objs) == 6
        assert set(objs[0]) == {"N", "n", "ratio", "time", "encoding", "fidelity"}

    def test_single_encoding(self, tmp_path):
        out = tmp_path / "s.csv"
        main(["sweep", "--channel-lengths", "3", "--ratio-steps", "2",
              "--encoding", "dfs", "--output", str(out)])
        lines = out.read_text().splitlines()[1:]
        assert len(lines) == 2
        assert all(line.split(",")[4] == "dfs" for line in lines)

    def test_io_failure_exits_1(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["sweep", "--channel-lengths", "3", "--ratio-steps", "2",
                  "--output", str(tmp_path / "no" / "such" / "dir" / "x.csv")])
        assert exc.value.code == 1


class TestVerifyCommand:
    def test_passes_on_correct_build(self, tmp_path):
        out = tmp_path / "report.json"
        rc = main(["verify", "--shots", "100", "--output", str(out)])
        assert rc == 0
        report = json.loads(out.read_text())
        assert report["overall_pass"] is True
        names = {c["name"] for c in report["checks"]}
        assert {"mirror_inversion", "closed_form_match", "unitarity",
                "kappa_parity_invariance", "formula_vs_oracle",
                "dephasing_dfs_invariance", "dephasing_ndfs_suppression"} == names
        for c in report["checks"]:
            assert set(c) == {"name", "max_error", "tolerance", "pass"}
            assert c["pass"] is True

    def test_zero_tolerance_fails(self, tmp_path):
        out = tmp_path / "report.json"
        rc = main(["verify", "--shots", "50", "--tolerance-scale", "0",
                   "--output", str(out)])
        assert rc == 1
        report = json.loads(out.read_text())  # report still written
        assert report["overall_pass"] is False


class TestPhasesCommand:
    def test_n2_table(self, tmp_path):
        out = tmp_path / "phases.csv"
        rc = main(["phases", "--output", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "pattern,predicted,measured,match"
        assert len(lines) == 1 + 32
        vac = lines[1].split(",")
        assert vac == ["00000", "+1", "+1", "true"]
        assert all(line.endswith("true") for line in lines[1:])

    def test_size_cap_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["phases", "--n", "4"])
        assert exc.value.code == 2


class TestOracleCommand:
    def test_runs_clean(self, tmp_path):
        out = tmp_path / "oracle.json"
        rc = main(["oracle", "--output", str(out)])
        assert rc == 0
        report = json.loads(out.read_text())
        assert report["overall_pass"] is True
        assert report["swap_check"]["pass"] is True
        assert report["formula_vs_oracle"]["max_error"] <= 1e-8
