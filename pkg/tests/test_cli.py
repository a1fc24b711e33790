import json

import pytest

from motifwalk.cli import build_parser, main


def test_fixture_and_enumerate(tmp_path, capsys):
    assert main(["fixture", "--out", str(tmp_path / "fx"), "--name", "fig1"]) == 0
    graph = tmp_path / "fx" / "fig1.txt"
    assert main(["enumerate", "--graph", str(graph), "--k", "3", "--out", str(tmp_path / "truth")]) == 0
    out = capsys.readouterr().out
    assert "7 CISes" in out
    table = next((tmp_path / "truth").glob("truth_*_k3.tsv")).read_text().splitlines()
    assert [line.split("\t")[2] for line in table[2:]] == ["3", "4"]


def test_sample_is_deterministic_and_accurate(tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}"
        args = ["sample", "--graph", "fixture:fig1", "--k", "3", "--method", "psrw", "--steps", "10000",
                "--runs", "200", "--seed", "5", "--truth", str(tmp_path / "t"), "--compute-truth",
                "--out", str(out)]
        assert main(args) == 0
        files = {p.name: p.read_bytes() for p in sorted(out.iterdir())}
        manifest = json.loads(files.pop("manifest.json"))
        manifest["config"].pop("out")
        files["manifest"] = manifest
        outs.append(files)
    assert outs[0] == outs[1]
    rows = outs[0]["summary_psrw_k3.csv"].decode().splitlines()[1:]
    means = [float(r.split(",")[3]) for r in rows]
    assert abs(means[0] - 3 / 7) < 0.02 and abs(means[1] - 4 / 7) < 0.02
    manifest = outs[0]["manifest"]
    assert manifest["config"]["runs"] == 200 and "version" in manifest


def test_worker_count_does_not_change_output(tmp_path):
    res = []
    for w in (1, 2):
        out = tmp_path / f"w{w}"
        main(["sample", "--graph", "fixture:random12", "--k", "3", "--method", "srw", "--steps", "500",
              "--runs", "6", "--workers", str(w), "--out", str(out)])
        res.append((out / "estimates_srw_k3.csv").read_bytes())
    assert res[0] == res[1]


def test_mss_emits_three_sizes(tmp_path):
    out = tmp_path / "mss"
    main(["sample", "--graph", "fixture:random12", "--k", "4", "--method", "mss", "--steps", "500",
          "--runs", "3", "--out", str(out)])
    assert {p.name for p in out.glob("summary_mss_k*.csv")} == {f"summary_mss_k{m}.csv" for m in (3, 4, 5)}


def test_budget_accounting_matches_runs_table(tmp_path):
    out = tmp_path / "b"
    main(["sample", "--graph", "fixture:random12", "--k", "3", "--method", "psrw", "--budget-nodes", "8",
          "--runs", "4", "--out", str(out)])
    rows = (out / "runs_psrw.csv").read_text().splitlines()[1:]
    assert all(r.split(",")[3] == "8" and r.split(",")[2] == "1" for r in rows)


def test_compare_writes_tables(tmp_path):
    out = tmp_path / "cmp"
    assert main(["compare", "--graph", "fixture:random12", "--k", "3", "--method", "psrw", "srw", "mhsrw",
                 "--steps", "2000", "--runs", "5", "--truth", str(tmp_path / "t"), "--compute-truth",
                 "--out", str(out)]) == 0
    rmse = (out / "compare_rmse.csv").read_text().splitlines()
    assert rmse[0] == "method,size,rmse,mean_nrmse,runs" and len(rmse) == 4


def test_compare_requires_methods():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["compare", "--graph", "fixture:fig1", "--steps", "10"])


def test_missing_truth_noted(tmp_path, capsys):
    main(["sample", "--graph", "fixture:fig1", "--k", "3", "--steps", "100", "--runs", "2"])
    assert "no ground truth" in capsys.readouterr().out


def test_zscore_minimal(tmp_path, capsys):
    assert main(["zscore", "--graph", "fixture:random12", "--k", "3", "--n-random", "2",
                 "--out", str(tmp_path)]) == 0
    assert (tmp_path / "zscore.csv").read_text().startswith("class_id,omega,mu,sigma,z,method,n_random")


def test_zscore_flags_undefined_sigma(capsys):
    main(["zscore", "--graph", "fixture:k5", "--k", "3", "--n-random", "2"])
    assert "undefined" in capsys.readouterr().out


def test_unsupported_registry_warns(tmp_path):
    from motifwalk.motifs import RegistryFallbackWarning

    with pytest.warns(RegistryFallbackWarning):
        main(["enumerate", "--graph", "fixture:directed-cycle3", "--mode", "directed", "--k", "3",
              "--no-lcc"])
        main(["enumerate", "--graph", "fixture:random12", "--k", "7"])


def test_bad_budget_is_usage_error(capsys):
    assert main(["sample", "--graph", "fixture:fig1", "--k", "3", "--runs", "2"]) == 2
