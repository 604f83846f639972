import numpy as np

from smotfs import load_path_set
from smotfs.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_complexity_mld_exact_big_integer(capsys):
    code, out, _ = run_cli(
        capsys, "complexity", "--detector", "mld",
        "--m", "8", "--n", "4", "--nt", "2", "--nr", "2", "--q", "4", "--p", "4",
    )
    assert code == 0
    assert out.strip() == str(8**32) == "79228162514264337593543950336"


def test_complexity_doscd_theta(capsys):
    code, out, _ = run_cli(
        capsys, "complexity", "--detector", "doscd", "--theta", "0.625",
        "--m", "8", "--n", "4", "--nt", "2", "--nr", "2", "--q", "4", "--p", "4",
    )
    assert code == 0
    assert out.strip() == "85899345920"


def test_complexity_mpd(capsys):
    code, out, _ = run_cli(
        capsys, "complexity", "--detector", "mpd", "--tmp", "10",
        "--m", "8", "--n", "4", "--nt", "2", "--nr", "2", "--q", "4", "--p", "4",
    )
    assert code == 0
    assert out.strip() == "10485760"


def test_complexity_needs_depth(capsys):
    code, _, err = run_cli(capsys, "complexity", "--detector", "doscd")
    assert code == 2
    assert "theta" in err


def test_channel_dump_deterministic_and_loadable(tmp_path, capsys):
    out1 = tmp_path / "a.txt"
    out2 = tmp_path / "b.txt"
    for out in (out1, out2):
        code, _, _ = run_cli(
            capsys, "channel-dump", "--seed", "42", "--out", str(out),
            "--m", "4", "--n", "2", "--nt", "2", "--nr", "2", "--p", "3",
        )
        assert code == 0
    assert out1.read_bytes() == out2.read_bytes()
    paths, header = load_path_set(out1.read_text())
    assert header["m"] == 4 and header["p"] == 3 and header["seed"] == 42
    assert paths.gains.shape == (3, 2, 2)
    assert np.all(paths.delays <= 3) and np.all(np.abs(paths.dopplers) <= 1)


def test_ber_runs_and_is_deterministic(tmp_path, capsys):
    args = [
        "ber", "--detector", "doscd", "--td", "4",
        "--m", "2", "--n", "2", "--nt", "2", "--nr", "2", "--q", "4", "--p", "2",
        "--snr-start", "8", "--snr-stop", "12", "--snr-step", "4",
        "--min-trials", "30", "--target-errors", "3", "--max-trials", "60",
        "--seed", "7",
    ]
    f1, f2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    assert run_cli(capsys, *args, "--out", str(f1))[0] == 0
    assert run_cli(capsys, *args, "--out", str(f2))[0] == 0
    assert f1.read_bytes() == f2.read_bytes()
    lines = f1.read_text().splitlines()
    assert lines[0] == "snr_db,trials,bit_errors,ber,frame_errors,fer,detector,td,seed"
    assert len(lines) == 3
    assert lines[1].split(",")[6] == "doscd"


def test_capacity_cli(tmp_path, capsys):
    out = tmp_path / "cap.csv"
    code, _, _ = run_cli(
        capsys, "capacity", "--m", "2", "--n", "1", "--nt", "2", "--nr", "1",
        "--q", "4", "--p", "2", "--snr-start", "0", "--snr-stop", "0",
        "--samples", "50", "--seed", "3", "--out", str(out),
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "snr_db,c_hat,std_err,samples,seed"
    snr, c_hat, std_err, samples, seed = lines[1].split(",")
    assert float(snr) == 0.0 and int(samples) == 50 and int(seed) == 3
    assert 0.0 <= float(c_hat) <= 3.0


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# desk-scale run\n"
        "m = 2\nn = 2\nnt = 2\nnr = 2\nq = 4\np = 2\n"
        "detector = doscd\ntd = 4\n"
        "snr-start = 8\nsnr-stop = 8\nsnr-step = 2\n"
        "min-trials = 20\ntarget-errors = 2\nmax-trials = 40\nseed = 1\n"
    )
    base = tmp_path / "base.csv"
    override = tmp_path / "override.csv"
    assert run_cli(capsys, "ber", "--config", str(cfg), "--out", str(base))[0] == 0
    assert (
        run_cli(capsys, "ber", "--config", str(cfg), "--seed", "2", "--out", str(override))[0]
        == 0
    )
    assert base.read_text().splitlines()[1].endswith(",doscd,4,1")
    assert override.read_text().splitlines()[1].endswith(",doscd,4,2")


def test_exit_code_2_on_bad_configuration(capsys, tmp_path):
    code, _, err = run_cli(
        capsys, "ber", "--q", "3", "--out", str(tmp_path / "x.csv"),
        "--min-trials", "5", "--target-errors", "1", "--max-trials", "5",
    )
    assert code == 2 and "power of two" in err
    code, _, err = run_cli(capsys, "ber", "--theta", "0.5", "--td", "4")
    assert code == 2
    code, _, err = run_cli(
        capsys, "ber", "--snr-start", "10", "--snr-stop", "5",
    )
    assert code == 2


def test_exit_code_3_on_budget(capsys, tmp_path):
    code, _, err = run_cli(
        capsys, "ber", "--detector", "mld",
        "--m", "8", "--n", "4", "--p", "4",
        "--min-trials", "1", "--target-errors", "1", "--max-trials", "1",
        "--out", str(tmp_path / "x.csv"),
    )
    assert code == 3 and "budget" in err


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("bogus = 1\n")
    code, _, err = run_cli(capsys, "ber", "--config", str(cfg))
    assert code == 2 and "bogus" in err
