import numpy as np
import pytest

from autoll import io as aio
from autoll.cli import main
from autoll.model import extract_features


def run_cli(*args):
    return main([str(a) for a in args])


class TestGenerate:
    def test_writes_loadable_square_matrix(self, tmp_path):
        out = tmp_path / "a.csv"
        assert run_cli("generate", "--model", "dgm", "--n", "12",
                       "--sigma", "0.05", "--seed", "3", "--out", out) == 0
        A = aio.load_matrix_csv(out)
        assert A.n == 12
        assert not A.directed

    def test_directed_flag(self, tmp_path):
        out = tmp_path / "a.csv"
        run_cli("generate", "--model", "dgm", "--n", "10", "--directed",
                "--seed", "3", "--out", out)
        assert aio.load_matrix_csv(out).directed

    def test_same_seed_same_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            run_cli("generate", "--model", "sbm", "--n", "9", "--sigma", "0.02",
                    "--seed", "11", "--out", out)
        assert a.read_bytes() == b.read_bytes()

    def test_outlier_rate_flows_through(self, tmp_path):
        out = tmp_path / "a.csv"
        run_cli("generate", "--model", "dgm", "--n", "16", "--directed",
                "--outlier-p", "0.4", "--seed", "1", "--out", out)
        entries = aio.load_matrix_csv(out).entries
        _, counts = np.unique(entries, return_counts=True)
        assert counts.max() > 0.25 * entries.size

    def test_bad_generator_config_exits_nonzero(self, tmp_path, capsys):
        code = run_cli("generate", "--model", "sbm", "--n", "10",
                       "--out", tmp_path / "a.csv")
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestReorder:
    @pytest.fixture()
    def matrix_file(self, tmp_path):
        out = tmp_path / "a.csv"
        run_cli("generate", "--model", "dgm", "--n", "12", "--sigma", "0.03",
                "--seed", "5", "--out", out)
        return out

    def test_emits_full_report(self, tmp_path, matrix_file):
        prefix = tmp_path / "run"
        code = run_cli("reorder", "--input", matrix_file, "--epochs", "20",
                       "--restarts", "2", "--seed", "1", "--out-prefix", prefix)
        assert code == 0
        ordering = (tmp_path / "run_ordering.csv").read_text().splitlines()
        assert ordering[0] == "position,node_id,feature_z"
        assert len(ordering) == 13
        features = (tmp_path / "run_features.csv").read_text().splitlines()
        assert features[0] == "node_id,feature_z"
        assert (tmp_path / "run_reordered.pgm").read_bytes().startswith(b"P5\n12 12\n")
        assert (tmp_path / "run_reconstruction.pgm").read_bytes().startswith(b"P5\n")
        assert (tmp_path / "run_reordered.png").read_bytes().startswith(b"\x89PNG")
        assert (tmp_path / "run_reconstruction.png").exists()
        model = aio.load_checkpoint(tmp_path / "run_model.json")
        assert model.variant == "undirected"

    def test_ordering_column_is_sorted_and_feature_matches_checkpoint(
            self, tmp_path, matrix_file):
        prefix = tmp_path / "run"
        run_cli("reorder", "--input", matrix_file, "--epochs", "20",
                "--restarts", "2", "--seed", "1", "--out-prefix", prefix)
        rows = [line.split(",") for line in
                (tmp_path / "run_ordering.csv").read_text().splitlines()[1:]]
        zs = [float(r[2]) for r in rows]
        assert zs == sorted(zs)
        model = aio.load_checkpoint(tmp_path / "run_model.json")
        A = aio.load_matrix_csv(matrix_file)
        z = extract_features(model, A)
        node_ids = [int(r[1]) for r in rows]
        assert zs == [z[i - 1] for i in node_ids]

    def test_no_figures_flag(self, tmp_path, matrix_file):
        prefix = tmp_path / "bare"
        run_cli("reorder", "--input", matrix_file, "--epochs", "10",
                "--restarts", "1", "--no-figures", "--out-prefix", prefix)
        assert not (tmp_path / "bare_reordered.png").exists()
        assert (tmp_path / "bare_reordered.pgm").exists()

    def test_png_bytes_deterministic(self, tmp_path, matrix_file):
        for prefix in ("p1", "p2"):
            run_cli("reorder", "--input", matrix_file, "--epochs", "10",
                    "--restarts", "1", "--seed", "2",
                    "--out-prefix", tmp_path / prefix)
        assert ((tmp_path / "p1_reordered.png").read_bytes()
                == (tmp_path / "p2_reordered.png").read_bytes())

    def test_edge_list_input_with_undersampling(self, tmp_path):
        edges = tmp_path / "net.tsv"
        lines = []
        rng = np.random.default_rng(0)
        for _ in range(30):
            i, j = rng.integers(1, 13, size=2)
            if i != j:
                lines.append(f"{i} {j}")
        edges.write_text("\n".join(lines) + "\n")
        prefix = tmp_path / "net"
        code = run_cli("reorder", "--input", edges, "--variant", "d",
                       "--epochs", "10", "--restarts", "1",
                       "--undersample-mult", "2", "--out-prefix", prefix)
        assert code == 0
        labels = (tmp_path / "net_labels.csv").read_text().splitlines()
        assert labels[0] == "node_id,label"
        model = aio.load_checkpoint(tmp_path / "net_model.json")
        assert model.variant == "directed"

    def test_missing_input_exits_nonzero(self, tmp_path, capsys):
        code = run_cli("reorder", "--input", tmp_path / "nope.csv",
                       "--out-prefix", tmp_path / "x")
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestBaseline:
    def test_emits_ordering_and_heatmaps(self, tmp_path):
        matrix = tmp_path / "a.csv"
        run_cli("generate", "--model", "dgm", "--n", "10", "--sigma", "0.02",
                "--seed", "7", "--out", matrix)
        prefix = tmp_path / "mds"
        code = run_cli("baseline", "--method", "mds", "--input", matrix,
                       "--out-prefix", prefix)
        assert code == 0
        lines = (tmp_path / "mds_ordering.csv").read_text().splitlines()
        assert lines[0] == "position,node_id,feature_z"
        assert len(lines) == 11
        assert (tmp_path / "mds_reordered.pgm").exists()
        assert (tmp_path / "mds_reordered.png").exists()

    def test_all_methods_run(self, tmp_path):
        matrix = tmp_path / "a.csv"
        run_cli("generate", "--model", "dgm", "--n", "8", "--sigma", "0.02",
                "--directed", "--seed", "7", "--out", matrix)
        for method in ("svd-rank-one", "svd-angle", "mds"):
            assert run_cli("baseline", "--method", method, "--input", matrix,
                           "--no-figures",
                           "--out-prefix", tmp_path / method) == 0


class TestBench:
    def test_sweep_writes_csv(self, tmp_path):
        cfg = tmp_path / "sweep.cfg"
        cfg.write_text("methods = svd-angle, mds\nn = 10\nt_min = 1\n"
                       "t_max = 2\ntrials = 2\nseed = 4\n")
        out = tmp_path / "results.csv"
        assert run_cli("bench", "--config", cfg, "--out", out) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "method,t,trial,error,seconds"
        assert len(lines) == 1 + 2 * 2 * 2

    def test_bad_config_exits_nonzero(self, tmp_path, capsys):
        cfg = tmp_path / "sweep.cfg"
        cfg.write_text("methods = pagerank\n")
        assert run_cli("bench", "--config", cfg, "--out", tmp_path / "r.csv") == 1
        assert "error:" in capsys.readouterr().err
