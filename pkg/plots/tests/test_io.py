import pytest

from gradem_plots import (
    SchemaError,
    read_grad_vs_d_csv,
    read_stat_csv,
    read_trajectory_csv,
)

TRAJ_HEADER = "step,loss,loss_se,grad_norm,potential_u,mu_max,comp_norms"


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestTrajectoryCsv:
    def test_single_block(self, tmp_path):
        path = write(
            tmp_path, "t.csv",
            f"{TRAJ_HEADER}\n0,1.0,0.1,2.0,3.0,1.5,1.0;0.5\n10,0.5,0.1,1.0,2.0,1.0,0.8;0.4\n",
        )
        blocks = read_trajectory_csv(path)
        assert len(blocks) == 1
        assert blocks[0]["step"] == [0, 10]
        assert blocks[0]["comp_norms"][0] == [1.0, 0.5]

    def test_blocks_split_on_step_reset(self, tmp_path):
        rows = "\n".join(
            f"{s},1.0,0.1,2.0,3.0,1.5,1.0" for s in (0, 5, 10, 0, 5, 0)
        )
        path = write(tmp_path, "t.csv", f"{TRAJ_HEADER}\n{rows}\n")
        blocks = read_trajectory_csv(path)
        assert [len(b["step"]) for b in blocks] == [3, 2, 1]

    def test_missing_column_names_first(self, tmp_path):
        path = write(tmp_path, "t.csv", "step,loss\n0,1.0\n")
        with pytest.raises(SchemaError, match="loss_se"):
            read_trajectory_csv(path)

    def test_empty_file(self, tmp_path):
        path = write(tmp_path, "t.csv", "")
        with pytest.raises(SchemaError, match="empty"):
            read_trajectory_csv(path)

    def test_header_only(self, tmp_path):
        path = write(tmp_path, "t.csv", f"{TRAJ_HEADER}\n")
        with pytest.raises(SchemaError, match="no data rows"):
            read_trajectory_csv(path)


class TestOtherSchemas:
    def test_grad_vs_d(self, tmp_path):
        path = write(
            tmp_path, "g.csv", "d,grad_norm,grad_norm_se\n2,0.5,0.01\n3,0.3,0.01\n"
        )
        data = read_grad_vs_d_csv(path)
        assert data["d"] == [2, 3]

    def test_grad_vs_d_missing_column(self, tmp_path):
        path = write(tmp_path, "g.csv", "d,grad_norm\n2,0.5\n")
        with pytest.raises(SchemaError, match="grad_norm_se"):
            read_grad_vs_d_csv(path)

    def test_stat(self, tmp_path):
        path = write(
            tmp_path, "s.csv",
            "sample_size,mean_param_error,std_param_error,runs\n1000,0.4,0.1,50\n",
        )
        data = read_stat_csv(path)
        assert data["sample_size"] == [1000]
        assert data["runs"] == [50]

    def test_stat_missing_column(self, tmp_path):
        path = write(tmp_path, "s.csv", "sample_size,runs\n1000,50\n")
        with pytest.raises(SchemaError, match="mean_param_error"):
            read_stat_csv(path)
