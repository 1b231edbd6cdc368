import json

from qgossip.cli import EXIT_BOUND_VIOLATION, EXIT_CONFIG, EXIT_OK, main
from qgossip.graphs import lollipop_graph, read_graph

CONFIG_TEXT = """
algorithm: AF
graph:
  kind: complete
  n: 4
initial:
  kind: psi
trials: 40
seed: 13
"""


def test_graph_command_writes_edge_list(tmp_path, capsys):
    out = tmp_path / "lolli.txt"
    code = main(["graph", "lollipop", "--n", "6", "--m", "4", "--out", str(out)])
    assert code == EXIT_OK
    g = read_graph(out)
    assert g.edges == lollipop_graph(6, 4).edges


def test_graph_command_stdout(capsys):
    assert main(["graph", "path", "--n", "3"]) == EXIT_OK
    captured = capsys.readouterr()
    assert captured.out.splitlines()[0] == "3"


def test_graph_command_rejects_bad_args(capsys):
    assert main(["graph", "lollipop", "--n", "6"]) == EXIT_CONFIG


def test_bounds_command(capsys):
    assert main(["bounds", "--n", "2", "--b", "1", "--j", "2"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    values = {r["name"]: r["value"] for r in payload["reports"]}
    assert values["mixing_horizon"] == 534.0


def test_run_command_csv_reproducible(tmp_path):
    cfg = tmp_path / "exp.yaml"
    cfg.write_text(CONFIG_TEXT)
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(["run", str(cfg), "--out", str(out1)]) == EXIT_OK
    assert main(["run", str(cfg), "--out", str(out2)]) == EXIT_OK
    assert out1.read_bytes() == out2.read_bytes()
    header = out1.read_text().splitlines()[0]
    assert header == "algorithm,n,graph,seed,t_con,timeout,nontrivial,trivial,noop,j0,v0"


def test_run_command_json_format(tmp_path):
    cfg = tmp_path / "exp.yaml"
    cfg.write_text(CONFIG_TEXT)
    out = tmp_path / "run.json"
    assert main(["run", str(cfg), "--format", "json", "--out", str(out)]) == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["summary"]["trials"] == 40
    assert payload["comparisons"][0]["ok"] is True


def test_run_command_overrides(tmp_path):
    cfg = tmp_path / "exp.yaml"
    cfg.write_text(CONFIG_TEXT)
    out = tmp_path / "small.json"
    code = main(
        ["run", str(cfg), "--trials", "5", "--seed", "99", "--format", "json", "--out", str(out)]
    )
    assert code == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["summary"]["trials"] == 5


def test_run_command_bound_violation_exit(tmp_path, monkeypatch):
    # a violated bound must surface as the dedicated exit code
    from qgossip.service import handlers
    from qgossip.service.schemas import RunResponse

    def fake_run(req):
        return RunResponse(payload={"records": []}, csv="", bound_violated=True)

    monkeypatch.setattr(handlers, "run", fake_run)
    cfg = tmp_path / "exp.yaml"
    cfg.write_text(CONFIG_TEXT)
    assert main(["run", str(cfg), "--out", str(tmp_path / "x.csv")]) == EXIT_BOUND_VIOLATION


def test_run_command_bad_config_exit(tmp_path):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("algorithm: AF\ngraph: {kind: complete}\n")
    assert main(["run", str(cfg)]) == EXIT_CONFIG
    assert main(["run", str(tmp_path / "missing.yaml")]) == EXIT_CONFIG


def test_walks_command(tmp_path, capsys):
    graph_file = tmp_path / "g.txt"
    main(["graph", "path", "--n", "2", "--out", str(graph_file)])
    capsys.readouterr()
    assert main(["walks", str(graph_file)]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    values = {(r["kind"], r["walk"], tuple(r["pair"])): r["value"] for r in payload["results"]}
    assert values[("hitting", "af", (0, 1))] == 2.0
    assert values[("meeting", "af", (0, 1))] == 1.0


def test_walks_command_mc(tmp_path, capsys):
    graph_file = tmp_path / "g.txt"
    main(["graph", "complete", "--n", "4", "--out", str(graph_file)])
    capsys.readouterr()
    assert main(["walks", str(graph_file), "--mc", "--trials", "200", "--seed", "3"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["results"][0]["method"] == "mc"
    assert payload["results"][0]["se"] >= 0.0


def test_out_dir_env_var(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("QGOSSIP_OUT_DIR", str(tmp_path / "outputs"))
    assert main(["graph", "star", "--n", "4", "--out", "star.txt"]) == EXIT_OK
    assert (tmp_path / "outputs" / "star.txt").exists()


def test_cli_against_live_server(tmp_path):
    # the thin client must produce byte-identical output through HTTP
    import socket
    import threading
    import time

    import httpx
    import uvicorn

    from qgossip.service.app import app

    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    url = f"http://127.0.0.1:{port}"
    for _ in range(200):
        try:
            if httpx.get(url + "/health", timeout=1.0).status_code == 200:
                break
        except httpx.HTTPError:
            time.sleep(0.05)
    else:
        raise RuntimeError("service did not come up")
    try:
        cfg = tmp_path / "exp.yaml"
        cfg.write_text(CONFIG_TEXT)
        local = tmp_path / "local.csv"
        remote = tmp_path / "remote.csv"
        assert main(["run", str(cfg), "--out", str(local)]) == EXIT_OK
        assert main(["run", str(cfg), "--out", str(remote), "--server", url]) == EXIT_OK
        assert local.read_bytes() == remote.read_bytes()

        local_json = tmp_path / "local.json"
        remote_json = tmp_path / "remote.json"
        assert main(["run", str(cfg), "--format", "json", "--out", str(local_json)]) == EXIT_OK
        code = main(
            ["run", str(cfg), "--format", "json", "--out", str(remote_json), "--server", url]
        )
        assert code == EXIT_OK
        assert local_json.read_bytes() == remote_json.read_bytes()
    finally:
        server.should_exit = True
        thread.join(timeout=5)
