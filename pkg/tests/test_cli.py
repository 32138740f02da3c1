import json
from importlib import resources

import jsonschema
import pytest

from klcells.cli import main


def schema(name):
    text = resources.files("klcells").joinpath(f"schemas/{name}.schema.json").read_text()
    return json.loads(text)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, kind, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    data = json.loads(out)
    jsonschema.validate(data, schema(kind))
    return code, data


@pytest.mark.parametrize("group,y,w,expect", [
    ("D4", "e", "e", "1"),
    ("D4", "1 2", "3", "0"),
    ("A2", "1", "1 2 1", "1"),
    ("A3", "2", "2 1 3 2", "1 + q"),
])
def test_kl(capsys, group, y, w, expect):
    code, out, _ = run(capsys, "kl", group, y, w)
    assert code == 0
    assert out.splitlines()[0] == expect
    assert "mu = " in out and "mu~ = " in out


def test_kl_errors(capsys):
    assert run(capsys, "kl", "D4", "1 9", "e")[0] == 2
    assert run(capsys, "kl", "D4", "x", "e")[0] == 2
    assert run(capsys, "cells", "E6")[0] == 3


def test_json_outputs(capsys):
    assert run_json(capsys, "group_info", "group-info", "B3")[1]["size"] == 48
    assert run_json(capsys, "kl", "kl", "A3", "2", "2 1 3 2")[1]["mu"] == 1
    assert run_json(capsys, "mu", "mu", "A3", "2", "2 1 3 2")[1]["mu_tilde"] == 1
    cells = run_json(capsys, "cells", "cells", "D4", "--side", "L")[1]
    assert sorted(c["size"] for c in cells["cells"]).count(14) == 6
    wg = run_json(capsys, "wgraph", "wgraph", "D4", "--clump", "1 3 1")[1]
    assert len(wg["edges"]) == 25
    cl = run_json(capsys, "clump", "clump", "D4", "1 2 4")[1]
    assert cl["clump"]["catalog"] == "C(10,a)"
    mp = run_json(capsys, "map", "map", "D4", "knuth", "L", "3", "4", "4")[1]
    assert mp["image"] == ["3 4"]
    gt = run_json(capsys, "gentau", "gentau", "D4", "--maps", "knuth,b2,d4,u", "--side", "R")[1]
    assert gt["side"] == "right" and gt["class_counts"][-1] == 36
    code, rep = run_json(capsys, "report", "verify", "D4", "catalog")
    assert code == 0 and rep["reports"][0]["verdict"] == "pass"


def test_cells_text_and_dot(capsys):
    code, out, _ = run(capsys, "cells", "A1")
    assert out.startswith("2 cells")
    code, out, _ = run(capsys, "cells", "D4", "--format", "dot")
    assert out.count("graph ") == 36


def test_map_names(capsys):
    assert run(capsys, "map", "D4", "d4", "L", "T(1,C)", "1 2 4")[1].strip() == "2 3 4 3 1 2"
    assert run(capsys, "map", "B3", "b2", "R", "2", "3", "2 3")[0] == 0
    assert run(capsys, "map", "D4", "b2", "R", "1", "2", "1")[0] == 2
    assert run(capsys, "map", "D4", "knuth", "L", "3", "4", "3")[0] == 2


def test_verify_skip_and_exit(capsys):
    code, out, _ = run(capsys, "verify", "A3", "b2")
    assert code == 0 and out.startswith("[SKIP]")
    code, out, _ = run(capsys, "verify", "A3", "a2")
    assert code == 0 and "[PASS]" in out


def test_cache_roundtrip(capsys, tmp_path, monkeypatch):
    path = tmp_path / "d4.klcache"
    assert run(capsys, "cache", "D4", "save", str(path))[0] == 0
    code, data = run_json(capsys, "cache", "cache", "D4", "load", str(path))
    assert code == 0 and data["pairs"] > 192
    assert run(capsys, "cache", "A3", "load", str(path))[0] == 2
    path.write_bytes(path.read_bytes()[:500])
    code, _, err = run(capsys, "cache", "D4", "load", str(path))
    assert code == 2 and "byte" in err
    # the environment variable names the default cache directory
    monkeypatch.setenv("KLCELLS_CACHE_DIR", str(tmp_path / "cc"))
    assert run(capsys, "cells", "A3")[0] == 0
    assert (tmp_path / "cc" / "A3.klcache").is_file()
    assert run(capsys, "cells", "A3")[0] == 0


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["verify", "D4", "nope"])
    assert e.value.code == 2


def test_deterministic(capsys):
    a = run(capsys, "gentau", "D4", "--format", "json")[1]
    b = run(capsys, "gentau", "D4", "--format", "json")[1]
    assert a == b
