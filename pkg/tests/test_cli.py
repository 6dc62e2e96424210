import json
import subprocess
import sys

import pytest

from omlogic.cli import run
from omlogic.formats import parse_derivation, parse_lattice, serialize
from omlogic.lattice import hexagon, mo


@pytest.fixture
def mo2_file(tmp_path):
    path = tmp_path / "mo2.lat"
    path.write_text(serialize(mo(2)))
    return str(path)


@pytest.fixture
def hexagon_file(tmp_path):
    path = tmp_path / "hex.lat"
    path.write_text(serialize(hexagon()))
    return str(path)


class TestLatticeCommands:
    def test_gen_then_verify(self, tmp_path, capsys):
        out = tmp_path / "mo2.lat"
        assert run(["lattice", "gen", "--family", "mo", "--n", "2", "-o", str(out)]) == 0
        assert run(["lattice", "verify", str(out)]) == 0
        assert "PASS orthomodularity" in capsys.readouterr().out

    def test_verify_hexagon_fails(self, hexagon_file, tmp_path, capsys):
        report = tmp_path / "r.json"
        assert run(["lattice", "verify", hexagon_file, "--json", str(report)]) == 1
        data = json.loads(report.read_text())
        failed = [c for c in data["checks"] if not c["passed"]]
        assert [c["name"] for c in failed] == ["orthomodularity"]
        assert failed[0]["witness"] == ["a", "b"]

    def test_gen_usage_error(self):
        assert run(["lattice", "gen", "--family", "boolean"]) == 2
        assert run(["lattice", "gen", "--family", "boolean", "--n", "9"]) == 2

    def test_parse_error_exit(self, tmp_path):
        bad = tmp_path / "bad.lat"
        bad.write_text("lattice x\nelements 0 1\nleq 0 zz\nend\n")
        assert run(["lattice", "verify", str(bad)]) == 2


class TestPropagate:
    def test_spec_example(self, mo2_file, capsys):
        code = run(
            ["propagate", "--lattice", mo2_file, "--measure", "a", "--set", "{b}"]
        )
        assert code == 0
        assert capsys.readouterr().out.strip() == "{a, a'}"

    def test_map_file_source(self, mo2_file, tmp_path, capsys):
        map_file = tmp_path / "m.map"
        map_file.write_text("map blur over mo2\nmeasure a\nend\n")
        code = run(
            ["propagate", "--lattice", mo2_file, "--map", str(map_file), "--set", "{b, b'}"]
        )
        assert code == 0
        assert capsys.readouterr().out.strip() == "{a, a'}"

    def test_unknown_element(self, mo2_file):
        assert run(["propagate", "--lattice", mo2_file, "--measure", "zz", "--set", "{b}"]) == 2

    def test_zero_in_set_rejected(self, mo2_file):
        assert run(["propagate", "--lattice", mo2_file, "--measure", "a", "--set", "{0}"]) == 2


class TestQuantaleVerify:
    def test_mo2_all_pass(self, mo2_file):
        assert (
            run(
                [
                    "quantale", "verify", "--lattice", mo2_file,
                    "--random-maps", "20", "--pairs", "10", "--join-maps", "10",
                ]
            )
            == 0
        )

    def test_deterministic_reports(self, mo2_file, tmp_path):
        r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
        argv = [
            "quantale", "verify", "--lattice", mo2_file, "--seed", "5",
            "--random-maps", "10", "--pairs", "5", "--join-maps", "5",
        ]
        assert run(argv + ["--json", str(r1)]) == 0
        assert run(argv + ["--json", str(r2)]) == 0
        assert r1.read_bytes() == r2.read_bytes()

    def test_worker_independence(self, mo2_file, tmp_path):
        r1, r2 = tmp_path / "w1.json", tmp_path / "w4.json"
        argv = [
            "quantale", "verify", "--lattice", mo2_file, "--seed", "5",
            "--random-maps", "10", "--pairs", "5", "--join-maps", "5",
        ]
        assert run(argv + ["--workers", "1", "--json", str(r1)]) == 0
        assert run(argv + ["--workers", "4", "--json", str(r2)]) == 0
        d1, d2 = json.loads(r1.read_text()), json.loads(r2.read_text())
        assert d1["checks"] == d2["checks"]

    def test_hexagon_rejected(self, hexagon_file):
        assert run(["quantale", "verify", "--lattice", hexagon_file]) == 1


class TestCounterexample:
    def test_mo2_witness(self, mo2_file, tmp_path, capsys):
        report = tmp_path / "r.json"
        assert run(["counterexample", "order", "--lattice", mo2_file, "--json", str(report)]) == 0
        assert "witness" in capsys.readouterr().out
        data = json.loads(report.read_text())
        assert data["witness"] == {
            "element": "a", "other": "b", "argument": "b", "images": ["a", "b"],
        }

    def test_boolean_none(self, tmp_path, capsys):
        out = tmp_path / "b3.lat"
        run(["lattice", "gen", "--family", "boolean", "--n", "3", "-o", str(out)])
        assert run(["counterexample", "order", "--lattice", str(out)]) == 0
        assert capsys.readouterr().out.strip().splitlines()[0] == "none"

    def test_hexagon_rejected(self, hexagon_file):
        assert run(["counterexample", "order", "--lattice", hexagon_file]) == 1


class TestProveCheckCrosscheck:
    def test_pipeline(self, mo2_file, tmp_path, capsys):
        drv = tmp_path / "p.drv"
        assert (
            run(
                [
                    "prove", "measurement", "--lattice", mo2_file,
                    "--actual", "a", "--measure", "b", "-o", str(drv),
                ]
            )
            == 0
        )
        printed = capsys.readouterr().out.strip()
        assert printed == "M(b) * (In(a) * R(a)) |- In(b) * R(b) + In(b') * R(b')"
        assert run(["check", str(drv), "--lattice", mo2_file]) == 0
        assert run(["crosscheck", str(drv), "--lattice", mo2_file]) == 0

    def test_unicode_rendering(self, mo2_file, capsys):
        assert (
            run(
                [
                    "prove", "measurement", "--lattice", mo2_file,
                    "--actual", "a", "--measure", "b", "--unicode",
                ]
            )
            == 0
        )
        out = capsys.readouterr().out
        assert "⊗" in out and "⊢" in out and "M(b, b⊥)" in out

    def test_composed_pipeline(self, mo2_file, tmp_path):
        drv = tmp_path / "c.drv"
        assert (
            run(
                [
                    "prove", "composed", "--lattice", mo2_file,
                    "--actual", "a", "--measure", "b", "--then", "a", "-o", str(drv),
                ]
            )
            == 0
        )
        assert run(["check", str(drv), "--lattice", mo2_file]) == 0
        assert run(["crosscheck", str(drv), "--lattice", mo2_file]) == 0

    def test_check_rejects_tampered_file(self, mo2_file, tmp_path, capsys):
        drv = tmp_path / "p.drv"
        run(
            [
                "prove", "measurement", "--lattice", mo2_file,
                "--actual", "a", "--measure", "b", "-o", str(drv),
            ]
        )
        lat = parse_lattice(serialize(mo(2)))
        d = parse_derivation(drv.read_text(), lat)
        import random

        from omlogic.mutate import mutate

        broken = mutate(d, "exchange", random.Random(1), lat)
        drv.write_text(serialize(broken))
        capsys.readouterr()
        assert run(["check", str(drv), "--lattice", mo2_file]) == 1
        assert "invalid at node" in capsys.readouterr().out


class TestAxiomInstantiate:
    def test_trans(self, mo2_file, capsys):
        assert (
            run(
                [
                    "axiom", "instantiate", "--lattice", mo2_file,
                    "--schema", "Trans", "--bind", "y=b", "--bind", "z=a",
                ]
            )
            == 0
        )
        assert capsys.readouterr().out.strip() == "|- In(b) * R(a) -o In(a) * R(a)"

    def test_unfold_flag(self, mo2_file, capsys):
        assert (
            run(
                [
                    "axiom", "instantiate", "--lattice", mo2_file, "--unfold",
                    "--schema", "Trans", "--bind", "y=b", "--bind", "z=a",
                ]
            )
            == 0
        )
        assert capsys.readouterr().out.strip() == "In(b) * R(a) |- In(a) * R(a)"

    def test_guard_failure_exit(self, mo2_file):
        code = run(
            [
                "axiom", "instantiate", "--lattice", mo2_file,
                "--schema", "Adjust1", "--bind", "x=a", "--bind", "y=a",
            ]
        )
        assert code == 1

    def test_general_propagation_with_registry(self, mo2_file, tmp_path, capsys):
        map_file = tmp_path / "m.map"
        map_file.write_text("map blur over mo2\nmeasure b\nend\n")
        assert (
            run(
                [
                    "axiom", "instantiate", "--lattice", mo2_file,
                    "--schema", "GeneralPropagation",
                    "--bind", "alpha=blur", "--bind", "x=a",
                    "--register", str(map_file),
                ]
            )
            == 0
        )
        assert capsys.readouterr().out.strip() == "|- IND(blur) * In(a) -o In(b) + In(b')"

    def test_unknown_schema(self, mo2_file):
        assert (
            run(["axiom", "instantiate", "--lattice", mo2_file, "--schema", "Nope"]) == 2
        )


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        out = tmp_path / "m.lat"
        proc = subprocess.run(
            [sys.executable, "-m", "omlogic", "lattice", "gen", "--family", "mo",
             "--n", "2", "-o", str(out)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert parse_lattice(out.read_text()) == mo(2)

    def test_usage_error_exit_code(self):
        assert run(["no-such-command"]) == 2
