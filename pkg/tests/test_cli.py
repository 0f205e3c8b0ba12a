import json
from pathlib import Path

import pytest

from dlsynth.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"

FINAL_RULE_TEXT = "Admission(grad,ug,num) :- Univ(id1,grad,v1), Admit(v1,uid1,num), Univ(uid1,ug,_).\n"


def univ_args(tmp_path, *extra):
    return [
        "--source-schema", str(DATA / "univ_source_schema.json"),
        "--target-schema", str(DATA / "univ_target_schema.json"),
        "--example", str(DATA / "univ_example.json"),
        *extra,
    ]


def test_synth_writes_program(tmp_path, capsys):
    out = tmp_path / "program.dl"
    assert main(["synth", *univ_args(tmp_path), "--out", str(out)]) == 0
    text = out.read_text()
    from dlsynth.datalog import alpha_equivalent, parse_program

    expected = parse_program(
        "Admission(grad,ug,num) :- Univ(id1,grad,v1), Admit(v1,id2,num), Univ(id2,ug,_).\n"
    )
    assert alpha_equivalent(parse_program(text), expected)


def test_synth_missing_schema_is_usage_error(tmp_path, capsys):
    rc = main(
        [
            "synth",
            "--source-schema", str(tmp_path / "nope.json"),
            "--target-schema", str(DATA / "univ_target_schema.json"),
            "--example", str(DATA / "univ_example.json"),
        ]
    )
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_synth_missing_required_flag(capsys):
    assert main(["synth", "--source-schema", str(DATA / "univ_source_schema.json")]) == 1
    assert "--target-schema" in capsys.readouterr().err


def test_naive_strategy_same_program_more_iterations(tmp_path):
    out_m = tmp_path / "m.dl"
    out_n = tmp_path / "n.dl"
    stats_m = tmp_path / "m.stats"
    stats_n = tmp_path / "n.stats"
    assert main(["synth", *univ_args(tmp_path), "--out", str(out_m), "--stats", str(stats_m)]) == 0
    assert (
        main(
            [
                "synth",
                *univ_args(tmp_path),
                "--strategy", "naive",
                "--out", str(out_n),
                "--stats", str(stats_n),
            ]
        )
        == 0
    )
    assert out_m.read_text() == out_n.read_text()
    iters_m = json.loads(stats_m.read_text().splitlines()[0])["iterations"]
    iters_n = json.loads(stats_n.read_text().splitlines()[0])["iterations"]
    assert iters_m <= iters_n


def test_migrate_example_as_instance(tmp_path):
    out = tmp_path / "migrated.json"
    rc = main(
        [
            "migrate",
            *univ_args(tmp_path),
            "--instance", str(DATA / "univ_instance.json"),
            "--out", str(out),
        ]
    )
    assert rc == 0
    migrated = json.loads(out.read_text())
    expected = json.loads((DATA / "univ_example.json").read_text())["output"]
    assert sorted(migrated["Admission"], key=str) == sorted(expected["Admission"], key=str)


def test_migrate_empty_instance(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"Univ": []}))
    out = tmp_path / "migrated.json"
    rc = main(
        ["migrate", *univ_args(tmp_path), "--instance", str(empty), "--out", str(out)]
    )
    assert rc == 0
    assert json.loads(out.read_text()) == {"Admission": []}


def test_migrate_scaled_instance_with_program_file(tmp_path):
    import random

    rng = random.Random(3)
    big = {
        "Univ": [
            {
                "id": i,
                "name": f"U{i}",
                "Admit": [
                    {"uid": rng.randint(0, 999), "count": rng.randint(1, 50)}
                    for _ in range(rng.randint(0, 3))
                ],
            }
            for i in range(1000)
        ]
    }
    inst = tmp_path / "big.json"
    inst.write_text(json.dumps(big))
    prog = tmp_path / "prog.dl"
    prog.write_text(FINAL_RULE_TEXT)
    out = tmp_path / "out.json"
    import time

    t0 = time.monotonic()
    rc = main(
        [
            "migrate",
            "--source-schema", str(DATA / "univ_source_schema.json"),
            "--target-schema", str(DATA / "univ_target_schema.json"),
            "--program", str(prog),
            "--instance", str(inst),
            "--out", str(out),
        ]
    )
    elapsed = time.monotonic() - t0
    assert rc == 0
    assert elapsed < 10
    migrated = json.loads(out.read_text())
    # golden-program oracle: evaluate directly and compare
    from dlsynth.datalog import evaluate, parse_program
    from dlsynth.instance import facts_to_instance, instance_to_facts, instances_equal
    from dlsynth.schema import parse_schema

    s = parse_schema((DATA / "univ_source_schema.json").read_text())
    t = parse_schema((DATA / "univ_target_schema.json").read_text())
    golden = facts_to_instance(t, evaluate(parse_program(FINAL_RULE_TEXT), instance_to_facts(s, big)))
    assert instances_equal(migrated, golden)


def test_run_command(tmp_path):
    prog = tmp_path / "prog.dl"
    prog.write_text(FINAL_RULE_TEXT)
    out = tmp_path / "out.json"
    rc = main(
        [
            "run",
            "--source-schema", str(DATA / "univ_source_schema.json"),
            "--target-schema", str(DATA / "univ_target_schema.json"),
            "--program", str(prog),
            "--instance", str(DATA / "univ_instance.json"),
            "--out", str(out),
        ]
    )
    assert rc == 0
    expected = json.loads((DATA / "univ_example.json").read_text())["output"]
    got = json.loads(out.read_text())
    assert sorted(got["Admission"], key=str) == sorted(expected["Admission"], key=str)


def test_inspect_sections(tmp_path, capsys):
    rc = main(["inspect", *univ_args(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "attribute mapping:" in out
    assert "Univ.name -> {Admission.grad, Admission.ug}" in out
    assert "search space: 64000" in out
    assert "x2 = grad | x6 = grad | x8 = grad" in out


def test_config_file_flags_win(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "source-schema": str(DATA / "univ_source_schema.json"),
                "target-schema": str(DATA / "univ_target_schema.json"),
                "example": str(DATA / "univ_example.json"),
                "strategy": "naive",
            }
        )
    )
    out = tmp_path / "p.dl"
    stats = tmp_path / "s.jsonl"
    rc = main(["synth", "--config", str(cfg), "--strategy", "mdp", "--out", str(out), "--stats", str(stats)])
    assert rc == 0
    assert json.loads(stats.read_text().splitlines()[0])["strategy"] == "mdp"


def test_determinism_byte_identical(tmp_path):
    out1, out2 = tmp_path / "a.dl", tmp_path / "b.dl"
    st1, st2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert main(["synth", *univ_args(tmp_path), "--out", str(out1), "--stats", str(st1)]) == 0
    assert main(["synth", *univ_args(tmp_path), "--out", str(out2), "--stats", str(st2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert st1.read_bytes() == st2.read_bytes()


def test_interactive_scripted_empdept(tmp_path):
    # scripted oracle answer drives the refinement loop to the join program
    answers = tmp_path / "answers.json"
    answers.write_text(json.dumps([{"WorksIn": []}]))
    out = tmp_path / "final.dl"
    rc = main(
        [
            "interactive",
            "--source-schema", str(DATA / "empdept_source_schema.json"),
            "--target-schema", str(DATA / "empdept_target_schema.json"),
            "--example", str(DATA / "empdept_example.json"),
            "--answers", str(answers),
            "--out", str(out),
        ]
    )
    assert rc == 0
    from dlsynth.datalog import alpha_equivalent, parse_program

    assert alpha_equivalent(
        parse_program(out.read_text()),
        parse_program("WorksIn(x,y) :- Employee(x,z), Department(z,y).\n"),
    )
