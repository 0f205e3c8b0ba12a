#!/usr/bin/env python3
"""End-to-end walkthrough on the bundled university example.

Shows every stage: attribute mapping, sketch with hole domains, the
encoding, the per-iteration conflict analysis, and the final program
applied to the full instance.
"""

import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dlsynth.attrmap import infer_attr_mapping
from dlsynth.datalog import evaluate, print_program
from dlsynth.fdsolver import encode
from dlsynth.instance import facts_to_instance, instance_to_facts, serialize_instance
from dlsynth.schema import parse_schema
from dlsynth.sketch import search_space_size, sketch_gen
from dlsynth.synth import Example, SynthesisOptions, synthesize

DATA = Path(__file__).resolve().parent.parent / "data"


def main():
    s = parse_schema((DATA / "univ_source_schema.json").read_text())
    t = parse_schema((DATA / "univ_target_schema.json").read_text())
    doc = json.loads((DATA / "univ_example.json").read_text())
    example = Example(doc["input"], doc["output"])

    psi = infer_attr_mapping(s, t, example.input, example.output)
    print("== attribute mapping ==")
    print(psi.pretty())

    sk = sketch_gen(psi, s, t)
    print("\n== sketch ==")
    print(sk.pretty())
    print("search space:", search_space_size(sk))

    print("\n== encoding ==")
    print(encode(sk).pretty())

    t0 = time.monotonic()
    res = synthesize(s, t, example, SynthesisOptions(collect_details=True))
    print("\n== iterations ==")
    for i, rec in enumerate(res.details, 1):
        if rec.consistent:
            print(f"iteration {i}: consistent")
        else:
            mdps = [
                "{" + ",".join(sorted(a.name for a in phi)) + "}" for phi in sorted(rec.mdps, key=sorted)
            ]
            print(f"iteration {i}: inconsistent, projections {mdps}, {len(rec.formulas)} blocking clause(s)")

    print(f"\n== program ({res.iterations} iterations, {time.monotonic() - t0:.3f}s) ==")
    print(print_program(res.program), end="")

    out_fb = evaluate(res.program, instance_to_facts(s, example.input))
    print("\n== migrated instance ==")
    print(serialize_instance(t, facts_to_instance(t, out_fb)))


if __name__ == "__main__":
    main()
