"""Runs every CLI subcommand and validates its JSON report against schemas/."""
import json
import pathlib
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource


def main():
    cli, source, work = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    work.mkdir(parents=True, exist_ok=True)
    schemas = {}
    registry = Registry()
    for path in sorted((source / "schemas").glob("*.schema.json")):
        doc = json.loads(path.read_text())
        jsonschema.Draft202012Validator.check_schema(doc)
        schemas[path.name.split(".")[0]] = doc
        registry = registry.with_resource(doc["$id"], Resource.from_contents(doc))

    spec = str(source / "data" / "constraints" / "friction_expert.spec")
    ga = work / "ga.json"
    ga.write_text('{"ga": {"population": 40, "max_generations": 4}}')
    data = str(work / "valid.csv")
    outlier = str(work / "outlier.csv")
    corpus = str(work / "corpus")
    scores = work / "scores.csv"
    scores.write_text("score,label\n0.1,0\n0.4,1\n0.2,0\n0.4,0\n")

    def out(name):
        return str(work / f"{name}.json")

    runs = [
        ("synth", ["synth", "--kind", "friction_valid", "--seed", "7", "--out", data], None),
        ("synth", ["synth", "--kind", "friction_outlier", "--seed", "7", "--out", outlier], None),
        ("synth", ["synth", "--corpus", corpus, "--n-valid", "2", "--n-invalid", "2", "--seed", "3",
                   "--out", out("synth")], "synth"),
    ]
    for algo in ["pr", "scpr", "gbt", "scsr"]:
        runs.append(("fit", ["fit", "--algo", algo, "--data", data, "--constraints", spec, "--seed", "1",
                             "--config", str(ga), "--out", out(f"fit_{algo}")], f"fit_{algo}"))
    runs += [
        ("certify", ["certify", "--model", out("fit_scpr"), "--constraints", spec, "--out", out("certify")],
         "certify"),
        ("validate", ["validate", "--data", data, "--constraints", spec, "--algo", "scpr", "--t", "0.05",
                      "--seed", "7", "--out", out("validate")], "validate"),
        ("validate", ["validate", "--data", outlier, "--constraints", spec, "--algo", "scsr", "--t", "0.05",
                      "--config", str(ga), "--out", out("validate_scsr")], "validate_scsr"),
        ("validate", ["validate", "--corpus", corpus, "--constraints", spec, "--algo", "pr", "--t", "0.05",
                      "--out", out("validate_corpus")], "validate_corpus"),
        ("roc", ["roc", "--corpus", corpus, "--constraints", spec, "--algo", "pr", "--out", out("roc")], "roc"),
        ("roc", ["roc", "--scores", str(scores), "--out", out("roc_scores")], "roc_scores"),
        ("gridsearch", ["gridsearch", "--corpus", corpus, "--constraints", spec, "--algo", "gbt",
                        "--out", out("gridsearch")], "gridsearch"),
    ]

    failures = 0
    for schema_name, args, report in runs:
        proc = subprocess.run([cli, *args], capture_output=True, text=True)
        # 3 is the "invalid" verdict; anything else non-zero is an error.
        if proc.returncode not in (0, 3):
            print(f"FAIL {' '.join(args[:3])}: exit {proc.returncode}\n{proc.stderr}")
            failures += 1
            continue
        if report is None:
            continue
        doc = json.loads((work / f"{report}.json").read_text())
        validator = jsonschema.Draft202012Validator(schemas[schema_name], registry=registry)
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
        if errors:
            failures += 1
            for e in errors[:5]:
                print(f"FAIL {report}: {'/'.join(map(str, e.absolute_path))}: {e.message[:200]}")
        else:
            print(f"ok   {report} against {schema_name}.schema.json")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
