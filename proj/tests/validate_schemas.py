"""Run the CLI on small inputs and validate its JSON output against docs/schemas.

usage: validate_schemas.py <tzinf binary> <schema dir> <test data dir> <scratch dir>
"""

import json
import pathlib
import shutil
import subprocess
import sys

import jsonschema


def run(cmd):
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        sys.exit(f"command failed ({proc.returncode}): {' '.join(cmd)}\n{proc.stderr}")


def check(schema_path, doc_path):
    schema = json.loads(schema_path.read_text())
    doc = json.loads(doc_path.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(doc), key=lambda e: list(e.path))
    for e in errors:
        print(f"{doc_path}: {'/'.join(map(str, e.path))}: {e.message}")
    return not errors


def main():
    tzinf, schemas, data, scratch = (pathlib.Path(a) for a in sys.argv[1:5])
    shutil.rmtree(scratch, ignore_errors=True)
    scratch.mkdir(parents=True)
    ok = True

    variants = {
        "partial": ["--method", "naive,bonferroni,tz-v,tz-m,tz-ms", "--sigma", "known:1"],
        "stable": ["--target", "stable-t", "--method", "stab-l1", "--sigma", "ols", "--timestamp"],
        "full": ["--target", "full", "--method", "tz-v", "--intercept"],
        "empty": ["--lambda", "50"],
    }
    for name, extra in variants.items():
        out = scratch / name
        lam = [] if "--lambda" in extra else ["--lambda", "0.15"]
        run([str(tzinf), "analyze", str(data / "synthetic.csv"), "--response", "y", *lam, *extra, "--out", str(out)])
        ok &= check(schemas / "report.schema.json", out / "report.json")

    config = scratch / "study.json"
    config.write_text(json.dumps({"n": 40, "p": 10, "k_signals": 2, "signal": 0.6, "lambda": 0.3,
                                  "replications": 4, "seed": 3}))
    run([str(tzinf), "simulate", str(config), "--out", str(scratch / "sim")])
    ok &= check(schemas / "study.schema.json", scratch / "sim" / "study.json")

    print("schemas ok" if ok else "schema violations found")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
