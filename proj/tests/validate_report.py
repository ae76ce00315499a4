"""Run `effortnn bench` on a synthetic spec and validate report.json against the schema."""
import json
import subprocess
import sys
from pathlib import Path

import jsonschema


def main() -> int:
    exe, spec, schema_path, out = sys.argv[1:5]
    subprocess.run(
        [exe, "bench", "--synthetic-spec", spec, "--baseline", "--relative-metrics",
         "--importance-repeats", "3", "--out", out],
        check=True,
    )
    schema = json.loads(Path(schema_path).read_text())
    report = json.loads((Path(out) / "report.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(report), key=str)
    for e in errors[:20]:
        print(f"{list(e.absolute_path)}: {e.message}")
    print(f"{len(errors)} schema violation(s)")
    return 1 if errors else 0


if __name__ == "__main__":
    sys.exit(main())
