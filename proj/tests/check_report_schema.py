# SPDX-License-Identifier: Apache-2.0
"""Runs a small oracle experiment and validates the JSON report against the shipped schema."""
import json
import subprocess
import sys
import tempfile

import jsonschema


def main() -> int:
    binary, schema_path = sys.argv[1], sys.argv[2]
    with open(schema_path, encoding="utf-8") as f:
        schema = json.load(f)
    with tempfile.TemporaryDirectory() as out:
        run = subprocess.run(
            [binary, "run", "--repetitions", "2", "--format", "json", "--out", out],
            check=True, capture_output=True, text=True)
    report = json.loads(run.stdout)
    jsonschema.validate(report, schema)
    assert len(report) == 4 * 9, len(report)
    # A report with an undefined rate must validate too.
    report[0]["success_rate"] = None
    jsonschema.validate(report, schema)
    print(f"report schema: {len(report)} cells valid")
    return 0


if __name__ == "__main__":
    sys.exit(main())
