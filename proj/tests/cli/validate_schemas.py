"""Runs every CLI subcommand and validates its JSON output against schemas/."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

CLI, SCHEMAS = pathlib.Path(sys.argv[1]), pathlib.Path(sys.argv[2])

RUNS = {
    "list": ["list", "--format", "json"],
    "geodesic": ["geodesic", "--spacetime", "clifton_pohl", "--init", "1,0;1,0", "--tmax", "2"],
    "scan": ["scan", "--spacetime", "rosen_torus", "--samples", "4", "--tmax", "5", "--seed", "3"],
    "certify": ["certify", "--spacetime", "pp_wave", "--param", "H=z1^3", "--full"],
    "flow": ["flow", "--spacetime", "suspension_anosov", "--samples", "3", "--tmax", "5", "--grid", "20"],
    "ricci": ["ricci", "--H", "z1^2+z2^2"],
}
EXTRA = {
    "certify": [["certify", "--spacetime", "clifton_pohl_3d", "--full"]],
    "geodesic": [["geodesic", "--spacetime", "half_plane", "--init", "0,1;0,-1", "--tmax", "3"]],
}


def load(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def main():
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for name, argv in RUNS.items():
            schema = load(name)
            for k, args in enumerate([argv] + EXTRA.get(name, [])):
                out = pathlib.Path(tmp) / f"{name}{k}.json"
                proc = subprocess.run([str(CLI), *args, "--out", str(out)], capture_output=True, text=True)
                if proc.returncode != 0:
                    print(f"FAIL {name}: exit {proc.returncode}: {proc.stderr.strip()}")
                    failures += 1
                    continue
                doc = json.loads(out.read_text())
                try:
                    jsonschema.validate(doc, schema)
                    print(f"ok   {' '.join(args)}")
                except jsonschema.ValidationError as e:
                    print(f"FAIL {' '.join(args)}: {e.message} at {list(e.absolute_path)}")
                    failures += 1
                if name == "list":
                    spacetime = load("spacetime")
                    for entry in doc["entries"]:
                        try:
                            jsonschema.validate(entry["document"], spacetime)
                            print(f"ok   spacetime document {entry['key']}")
                        except jsonschema.ValidationError as e:
                            print(f"FAIL spacetime document {entry['key']}: {e.message}")
                            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
