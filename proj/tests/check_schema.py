"""Validates echoed run configs and the sample configs against the schema."""
import json
import sys

import jsonschema

schema_path, *documents = sys.argv[1:]
with open(schema_path) as fh:
    schema = json.load(fh)
validator = jsonschema.Draft202012Validator(schema)

for path in documents:
    with open(path) as fh:
        if path.endswith(".jsonl"):
            config = json.loads(fh.readline())["config"]
        else:
            doc = json.load(fh)
            config = doc.get("config", doc)
    expect_valid = "unknown_key" not in path
    errors = list(validator.iter_errors(config))
    if bool(errors) == expect_valid:
        print(f"{path}: expected {'valid' if expect_valid else 'invalid'}, got {errors[:1]}")
        sys.exit(1)
    print(f"{path}: {'valid' if expect_valid else 'rejected'}")
