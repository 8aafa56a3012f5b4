#!/usr/bin/env python3
"""Independent oracle for the mock evaluation dataset.

Recomputes the expected evaluation report with plain set arithmetic, using its
own YAML-based parameter counter. It never touches the C++ implementation:
inputs are the dataset manifest, the ground-truth files, and
scripted_flags.json (the parameters each scripted response flags, plus
unmatched counts). Output is tests/data/expected_eval_report.json, which the
acceptance suite compares against the real pipeline.

Usage: python3 scripts/oracle_eval.py
"""

import json
import os
import sys

import yaml

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "tests", "data")
REPETITIONS = 5


class Tagged:
    """Sentinel for short-form intrinsic tags; counts as a scalar leaf."""


def _tag_constructor(loader, tag_suffix, node):
    return Tagged()


yaml.SafeLoader.add_multi_constructor("!", _tag_constructor)


def count_parameters(node):
    """Counting rule: one per mapping key at any depth, plus one per non-null
    scalar or tagged leaf in value position."""
    count = 0
    if isinstance(node, dict):
        for value in node.values():
            count += 1  # the entry key
            if isinstance(value, (dict, list)):
                count += count_parameters(value)
            elif value is not None:
                count += 1  # the value leaf (Tagged included)
    elif isinstance(node, list):
        for element in node:
            if isinstance(element, (dict, list)):
                count += count_parameters(element)
            elif element is not None:
                count += 1
    return count


def metrics_from(totals):
    tp, fp, fn = totals["tp"], totals["fp"], totals["fn"]
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def main():
    dataset_dir = os.path.join(DATA_DIR, "dataset")
    with open(os.path.join(dataset_dir, "manifest.json")) as f:
        manifest = json.load(f)
    with open(os.path.join(DATA_DIR, "scripted_flags.json")) as f:
        scripted = json.load(f)

    totals = {"tp": 0, "fp": 0, "tn": 0, "fn": 0}
    per_cohort = {}
    per_category_tp = {}
    per_file = {}
    warnings = []

    for entry in manifest["entries"]:
        name = entry["template"]
        with open(os.path.join(dataset_dir, name)) as f:
            tree = yaml.load(f, Loader=yaml.SafeLoader)
        param_count = count_parameters(tree)

        with open(os.path.join(dataset_dir, entry["truth"])) as f:
            truth = json.load(f)
        truth_map = {item["path"]: item["category"] for item in truth["misconfigured"]}

        flags = scripted[name]
        detected = dict(flags["flags"])  # path -> category, deduplicated
        unmatched = flags["unmatched"]

        tp_paths = [p for p in detected if p in truth_map]
        fp_real = [p for p in detected if p not in truth_map]
        fn_paths = [p for p in truth_map if p not in detected]

        counts = {
            "tp": len(tp_paths),
            "fp": len(fp_real) + unmatched,
            "fn": len(fn_paths),
            "tn": param_count - len(truth_map) - len(fp_real),
        }
        assert (
            counts["tp"] + counts["fp"] + counts["tn"] + counts["fn"]
            == param_count + unmatched
        ), f"conservation violated for {name}"

        per_file[name] = counts
        cohort = per_cohort.setdefault(entry["cohort"], {"tp": 0, "fp": 0, "tn": 0, "fn": 0})
        for key in counts:
            totals[key] += counts[key]
            cohort[key] += counts[key]
        for path in tp_paths:
            if detected[path] == truth_map[path]:
                per_category_tp[detected[path]] = per_category_tp.get(detected[path], 0) + 1
        for w in flags["warnings"]:
            warnings.append(f"{name}: {w}")

    precision, recall, f1 = metrics_from(totals)

    run = {
        "run": 1,
        "totals": totals,
        "precision": precision,
        "recall": recall,
        "f1": f1,
        "per_cohort": dict(sorted(per_cohort.items())),
        "per_category_tp": dict(sorted(per_category_tp.items())),
        "per_file": dict(sorted(per_file.items())),
        "warnings": warnings,
    }

    repetitions = []
    for index in range(REPETITIONS):
        rep = dict(run)
        rep["run"] = index + 1
        repetitions.append(rep)

    # Mean of the per-run metric values (left-associated sum, then divide).
    mean_precision = sum(rep["precision"] for rep in repetitions) / REPETITIONS
    mean_recall = sum(rep["recall"] for rep in repetitions) / REPETITIONS
    mean_f1 = sum(rep["f1"] for rep in repetitions) / REPETITIONS

    report = {
        "totals": totals,
        "precision": precision,
        "recall": recall,
        "f1": f1,
        "per_cohort": run["per_cohort"],
        "per_category_tp": run["per_category_tp"],
        "per_file": run["per_file"],
        "repetitions": repetitions,
        "mean": {"precision": mean_precision, "recall": mean_recall, "f1": mean_f1},
        "any_failure": False,
    }

    out_path = os.path.join(DATA_DIR, "expected_eval_report.json")
    with open(out_path, "w") as f:
        json.dump(report, f, indent=2)
        f.write("\n")
    print(f"wrote {out_path}")
    print(f"totals: {totals}  precision={precision:.6f} recall={recall:.6f} f1={f1:.6f}")


if __name__ == "__main__":
    sys.exit(main())
