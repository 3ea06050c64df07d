#!/usr/bin/env python3
"""Export NAS-Bench-Suite-Zero proxy scores to the zc-evolve dataset format.

Input: the suite's per-benchmark JSON dumps (``zc_nasbench101.json`` etc.),
shaped ``{task: {arch: {"val_accuracy": float, "<metric>": {"score": float}, ...}}}``,
plus an optional CSV carrying the metrics the suite does not log
(``problem,arch,zico,meco,swap``).

Output: ``manifest.json`` and one ``<problem>.csv`` per problem in ``--out``.

    python scripts/export_suite_zero.py --out suite \
        --problem nb101-cf10=zc_nasbench101.json:cifar10 \
        --problem nb201-cf10=zc_nasbench201.json:cifar10 \
        --problem nb301-cf10=zc_nasbench301.json:cifar10 \
        --extra zico_meco_swap.csv

Architectures missing any metric, or with a non-finite value, are dropped
and counted, since the loader rejects incomplete rows. Targets must be
"higher is better"; pass ``--negate-target`` for loss-like columns.
"""

import argparse
import csv
import json
import math
import os
import sys
from collections import defaultdict

FEATURES = [
    "flops", "params", "jacov", "nwot", "synflow", "snip", "epe_nas", "fisher",
    "grad_norm", "grasp", "l2_norm", "zen", "plain", "zico", "meco", "swap",
]
SUITE_ALIASES = {"nwot": ["nwot", "naswot"], "epe_nas": ["epe_nas", "epenas"], "l2_norm": ["l2_norm", "l2norm"]}


def metric(record, name):
    for key in SUITE_ALIASES.get(name, [name]):
        if key in record:
            value = record[key]
            return value["score"] if isinstance(value, dict) else value
    return None


def load_extra(path):
    extra = defaultdict(dict)
    if path is None:
        return extra
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            extra[row["problem"]][row["arch"]] = {k: row[k] for k in row if k not in ("problem", "arch")}
    return extra


def arch_id(arch):
    return "".join(c if c.isalnum() or c in "-_.|" else "_" for c in str(arch))


def export_problem(problem, source, task, extra, target_key, negate, out_dir):
    with open(source) as f:
        records = json.load(f)[task]
    rows, dropped = [], 0
    for arch, rec in records.items():
        values = []
        for name in FEATURES:
            v = metric(rec, name)
            if v is None:
                v = extra.get(problem, {}).get(str(arch), {}).get(name)
            try:
                v = float(v)
            except (TypeError, ValueError):
                v = float("nan")
            values.append(v)
        target = rec.get(target_key)
        target = float(target) if target is not None else float("nan")
        if negate:
            target = -target
        if not all(math.isfinite(v) for v in values + [target]):
            dropped += 1
            continue
        rows.append((arch_id(arch), values, target))
    seen = set()
    with open(os.path.join(out_dir, f"{problem}.csv"), "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["arch_id", *FEATURES, target_key])
        for aid, values, target in rows:
            if aid in seen:
                dropped += 1
                continue
            seen.add(aid)
            w.writerow([aid, *(repr(v) for v in values), repr(target)])
    return len(seen), dropped


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", required=True)
    ap.add_argument("--problem", action="append", required=True, metavar="ID=FILE:TASK")
    ap.add_argument("--extra", help="CSV with problem,arch and extra metric columns")
    ap.add_argument("--group", action="append", default=[], metavar="ID=GROUP")
    ap.add_argument("--target-key", default="val_accuracy")
    ap.add_argument("--negate-target", action="store_true")
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    extra = load_extra(args.extra)
    groups = dict(g.split("=", 1) for g in args.group)
    manifest = {"feature_names": FEATURES, "problems": []}
    for spec in args.problem:
        problem, rest = spec.split("=", 1)
        source, task = rest.rsplit(":", 1)
        kept, dropped = export_problem(problem, source, task, extra, args.target_key, args.negate_target, args.out)
        print(f"{problem}: {kept} architectures, {dropped} dropped", file=sys.stderr)
        entry = {"id": problem, "csv": f"{problem}.csv", "target_column": args.target_key}
        if problem in groups:
            entry["group"] = groups[problem]
        manifest["problems"].append(entry)
    with open(os.path.join(args.out, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
