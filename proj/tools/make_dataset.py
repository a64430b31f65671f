#!/usr/bin/env python3
"""Regenerates the bundled breast-cancer CSV and schema from scikit-learn's copy
of the UCI Wisconsin Diagnostic Breast Cancer data. Run offline; the repository
ships the generated files so the toolkit never needs network access."""

import json
import os

from sklearn.datasets import load_breast_cancer


def main() -> None:
    out_dir = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")
    os.makedirs(out_dir, exist_ok=True)

    ds = load_breast_cancer()
    x = ds.data          # (569, 30)
    y = ds.target        # 0 = malignant, 1 = benign in sklearn's encoding
    names = list(ds.feature_names)

    label_name = {0: "malignant", 1: "benign"}

    csv_path = os.path.join(out_dir, "breast_cancer.csv")
    with open(csv_path, "w", newline="\n") as f:
        f.write(",".join(names + ["diagnosis"]) + "\n")
        for i in range(x.shape[0]):
            cells = [repr(float(v)) for v in x[i]]
            cells.append(label_name[int(y[i])])
            f.write(",".join(cells) + "\n")

    features = []
    for j, name in enumerate(names):
        features.append({
            "name": name,
            "kind": "numeric",
            "lower": float(x[:, j].min()),
            "upper": float(x[:, j].max()),
        })
    schema = {
        "label": {"column": "diagnosis", "classes": ["benign", "malignant"]},
        "features": features,
    }
    schema_path = os.path.join(out_dir, "breast_cancer.schema.json")
    with open(schema_path, "w", newline="\n") as f:
        json.dump(schema, f, indent=2)
        f.write("\n")

    n_mal = int((y == 0).sum())
    print(f"wrote {csv_path}: {x.shape[0]} rows, {x.shape[1]} features, "
          f"{n_mal} malignant ({100.0 * n_mal / x.shape[0]:.2f}%)")


if __name__ == "__main__":
    main()
