#!/usr/bin/env python3
"""Materialize the iris0 benchmark dataset from scikit-learn's bundled iris data.

iris0 is the standard KEEL binarization of Fisher's iris: class Iris-setosa is
the positive (minority-style) class and the other two species are merged into
the negative class, giving 150 rows, 4 numeric attributes and IR = 2.0.  The
feature values are sklearn's verbatim iris measurements, so the file is a
faithful reconstruction of the KEEL distribution (KEEL stores one decimal
place, as does sklearn).

Usage: python3 scripts/make_iris0.py [output.dat]
Default output: data/keel/iris0.dat relative to the repository root.
"""

from pathlib import Path
import sys

from sklearn.datasets import load_iris


def main() -> None:
    repo = Path(__file__).resolve().parent.parent
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else repo / "data" / "keel" / "iris0.dat"
    out.parent.mkdir(parents=True, exist_ok=True)

    iris = load_iris()
    names = ["sepalLength", "sepalWidth", "petalLength", "petalWidth"]
    lines = ["@relation iris0"]
    for name, lo, hi in zip(
        names, iris.data.min(axis=0), iris.data.max(axis=0), strict=True
    ):
        lines.append(f"@attribute {name} real [{lo:.1f}, {hi:.1f}]")
    lines.append("@attribute class {positive, negative}")
    lines.append("@inputs " + ", ".join(names))
    lines.append("@outputs class")
    lines.append("@data")
    for row, target in zip(iris.data, iris.target, strict=True):
        label = "positive" if target == 0 else "negative"
        lines.append(", ".join(f"{v:.1f}" for v in row) + ", " + label)

    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out} ({len(iris.data)} rows)")


if __name__ == "__main__":
    main()
