#!/usr/bin/env python
"""Regenerate the bundled mini embedding table (GloVe text format).

Vectors are engineered, not trained: tokens live in per-topic clusters on
separate axes with small deterministic per-token offsets, so within-cluster
cosines are high and cross-cluster cosines are near zero. Rewriting the
file is only needed when the token inventory changes.
"""

from pathlib import Path

DIM = 8

CLUSTERS: list[tuple[int, tuple[int, float] | None, list[str]]] = [
    (0, None, [
        "robert", "annie", "james", "john", "maria", "wei", "sarah", "alice",
        "bob", "david", "emma", "michael", "lisa", "carlos", "priya", "tom",
        "rachel", "nina", "omar", "elena",
    ]),
    (1, None, [
        "france", "germany", "japan", "china", "india", "brazil", "spain",
        "berlin", "paris", "london", "tokyo", "boston", "seattle", "madrid",
    ]),
    (2, None, ["everest", "alps", "sahara", "amazon", "pacific", "andes"]),
    (3, None, [
        "Python", "Java", "SQL", "Excel", "Tableau", "MySQL", "PostgreSQL",
        "MongoDB", "Linux", "Windows",
    ]),
    # Model acronyms share the tech axis but sit in their own sub-cluster so
    # their mutual cosines beat tech-tool cosines.
    (3, (5, 0.45), ["SVM", "KNN", "CNN", "LSTM"]),
    (4, None, ["Greek", "German", "Spanish", "French", "Italian"]),
    (5, None, ["MyChar", "VarName", "ClassName", "TempVar"]),
]


def vector(axis: int, extra: tuple[int, float] | None, i: int) -> list[float]:
    v = [0.0] * DIM
    v[axis] = 1.0
    if extra is not None:
        v[extra[0]] += extra[1]
    v[6] = 0.03 * ((i % 5) - 2)
    v[7] = 0.025 * ((i % 7) - 3)
    return v


def main() -> None:
    out = Path(__file__).resolve().parent.parent / "src" / "agentzero" / "data" / "mini_glove.txt"
    lines = []
    for axis, extra, tokens in CLUSTERS:
        for i, token in enumerate(tokens):
            values = " ".join(f"{x:.4f}" for x in vector(axis, extra, i))
            lines.append(f"{token} {values}")
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} vectors of dim {DIM} to {out}")


if __name__ == "__main__":
    main()
