"""Regenerates vectors.txt, the small word-vector table bundled for demos and tests.

Words come from the sample essay and training files. Every word gets a seeded
Gaussian vector; a few hand-picked cue words share an extra component so the
toy relation model has something to learn.
"""
import re
from pathlib import Path

import numpy as np

DIM = 16
HERE = Path(__file__).parent
TOKEN = re.compile(r"[^\W_]+(?:['’][^\W_]+)*")

CONTRAST = """however but not cannot harm harms harmful damage dangerous destroys lose
slow unreliable expensive heavier hardest excluded harder costs waste disrupt
objection inconvenience drawbacks only right responsible paid""".split()
SUPPORT = """because improve improves benefits benefit better save protect useful free
productive essential healthier longer lower create evidence shows show shown
studies study research therefore""".split()


def vocabulary():
    words = set()
    for name in ["essay.txt", "adu.tsv", "claim.tsv", "relation.tsv"]:
        for line in (HERE / name).read_text(encoding="utf-8").splitlines():
            if line.startswith("#"):
                continue
            words.update(w.lower() for w in TOKEN.findall(line))
    words.update(CONTRAST)
    words.update(SUPPORT)
    return sorted(words)


def main():
    rng = np.random.default_rng(20240501)
    lines = []
    for word in vocabulary():
        v = rng.normal(0.0, 0.3, DIM)
        if word in CONTRAST:
            v[0] += 1.5
        if word in SUPPORT:
            v[1] += 1.5
        lines.append(word + " " + " ".join(f"{x:.6f}" for x in v))
    (HERE / "vectors.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
