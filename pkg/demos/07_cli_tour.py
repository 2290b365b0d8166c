"""A tour of the command-line interface.

The same workflows are scriptable without Python: generate an instance,
learn it, evaluate the result, and benchmark query counts across sizes.
This demo drives the installed `slatelearn` entry point through its Python
main() so the transcript is reproducible.
"""

import tempfile
from pathlib import Path

from slatelearn.cli import main


def run(*args):
    print("$ slatelearn " + " ".join(args))
    code = main(list(args))
    print("(exit code {})\n".format(code))


def demo():
    with tempfile.TemporaryDirectory() as d:
        d = Path(d)
        truth = d / "truth.json"
        learned = d / "learned.json"
        csv = d / "bench.csv"

        run("gen", "--instance", "geometric-ratio", "--n", "6",
            "--rho", "2", "--out", str(truth))

        run("learn", "--model", str(truth), "--eps", "0.5", "--seed", "7",
            "--out", str(learned))

        run("eval", "--model-a", str(truth), "--model-b", str(learned))

        run("bench", "--instance", "uniform", "--n", "4", "--n", "8",
            "--eps", "0.5", "--trials", "2", "--seed", "1",
            "--out", str(csv))
        print(csv.read_text())


if __name__ == "__main__":
    demo()
