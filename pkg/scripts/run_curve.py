"""Aggregate rule confidence per training step for all five models."""
import argparse
from pathlib import Path

from svmfim.cli import main as cli
from svmfim.txdb import SyntheticSpec, dump_fimi, gen_synthetic


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results/curve")
    parser.add_argument("--minsup", type=float, default=0.4)
    parser.add_argument("--pass-size", type=int, default=5, help="SMO updates per snapshot")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    data = out / "synth.dat"
    data.write_text(dump_fimi(gen_synthetic(SyntheticSpec(500, 10, 5, 5.0, 0.6, args.seed))))
    raise SystemExit(cli(["curve", "--input", str(data), "--minsup", str(args.minsup),
                          "--pass-size", str(args.pass_size), "--seed", str(args.seed),
                          "--output", str(out / "curve.csv")]))


if __name__ == "__main__":
    main()
