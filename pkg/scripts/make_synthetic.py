"""Write the synthetic databases used by the other experiment scripts."""
import argparse
from pathlib import Path

from svmfim.txdb import SyntheticSpec, dump_fimi, gen_synthetic


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results/data")
    parser.add_argument("--seeds", type=int, default=3)
    parser.add_argument("--n-transactions", type=int, default=500)
    parser.add_argument("--n-items", type=int, default=10)
    parser.add_argument("--injection-prob", type=float, default=0.6)
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for seed in range(args.seeds):
        spec = SyntheticSpec(args.n_transactions, args.n_items, 5, 5.0, args.injection_prob, seed)
        db = gen_synthetic(spec)
        path = out / f"synth_{seed}.dat"
        path.write_text(dump_fimi(db))
        print(f"{path}: {len(db)} transactions, patterns {list(db.seed_patterns)}")


if __name__ == "__main__":
    main()
