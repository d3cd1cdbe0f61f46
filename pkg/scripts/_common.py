import argparse
from pathlib import Path

from triobose import cli

LOG_G = [0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 200.0]


def parser(description):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out-dir", default="results", help="directory for CSV output")
    p.add_argument("--solver-points", type=int, default=384, help="exact solver lattice points per axis")
    return p


def run(out_dir, name, *argv):
    path = Path(out_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    code = cli.main([*argv, "--out", str(path)])
    print(f"{path}: exit {code}")
    return code
