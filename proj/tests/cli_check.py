#!/usr/bin/env python3
"""Exit codes, outputs and determinism of the mlpoly command line.

Usage: cli_check.py <mlpoly binary>
"""

import os
import subprocess
import sys
import tempfile

failures = 0


def check(label, ok):
    global failures
    failures += not ok
    print(f"{'ok  ' if ok else 'FAIL'} {label}")


def run(cli, *args):
    return subprocess.run([cli, *args], capture_output=True, text=True)


def main():
    cli = sys.argv[1]
    with tempfile.TemporaryDirectory() as tmp:
        cfg = os.path.join(tmp, "run.cfg")
        with open(cfg, "w") as f:
            f.write("# small restoration sweep\n"
                    "image_kind = CEN\nwidth = 6\nheight = 6\n"
                    "p = [0.1:0.2:0.5]\ntrials = 2\nseed_base = 9\n"
                    "methods = Standard,Clique,IP\n")
        a = run(cli, "restore", "--config", cfg)
        b = run(cli, "restore", "--config", cfg, "--workers", "2")
        check("restore exits 0", a.returncode == 0 and b.returncode == 0)
        lines = a.stdout.splitlines()
        check("restore writes header plus 18 rows",
              lines[0] == "kind,p,seed,lp_value,ip_value,r_g,is_binary,partial_recovery,"
                          "wall_time_s" and len(lines) == 19)
        check("hash line is reproducible across worker counts",
              a.stderr.strip() and a.stderr == b.stderr)

        out = os.path.join(tmp, "out.csv")
        summary = os.path.join(tmp, "summary.csv")
        r = run(cli, "restore", "--config", cfg, "--output", out, "--summary", summary)
        check("output and summary files", r.returncode == 0 and os.path.getsize(out) > 0
              and open(summary).readline().startswith("method,p,trials"))
        h = run(cli, "hash", "--input", out)
        check("hash subcommand matches the run", h.stdout.strip() in a.stderr)
        p = run(cli, "plot-data", "--input", out, "--metric", "tightness")
        check("plot-data table", p.returncode == 0
              and p.stdout.splitlines()[0] == "method,p,mean,stderr"
              and len(p.stdout.splitlines()) == 10)

        d = run(cli, "decode", "--n", "9", "--beta", "3", "--gamma", "2", "--p", "0",
                "--trials", "3")
        check("decode at p = 0 recovers every bit", d.returncode == 0 and all(
            line.split(",")[8] == "1" for line in d.stdout.splitlines()[1:]))

        code = os.path.join(tmp, "code.txt")
        g = run(cli, "gen-code", "--n", "9", "--beta", "3", "--gamma", "2", "--seed", "4",
                "--output", code)
        text = open(code).read().splitlines() if g.returncode == 0 else []
        check("gen-code writes header and 6 rows", text[:1] == ["9 3 2 6 4"] and len(text) == 7)
        dc = run(cli, "decode", "--code", code, "--p", "0.1", "--trials", "2")
        check("decode reads a code file", dc.returncode == 0
              and dc.stdout.splitlines()[1].startswith("9,3,2,"))

        img = run(cli, "gen-image", "--kind", "CROSS", "--width", "5", "--height", "5")
        check("gen-image writes PBM", img.returncode == 0 and img.stdout.startswith("P1"))
        pbm = os.path.join(tmp, "truth.pbm")
        with open(pbm, "w") as f:
            f.write(img.stdout)
        ri = run(cli, "restore", "--image", pbm, "--phi-learn", pbm, "--p", "0.1",
                 "--methods", "Clique")
        check("restore from a PBM with learned phi", ri.returncode == 0)

        lp = run(cli, "export-lp", "--application", "decode", "--n", "9", "--beta", "3",
                 "--gamma", "2", "--p", "0.1", "--seed", "2", "--method", "Parity")
        check("export-lp writes LP text", lp.returncode == 0
              and "Maximize" in lp.stdout and lp.stdout.rstrip().endswith("End"))

        for label, args in [
            ("p outside [0, 0.5]", ["restore", "--p", "0.7"]),
            ("unknown flag", ["restore", "--colour", "blue"]),
            ("unknown method", ["restore", "--methods", "Parity"]),
            ("missing config file", ["decode", "--config", os.path.join(tmp, "none.cfg")]),
            ("unknown metric", ["plot-data", "--input", out, "--metric", "speed"]),
            ("bad code parameters", ["gen-code", "--n", "10", "--beta", "3"]),
            ("unwritable output", ["gen-image", "--output", os.path.join(tmp, "no", "x.pbm")]),
            ("export-lp with a p grid", ["export-lp", "--p", "[0.1:0.1:0.2]"]),
            ("no subcommand", []),
        ]:
            r = run(cli, *args)
            check(f"exit 2 on {label}", r.returncode == 2)

        r = run(cli, "decode", "--p", "0.1", "--trials", "30", "--methods", "IP",
                "--max-nodes", "1")
        check("exit 3 when the node budget runs out", r.returncode == 3)
        check("help exits 0", run(cli, "--help").returncode == 0)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
