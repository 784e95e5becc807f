#!/usr/bin/env python3
"""End-to-end demo on a synthetic corpus.

Builds a citing corpus whose cited literature grows through distinct regimes
with a few heavily referenced classics, then walks the whole pipeline:
ingest, cluster, spectrum, peaks, growth segments, and one merge decision.

Usage: python3 scripts/run_demo.py [--seed 7] [--session demo.session.json]
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from rpys_lab import (Config, MergeDecision, advance, create_session,
                      detect_peaks, parse_wos_export, save, select_k,
                      session_series, session_spectrum, top_clusters_for_year)

CLASSICS = [
    ("Garfield E, 1955, SCIENCE, V122, P108", 1955),
    ("Price DJD, 1965, SCIENCE, V149, P510", 1965),
    ("Hirsch JE, 2005, P NATL ACAD SCI USA, V102, P16569", 2005),
]
# The Price classic also circulates in a sloppy variant that the default
# threshold keeps separate, so the demo has something to merge.
PRICE_VARIANT = "Price D. J. de Solla, 1965, SCI, P510"


def synthetic_export(rng, n_pubs=120) -> str:
    lines = []
    for i in range(n_pubs):
        pub_year = 2005 + int(rng.integers(0, 15))
        refs = []
        # background literature: volume grows with the referenced year
        n_refs = 4 + int(rng.integers(0, 5))
        for j in range(n_refs):
            u = rng.random()
            year = 1950 + int(70 * u ** 0.5)  # denser toward recent years
            surname = "".join(chr(ord("A") + int(rng.integers(26)))
                              for _ in range(6))
            refs.append(f"{surname} X, {year}, J FIELD {year % 7}, "
                        f"V{1 + year % 60}, P{1 + int(rng.integers(400))}")
        for raw, _ in CLASSICS:
            if rng.random() < 0.35:
                refs.append(raw)
        if rng.random() < 0.15:
            refs.append(PRICE_VARIANT)
        lines += ["PT J", f"AU Synthetic, S{i}", f"TI Citing paper {i}",
                  "SO DEMO JOURNAL", f"PY {pub_year}"]
        for j, raw in enumerate(refs):
            lines.append(f"CR {raw}" if j == 0 else f"   {raw}")
        lines.append("ER")
    lines.append("EF")
    return "\n".join(lines) + "\n"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--session", default=None,
                        help="optionally save the final session here")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    corpus = parse_wos_export(synthetic_export(rng).encode("utf-8"))
    print(f"corpus: {len(corpus.publications)} publications, "
          f"{corpus.n_refs} cited references")

    snapshot = create_session(corpus, Config())
    print(f"session v{snapshot.version}: {len(snapshot.partition)} clusters")

    spectrum = session_spectrum(snapshot)
    print(f"\nspectrum spans {spectrum[0].rpy}-{spectrum[-1].rpy}")
    peaks = detect_peaks(spectrum, min_deviation=2)
    print("peaks (min deviation 2):")
    canonical = {c.cluster_id: c.canonical.raw for c in snapshot.partition}
    for p in peaks[:6]:
        tops = top_clusters_for_year(p.rpy, 1, snapshot.partition)
        top = canonical[tops[0][0]] if tops else "-"
        print(f"  {p.rpy}  ncr={p.ncr:<4d} deviation={p.deviation:<8.2f} "
              f"top: {top}")

    fit = select_k(session_series(snapshot), k_max=8)
    print(f"\ngrowth segments (k={fit.k}, scale={fit.scale.value}):")
    for seg in fit.segments:
        print(f"  {seg.start_rpy}-{seg.end_rpy}  slope={seg.slope:+.4f}  "
              f"sse={seg.sse:.3f}")

    variants = [c.cluster_id for c in snapshot.partition
                if c.rpy == 1965 and "PRICE" in c.canonical.first_author]
    if len(variants) >= 2:
        before = {p.rpy: p.ncr for p in spectrum}[1965]
        snapshot = advance(snapshot, MergeDecision.merge(variants,
                                                         note="demo merge"))
        after = {p.rpy: p.ncr
                 for p in session_spectrum(snapshot)}[1965]
        print(f"\nmerged {len(variants)} Price variants: "
              f"ncr(1965) {before} -> {after}, session now v{snapshot.version}")

    if args.session:
        save(snapshot, args.session)
        print(f"saved session to {args.session}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
