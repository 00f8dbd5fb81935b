"""Desk-scale detection benchmark: generate, detect, score, aggregate.

Prints a per-class count table (micro-averaged over the corpus) in the
same shape as the CSV reports the `eval` subcommand writes.

Run:  python3 demos/03_benchmark.py
"""

import tempfile
from pathlib import Path

from draftvec.pipeline import PipelineConfig
from draftvec.synth import GenSpec, run_benchmark

work = Path(tempfile.mkdtemp(prefix="draftvec_bench_"))

spec = GenSpec(width=400, height=300, circles=(1, 4), segments=(1, 3), noise_sigma=6.0)
aggregate, per_image = run_benchmark(
    n_images=10, spec=spec, seeds=list(range(10)), cfg=PipelineConfig(), workdir=work
)

print(f"corpus of {len(per_image)} images at sigma=6, workdir {work}\n")
print(aggregate.render())

circles = aggregate.row("Circles")
print(
    f"circle precision {circles.precision:.3f}, recall {circles.recall:.3f} "
    f"({circles.matched_count}/{circles.truth_count} matched)"
)
