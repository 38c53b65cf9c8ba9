"""Benchmark the compiled string-kernel backend against the pure fallback.

Both backends produce bit-identical Gram matrices; this script measures the
speed difference on synthetic corpora of a few sizes and verifies equality
on the smallest one.

Usage: python bench/bench_backends.py [--repeats 3]
"""

import argparse
import statistics
import time

from nlikit.corpus import generate_synthetic_corpus
from nlikit.stringkernel import (available_backends, backend_name,
                                 blended_gram, set_backend)

SIZES = [
    # (docs per class, doc length, p_min, p_max)
    (10, 300, 2, 4),
    (25, 500, 3, 5),
    (50, 500, 5, 9),
]


def time_backend(backend: str, docs, kind: str, p_min: int, p_max: int,
                 repeats: int) -> tuple[float, bytes]:
    set_backend(backend)
    samples = []
    gram = None
    for _ in range(repeats):
        start = time.perf_counter()
        gram = blended_gram(docs, docs, kind, p_min, p_max)
        samples.append(time.perf_counter() - start)
    return statistics.median(samples), gram.values.tobytes()


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repeats per cell (median reported)")
    parser.add_argument("--kind", default="intersection",
                        choices=["presence", "intersection"])
    args = parser.parse_args()

    backends = available_backends()
    print(f"available backends: {', '.join(backends)}")
    if "native" not in backends:
        print("compiled extension not built; nothing to compare")
        return
    default = backend_name()

    print(f"{'docs':>5} {'chars':>6} {'p':>5} {'pure':>9} {'native':>9} "
          f"{'speedup':>8}")
    try:
        for per_class, length, p_min, p_max in SIZES:
            corpus = generate_synthetic_corpus(5, per_class, length, 4, 0)
            docs = corpus.documents["essay"]
            t_pure, bytes_pure = time_backend(
                "pure", docs, args.kind, p_min, p_max, args.repeats)
            t_native, bytes_native = time_backend(
                "native", docs, args.kind, p_min, p_max, args.repeats)
            assert bytes_pure == bytes_native, "backends disagree"
            print(f"{len(docs):>5} {length:>6} {f'{p_min}-{p_max}':>5} "
                  f"{t_pure:>8.3f}s {t_native:>8.3f}s "
                  f"{t_pure / t_native:>7.1f}x")
    finally:
        set_backend(default)
    print("results verified bit-identical across backends")


if __name__ == "__main__":
    main()
