"""Run the acceptance corpus and store the JSON results next to a text table."""
from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from conelab.corpus import digest, format_table, payload_json, results_payload, run_all


@dataclass
class Config:
    seed: int = 0
    out_dir: Path = Path("results")
    only: tuple[int, ...] = ()


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=Config.seed)
    ap.add_argument("--out-dir", type=Path, default=Config.out_dir)
    ap.add_argument("--only", type=int, nargs="*", default=())
    cfg = Config(**vars(ap.parse_args()))

    results = run_all(cfg.seed, set(cfg.only) or None,
                      progress=lambda r: print(f"  criterion {r.id} done in {r.seconds:.1f}s", flush=True))
    text = payload_json(results_payload(results, cfg.seed))
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    (cfg.out_dir / "acceptance.json").write_text(text)
    table = format_table(results)
    (cfg.out_dir / "acceptance.txt").write_text(table + "\n")
    print(table)
    print(f"sha256 {digest(text)}")


if __name__ == "__main__":
    main()
