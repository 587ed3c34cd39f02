"""Tail sums T_N of the complete growth series against N, and minimal R per radius."""
import math
from dataclasses import dataclass, field

from _common import parse_config, write_rows

from groupalg.ball import count_spheres
from groupalg.diagnostics import complete_growth_tail, minimal_R
from groupalg.groups import parse_group
from groupalg.growth import parse_growth


@dataclass
class ScanConfig:
    group: str = "f2"
    sigma: str = "subexp(1)"
    R: float = 2.0
    z: float = 1.0
    radii: list = field(default_factory=lambda: [10, 20, 30, 40, 60])
    R_grid: list = field(default_factory=lambda: [0.25 * i for i in range(1, 17)])
    out: str = "complete_growth_scan.csv"


def run(cfg: ScanConfig) -> list[dict]:
    spec, sigma = parse_group(cfg.group), parse_growth(cfg.sigma)
    rows = []
    for N in cfg.radii:
        counts = count_spheres(spec, N)
        rep = complete_growth_tail(counts, sigma, cfg.R, cfg.z)
        mr = minimal_R(counts, sigma, cfg.z, cfg.R_grid)
        rows.append({"N": N, "T_N": rep.total, "verdict": rep.verdict, "minimal_R": mr.R, "monotone": mr.monotone})
    return rows


if __name__ == "__main__":
    cfg = parse_config(ScanConfig, __doc__.splitlines()[0])
    rows = run(cfg)
    write_rows(cfg.out, rows)
    if (cfg.group, cfg.sigma, cfg.R, cfg.z) == ("f2", "subexp(1)", 2.0, 1.0):
        q = 3 / math.e**2
        print(f"closed form {1 + 4 / 3 * q / (1 - q):.12f}")
    for r in rows:
        print(f"N={r['N']:3}  T_N={r['T_N']:.12f}  {r['verdict']}  minimal R={r['minimal_R']}")
