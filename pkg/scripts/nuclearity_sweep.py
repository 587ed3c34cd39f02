"""Nuclearity evidence over a group x growth-function matrix.

For each pair: the combined ratio/Raabe verdict over the rho grid, the
symbolic verdict from the growth class, the first rho with summable
evidence, and whether a beta_G witness was found.
"""
from dataclasses import dataclass, field

from _common import parse_config, write_rows

from groupalg.ball import count_spheres
from groupalg.diagnostics import SUMMABLE, gp_verdict, surface_vs_volume
from groupalg.groups import parse_group
from groupalg.growth import parse_growth


@dataclass
class SweepConfig:
    groups: list = field(default_factory=lambda: ["z", "z2", "z3", "f2", "f3", "zxf2"])
    sigmas: list = field(default_factory=lambda: ["poly(1,1)", "subexp(0.5)", "subexp(1)", "subfact(0.5)", "factorial"])
    radius: int = 60
    delta: float = 0.05
    out: str = "nuclearity_sweep.csv"


def run(cfg: SweepConfig) -> list[dict]:
    rows = []
    for g in cfg.groups:
        counts = count_spheres(parse_group(g), cfg.radius)
        for s in cfg.sigmas:
            sigma = parse_growth(s)
            rep = gp_verdict(counts, sigma, delta=cfg.delta)
            first = next((r for r, v in zip(rep.grid, rep.per_rho) if v == SUMMABLE), None)
            w = surface_vs_volume(counts, sigma).beta_witness
            rows.append({
                "group": g,
                "sigma": s,
                "verdict": rep.verdict,
                "symbolic": rep.symbolic_verdict,
                "first_summable_rho": first,
                "beta_witness": "" if w is None else f"{w.c},{w.k}",
                "contradicts": rep.contradicts,
            })
    return rows


if __name__ == "__main__":
    cfg = parse_config(SweepConfig, __doc__.splitlines()[0])
    rows = run(cfg)
    write_rows(cfg.out, rows)
    for r in rows:
        print(f"{r['group']:6} {r['sigma']:14} {r['verdict']:20} {str(r['symbolic']):12} rho*={r['first_summable_rho']}")
