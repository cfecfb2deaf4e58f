#!/usr/bin/env python3
"""One-shot generator for the bundled 50-statement sample corpus.

Writes src/agendascope/data/sample/{speeches/*.txt,metadata.csv,config.json}.
Regenerate only when the fixture needs to change; outputs are committed.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
SAMPLE = ROOT / "src" / "agendascope" / "data" / "sample"

COUNTRIES = [
    ("ARG", "LCN"), ("BRA", "LCN"), ("CHL", "LCN"), ("MEX", "LCN"),
    ("JAM", "LCN"), ("PER", "LCN"), ("COL", "LCN"), ("BOL", "LCN"),
    ("IND", "SAS"), ("PAK", "SAS"), ("BGD", "SAS"), ("LKA", "SAS"),
    ("NPL", "SAS"), ("AFG", "SAS"),
    ("NGA", "SSA"), ("KEN", "SSA"), ("GHA", "SSA"), ("ETH", "SSA"),
    ("TZA", "SSA"), ("SEN", "SSA"), ("ZMB", "SSA"), ("MLI", "SSA"),
    ("FRA", "ECS"), ("DEU", "ECS"), ("POL", "ECS"), ("SWE", "ECS"),
    ("TUR", "ECS"), ("UKR", "ECS"), ("GRC", "ECS"),
    ("EGY", "MEA"), ("JOR", "MEA"), ("MAR", "MEA"), ("IRQ", "MEA"),
    ("SAU", "MEA"), ("TUN", "MEA"),
    ("CHN", "EAS"), ("JPN", "EAS"), ("IDN", "EAS"), ("PHL", "EAS"),
    ("VNM", "EAS"), ("FJI", "EAS"), ("THA", "EAS"), ("KOR", "EAS"),
    ("USA", "NAC"), ("CAN", "NAC"),
    ("AUS", "EAS"), ("NZL", "EAS"), ("CUB", "LCN"), ("ZWE", "SSA"),
    ("BEL", "ECS"),
]

THEME_ECONOMIC = """trade economy growth market debt industry finance
investment export commodity tariff inflation currency production
agriculture manufacturing employment income infrastructure banking
capital liberalization credit lending prices""".split()

THEME_SUSTAINABLE = """climate sustainable environment education health women
children sanitation energy renewable emission biodiversity ocean forest
equality nutrition resilience adaptation ecosystem literacy vaccination
drought pollution conservation wellbeing""".split()

THEME_SECURITY = """war conflict peace security terrorism weapons
disarmament refugees ceasefire troops occupation sovereignty aggression
peacekeeping humanitarian violence militia borders treaty hostilities
nuclear stability mediation demobilization reconciliation""".split()

SHARED = """nations united assembly general international global world
country government people delegation president secretary session
cooperation community future support commitment progress development
challenges efforts responsibility dialogue organization charter members
solidarity prosperity justice freedom hope reform principles""".split()

TEMPLATES = [
    "The {a} of {b} and the {d} of {e} demand the attention of this {f}.",
    "For us, {a} and {b} are inseparable from {d} and {e} in any {f}.",
    "We will act on {a}, on {b}, on {d}, and on {e}, with all {f}.",
    "No {f} can ignore {a}, nor {b}, nor the ties between {d} and {e}.",
    "Let {a} and {b} be matched by {d} and by {e} before this {f}.",
    "Our agenda is {a}, then {b}, then {d}, and above all {e} and {f}.",
]


def theme_weights(region: str, year: int, conflict: int,
                  rng: np.random.Generator) -> np.ndarray:
    econ = 1.1 if region in ("LCN", "SAS") else 0.7
    sust = 0.4 + 1.6 * (year - 1970) / 46.0
    if region in ("EAS", "SSA"):
        sust += 0.35
    sec = 0.45 + (1.9 if conflict else 0.0)
    raw = np.array([econ, sust, sec]) + rng.uniform(0.0, 0.25, 3)
    raw = raw ** 2  # sharpen so documents lean more clearly on one theme
    return raw / raw.sum()


def make_text(country: str, region: str, year: int, conflict: int,
              rng: np.random.Generator) -> str:
    pools = [THEME_ECONOMIC, THEME_SUSTAINABLE, THEME_SECURITY]
    weights = theme_weights(region, year, conflict, rng)
    n_sentences = int(rng.integers(16, 22))
    sentences = [f"Statement of {country} to the assembly."]
    for _ in range(n_sentences):
        theme = int(rng.choice(3, p=weights))
        pool = pools[theme]
        picks = rng.choice(len(pool), size=4, replace=False)
        a, b, d, e = (pool[i] for i in picks)
        f = SHARED[int(rng.integers(0, len(SHARED)))]
        template = TEMPLATES[int(rng.integers(0, len(TEMPLATES)))]
        sentences.append(template.format(a=a, b=b, d=d, e=e, f=f))
        if rng.random() < 0.15:
            extra = [SHARED[int(i)] for i in rng.integers(0, len(SHARED), 3)]
            sentences.append(
                f"In {year}, the {extra[0]} of this {extra[1]} "
                f"rests on {extra[2]}.")
    return "\n".join(sentences) + "\n"


def main() -> None:
    rng = np.random.default_rng(742001)
    speeches = SAMPLE / "speeches"
    speeches.mkdir(parents=True, exist_ok=True)
    for old in speeches.glob("*.txt"):
        old.unlink()

    meta_rows = ["doc_id,gdp_pc,population,oda,polity,conflict,region"]
    for i, (iso3, region) in enumerate(COUNTRIES):
        year = 1970 + int(rng.integers(0, 47))
        session = year - 1945
        conflict = int(rng.random() < (0.45 if region in ("SSA", "MEA", "SAS") else 0.15))
        doc_id = f"{iso3}_{session}_{year}"
        text = make_text(iso3, region, year, conflict, rng)
        (speeches / f"{doc_id}.txt").write_text(text, encoding="utf-8")

        base_gdp = {"NAC": 30000, "ECS": 18000, "EAS": 8000, "LCN": 5200,
                    "MEA": 4200, "SAS": 900, "SSA": 700}[region]
        gdp = round(float(base_gdp * rng.lognormal(0.0, 0.45)), 2)
        population = round(float(rng.lognormal(16.2, 1.5)), 0)
        oda = round(float(rng.normal(2.2e8, 3.0e8)), 2)
        polity = int(rng.integers(-10, 11))
        gdp_cell = "" if i in (7, 23) else f"{gdp}"
        polity_cell = "" if i == 31 else f"{polity}"
        meta_rows.append(
            f"{doc_id},{gdp_cell},{population},{oda},{polity_cell},{conflict},{region}")

    (SAMPLE / "metadata.csv").write_text("\n".join(meta_rows) + "\n",
                                         encoding="utf-8")

    config = {
        "paths": {"corpus_dir": "speeches", "metadata": "metadata.csv",
                  "out_dir": "out"},
        "preprocess": {"min_doc_freq": 5, "min_term_len": 3},
        "fit": {"k_grid": [3, 4, 5], "max_em_iters": 60, "rel_tol": 1e-5,
                "candidate_rel_tol": 1e-4},
        "formula": "s(year,df=4) + region + conflict",
        "metrics": {"coherence_m": 8, "top_words": 12},
        "effects": {"n_draws": 300, "targets": [
            {"covariate": "year", "topics": [0, 1], "grid_points": 25},
            {"covariate": "conflict", "topics": [0, 1], "contrast": [1, 0]},
        ]},
        "report": {"perspectives": [[0, 1]], "wordcloud_topics": [0, 1],
                   "wordcloud_n": 30, "graph_threshold": 0.05},
        "seed": 20240817,
        "deterministic": True,
    }
    (SAMPLE / "config.json").write_text(json.dumps(config, indent=2) + "\n",
                                        encoding="utf-8")
    print(f"wrote {len(COUNTRIES)} speeches to {speeches}")


if __name__ == "__main__":
    main()
