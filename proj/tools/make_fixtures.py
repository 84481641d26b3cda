#!/usr/bin/env python3
"""Generate the synthetic panel fixtures under data/.

The panels mimic World Development Indicators long-format exports for twelve
countries over 2000-2023. Poverty indicators track the R&D target closely and
health indicators loosely, so group rankings have a known planted order.
Running this script again reproduces the committed files byte for byte.
"""

import csv
import io
import json
import math
import pathlib
import sys

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

COUNTRIES = ["ARE", "ARM", "AZE", "IRN", "IRQ", "KWT", "OMN", "PAK", "QAT", "SAU", "TKM", "TUR"]
YEARS = list(range(2000, 2024))
TARGET = ("GB.XPD.RSDV.GD.ZS", "Infrastructure: Technology")

# (code, topic, role) where role is "close", "loose" or "free".
INDICATORS = [
    ("SI.POV.DDAY", "Poverty: Poverty rates", "close"),
    ("SI.POV.GINI", "Poverty: Income distribution", "close"),
    ("SI.SPR.PCAP", "Poverty: Shared prosperity", "close"),
    ("SH.DYN.MORT", "Health: Mortality", "loose"),
    ("SH.IMM.MEAS", "Health: Disease prevention", "loose"),
    ("SH.MED.BEDS.ZS", "Health: Health systems", "loose"),
    ("SH.STA.STNT.ZS", "Health: Nutrition", "loose"),
    ("SP.DYN.CBRT.IN", "Health: Population: Dynamics", "loose"),
    ("SP.ADO.TFRT", "Health: Reproductive health", "loose"),
    ("SH.PRV.SMOK", "Health: Risk factors", "loose"),
    ("SH.UHC.SRVS.CV.XD", "Health: Universal Health Coverage", "loose"),
    ("BN.KLT.DINV.CD", "Economic Policy & Debt: Balance of payments: Capital & financial account", "free"),
    ("BX.TRF.PWKR.CD", "Economic Policy & Debt: Balance of payments: Current account: Transfers", "free"),
    ("DT.DOD.DECT.CD", "Economic Policy & Debt: External debt: Debt outstanding", "free"),
    ("NY.ADJ.NNTY.CD", "Economic Policy & Debt: National accounts: Adjusted savings & income", "free"),
    ("NY.GNP.PCAP.CD", "Economic Policy & Debt: National accounts: Atlas GNI & GNI per capita", "free"),
    ("NY.GDP.MKTP.KD.ZG", "Economic Policy & Debt: National accounts: Growth rates", "free"),
    ("NE.CON.GOVT.ZS", "Economic Policy & Debt: National accounts: Shares of GDP & other", "free"),
    ("NY.GDP.MKTP.CD", "Economic Policy & Debt: National accounts: US$ at current prices: Aggregate indicators", "free"),
    ("DT.ODA.ODAT.CD", "Economic Policy & Debt: Official development assistance", "free"),
    ("PA.NUS.PPP", "Economic Policy & Debt: Purchasing power parity", "free"),
    ("SE.PRM.CMPT.ZS", "Education: Efficiency", "free"),
    ("SE.XPD.TOTL.GD.ZS", "Education: Inputs", "free"),
    ("SE.ADT.LITR.ZS", "Education: Outcomes", "free"),
    ("SE.SEC.ENRR", "Education: Participation", "free"),
    ("SL.TLF.PART.ZS", "Employment and Time Use", "free"),
    ("AG.PRD.CROP.XD", "Environment: Agricultural production", "free"),
    ("EN.ATM.CO2E.PC", "Environment: Emissions", "free"),
    ("EG.USE.PCAP.KG.OE", "Environment: Energy production & use", "free"),
    ("ER.H2O.FWTL.ZS", "Environment: Freshwater", "free"),
    ("AG.LND.FRST.ZS", "Environment: Land use", "free"),
    ("FB.CBK.BRCH.P5", "Financial Sector: Access", "free"),
    ("CM.MKT.LCAP.GD.ZS", "Financial Sector: Capital markets", "free"),
    ("FP.CPI.TOTL.ZG", "Financial Sector: Exchange rates & prices", "free"),
    ("FR.INR.LEND", "Financial Sector: Interest rates", "free"),
    ("SG.GEN.PARL.ZS", "Gender: Public life & decision making", "free"),
    ("IT.NET.USER.ZS", "Infrastructure: Communications", "free"),
    ("IT.CEL.SETS.P2", "Infrastructure: Communications", "free"),
    ("IS.AIR.PSGR", "Infrastructure: Transportation", "free"),
    ("TX.VAL.MRCH.CD.WT", "Private Sector & Trade: Exports", "free"),
    ("TM.VAL.MRCH.CD.WT", "Private Sector & Trade: Imports", "free"),
    ("ST.INT.ARVL", "Private Sector & Trade: Travel & tourism", "free"),
    ("MS.MIL.XPND.GD.ZS", "Public Sector: Defense & arms trade", "free"),
    ("GC.REV.XGRT.GD.ZS", "Public Sector: Government finance: Revenue", "free"),
    ("GC.XPN.TOTL.GD.ZS", "Public Sector: Government finance: Expense", "free"),
    ("SL.UEM.TOTL.ZS", "Social Protection & Labor: Unemployment", "free"),
    ("SM.POP.NETM", "Social Protection & Labor: Migration", "free"),
    ("SL.TLF.CACT.ZS", "Social Protection & Labor: Economic activity", "free"),
    ("NE.TRD.GNFS.ZS", "Trade", "free"),
]

HEADER = ["country", "indicator", "topic", "year", "value"]


def fmt(x):
    return repr(round(float(x), 6))


def target_paths(rng):
    t = np.arange(len(YEARS), dtype=float)
    paths = {}
    for c in COUNTRIES:
        level = rng.uniform(0.1, 1.0)
        slope = rng.uniform(-0.02, 0.04)
        amp = rng.uniform(0.02, 0.12)
        phase = rng.uniform(0.0, 2 * math.pi)
        noise = rng.normal(0.0, 0.02, len(t))
        paths[c] = level + slope * t + amp * np.sin(2 * math.pi * t / 4 + phase) + noise
    return paths


def free_path(rng):
    t = np.arange(len(YEARS), dtype=float)
    walk = np.cumsum(rng.normal(0.0, 1.0, len(t)))
    cycle = rng.uniform(0.5, 3.0) * np.sin(2 * math.pi * t / rng.choice([3, 5, 6, 8]) + rng.uniform(0, 6.3))
    return rng.uniform(-50, 50) + rng.uniform(1, 20) * (walk + cycle)


def big_panel(rng):
    targets = target_paths(rng)
    cube = {}
    for c in COUNTRIES:
        cube[(c, TARGET[0])] = targets[c]
    for code, _, role in INDICATORS:
        scale = rng.uniform(5, 50)
        offset = rng.uniform(-20, 80)
        for c in COUNTRIES:
            if role == "close":
                series = offset + scale * (targets[c] + rng.normal(0.0, 0.005, len(YEARS)))
            elif role == "loose":
                series = offset + scale * (targets[c] + rng.normal(0.0, 0.08, len(YEARS)))
            else:
                series = free_path(rng)
            cube[(c, code)] = series
    return cube


def mask_cells(rng, cube, fraction, min_keep):
    keys = sorted(cube)
    cells = [(k, y) for k in keys for y in range(len(YEARS))]
    order = rng.permutation(len(cells))
    budget = int(round(fraction * len(cells)))
    missing = set()
    observed = {k: len(YEARS) for k in keys}
    for idx in order:
        if len(missing) >= budget:
            break
        k, y = cells[idx]
        if observed[k] - 1 < min_keep:
            continue
        missing.add((k, y))
        observed[k] -= 1
    return missing


def write_panel(path, cube, topics, missing, rng):
    rows = []
    for (c, code), series in sorted(cube.items()):
        for yi, year in enumerate(YEARS):
            value = "" if ((c, code), yi) in missing else fmt(series[yi])
            rows.append([c, code, topics[code], str(year), value])
    # Shuffle rows so that parsing has to sort the axes itself.
    order = rng.permutation(len(rows))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for i in order:
        w.writerow(rows[i])
    path.write_text(buf.getvalue(), encoding="utf-8")
    return rows


def main():
    rng = np.random.default_rng(20240601)
    DATA.mkdir(exist_ok=True)
    topics = {TARGET[0]: TARGET[1]}
    topics.update({code: topic for code, topic, _ in INDICATORS})

    cube = big_panel(rng)
    missing = mask_cells(rng, cube, 0.10, 12)
    rows = write_panel(DATA / "fixture_panel.csv", cube, topics, missing, rng)

    small_codes = [TARGET[0], "SI.POV.DDAY", "SH.DYN.MORT"]
    small = {k: v for k, v in cube.items() if k[1] in small_codes}
    small_missing = mask_cells(rng, small, 0.05, 12)
    small_rows = write_panel(DATA / "fixture_small.csv", small, topics, small_missing, rng)

    settings = {
        "input": "fixture_panel.csv",
        "output_dir": "fixture_out",
        "schema": {"country": "country", "indicator": "indicator", "topic": "topic", "year": "year",
                   "value": "value", "year_min": 2000, "year_max": 2023, "strict_taxonomy": True},
        "stl": {"period": 4, "seasonal_smoother": 7, "trend_smoother": None, "lowpass_smoother": None,
                "inner_iterations": 2, "outer_iterations": 0},
        "dtw": {"local_cost": "absolute", "radius": 1, "min_size": None},
        "weights": {"trend": 0.7, "seasonal": 0.3},
        "autoencoder": {"hidden_width": None, "activation": "tanh", "learning_rate": 0.01, "epochs": 2000,
                        "refinement_rounds": 5, "init_scale": 0.1},
        "target_indicator": TARGET[0],
        "reference_country": "IRN",
        "min_years": 3,
        "seed": 42,
        "taxonomy": None,
    }
    (DATA / "fixture_settings.json").write_text(json.dumps(settings, indent=2) + "\n", encoding="utf-8")

    # Independent tallies used as frozen expectations in the C++ tests.
    summary = {
        "big": {
            "cells": len(rows),
            "observed": sum(1 for r in rows if r[4] != ""),
            "countries": sorted({r[0] for r in rows}),
            "indicators": len({r[1] for r in rows}),
        },
        "small": {
            "cells": len(small_rows),
            "observed": sum(1 for r in small_rows if r[4] != ""),
            "indicators": sorted({r[1] for r in small_rows}),
        },
    }
    json.dump(summary, sys.stdout, indent=2)
    print()


if __name__ == "__main__":
    main()
