#!/usr/bin/env python3
"""Regenerate the synthetic long-format fixtures in this directory.

Each fixture is a small panel whose target series is generated exactly
from the error-correction relation the package estimates: two of the
six peers carry the long-run signal, the rest are decoys with similar
shapes.  True parameters are written alongside as JSON so tests can
check that the pipeline recovers them.

Two variants: one with a small normal disturbance on the target's daily
change, one noiseless (the target is an exact function of the peers, up
to integer rounding of the counts).

Deterministic: fixed seed, same bytes on every run.
"""

from __future__ import annotations

import json
import math
from datetime import date, timedelta
from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent

SEED = 20200310
N_PEERS = 6
PEER_LEN = 60
TARGET_LEN = 40
SUPPORT = (0, 1)
BETA = (0.7, 0.3)
PI = (0.4, 0.2)
GAMMA = -0.35
SIGMA = 0.01
TARGET_START = date(2020, 3, 10)
PEER_NAMES = [f"Peer{c}" for c in "ABCDEF"]


def peer_log_curves(rng: np.random.Generator) -> np.ndarray:
    """Log-level curves with shared level, varied slope and curvature."""
    tau = np.arange(1, PEER_LEN + 1, dtype=float)
    cols = []
    for j in range(N_PEERS):
        a = math.log(3000.0) + 0.08 * rng.standard_normal()
        b = 0.050 + 0.012 * rng.standard_normal()
        c = 0.25 + 0.10 * rng.standard_normal()
        cols.append(a + b * tau + c * np.log1p(tau))
    return np.column_stack(cols)


def target_log_series(X: np.ndarray, sigma: float,
                      rng: np.random.Generator) -> np.ndarray:
    beta = np.array(BETA)
    pi = np.array(PI)
    S = list(SUPPORT)
    y = np.empty(TARGET_LEN)
    y[0] = X[0, S] @ beta
    for t in range(1, TARGET_LEN):
        dx = X[t, S] - X[t - 1, S]
        z_lag = y[t - 1] - X[t - 1, S] @ beta
        u = sigma * rng.standard_normal() if sigma > 0 else 0.0
        y[t] = y[t - 1] + dx @ pi + GAMMA * z_lag + u
    return y


def write_fixture(stem: str, sigma: float) -> None:
    rng = np.random.default_rng(SEED)
    X = peer_log_curves(rng)
    y = target_log_series(X, sigma, rng)

    rows = ["country,date,cumulative"]
    for j, name in enumerate(PEER_NAMES):
        # peer j leads the target by enough days to cover any horizon
        start = TARGET_START - timedelta(days=PEER_LEN - TARGET_LEN + j - 5)
        for t in range(PEER_LEN):
            d = start + timedelta(days=t)
            rows.append(f"{name},{d.isoformat()},{round(math.exp(X[t, j]))}")
    for t in range(TARGET_LEN):
        d = TARGET_START + timedelta(days=t)
        rows.append(f"Target,{d.isoformat()},{round(math.exp(y[t]))}")
    (HERE / f"{stem}.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")

    params = {
        "seed": SEED,
        "target": "Target",
        "target_start": TARGET_START.isoformat(),
        "target_len": TARGET_LEN,
        "peer_len": PEER_LEN,
        "support": [PEER_NAMES[j] for j in SUPPORT],
        "beta": {PEER_NAMES[j]: b for j, b in zip(SUPPORT, BETA)},
        "pi": {PEER_NAMES[j]: v for j, v in zip(SUPPORT, PI)},
        "gamma": GAMMA,
        "sigma": sigma,
        "threshold": 100,
    }
    (HERE / f"{stem}_params.json").write_text(
        json.dumps(params, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def main() -> None:
    write_fixture("synthetic_ecm_long", SIGMA)
    write_fixture("synthetic_ecm_noiseless_long", 0.0)
    print("wrote synthetic fixtures")


if __name__ == "__main__":
    main()
