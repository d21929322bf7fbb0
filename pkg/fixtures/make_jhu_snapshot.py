#!/usr/bin/env python3
"""Regenerate the frozen JHU-format snapshot CSVs in this directory.

The two files mimic the upstream global time-series layout (header
``Province/State,Country/Region,Lat,Long`` followed by M/D/YY date
columns) with data from 2020-01-22 through 2020-04-15.  They are a
reconstruction, not an archive export: each country's cumulative curve
is rebuilt by geometric interpolation between anchor values taken from
widely reported milestones of early 2020, and Brazil's April values are
entered verbatim from contemporaneous public reporting.  See README.md
here for provenance notes.

Deterministic: no randomness, same bytes on every run.
"""

from __future__ import annotations

import csv
from datetime import date, timedelta
from pathlib import Path

FIRST_DATE = date(2020, 1, 22)
LAST_DATE = date(2020, 4, 15)
RAMP_DAYS = 12

HERE = Path(__file__).resolve().parent

LATLONG = {
    "Australia/New South Wales": (-33.8688, 151.2093),
    "Australia/Victoria": (-37.8136, 144.9631),
    "Austria": (47.5162, 14.5501),
    "Belgium": (50.8333, 4.469936),
    "Brazil": (-14.235, -51.9253),
    "Canada/Ontario": (51.2538, -85.3232),
    "Canada/Quebec": (52.9399, -73.5491),
    "Chile": (-35.6751, -71.543),
    "China": (30.5928, 114.3055),
    "Ecuador": (-1.8312, -78.1834),
    "France": (46.2276, 2.2137),
    "Germany": (51.1657, 10.4515),
    "Iran": (32.4279, 53.688),
    "Italy": (41.8719, 12.5674),
    "Japan": (36.2048, 138.2529),
    "Korea, South": (35.9078, 127.7669),
    "Netherlands": (52.1326, 5.2913),
    "Norway": (60.472, 8.4689),
    "Peru": (-9.19, -75.0152),
    "Portugal": (39.3999, -8.2245),
    "Singapore": (1.2833, 103.8333),
    "Spain": (40.4637, -3.7492),
    "Sweden": (60.1282, 18.6435),
    "Switzerland": (46.8182, 8.2275),
    "US": (40.0, -100.0),
    "United Kingdom": (55.3781, -3.436),
}

# countries whose count is split across two province rows, by share of
# the first row (second row gets the remainder)
PROVINCE_SPLIT = {
    "Australia": (("New South Wales", 0.6), ("Victoria",)),
    "Canada": (("Ontario", 0.55), ("Quebec",)),
}

# Brazil is entered day by day; April values are verbatim from
# contemporaneous reporting, earlier ones follow the reported run-up.
BRAZIL_CASES = {
    "2020-02-26": 1, "2020-02-27": 1, "2020-02-28": 1, "2020-02-29": 2,
    "2020-03-01": 2, "2020-03-02": 2, "2020-03-03": 2, "2020-03-04": 4,
    "2020-03-05": 4, "2020-03-06": 13, "2020-03-07": 13, "2020-03-08": 20,
    "2020-03-09": 25, "2020-03-10": 31, "2020-03-11": 38, "2020-03-12": 52,
    "2020-03-13": 98, "2020-03-14": 151, "2020-03-15": 162,
    "2020-03-16": 200, "2020-03-17": 321, "2020-03-18": 372,
    "2020-03-19": 621, "2020-03-20": 793, "2020-03-21": 1021,
    "2020-03-22": 1546, "2020-03-23": 1924, "2020-03-24": 2247,
    "2020-03-25": 2554, "2020-03-26": 2985, "2020-03-27": 3417,
    "2020-03-28": 3904, "2020-03-29": 4256, "2020-03-30": 4579,
    "2020-03-31": 5717, "2020-04-01": 6836, "2020-04-02": 8044,
    "2020-04-03": 9056, "2020-04-04": 10360, "2020-04-05": 11130,
    "2020-04-06": 12056, "2020-04-07": 13717, "2020-04-08": 15927,
    "2020-04-09": 17857, "2020-04-10": 19638, "2020-04-11": 20727,
    "2020-04-12": 22169, "2020-04-13": 23430, "2020-04-14": 25262,
    "2020-04-15": 28320,
}

BRAZIL_DEATHS = {
    "2020-03-17": 1, "2020-03-18": 3, "2020-03-19": 6, "2020-03-20": 11,
    "2020-03-21": 15, "2020-03-22": 25, "2020-03-23": 34, "2020-03-24": 46,
    "2020-03-25": 59, "2020-03-26": 77, "2020-03-27": 92, "2020-03-28": 111,
    "2020-03-29": 136, "2020-03-30": 159, "2020-03-31": 201,
    "2020-04-01": 240, "2020-04-02": 324, "2020-04-03": 359,
    "2020-04-04": 445, "2020-04-05": 486, "2020-04-06": 553,
    "2020-04-07": 667, "2020-04-08": 800, "2020-04-09": 941,
    "2020-04-10": 1056, "2020-04-11": 1124, "2020-04-12": 1223,
    "2020-04-13": 1328, "2020-04-14": 1532, "2020-04-15": 1736,
}

CASES_ANCHORS = {
    "Australia": [
        ("2020-03-10", 107), ("2020-03-15", 297), ("2020-03-20", 791),
        ("2020-03-25", 2364), ("2020-03-30", 4361), ("2020-04-04", 5550),
        ("2020-04-09", 6152), ("2020-04-15", 6440),
    ],
    "Austria": [
        ("2020-03-08", 104), ("2020-03-13", 504), ("2020-03-18", 1646),
        ("2020-03-23", 4474), ("2020-03-28", 7697), ("2020-04-02", 11129),
        ("2020-04-08", 12942), ("2020-04-15", 14336),
    ],
    "Belgium": [
        ("2020-03-06", 109), ("2020-03-11", 314), ("2020-03-16", 1058),
        ("2020-03-21", 2815), ("2020-03-26", 6235), ("2020-03-31", 12775),
        ("2020-04-05", 19691), ("2020-04-10", 26667), ("2020-04-15", 33573),
    ],
    "Canada": [
        ("2020-03-11", 103), ("2020-03-16", 415), ("2020-03-21", 1278),
        ("2020-03-26", 4042), ("2020-03-31", 8527), ("2020-04-05", 15756),
        ("2020-04-10", 22148), ("2020-04-15", 27063),
    ],
    "Chile": [
        ("2020-03-16", 155), ("2020-03-22", 632), ("2020-03-28", 1909),
        ("2020-04-03", 3737), ("2020-04-09", 5972), ("2020-04-15", 8273),
    ],
    "China": [
        ("2020-01-22", 548), ("2020-01-28", 5509), ("2020-02-03", 20440),
        ("2020-02-09", 40171), ("2020-02-15", 68413), ("2020-02-21", 75567),
        ("2020-03-01", 79932), ("2020-03-10", 80757), ("2020-03-20", 81250),
        ("2020-04-01", 82361), ("2020-04-15", 83356),
    ],
    "Ecuador": [
        ("2020-03-14", 111), ("2020-03-20", 426), ("2020-03-26", 1403),
        ("2020-04-01", 2748), ("2020-04-08", 4450), ("2020-04-15", 7858),
    ],
    "France": [
        ("2020-02-29", 100), ("2020-03-05", 377), ("2020-03-10", 1784),
        ("2020-03-15", 4523), ("2020-03-20", 12726), ("2020-03-25", 25600),
        ("2020-03-30", 45170), ("2020-04-04", 68605), ("2020-04-09", 86334),
        ("2020-04-15", 103573),
    ],
    "Germany": [
        ("2020-03-01", 130), ("2020-03-06", 670), ("2020-03-11", 1908),
        ("2020-03-16", 7272), ("2020-03-21", 22213), ("2020-03-26", 43938),
        ("2020-03-31", 71808), ("2020-04-05", 100123),
        ("2020-04-10", 122171), ("2020-04-15", 134753),
    ],
    "Iran": [
        ("2020-02-26", 139), ("2020-03-01", 978), ("2020-03-05", 3513),
        ("2020-03-09", 7161), ("2020-03-13", 11364), ("2020-03-17", 16169),
        ("2020-03-21", 20610), ("2020-03-25", 27017), ("2020-03-29", 38309),
        ("2020-04-02", 50468), ("2020-04-06", 60500), ("2020-04-10", 68192),
        ("2020-04-15", 76389),
    ],
    "Italy": [
        ("2020-02-23", 155), ("2020-02-29", 1128), ("2020-03-04", 3089),
        ("2020-03-08", 7375), ("2020-03-12", 15113), ("2020-03-16", 27980),
        ("2020-03-20", 47021), ("2020-03-24", 69176), ("2020-03-28", 92472),
        ("2020-04-01", 110574), ("2020-04-05", 128948),
        ("2020-04-09", 143626), ("2020-04-12", 156363),
        ("2020-04-15", 165155),
    ],
    "Japan": [
        ("2020-02-21", 105), ("2020-02-29", 241), ("2020-03-07", 461),
        ("2020-03-14", 780), ("2020-03-21", 1086), ("2020-03-28", 1693),
        ("2020-04-03", 2617), ("2020-04-08", 4257), ("2020-04-12", 6748),
        ("2020-04-15", 8100),
    ],
    "Korea, South": [
        ("2020-02-20", 104), ("2020-02-24", 833), ("2020-02-28", 2337),
        ("2020-03-03", 5186), ("2020-03-07", 7041), ("2020-03-11", 7755),
        ("2020-03-15", 8162), ("2020-03-20", 8652), ("2020-03-25", 9137),
        ("2020-03-31", 9786), ("2020-04-07", 10331), ("2020-04-15", 10591),
    ],
    "Netherlands": [
        ("2020-03-06", 128), ("2020-03-11", 503), ("2020-03-16", 1413),
        ("2020-03-21", 3631), ("2020-03-26", 7431), ("2020-03-31", 12595),
        ("2020-04-05", 17851), ("2020-04-10", 23097), ("2020-04-15", 28153),
    ],
    "Norway": [
        ("2020-03-06", 108), ("2020-03-11", 629), ("2020-03-16", 1333),
        ("2020-03-21", 2118), ("2020-03-26", 3084), ("2020-03-31", 4641),
        ("2020-04-06", 5865), ("2020-04-15", 6791),
    ],
    "Peru": [
        ("2020-03-17", 117), ("2020-03-23", 395), ("2020-03-29", 852),
        ("2020-04-04", 1746), ("2020-04-10", 5897), ("2020-04-15", 11475),
    ],
    "Portugal": [
        ("2020-03-13", 112), ("2020-03-18", 642), ("2020-03-23", 2060),
        ("2020-03-28", 5170), ("2020-04-02", 9034), ("2020-04-08", 13141),
        ("2020-04-15", 18091),
    ],
    "Singapore": [
        ("2020-02-29", 102), ("2020-03-07", 138), ("2020-03-14", 212),
        ("2020-03-21", 432), ("2020-03-28", 802), ("2020-04-03", 1114),
        ("2020-04-08", 1910), ("2020-04-12", 2532), ("2020-04-15", 3699),
    ],
    "Spain": [
        ("2020-03-02", 120), ("2020-03-07", 500), ("2020-03-12", 2277),
        ("2020-03-17", 11748), ("2020-03-22", 28768), ("2020-03-27", 65719),
        ("2020-04-01", 104118), ("2020-04-06", 136675),
        ("2020-04-10", 157022), ("2020-04-15", 177644),
    ],
    "Sweden": [
        ("2020-03-06", 101), ("2020-03-11", 500), ("2020-03-16", 1103),
        ("2020-03-21", 1763), ("2020-03-26", 2526), ("2020-03-31", 4435),
        ("2020-04-06", 7206), ("2020-04-15", 11927),
    ],
    "Switzerland": [
        ("2020-03-04", 114), ("2020-03-09", 374), ("2020-03-14", 1359),
        ("2020-03-19", 4075), ("2020-03-24", 9877), ("2020-03-29", 14829),
        ("2020-04-03", 19606), ("2020-04-08", 23280), ("2020-04-15", 26336),
    ],
    "US": [
        ("2020-03-02", 100), ("2020-03-07", 417), ("2020-03-12", 1663),
        ("2020-03-17", 6421), ("2020-03-22", 33276), ("2020-03-27", 101657),
        ("2020-04-01", 213372), ("2020-04-06", 366667),
        ("2020-04-10", 496535), ("2020-04-15", 636350),
    ],
    "United Kingdom": [
        ("2020-03-05", 115), ("2020-03-10", 382), ("2020-03-15", 1140),
        ("2020-03-20", 3983), ("2020-03-25", 9529), ("2020-03-30", 22141),
        ("2020-04-04", 41903), ("2020-04-09", 65077), ("2020-04-15", 98476),
    ],
}

DEATHS_ANCHORS = {
    "Australia": [("2020-03-24", 10), ("2020-04-15", 63)],
    "Austria": [
        ("2020-03-20", 16), ("2020-03-26", 49), ("2020-04-01", 146),
        ("2020-04-07", 273), ("2020-04-15", 410),
    ],
    "Belgium": [
        ("2020-03-16", 10), ("2020-03-22", 75), ("2020-03-28", 353),
        ("2020-04-03", 1143), ("2020-04-09", 2523), ("2020-04-15", 4440),
    ],
    "Canada": [
        ("2020-03-17", 12), ("2020-03-25", 55), ("2020-04-01", 220),
        ("2020-04-08", 898), ("2020-04-15", 1195),
    ],
    "Chile": [("2020-03-28", 10), ("2020-04-15", 94)],
    "China": [
        ("2020-01-22", 17), ("2020-01-31", 259), ("2020-02-09", 812),
        ("2020-02-17", 1868), ("2020-02-25", 2715), ("2020-03-04", 2984),
        ("2020-03-15", 3213), ("2020-03-31", 3309), ("2020-04-15", 3346),
    ],
    "Ecuador": [
        ("2020-03-24", 12), ("2020-04-01", 93), ("2020-04-08", 242),
        ("2020-04-15", 403),
    ],
    "France": [
        ("2020-03-07", 11), ("2020-03-13", 79), ("2020-03-19", 372),
        ("2020-03-25", 1331), ("2020-03-31", 3523), ("2020-04-06", 8911),
        ("2020-04-10", 13197), ("2020-04-15", 17167),
    ],
    "Germany": [
        ("2020-03-15", 11), ("2020-03-21", 84), ("2020-03-27", 351),
        ("2020-04-02", 1107), ("2020-04-08", 2349), ("2020-04-15", 3804),
    ],
    "Iran": [
        ("2020-02-24", 12), ("2020-03-02", 66), ("2020-03-08", 194),
        ("2020-03-14", 611), ("2020-03-20", 1433), ("2020-03-28", 2517),
        ("2020-04-05", 3603), ("2020-04-15", 4777),
    ],
    "Italy": [
        ("2020-02-26", 12), ("2020-03-04", 107), ("2020-03-10", 631),
        ("2020-03-16", 2158), ("2020-03-22", 5476), ("2020-03-28", 10023),
        ("2020-04-03", 14681), ("2020-04-09", 18279), ("2020-04-15", 21645),
    ],
    "Japan": [
        ("2020-03-09", 10), ("2020-03-17", 28), ("2020-03-25", 45),
        ("2020-04-02", 60), ("2020-04-09", 94), ("2020-04-15", 190),
    ],
    "Korea, South": [
        ("2020-02-26", 12), ("2020-03-05", 35), ("2020-03-12", 66),
        ("2020-03-20", 102), ("2020-03-28", 144), ("2020-04-05", 183),
        ("2020-04-15", 225),
    ],
    "Netherlands": [
        ("2020-03-13", 12), ("2020-03-19", 76), ("2020-03-25", 276),
        ("2020-03-31", 1039), ("2020-04-06", 1867), ("2020-04-15", 3145),
    ],
    "Norway": [("2020-03-23", 10), ("2020-04-15", 139)],
    "Peru": [("2020-03-28", 11), ("2020-04-08", 121), ("2020-04-15", 254)],
    "Portugal": [("2020-03-21", 12), ("2020-04-15", 599)],
    "Singapore": [("2020-04-12", 10), ("2020-04-15", 10)],
    "Spain": [
        ("2020-03-08", 17), ("2020-03-14", 195), ("2020-03-20", 1043),
        ("2020-03-26", 4365), ("2020-04-01", 9387), ("2020-04-07", 14045),
        ("2020-04-15", 18812),
    ],
    "Sweden": [
        ("2020-03-15", 11), ("2020-03-21", 20), ("2020-03-27", 105),
        ("2020-04-02", 282), ("2020-04-08", 687), ("2020-04-15", 1203),
    ],
    "Switzerland": [
        ("2020-03-13", 11), ("2020-03-19", 48), ("2020-03-25", 153),
        ("2020-03-31", 433), ("2020-04-06", 765), ("2020-04-15", 1239),
    ],
    "US": [
        ("2020-03-04", 11), ("2020-03-11", 38), ("2020-03-18", 118),
        ("2020-03-25", 942), ("2020-04-01", 4757), ("2020-04-08", 14695),
        ("2020-04-15", 28326),
    ],
    "United Kingdom": [
        ("2020-03-14", 21), ("2020-03-20", 177), ("2020-03-26", 578),
        ("2020-04-01", 2352), ("2020-04-07", 7097), ("2020-04-15", 12894),
    ],
}


def date_range(first: date, last: date) -> list[date]:
    out = []
    d = first
    while d <= last:
        out.append(d)
        d += timedelta(days=1)
    return out


def geometric_fill(anchors: list[tuple[str, int]], threshold_cap: int) -> dict[date, int]:
    """Daily cumulative series from anchors.

    Between anchors the count grows at a constant daily ratio.  Before
    the first anchor a short ramp rises from 1 to below both half the
    first anchor and the alignment threshold, so the first anchor date
    is the first date at or above it.  Zero before the ramp.
    """
    points = [(date.fromisoformat(d), c) for d, c in anchors]
    series: dict[date, int] = {}
    for (d0, c0), (d1, c1) in zip(points, points[1:]):
        span = (d1 - d0).days
        for k in range(span + 1):
            series[d0 + timedelta(days=k)] = round(c0 * (c1 / c0) ** (k / span))
    first_anchor, c0 = points[0]
    ramp_top = min(c0 // 2, threshold_cap - 1)
    if ramp_top >= 1 and first_anchor > FIRST_DATE:
        ramp_days = min(RAMP_DAYS, (first_anchor - FIRST_DATE).days)
        for k in range(ramp_days):
            d = first_anchor - timedelta(days=ramp_days - k)
            series[d] = max(1, round(1 * (ramp_top / 1) ** (k / max(ramp_days - 1, 1))))
    # monotone guard against rounding dips
    prev = 0
    for d in date_range(FIRST_DATE, LAST_DATE):
        if d in series:
            prev = max(prev, series[d])
        series[d] = prev
    return series


def explicit_fill(table: dict[str, int]) -> dict[date, int]:
    series = {date.fromisoformat(d): c for d, c in table.items()}
    prev = 0
    out = {}
    for d in date_range(FIRST_DATE, LAST_DATE):
        if d in series:
            prev = series[d]
        out[d] = prev
    return out


def build_rows(anchor_map: dict, brazil: dict[str, int],
               threshold_cap: int) -> list[list]:
    dates = date_range(FIRST_DATE, LAST_DATE)
    per_country = {name: geometric_fill(a, threshold_cap)
                   for name, a in anchor_map.items()}
    per_country["Brazil"] = explicit_fill(brazil)

    rows = []
    for name in sorted(per_country):
        series = per_country[name]
        counts = [series[d] for d in dates]
        if name in PROVINCE_SPLIT:
            (prov1, share), (prov2,) = PROVINCE_SPLIT[name]
            first = [int(c * share) for c in counts]
            second = [c - f for c, f in zip(counts, first)]
            for prov, vals in ((prov1, first), (prov2, second)):
                lat, lon = LATLONG[f"{name}/{prov}"]
                rows.append([prov, name, lat, lon] + vals)
        else:
            lat, lon = LATLONG[name]
            rows.append(["", name, lat, lon] + counts)
    return rows


def write_csv(path: Path, rows: list[list]) -> None:
    dates = date_range(FIRST_DATE, LAST_DATE)
    header = ["Province/State", "Country/Region", "Lat", "Long"] + [
        f"{d.month}/{d.day}/{str(d.year)[2:]}" for d in dates
    ]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def main() -> None:
    write_csv(HERE / "jhu_confirmed_snapshot_20200415.csv",
              build_rows(CASES_ANCHORS, BRAZIL_CASES, threshold_cap=100))
    write_csv(HERE / "jhu_deaths_snapshot_20200415.csv",
              build_rows(DEATHS_ANCHORS, BRAZIL_DEATHS, threshold_cap=10))
    print("wrote confirmed and deaths snapshots")


if __name__ == "__main__":
    main()
