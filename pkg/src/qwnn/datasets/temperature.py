"""Daily station temperatures as a node-regression problem.

Two CSV files with headers::

    stations.csv       station_id,lon,lat
    observations.csv   date,station_id,tmax

Days missing any station are dropped.  A sample pairs a day with the next
calendar day, so gaps left by dropped days never produce a pair.
"""

from __future__ import annotations

import csv
import datetime as dt
import logging
import os
from dataclasses import dataclass

import numpy as np

from ..exceptions import DataError
from ..graph import Graph
from ..samples import GraphSample

logger = logging.getLogger(__name__)


@dataclass
class TemperatureData:
    station_ids: list
    coords: np.ndarray  # (n, 2) lon/lat degrees
    dates: list
    tmax: np.ndarray  # (days, n)

    def samples(self, graph: Graph) -> list[GraphSample]:
        """(today, tomorrow) pairs over consecutive calendar days, in date order."""
        if graph.n_nodes != len(self.station_ids):
            raise DataError(f"graph has {graph.n_nodes} nodes for {len(self.station_ids)} stations")
        out = []
        for t in range(len(self.dates) - 1):
            if self.dates[t + 1] - self.dates[t] == dt.timedelta(days=1):
                out.append(GraphSample(graph, self.tmax[t][:, None], self.tmax[t + 1][:, None]))
        return out


def _open_csv(path, required):
    try:
        fh = open(path, newline="")
    except FileNotFoundError as exc:
        raise DataError(f"missing file: {path}") from exc
    reader = csv.DictReader(fh, skipinitialspace=True)
    missing = set(required) - set(reader.fieldnames or ())
    if missing:
        fh.close()
        raise DataError(f"{path}: missing columns {sorted(missing)}")
    return fh, reader


def load_temperature(stations_path, observations_path) -> TemperatureData:
    fh, reader = _open_csv(stations_path, ("station_id", "lon", "lat"))
    with fh:
        rows = list(reader)
    ids = [r["station_id"].strip() for r in rows]
    if len(set(ids)) != len(ids):
        raise DataError(f"{stations_path}: duplicate station ids")
    try:
        coords = np.array([[float(r["lon"]), float(r["lat"])] for r in rows])
    except ValueError as exc:
        raise DataError(f"{stations_path}: bad coordinate: {exc}") from exc
    col = {s: i for i, s in enumerate(ids)}

    days: dict[dt.date, np.ndarray] = {}
    fh, reader = _open_csv(observations_path, ("date", "station_id", "tmax"))
    with fh:
        for lineno, r in enumerate(reader, 2):
            sid = r["station_id"].strip()
            if sid not in col:
                raise DataError(f"{observations_path}:{lineno}: unknown station {sid!r}")
            try:
                day = dt.date.fromisoformat(r["date"].strip())
                value = float(r["tmax"]) if r["tmax"].strip() else np.nan
            except ValueError as exc:
                raise DataError(f"{observations_path}:{lineno}: {exc}") from exc
            days.setdefault(day, np.full(len(ids), np.nan))[col[sid]] = value

    dates = sorted(days)
    complete = [d for d in dates if np.all(np.isfinite(days[d]))]
    if len(complete) < len(dates):
        logger.info("dropped %d incomplete days", len(dates) - len(complete))
    tmax = np.array([days[d] for d in complete]).reshape(len(complete), len(ids))
    return TemperatureData(ids, coords.reshape(len(ids), 2), complete, tmax)


def write_temperature(data: TemperatureData, stations_path, observations_path) -> None:
    with open(stations_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["station_id", "lon", "lat"])
        for sid, (lon, lat) in zip(data.station_ids, data.coords):
            w.writerow([sid, repr(float(lon)), repr(float(lat))])
    with open(observations_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["date", "station_id", "tmax"])
        for day, row in zip(data.dates, data.tmax):
            for sid, v in zip(data.station_ids, row):
                w.writerow([day.isoformat(), sid, repr(float(v))])


def _parse_dly(path, element="TMAX"):
    """Yield ``(station, date, value_celsius)`` from a GHCN-Daily ``.dly`` file."""
    with open(path) as fh:
        for line in fh:
            if line[17:21] != element:
                continue
            sid, year, month = line[0:11], int(line[11:15]), int(line[15:17])
            for day in range(31):
                base = 21 + 8 * day
                raw, qflag = line[base : base + 5], line[base + 6 : base + 7]
                if not raw.strip() or int(raw) == -9999 or qflag.strip():
                    continue
                try:
                    date = dt.date(year, month, day + 1)
                except ValueError:
                    continue
                yield sid, date, int(raw) / 10.0


def import_ghcn(dly_dir, stations_txt, out_dir, start=None, end=None) -> TemperatureData:
    """Convert GHCN-Daily station files into the two-CSV format.

    ``stations_txt`` is the fixed-width station inventory; every ``*.dly``
    file in ``dly_dir`` becomes a station.  ``start``/``end`` are ISO dates.
    """
    inventory = {}
    with open(stations_txt) as fh:
        for line in fh:
            inventory[line[0:11]] = (float(line[21:30]), float(line[12:20]))
    start = dt.date.fromisoformat(start) if start else dt.date.min
    end = dt.date.fromisoformat(end) if end else dt.date.max

    files = sorted(f for f in os.listdir(dly_dir) if f.endswith(".dly"))
    if not files:
        raise DataError(f"no .dly files in {dly_dir}")
    ids = [f[:-4] for f in files]
    unknown = [s for s in ids if s not in inventory]
    if unknown:
        raise DataError(f"stations missing from inventory: {unknown[:5]}")
    col = {s: i for i, s in enumerate(ids)}
    days: dict[dt.date, np.ndarray] = {}
    for f in files:
        for sid, date, value in _parse_dly(os.path.join(dly_dir, f)):
            if start <= date <= end and sid in col:
                days.setdefault(date, np.full(len(ids), np.nan))[col[sid]] = value
    complete = [d for d in sorted(days) if np.all(np.isfinite(days[d]))]
    data = TemperatureData(
        ids,
        np.array([inventory[s] for s in ids]),
        complete,
        np.array([days[d] for d in complete]).reshape(len(complete), len(ids)),
    )
    os.makedirs(out_dir, exist_ok=True)
    write_temperature(data, os.path.join(out_dir, "stations.csv"), os.path.join(out_dir, "observations.csv"))
    return data
