"""CSV and manifest output.

CSV files follow RFC 4180: CRLF line endings, '.' decimal point, header
row, no locale formatting.  Floats are written with repr (shortest exact
round trip), so equal arrays give byte-identical files.
"""

import csv
import hashlib
import json
import time

import numpy as np

from .errors import ConfigError


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(path, columns):
    """Write an ordered mapping name -> 1-d array as an RFC 4180 CSV."""
    names = list(columns.keys())
    arrays = [np.atleast_1d(np.asarray(columns[n])) for n in names]
    lengths = {a.shape[0] for a in arrays}
    if len(lengths) != 1:
        raise ConfigError("CSV columns must share one length", field="columns")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(names)
        for row in zip(*arrays):
            w.writerow([_cell(v) for v in row])


def read_csv(path):
    """Read a CSV written by write_csv: dict of float arrays by column."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        cols = {name: [] for name in header}
        for row in r:
            for name, v in zip(header, row):
                cols[name].append(v)
    out = {}
    for name, vals in cols.items():
        try:
            out[name] = np.array([float(v) for v in vals])
        except ValueError:
            out[name] = np.array(vals)
    return out


def config_digest(config):
    """Stable hash of a JSON-serializable configuration."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def write_manifest(path, command, config, seed, outputs, extra=None):
    """Run metadata: what ran, with which config and seed, producing what.

    The timestamp lives only here; data files stay byte-identical across
    reruns with the same config and seed.
    """
    doc = {
        "command": command,
        "config": config,
        "config_sha256": config_digest(config),
        "seed": int(seed),
        "outputs": sorted(outputs),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return doc
