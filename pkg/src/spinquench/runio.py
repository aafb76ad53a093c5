"""File formats for run outputs: 17-significant-digit CSV, JSON sidecars,
flat key=value config files, content hashing, and the eigendata cache."""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile

import numpy as np


def fmt(x) -> str:
    """Decimal with 17 significant digits: round-trip exact for doubles."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = [[float(v) for v in line.strip().split(",")]
                for line in fh if line.strip()]
    return header, np.array(data)


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.ndarray):
        return _json_safe(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(path, payload: dict):
    with open(path, "w") as fh:
        json.dump(_json_safe(payload), fh, indent=2)
        fh.write("\n")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def distribution_payload(dist, plan, coverage) -> dict:
    return {
        "moments": {
            "mean": dist.mean,
            "variance": dist.variance,
            "skewness": dist.skewness,
            "min": dist.minimum,
            "max": dist.maximum,
            "signal_to_noise": dist.signal_to_noise,
            "n_samples": dist.n_samples,
        },
        "plan": plan.to_dict(),
        "coverage": coverage,
    }


def write_distribution(out_dir, name, dist, plan, coverage) -> list:
    """CSV histogram plus JSON sidecar; returns the filenames written."""
    csv_name = f"{name}.csv"
    rows = zip(dist.bin_edges[:-1], dist.bin_edges[1:], dist.densities)
    write_csv(os.path.join(out_dir, csv_name), ["bin_left", "bin_right", "density"], rows)
    json_name = f"{name}.json"
    write_json(os.path.join(out_dir, json_name),
               distribution_payload(dist, plan, coverage))
    return [csv_name, json_name]


def parse_config_file(path) -> dict:
    """Flat ``key = value`` lines; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def atomic_save_npz(path, **arrays):
    """Write-then-rename so concurrent readers never see torn files."""
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".npz")
    try:
        with os.fdopen(fd, "wb") as fh:
            np.savez(fh, **arrays)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class EigenCache:
    """Optional on-disk store of solved eigendata, keyed by problem hash."""

    def __init__(self, directory):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    def key(self, n_sites, n_up, j1, j2, h_s, offset, solver, k) -> str:
        blob = f"{n_sites}|{n_up}|{fmt(j1)}|{fmt(j2)}|{fmt(h_s)}|{offset}|{solver}|{k}"
        return hashlib.sha256(blob.encode()).hexdigest()[:24]

    def path(self, key) -> str:
        return os.path.join(self.directory, f"eigen_{key}.npz")

    def load(self, key):
        from .spectral import EigenData, group_degeneracies
        path = self.path(key)
        if not os.path.exists(path):
            return None
        with np.load(path) as data:
            energies = data["energies"]
            vectors = data["vectors"]
            method = str(data["method"])
        return EigenData(energies, vectors, method, group_degeneracies(energies))

    def store(self, key, eigen):
        atomic_save_npz(self.path(key), energies=eigen.energies,
                        vectors=eigen.vectors, method=np.str_(eigen.method_tag))
