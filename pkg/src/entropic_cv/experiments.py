"""Batch drivers behind the command-line tools, and their file formats.

Single-state runs are written as one JSON document (a :class:`RunRecord`);
scans and surfaces are comma-separated tables followed by a ``#``-prefixed
metadata block.  Every float is written with ``repr`` so it re-parses to
the identical value.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .criteria import (CRITERIA, MeasurementSettings, scan_settings, simon_ppt_test,
                       strong_entropic_test, mgvt_test, weak_entropic_test)
from .errors import InvalidInputError, UnsupportedStateError
from .fock import random_haar_state
from .states import (Ensemble, cat_ensemble, coherent_product, eta_state, noon_state, phi_state,
                     two_mode_squeezed, vacuum)

RECORD_FORMAT = "entropic-cv/run-record/1"
TABLE_FORMAT = "entropic-cv/table/1"
JOBS_ENV = "ENTROPIC_CV_JOBS"

# Table I of the reference study: per-mode dimension -> number of states
PAPER_TABLE_ROWS = ((2, 6000), (3, 1600), (4, 800), (5, 720), (7, 120))


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


# -- state specs ---------------------------------------------------------------

_STATE_PARAMS = {
    "vacuum": {},
    "phi": {},
    "noon": {"N": int},
    "eta": {"sp": float, "sm": float},
    "cat": {"alpha": float, "p": float, "parity": int},
    "tmsv": {"r": float},
    "coherent": {"a1": float, "a2": float},
    "random": {"D": int, "seed": int, "index": int},
}


def parse_state_spec(spec: str) -> tuple[str, dict]:
    """Split ``name:key=value,...`` into a name and typed parameters."""
    name, _, rest = spec.strip().partition(":")
    name = name.strip().lower()
    if name not in _STATE_PARAMS:
        raise InvalidInputError(f"unknown state {name!r}; expected one of {sorted(_STATE_PARAMS)}")
    types = _STATE_PARAMS[name]
    params = {}
    if rest.strip():
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            key = key.strip()
            if not eq or key not in types:
                raise InvalidInputError(f"bad parameter {item!r} for state {name!r}")
            try:
                params[key] = types[key](value.strip())
            except ValueError:
                raise InvalidInputError(f"cannot parse {value!r} for {name}:{key}") from None
    return name, params


def build_state(name: str, params: dict):
    p = dict(params)
    try:
        if name == "vacuum":
            return vacuum()
        if name == "phi":
            return phi_state()
        if name == "noon":
            return noon_state(p["N"])
        if name == "eta":
            return eta_state(p.get("sp", 1.0), p["sm"])
        if name == "cat":
            return cat_ensemble(p["alpha"], p["p"], parity=p.get("parity", 1))
        if name == "tmsv":
            return two_mode_squeezed(p["r"])
        if name == "coherent":
            return coherent_product(p.get("a1", 0.0), p.get("a2", 0.0))
        if name == "random":
            return random_haar_state(p["D"], p.get("seed", 0), p.get("index", 0))
    except KeyError as exc:
        raise InvalidInputError(f"state {name!r} needs parameter {exc.args[0]!r}") from None
    raise InvalidInputError(f"unknown state {name!r}")


# -- single-state record ---------------------------------------------------------

@dataclass
class RunRecord:
    state: dict
    settings: dict
    reports: list
    seed: Optional[int] = None
    wall_time: float = 0.0
    version: str = __version__
    grid: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)
    format: str = RECORD_FORMAT

    @property
    def entangled(self) -> bool:
        return any(r["violated"] for r in self.reports)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        data = json.loads(text)
        if data.get("format") != RECORD_FORMAT:
            raise InvalidInputError(f"unsupported record format {data.get('format')!r}")
        return cls(**data)

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json() + "\n")

    @classmethod
    def load(cls, path: str) -> "RunRecord":
        with open(path) as fh:
            return cls.from_json(fh.read())


def run_state_test(spec: str, criteria: Iterable[str] = CRITERIA, theta_step: float = math.pi / 4,
                   a_values: Sequence[float] = (1.0,), points: Optional[int] = None,
                   span: Optional[float] = None) -> RunRecord:
    """Scan one state and return the record with the best report per criterion.

    The strong test is skipped for mixtures (it only holds for pure states);
    asking for it alone on a mixture raises UnsupportedStateError.
    """
    name, params = parse_state_spec(spec)
    state = build_state(name, params)
    criteria = [c for c in CRITERIA if c in set(criteria)]
    skipped = []
    if "strong" in criteria and isinstance(state, Ensemble) and len(state.members) > 1:
        if criteria == ["strong"]:
            raise UnsupportedStateError("the strong entropic bound only holds for pure states")
        criteria.remove("strong")
        skipped.append("strong")
    start = time.perf_counter()
    result = scan_settings(state, criteria, theta_step=theta_step, a_values=a_values,
                           points=points, span=span)
    elapsed = time.perf_counter() - start
    reports = [result.best[c].as_dict() for c in CRITERIA if c in result.best]
    errors = [{"criterion": c, "settings": None if s is None else s.as_dict(), "message": m}
              for c, s, m in result.errors]
    return RunRecord(
        state={"name": name, "params": params},
        settings={"criteria": criteria, "skipped": skipped,
                  "theta_step": theta_step, "a_values": [float(a) for a in a_values]},
        reports=reports, seed=params.get("seed"), wall_time=elapsed,
        grid={"points": points, "span": span}, errors=errors)


# -- tables ----------------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(path: str, columns: Sequence[str], rows: Iterable[dict], metadata: dict) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    meta = {"format": TABLE_FORMAT, "version": __version__, **metadata}
    for key, value in meta.items():
        buf.write(f"# {key}: {json.dumps(value)}\n")
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def _parse_cell(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


def read_table(path: str) -> tuple[list, dict]:
    """Load a table written by :func:`write_table` as (rows, metadata)."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    body = [ln for ln in lines if not ln.startswith("#")]
    metadata = {}
    for ln in lines:
        if ln.startswith("# "):
            key, _, value = ln[2:].partition(": ")
            metadata[key] = json.loads(value)
    reader = csv.reader(body)
    header = next(reader)
    rows = [{k: _parse_cell(v) for k, v in zip(header, r)} for r in reader]
    return rows, metadata


# -- eta scan --------------------------------------------------------------------

ETA_COLUMNS = ("ratio", "entropy_sum_plus", "entropy_sum_minus", "strong_rhs_plus",
               "strong_rhs_minus", "mgvt_plus", "mgvt_minus", "simon_nu", "weak", "strong",
               "mgvt", "simon", "refinement_delta")


def eta_row(ratio: float, points: Optional[int] = None) -> dict:
    """All four tests for the eta state with sigma_+ = 1, sigma_- = ratio at theta = 0.

    "plus" is the (R+, S-) pairing and "minus" the (R-, S+) pairing.
    """
    state = eta_state(1.0, ratio)
    row = {"ratio": float(ratio)}
    flags = {"weak": False, "strong": False, "mgvt": False}
    deltas = [0.0]
    for sign, tag in ((1, "plus"), (-1, "minus")):
        s = MeasurementSettings(sign=sign)
        w = weak_entropic_test(state, s, points=points)
        st = strong_entropic_test(state, s, points=points)
        m = mgvt_test(state, s, points=points)
        row[f"entropy_sum_{tag}"] = w.lhs
        row[f"strong_rhs_{tag}"] = st.rhs
        row[f"mgvt_{tag}"] = m.lhs
        for key, rep in (("weak", w), ("strong", st), ("mgvt", m)):
            flags[key] |= rep.violated
            if rep.violated:
                deltas.append(rep.refinement_delta)
    simon = simon_ppt_test(state, points=points)
    row["simon_nu"] = simon.lhs
    row.update(flags)
    row["simon"] = simon.violated
    row["refinement_delta"] = max(deltas)
    return row


def eta_scan(ratios: Sequence[float], points: Optional[int] = None, jobs: int = 1) -> list:
    return _map(eta_row, [(float(r), points) for r in ratios], jobs)


# -- random-state table ------------------------------------------------------------

TABLE_COLUMNS = ("D", "states", "n_strong", "n_weak", "n_mgvt", "count_strong", "count_weak",
                 "count_mgvt", "max_refinement_delta")


def random_state_flags(dim: int, seed: int, index: int, theta_step: float,
                       points: Optional[int]) -> tuple[bool, bool, bool, float]:
    """Detection flags (strong, weak, mgvt) for one Haar-random state.

    ``dim`` is the number of Fock levels per mode, so the state lives on
    n, m = 0 .. dim - 1.  The last entry is the largest refinement delta
    among the certified violations (0 when nothing was detected).
    """
    state = random_haar_state(dim - 1, seed, index)
    result = scan_settings(state, ("strong", "weak", "mgvt"), theta_step=theta_step,
                           points=points)
    deltas = [r.refinement_delta for r in result.grid if r.violated]
    return (*(result.violated(c) for c in ("strong", "weak", "mgvt")), max(deltas, default=0.0))


def _call(args):
    fn, a = args
    return fn(*a)


def _map(fn, arg_list: list, jobs: int) -> list:
    if jobs <= 1 or len(arg_list) < 2:
        return [fn(*a) for a in arg_list]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves input order, so output does not depend on scheduling
        return list(pool.map(_call, [(fn, a) for a in arg_list], chunksize=8))


def random_table(rows: Sequence[tuple[int, int]] = PAPER_TABLE_ROWS, seed: int = 2009,
                 theta_step: float = math.pi / 4, points: Optional[int] = 256,
                 jobs: int = 1) -> list:
    """Percentages of random states detected by each criterion, per dimension."""
    out = []
    for dim, count in rows:
        if count < 1 or dim < 2:
            raise InvalidInputError("each row needs D >= 2 and at least one state")
        flags = _map(random_state_flags,
                     [(dim, seed, i, theta_step, points) for i in range(count)], jobs)
        counts = np.sum(np.array([f[:3] for f in flags], dtype=int), axis=0)
        out.append({"D": dim, "states": count,
                    "n_strong": 100.0 * counts[0] / count, "n_weak": 100.0 * counts[1] / count,
                    "n_mgvt": 100.0 * counts[2] / count, "count_strong": int(counts[0]),
                    "count_weak": int(counts[1]), "count_mgvt": int(counts[2]),
                    "max_refinement_delta": max(f[3] for f in flags)})
    return out


# -- cat surface -------------------------------------------------------------------

CAT_COLUMNS = ("alpha", "p", "lhs", "rhs", "lhs_minus_rhs", "detected", "refinement_delta")


def cat_point(alpha: float, p: float, points: Optional[int] = None, parity: int = 1) -> dict:
    """Weak test with the (R-, S+) pairing at theta1 = theta2 = 0."""
    state = cat_ensemble(alpha, p, parity=parity)
    rep = weak_entropic_test(state, MeasurementSettings(sign=-1), points=points)
    return {"alpha": float(alpha), "p": float(p), "lhs": rep.lhs, "rhs": rep.rhs,
            "lhs_minus_rhs": rep.lhs - rep.rhs, "detected": rep.violated,
            "refinement_delta": rep.refinement_delta}


def cat_surface(alphas: Sequence[float], ps: Sequence[float], points: Optional[int] = None,
                parity: int = 1, jobs: int = 1) -> list:
    if any(not 0.0 <= p <= 1.0 for p in ps):
        raise InvalidInputError("p values must lie in [0, 1]")
    args = [(float(a), float(p), points, parity) for a in alphas for p in ps]
    return _map(cat_point, args, jobs)
