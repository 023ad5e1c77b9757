"""Knot corpus files and the batch runner."""
from __future__ import annotations

import csv
import json
import subprocess
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources

from .braid import parse_braid
from .errors import InputError
from .polyformat import format_poly, parse_poly

HEADER = ["name", "braid", "expected", "expected_total_rank"]

MATCH = "match"
MISMATCH = "mismatch"
NO_EXPECTATION = "no-expectation"


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    braid: str
    expected: str | None = None
    expected_total_rank: int | None = None


def read_corpus(path) -> list[CorpusEntry]:
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise InputError(f"cannot open corpus {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames[:2]] != HEADER[:2]:
            raise InputError(f"corpus {path} needs the header {','.join(HEADER)}")
        out = []
        for line, row in enumerate(reader, start=2):
            name = (row.get("name") or "").strip()
            braid = (row.get("braid") or "").strip()
            expected = (row.get("expected") or "").strip() or None
            total = (row.get("expected_total_rank") or "").strip()
            try:
                parse_braid(braid, strand_cap=64)
                if expected is not None:
                    parse_poly(expected)
                total_rank = int(total) if total else None
            except (InputError, ValueError) as exc:
                raise InputError(f"{path}:{line}: {exc}") from exc
            out.append(CorpusEntry(name, braid, expected, total_rank))
    return out


def shipped_corpus_path():
    return resources.files("gl1hom") / "data" / "knots.csv"


def _run_entry(entry: CorpusEntry, characteristic: int, timeout: float, env=None) -> dict:
    cmd = [sys.executable, "-m", "gl1hom", "compute", entry.braid, "--char", str(characteristic), "--format", "json"]
    start = time.perf_counter()
    rec = {"name": entry.name, "braid": entry.braid, "expected": entry.expected}
    try:
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=timeout, env=env)
    except subprocess.TimeoutExpired:
        rec.update(computed=None, status="error: timeout")
        rec["seconds"] = time.perf_counter() - start
        return rec
    rec["seconds"] = time.perf_counter() - start
    if proc.returncode != 0:
        msg = (proc.stderr.strip().splitlines() or [f"exit {proc.returncode}"])[-1]
        rec.update(computed=None, status=f"error: {msg}")
        return rec
    data = json.loads(proc.stdout)
    computed = format_poly({(t["t"], t["q"]): t["dim"] for t in data["poincare"]})
    rec["computed"] = computed
    rec["total_rank"] = data["total_rank"]
    if entry.expected is None:
        rec["status"] = NO_EXPECTATION
    else:
        same = parse_poly(entry.expected) == parse_poly(computed)
        rec["status"] = MATCH if same else MISMATCH
    return rec


def run_batch(entries, characteristic=0, timeout=600.0, jobs=1, env=None, progress=None) -> dict:
    """Compute every entry in a child process with a time box."""

    def work(entry):
        rec = _run_entry(entry, characteristic, timeout, env)
        if progress is not None:
            progress(rec)
        return rec

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(work, entries))
    else:
        records = [work(e) for e in entries]
    summary = {MATCH: 0, MISMATCH: 0, NO_EXPECTATION: 0, "error": 0}
    for rec in records:
        key = "error" if rec["status"].startswith("error") else rec["status"]
        summary[key] += 1
    return {"characteristic": characteristic, "entries": records, "summary": summary}


def report_json(report: dict, timings: bool = False) -> str:
    """Deterministic rendering; wall times only on request."""
    entries = []
    for rec in report["entries"]:
        rec = dict(rec)
        if not timings:
            rec.pop("seconds", None)
        else:
            rec["seconds"] = round(rec["seconds"], 3)
        entries.append(rec)
    out = {"characteristic": report["characteristic"], "entries": entries, "summary": report["summary"]}
    return json.dumps(out, indent=2, sort_keys=True) + "\n"
