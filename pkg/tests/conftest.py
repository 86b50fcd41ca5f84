import json
import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def corpus_files():
    return sorted(CORPUS.glob("*.json"))


def load_raw(name: str) -> dict:
    return json.loads((CORPUS / f"{name}.json").read_text())


def search_for(name: str):
    from dcsep import distinguish_conjugacy, separate_double_coset, separate_subgroup

    if name.startswith("subgroup"):
        return separate_subgroup
    if name.startswith("conjugacy"):
        return distinguish_conjugacy
    return separate_double_coset


@pytest.fixture
def corpus_dir():
    return CORPUS


# acceptance lines, filled by test_acceptance and printed after the run
ACCEPTANCE: dict[str, list[tuple[bool, str]]] = {}


def record(criterion: str, ok: bool, detail: str) -> None:
    ACCEPTANCE.setdefault(criterion, []).append((ok, detail))
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=int):
        rows = ACCEPTANCE[key]
        bad = [d for ok, d in rows if not ok]
        status = "FAIL" if bad else "PASS"
        tail = "; ".join(bad) if bad else rows[-1][1] if len(rows) == 1 else f"{len(rows)} checks"
        tr.write_line(f"criterion {key:>2}: {status}  {tail}")
