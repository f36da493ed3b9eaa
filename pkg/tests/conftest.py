import io
from contextlib import redirect_stderr, redirect_stdout

import numpy as np
import pytest

import occmob as om
from occmob.cli import main as cli_main

import _tables as T


def counts_to_records(counts, birth_year, weight=1.0):
    """Expand a 3x3 count matrix into one MicroRecord per observation."""
    records = []
    for (f, c), n in np.ndenumerate(np.asarray(counts, dtype=int)):
        records.extend(
            om.MicroRecord(birth_year, om.OccClass(f), om.OccClass(c), weight)
            for _ in range(int(n))
        )
    return records


@pytest.fixture(scope="session")
def cohort_records():
    """All three fixture cohorts as in-memory records, keyed by label."""
    return {
        label: counts_to_records(T.COUNTS[label], T.BIRTH_YEARS[label])
        for label in ("I", "II", "III")
    }


@pytest.fixture(scope="session")
def micro_csv(tmp_path_factory, cohort_records):
    """Fixture micro CSV on disk holding all three cohorts."""
    path = tmp_path_factory.mktemp("data") / "micro.csv"
    everything = [r for label in ("I", "II", "III") for r in cohort_records[label]]
    om.write_micro_csv(everything, path)
    return path


def make_income_records():
    """Income panel calibrated so the premia ratios land on the reference
    values: gaussian log incomes, identical moments in each of three waves."""
    rng = np.random.default_rng(T.INCOME_SEED)
    records = []
    for wave in T.INCOME_WAVES:
        for cls in om.OccClass:
            logs = rng.normal(
                T.INCOME_LOG_MEANS[cls],
                np.sqrt(T.INCOME_LOG_VARS[cls]),
                size=T.INCOME_N_PER_CELL,
            )
            records.extend(
                om.IncomeRecord(wave, 1945, cls, float(x)) for x in np.exp(logs)
            )
    return records


@pytest.fixture(scope="session")
def income_records():
    return make_income_records()


@pytest.fixture(scope="session")
def income_csv(tmp_path_factory, income_records):
    path = tmp_path_factory.mktemp("data") / "income.csv"
    om.write_income_csv(income_records, path)
    return path


@pytest.fixture
def run_cli():
    """Invoke the CLI in-process; returns (exit_code, stdout, stderr)."""

    def _run(argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            try:
                code = cli_main([str(a) for a in argv])
            except SystemExit as exc:  # argparse usage failures
                code = exc.code if exc.code is not None else 0
        return code, out.getvalue(), err.getvalue()

    return _run
