import numpy as np
import pytest

import occmob as om
from occmob import (
    CohortSpec,
    DataError,
    IncomeRecord,
    MicroRecord,
    OccClass,
    TransitionCounts,
)

import _tables as T
from conftest import counts_to_records


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestMicroParsing:
    def test_basic_rows(self, tmp_path):
        p = write(tmp_path / "m.csv",
                  "birth_year,father_class,child_class\n"
                  "1950,W,M\n1951,u,w\n")
        records, report = om.parse_micro_csv(p)
        assert records == [
            MicroRecord(1950, OccClass.WORKING, OccClass.MIDDLE, 1.0),
            MicroRecord(1951, OccClass.UPPER, OccClass.WORKING, 1.0),
        ]
        assert (report.n_rows, report.n_accepted, report.n_rejected) == (2, 2, 0)

    def test_weight_column_is_optional(self, tmp_path):
        p = write(tmp_path / "m.csv",
                  "birth_year,father_class,child_class,weight\n"
                  "1950,W,M,2.5\n1950,W,M,\n")
        records, _ = om.parse_micro_csv(p)
        assert [r.weight for r in records] == [2.5, 1.0]

    def test_bad_rows_skipped_with_line_numbers(self, tmp_path):
        p = write(tmp_path / "m.csv",
                  "birth_year,father_class,child_class\n"
                  "1950,W,M\n1950,X,M\nxxxx,W,M\n1950,W,U\n")
        records, report = om.parse_micro_csv(p)
        assert report.n_accepted == 2 and report.n_rejected == 2
        assert any("line 3" in r for r in report.rejected)
        assert any("line 4" in r for r in report.rejected)

    def test_negative_weight_rejected(self, tmp_path):
        p = write(tmp_path / "m.csv",
                  "birth_year,father_class,child_class,weight\n"
                  "1950,W,M,-1\n1950,W,M,1\n")
        records, report = om.parse_micro_csv(p)
        assert len(records) == 1 and report.n_rejected == 1

    def test_missing_column_fatal(self, tmp_path):
        p = write(tmp_path / "m.csv", "birth_year,father_class\n1950,W\n")
        with pytest.raises(DataError, match="child_class"):
            om.parse_micro_csv(p)

    def test_majority_rejection_fatal(self, tmp_path):
        p = write(tmp_path / "m.csv",
                  "birth_year,father_class,child_class\n"
                  "1950,W,M\n1950,?,M\n1950,M,?\n")
        with pytest.raises(DataError, match="rejected"):
            om.parse_micro_csv(p)

    def test_header_whitespace_and_case(self, tmp_path):
        p = write(tmp_path / "m.csv",
                  " Birth_Year , Father_Class , Child_Class \n1950, W , M \n")
        records, _ = om.parse_micro_csv(p)
        assert records[0] == MicroRecord(1950, OccClass.WORKING, OccClass.MIDDLE, 1.0)


class TestIncomeParsing:
    def test_basic_rows(self, tmp_path):
        p = write(tmp_path / "y.csv",
                  "wave_year,birth_year,occ_class,income\n"
                  "2000,1950,M,1234.5\n")
        records, report = om.parse_income_csv(p)
        assert records == [IncomeRecord(2000, 1950, OccClass.MIDDLE, 1234.5)]
        assert report.n_rejected == 0

    def test_nonpositive_income_rejected(self, tmp_path):
        p = write(tmp_path / "y.csv",
                  "wave_year,birth_year,occ_class,income\n"
                  "2000,1950,M,0\n2000,1950,M,-3\n"
                  "2000,1950,M,10\n2000,1950,M,11\n2000,1950,M,12\n")
        records, report = om.parse_income_csv(p)
        assert len(records) == 3
        assert report.n_rejected == 2
        assert all("must be positive" in r for r in report.rejected)


class TestCohortParsing:
    def test_header_comments_blanks(self, tmp_path):
        p = write(tmp_path / "c.csv",
                  "# generations\nlabel,birth_from,birth_to\n\nA,1940,1950\nB,1951,1960\n")
        specs = om.parse_cohorts(p)
        assert specs == [CohortSpec("A", 1940, 1950), CohortSpec("B", 1951, 1960)]

    def test_header_is_optional(self, tmp_path):
        p = write(tmp_path / "c.csv", "A,1940,1950\n")
        assert om.parse_cohorts(p) == [CohortSpec("A", 1940, 1950)]

    def test_overlap_fatal(self, tmp_path):
        p = write(tmp_path / "c.csv", "A,1940,1950\nB,1950,1960\n")
        with pytest.raises(DataError, match="overlap"):
            om.parse_cohorts(p)

    def test_malformed_line_fatal(self, tmp_path):
        p = write(tmp_path / "c.csv", "A,1940\n")
        with pytest.raises(DataError, match="line 1"):
            om.parse_cohorts(p)

    def test_empty_file_fatal(self, tmp_path):
        p = write(tmp_path / "c.csv", "# nothing\n")
        with pytest.raises(DataError, match="no cohorts"):
            om.parse_cohorts(p)

    def test_reversed_bounds_fatal(self):
        with pytest.raises(DataError):
            CohortSpec("X", 1970, 1960)

    def test_default_cohorts_partition_study_years(self):
        for year in range(1940, 1978):
            hits = [c.label for c in om.DEFAULT_COHORTS if c.contains(year)]
            assert len(hits) == 1


class TestAggregation:
    def test_fixture_margins(self, cohort_records):
        counts = om.aggregate_counts(cohort_records["I"], CohortSpec("I", 1940, 1951))
        np.testing.assert_array_equal(np.asarray(counts), T.COUNTS["I"])
        np.testing.assert_array_equal(np.asarray(counts).sum(axis=1), [1894, 1639, 212])
        np.testing.assert_array_equal(np.asarray(counts).sum(axis=0), [1307, 1847, 591])

    def test_weights_respected(self):
        records = [MicroRecord(1950, OccClass.WORKING, OccClass.MIDDLE, 2.0)]
        spec = CohortSpec("I", 1940, 1951)
        assert om.aggregate_counts(records, spec).counts[0, 1] == 2.0
        assert om.aggregate_counts(records, spec, use_weights=False).counts[0, 1] == 1.0

    def test_outside_years_excluded(self):
        records = [
            MicroRecord(1950, OccClass.WORKING, OccClass.MIDDLE),
            MicroRecord(1990, OccClass.UPPER, OccClass.UPPER),
        ]
        counts = om.aggregate_counts(records, CohortSpec("I", 1940, 1951))
        assert counts.total == 1.0

    def test_empty_cohort_fatal(self):
        records = [MicroRecord(1990, OccClass.WORKING, OccClass.MIDDLE)]
        with pytest.raises(DataError, match="no records"):
            om.aggregate_counts(records, CohortSpec("I", 1940, 1951))


class TestTransitionCounts:
    def test_validation(self):
        with pytest.raises(DataError):
            TransitionCounts(np.ones((2, 3)))
        with pytest.raises(DataError):
            TransitionCounts(np.full((3, 3), -1.0))
        with pytest.raises(DataError):
            TransitionCounts(np.full((3, 3), np.nan))

    def test_zero_rows_allowed(self):
        c = TransitionCounts(np.diag([0.0, 1.0, 2.0]))
        assert c.total == 3.0
        assert np.asarray(c).shape == (3, 3)


class TestMatrixFile:
    def test_read_with_comments(self, tmp_path):
        p = write(tmp_path / "q.csv", "# Q\n0.5,0.5,0\n0.2,0.6,0.2\n0,0.5,0.5\n")
        np.testing.assert_allclose(
            om.read_matrix_csv(p), [[0.5, 0.5, 0], [0.2, 0.6, 0.2], [0, 0.5, 0.5]]
        )

    def test_wrong_shape(self, tmp_path):
        p = write(tmp_path / "q.csv", "1,2\n3,4\n")
        with pytest.raises(DataError, match="3x3"):
            om.read_matrix_csv(p)

    def test_non_numeric(self, tmp_path):
        p = write(tmp_path / "q.csv", "1,2,x\n0,0,0\n0,0,0\n")
        with pytest.raises(DataError, match="line 1"):
            om.read_matrix_csv(p)


class TestRoundTrips:
    def test_micro_records(self, tmp_path):
        records = [
            MicroRecord(1945, OccClass.WORKING, OccClass.UPPER, 1.0),
            MicroRecord(1960, OccClass.MIDDLE, OccClass.MIDDLE, 0.1234567890123),
        ]
        p = tmp_path / "m.csv"
        om.write_micro_csv(records, p)
        back, report = om.parse_micro_csv(p)
        assert back == records and report.n_rejected == 0

    def test_income_records(self, tmp_path):
        records = [IncomeRecord(2000, 1950, OccClass.UPPER, 12345.6789)]
        p = tmp_path / "y.csv"
        om.write_income_csv(records, p)
        back, _ = om.parse_income_csv(p)
        assert back == records

    def test_counts_written_as_micro_rows(self, tmp_path):
        p = tmp_path / "sim.csv"
        om.write_micro_counts(T.COUNTS["I"], p, birth_year=1950)
        records, _ = om.parse_micro_csv(p)
        assert len(records) == 9
        counts = om.aggregate_counts(records, CohortSpec("I", 1940, 1951))
        np.testing.assert_array_equal(np.asarray(counts), T.COUNTS["I"])


SAMPLE_DOC = {
    "tool": {"name": "demo", "version": "1"},
    "seed": 7,
    "weighted": True,
    "cohorts": [
        {
            "label": "I",
            "observations": 10.0,
            "matrices": {"P": [[0.5, 0.5, 0.0], [0.2, 0.6, 0.2], [0.0, 0.5, 0.5]]},
            "fathers": [0.2, 0.3, 0.5],
            "indexes": {"i_obs": 1 / 3, "point": [1.0, 2.0, 3.0]},
        }
    ],
}


class TestReportEmission:
    def test_document_round_trip(self, tmp_path):
        p = tmp_path / "r.json"
        om.write_report(SAMPLE_DOC, p)
        assert om.read_report(p) == SAMPLE_DOC
        text = p.read_text()
        assert text.endswith("\n")
        assert repr(1 / 3) in text  # full float precision survives

    def test_document_bytes_stable(self, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        om.write_report(SAMPLE_DOC, p1)
        om.write_report(SAMPLE_DOC, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_delimited_layout(self, tmp_path):
        p = tmp_path / "r.csv"
        om.write_report(SAMPLE_DOC, p, fmt="delimited")
        lines = p.read_text().splitlines()
        assert lines[0] == "cohort,section,name,from,to,value"
        rows = [line.split(",") for line in lines[1:]]
        assert ["", "meta", "tool.name", "", "", "demo"] in rows
        assert ["", "meta", "weighted", "", "", "true"] in rows
        assert ["I", "matrix", "P", "W", "M", "0.5"] in rows
        assert ["I", "shares", "fathers", "U", "", "0.5"] in rows
        assert ["I", "indexes", "point.M", "", "", "2.0"] in rows
        # exactly nine matrix cells, codes in both axes
        mat = [r for r in rows if r[1] == "matrix"]
        assert len(mat) == 9
        assert float([r for r in rows if r[2] == "i_obs"][0][5]) == 1 / 3

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            om.write_report(SAMPLE_DOC, tmp_path / "x", fmt="yaml")

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(OSError):
            om.write_report(SAMPLE_DOC, tmp_path / "missing" / "r.json")

    def test_object_with_to_document(self, tmp_path, cohort_records):
        dec = om.decompose(T.COUNTS["I"])
        p = tmp_path / "d.json"
        om.write_report(dec, p)
        doc = om.read_report(p)
        np.testing.assert_allclose(doc["matrices"]["Q"], dec.q, atol=0)
