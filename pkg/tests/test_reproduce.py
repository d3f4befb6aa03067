import json
import math

import pytest

from hcgibbs import sum_activities
from hcgibbs.reproduce import EXAMPLES, Row, all_passed, example_spec, format_table, run_example

# 50-digit oracle values for the second example at its exact total activity
A0_EXACT_EXAMPLE_2 = 0.67798287797886723666
LAMBDA_EXACT_EXAMPLE_2 = 1.9089465840826849767


def by_name(rows):
    return {r.name: r for r in rows}


class TestRow:
    def test_statuses(self):
        assert Row("a", 1.0, 1.0 + 1e-13, 1e-12).status == "PASS"
        assert Row("a", 1.0, 1.1, 1e-12).status == "FAIL"
        assert Row("a", 1.0, None, None).status == "INFO"
        assert Row("flag", True, True, 0).status == "PASS"
        assert Row("flag", False, True, 0).status == "FAIL"

    def test_nan_fails(self):
        assert Row("a", math.nan, 1.0, 1e-3).status == "FAIL"

    def test_all_passed_ignores_info(self):
        assert all_passed([Row("a", 1.0, 1.0, 0.0), Row("b", 5.0, None, None)])
        assert not all_passed([Row("a", 1.0, 2.0, 0.5)])

    def test_to_dict_is_json(self):
        d = Row("a", 0.5, 0.5, 1e-9).to_dict()
        assert json.loads(json.dumps(d)) == d

    def test_format_table(self):
        text = format_table([Row("short", 1.0, 1.0, 1e-9), Row("a longer name", 2.0, None, None)])
        lines = text.splitlines()
        assert lines[0].startswith("PASS") and lines[1].startswith("INFO")
        assert lines[0].index("1 ") == lines[1].index("2 ")


class TestExamples:
    def test_unknown_example(self):
        with pytest.raises(ValueError):
            example_spec(6)
        with pytest.raises(ValueError):
            run_example(0)

    @pytest.mark.parametrize("n", sorted(EXAMPLES))
    def test_every_example_passes(self, n):
        rows = run_example(n)
        assert all_passed(rows), format_table(rows)
        assert len({r.name for r in rows}) == len(rows)

    def test_example_1_rows(self):
        rows = by_name(run_example(1))
        for name in ("Lambda", "A0", "z(1)", "z(-1)", "sum z"):
            assert rows[name].status == "PASS"
        assert rows["Lambda"].expected == 9 / 8

    def test_example_2_reports_exact_lambda(self):
        rows = by_name(run_example(2))
        assert rows["Lambda (published as 1.9)"].computed == pytest.approx(
            LAMBDA_EXACT_EXAMPLE_2, abs=1e-12)
        assert rows["A0 from Lambda=1.9"].tol == 1e-3
        info = rows["A0 from exact Lambda"]
        assert info.status == "INFO"
        assert info.computed == pytest.approx(A0_EXACT_EXAMPLE_2, abs=1e-12)

    def test_example_4_rows(self):
        rows = by_name(run_example(4))
        assert rows["Lambda"].expected == 4.5
        assert rows["z~(1)"].expected == 4 / 3
        assert rows["sum z (even law, from B)"].expected == 0.5
        assert rows["sum z~ (odd law, from A)"].expected == 2.0
        assert rows["regime is ThreePeriodic"].status == "PASS"

    def test_specs_match_published_totals(self):
        totals = {1: 9 / 8, 3: 1.125, 4: 4.5, 5: 16 / 3}
        for n, lam in totals.items():
            assert sum_activities(example_spec(n)).value == pytest.approx(lam, abs=1e-12)

    def test_wrong_expectation_is_caught(self, monkeypatch):
        # a harness that cannot fail is no harness: shift a published value
        from hcgibbs import reproduce
        real = reproduce._example_1

        def shifted(tol):
            return [Row(r.name, r.computed, r.expected + 1e-6, r.tol)
                    if r.name == "z(1)" else r for r in real(tol)]
        monkeypatch.setitem(reproduce._RUNNERS, 1, shifted)
        rows = run_example(1)
        assert not all_passed(rows)
        assert by_name(rows)["z(1)"].status == "FAIL"
