"""Formula DSL parsing and binding."""

import pytest

from agendascope.errors import FormulaSyntaxError, UnknownCovariate
from agendascope.formula import (CATEGORICAL, LINEAR, SPLINE, Term,
                                 bind_formula, parse_formula)


class TestParse:
    def test_plain_terms(self):
        formula = parse_formula("region + conflict")
        assert formula.terms == (Term(CATEGORICAL, "region"),
                                 Term(LINEAR, "conflict"))

    def test_spline_default_df(self):
        formula = parse_formula("s(gdp_pc)")
        assert formula.terms == (Term(SPLINE, "gdp_pc", df=10),)

    def test_spline_explicit_df(self):
        formula = parse_formula("s(year, df=6)")
        assert formula.terms == (Term(SPLINE, "year", df=6),)

    def test_spline_df_too_small(self):
        with pytest.raises(FormulaSyntaxError) as err:
            parse_formula("s(gdp_pc,df=3)")
        assert "at least 4" in str(err.value)
        assert err.value.offset == len("s(gdp_pc,df=")

    def test_full_paper_style_formula(self):
        text = "s(gdp_pc,df=10) + s(year,df=10) + region + conflict + polity"
        formula = parse_formula(text)
        kinds = [t.kind for t in formula.terms]
        assert kinds == [SPLINE, SPLINE, CATEGORICAL, LINEAR, LINEAR]

    def test_whitespace_insignificant(self):
        a = parse_formula("s( gdp_pc , df = 5 )+region")
        b = parse_formula("s(gdp_pc,df=5) + region")
        assert a.terms == b.terms

    def test_empty_formula(self):
        with pytest.raises(FormulaSyntaxError):
            parse_formula("   ")

    def test_missing_plus(self):
        with pytest.raises(FormulaSyntaxError) as err:
            parse_formula("region conflict")
        assert err.value.offset == len("region ")

    def test_unclosed_spline(self):
        with pytest.raises(FormulaSyntaxError):
            parse_formula("s(gdp_pc")

    def test_duplicate_terms_rejected(self):
        with pytest.raises(FormulaSyntaxError) as err:
            parse_formula("polity + region + polity")
        assert err.value.offset == len("polity + region + ")

    def test_byte_offsets_in_unicode_text(self):
        with pytest.raises(FormulaSyntaxError) as err:
            parse_formula("polity + Ω")
        assert err.value.offset == len("polity + ".encode("utf-8"))

    def test_name_s_not_confused_with_spline(self):
        formula = parse_formula("s + polity")
        assert formula.terms[0] == Term(LINEAR, "s")


class TestBind:
    TABLE = {"region": ["EAS", "SSA", None], "conflict": [0, 1, 0],
             "polity": [3, -5, 10], "gdp_pc": [100.0, 200.0, 300.0],
             "label": ["a", "b", "b"]}

    def test_unknown_covariate(self):
        with pytest.raises(UnknownCovariate):
            bind_formula(parse_formula("nonexistent"), self.TABLE)

    def test_string_column_upgrades_to_categorical(self):
        bound = bind_formula(parse_formula("label + conflict"), self.TABLE)
        assert bound.terms[0].kind == CATEGORICAL
        assert bound.terms[1].kind == LINEAR

    def test_spline_on_string_column_rejected(self):
        with pytest.raises(ValueError):
            bind_formula(parse_formula("s(label,df=4)"), self.TABLE)

    def test_region_stays_categorical(self):
        bound = bind_formula(parse_formula("region"), self.TABLE)
        assert bound.terms[0].kind == CATEGORICAL
