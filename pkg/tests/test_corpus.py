import pytest
from hypothesis import given
from hypothesis import strategies as st

from rpys_lab import (SourceFormat, detect_format, parse_scopus_csv,
                      parse_wos_export)
from rpys_lab.errors import NotScopusFormat, NotWosFormat

R1_REFS = [
    "Garfield E, 1965, SCIENCE, V122, P108",
    "Price DJD, 1965, SCIENCE, V149, P510, DOI 10.1126/science.149.3683.510",
    "Hirsch JE, 2005, P NATL ACAD SCI USA, V102, P16569, DOI 10.1073/pnas.0507655102",
    "Merton RK, 1968, SCIENCE, V159, P56",
]


class TestWosParsing:
    def test_fixture_counts(self, wos_corpus):
        assert len(wos_corpus.publications) == 3
        assert wos_corpus.n_refs == 12
        assert wos_corpus.diagnostics == ()
        assert wos_corpus.format is SourceFormat.WOS_TAGGED

    def test_fixture_fields_first_record(self, wos_corpus):
        pub = wos_corpus.publications[0]
        assert pub.authors == ("Bornmann, L", "Marx, W")
        assert pub.title == ("The proposal of a broadening of perspective in "
                             "evaluative bibliometrics by complementing the "
                             "times cited with a cited reference analysis")
        assert pub.source_title == "JOURNAL OF INFORMETRICS"
        assert pub.pub_year == 2013
        assert pub.doi == "10.1016/j.joi.2012.09.003"
        assert [r.raw for r in pub.raw_refs] == R1_REFS
        assert [r.position for r in pub.raw_refs] == [0, 1, 2, 3]
        assert all(r.citing_id == pub.id for r in pub.raw_refs)

    def test_fixture_years_and_order(self, wos_corpus):
        assert [p.pub_year for p in wos_corpus.publications] == [2013, 2014, 2016]
        assert wos_corpus.publications[1].doi == "10.1002/asi.23089"
        assert len({p.id for p in wos_corpus.publications}) == 3

    def test_empty_input(self):
        corpus = parse_wos_export(b"")
        assert corpus.publications == ()
        assert corpus.diagnostics == ()

    def test_prose_raises(self):
        with pytest.raises(NotWosFormat):
            parse_wos_export(b"just some text\nwith lines\n")

    def test_missing_py_rejected_with_diagnostic(self):
        text = ("PT J\nAU Doe, J\nTI No year here\nSO X\n"
                "CR Someone, 1990, SOMEWHERE\nER\n"
                "PT J\nAU Roe, R\nTI Has year\nSO Y\nPY 2001\n"
                "CR Other, 1991, ELSEWHERE\nER\nEF\n")
        corpus = parse_wos_export(text.encode())
        assert len(corpus.publications) == 1
        assert corpus.publications[0].pub_year == 2001
        assert len(corpus.diagnostics) == 1
        assert "PY" in corpus.diagnostics[0][1]

    def test_out_of_range_year_rejected(self):
        text = "PT J\nAU A\nPY 1499\nCR X, 1990, Y\nER\n"
        corpus = parse_wos_export(text.encode())
        assert corpus.publications == ()
        assert len(corpus.diagnostics) == 1

    def test_unterminated_record_rejected(self):
        text = "PT J\nAU A\nPY 2001\nCR X, 1990, Y\n"
        corpus = parse_wos_export(text.encode())
        assert corpus.publications == ()
        assert "ER" in corpus.diagnostics[0][1]

    def test_crlf_and_bom(self, wos_bytes):
        crlf = b"\xef\xbb\xbf" + wos_bytes.replace(b"\n", b"\r\n")
        corpus = parse_wos_export(crlf)
        assert len(corpus.publications) == 3
        assert corpus.n_refs == 12

    def test_determinism(self, wos_bytes):
        assert parse_wos_export(wos_bytes) == parse_wos_export(wos_bytes)

    def test_id_stable_across_reingestion(self, wos_bytes):
        a = parse_wos_export(wos_bytes)
        b = parse_wos_export(wos_bytes)
        assert [p.id for p in a.publications] == [p.id for p in b.publications]

    def test_duplicate_record_rejected(self):
        record = "PT J\nAU A\nPY 2001\nCR X, 1990, Y\nER\n"
        corpus = parse_wos_export((record + record).encode())
        assert len(corpus.publications) == 1
        assert len(corpus.diagnostics) == 1
        assert "duplicate" in corpus.diagnostics[0][1]

    def test_round_trip_count_against_line_scan(self, wos_bytes):
        # Independent scanner: a CR entry is the CR tag line or any
        # three-space continuation directly following it.
        lines = wos_bytes.decode().splitlines()
        count = 0
        in_cr = False
        for line in lines:
            if line.startswith("CR "):
                in_cr = True
                count += 1
            elif in_cr and line.startswith("   "):
                count += 1
            else:
                in_cr = False
        corpus = parse_wos_export(wos_bytes)
        assert corpus.n_refs == count

    def test_invalid_utf8(self):
        with pytest.raises(UnicodeDecodeError):
            parse_wos_export(b"PT J\xff\xfe\nER\n")

    @given(st.text(max_size=400))
    def test_no_crash_on_arbitrary_text(self, text):
        try:
            corpus = parse_wos_export(text.encode("utf-8"))
        except NotWosFormat:
            return
        assert corpus.publications is not None


class TestScopusParsing:
    def test_fixture_counts(self, scopus_corpus):
        assert len(scopus_corpus.publications) == 3
        assert scopus_corpus.n_refs == 12
        assert scopus_corpus.diagnostics == ()
        assert scopus_corpus.format is SourceFormat.SCOPUS_CSV

    def test_fixture_fields(self, scopus_corpus):
        pub = scopus_corpus.publications[0]
        assert pub.pub_year == 2013
        assert pub.authors == ("Bornmann L.", "Marx W.")
        assert pub.source_title == "Journal of Informetrics"
        assert pub.doi == "10.1016/j.joi.2012.09.003"
        assert [r.raw for r in pub.raw_refs] == R1_REFS

    def test_header_only(self):
        corpus = parse_scopus_csv(
            b"Authors,Title,Year,Source title,DOI,References\n")
        assert corpus.publications == ()

    def test_simple_split(self):
        data = (b"Authors,Title,Year,Source title,DOI,References\n"
                b'X,T,2000,S,,"A; B; C"\n')
        corpus = parse_scopus_csv(data)
        refs = corpus.publications[0].raw_refs
        assert [r.raw for r in refs] == ["A", "B", "C"]
        assert [r.position for r in refs] == [0, 1, 2]

    def test_empty_references_cell(self):
        data = b"Authors,Title,Year,Source title,DOI,References\nX,T,2000,S,,\n"
        corpus = parse_scopus_csv(data)
        assert corpus.publications[0].raw_refs == ()

    def test_quoted_references_with_separators(self):
        # Hand-segmented: the quoted cell holds exactly 4 items.
        cell = ("Garfield E, 1965, SCIENCE, V122, P108; "
                "Price DJD, 1965, SCIENCE, V149, P510; "
                "Hirsch JE, 2005, P NATL ACAD SCI USA, V102, P16569; "
                "Merton RK, 1968, SCIENCE, V159, P56")
        data = ("Authors,Title,Year,Source title,DOI,References\n"
                f'X,T,2000,S,,"{cell}"\n').encode()
        corpus = parse_scopus_csv(data)
        assert len(corpus.publications[0].raw_refs) == 4

    def test_missing_required_column(self):
        with pytest.raises(NotScopusFormat):
            parse_scopus_csv(b"Authors,Title,Year,Source title,DOI\nX,T,2000,S,\n")

    def test_bad_year_diagnostic(self):
        data = (b"Authors,Title,Year,Source title,DOI,References\n"
                b"X,T,not-a-year,S,,\n"
                b"Y,U,2001,S,,\n")
        corpus = parse_scopus_csv(data)
        assert len(corpus.publications) == 1
        assert len(corpus.diagnostics) == 1

    def test_row_order_preserved(self, scopus_corpus):
        assert [p.pub_year for p in scopus_corpus.publications] == [2013, 2014, 2016]


class TestDetectFormat:
    def test_wos(self, wos_bytes):
        assert detect_format(wos_bytes) is SourceFormat.WOS_TAGGED

    def test_scopus(self, scopus_bytes):
        assert detect_format(scopus_bytes) is SourceFormat.SCOPUS_CSV

    def test_prose(self):
        assert detect_format(b"hello world\nnothing here\n") is SourceFormat.UNKNOWN


class TestDoiNormalization:
    @pytest.mark.parametrize("raw,expected", [
        ("10.1016/J.JOI.2012.09.003", "10.1016/j.joi.2012.09.003"),
        ("https://doi.org/10.1002/asi.23089", "10.1002/asi.23089"),
        ("http://dx.doi.org/10.1/X", "10.1/x"),
        ("DOI: 10.7/ab", "10.7/ab"),
        ("  10.5/z  ", "10.5/z"),
    ])
    def test_prefixes_and_case(self, raw, expected):
        from rpys_lab.corpus import normalize_doi
        assert normalize_doi(raw) == expected
        assert normalize_doi(normalize_doi(raw)) == normalize_doi(raw)

    def test_uppercase_di_tag_normalized(self):
        text = ("PT J\nAU A\nPY 2001\nDI 10.1016/J.JOI.2012.09.003\n"
                "CR X, 1990, Y\nER\n")
        corpus = parse_wos_export(text.encode())
        assert corpus.publications[0].doi == "10.1016/j.joi.2012.09.003"


class TestCorpusInvariants:
    def test_raw_ref_ids_unique_corpus_wide(self, wos_corpus):
        keys = [(r.citing_id, r.position)
                for p in wos_corpus.publications for r in p.raw_refs]
        assert len(keys) == len(set(keys))

    def test_config_validation(self):
        from rpys_lab import Config
        with pytest.raises(ValueError):
            Config(threshold=0.0)
        with pytest.raises(ValueError):
            Config(threshold=1.2)
        with pytest.raises(ValueError):
            Config(window=4)
        with pytest.raises(ValueError):
            Config(min_len=0)
        assert Config(scale="linear").scale.value == "linear"
