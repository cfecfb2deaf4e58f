"""Corpus ingestion: tokenize speech files, join covariates, build the
sparse document-term corpus that every downstream stage consumes."""

from __future__ import annotations

import csv
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import porter
from .errors import (AllDocumentsEmpty, DuplicateDocId, EmptyDirectory,
                     MetadataParseError)
from .jsonio import read_json, write_json

logger = logging.getLogger(__name__)

REGIONS = ("EAS", "ECS", "LCN", "MEA", "NAC", "SAS", "SSA")
YEAR_RANGE = (1970, 2016)

_WORD_RE = re.compile(r"[a-z]+")
_FILENAME_RE = re.compile(r"^([A-Z]{3})_(\d+)_(\d{4})$")

_METADATA_COLUMNS = ("doc_id", "gdp_pc", "population", "oda", "polity",
                     "conflict", "region")


def _builtin_stopwords() -> frozenset[str]:
    text = resources.files("agendascope").joinpath("data/stopwords_en.txt").read_text("utf-8")
    return frozenset(w for w in text.split() if w)


@dataclass(frozen=True)
class PreprocessConfig:
    """Tokenization and vocabulary-threshold settings."""

    min_doc_freq: int = 10
    min_term_len: int = 3
    stopwords: frozenset[str] | None = None  # None selects the built-in list

    def stopword_set(self) -> frozenset[str]:
        return self.stopwords if self.stopwords is not None else _builtin_stopwords()

    @staticmethod
    def load_stopword_file(path: str | Path) -> frozenset[str]:
        return frozenset(w.strip().lower() for w in Path(path).read_text("utf-8").split() if w.strip())


@dataclass(frozen=True)
class RawDocument:
    doc_id: str
    country: str
    year: int
    text: str

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError(f"document {self.doc_id!r}: empty text")
        if not YEAR_RANGE[0] <= self.year <= YEAR_RANGE[1]:
            raise ValueError(
                f"document {self.doc_id!r}: year {self.year} outside "
                f"{YEAR_RANGE[0]}-{YEAR_RANGE[1]}")


@dataclass(frozen=True)
class CovariateRecord:
    doc_id: str
    gdp_pc: float | None
    population: float | None
    oda: float | None
    polity: int | None
    conflict: bool | None
    region: str

    def __post_init__(self):
        if self.polity is not None and not -10 <= self.polity <= 10:
            raise ValueError(f"polity {self.polity} outside [-10, 10]")
        if self.gdp_pc is not None and self.gdp_pc < 0:
            raise ValueError(f"gdp_pc {self.gdp_pc} negative")
        if self.population is not None and self.population <= 0:
            raise ValueError(f"population {self.population} not positive")
        if self.region not in REGIONS:
            raise ValueError(f"region {self.region!r} not one of {REGIONS}")

    def as_dict(self) -> dict:
        return {"doc_id": self.doc_id, "gdp_pc": self.gdp_pc,
                "population": self.population, "oda": self.oda,
                "polity": self.polity, "conflict": self.conflict,
                "region": self.region}


@dataclass
class BuildReport:
    """What build_corpus dropped and why."""

    emptied_docs: list[str] = field(default_factory=list)
    docs_without_covariates: list[str] = field(default_factory=list)
    unmatched_covariates: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"emptied_docs": self.emptied_docs,
                "docs_without_covariates": self.docs_without_covariates,
                "unmatched_covariates": self.unmatched_covariates}


@dataclass
class Corpus:
    """Immutable preprocessed corpus.

    ``docs[d]`` is a pair of aligned arrays (term indices ascending, counts);
    ``covariates[d]`` corresponds to ``doc_ids[d]``.
    """

    vocabulary: list[str]
    doc_ids: list[str]
    docs: list[tuple[np.ndarray, np.ndarray]]
    covariates: list[CovariateRecord]
    years: list[int]

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    @property
    def n_terms(self) -> int:
        return len(self.vocabulary)

    def doc_lengths(self) -> np.ndarray:
        return np.array([int(c.sum()) for _, c in self.docs], dtype=np.int64)

    def term_totals(self) -> np.ndarray:
        """Corpus-wide count of each term."""
        totals = np.zeros(self.n_terms, dtype=np.int64)
        for idx, cts in self.docs:
            totals[idx] += cts
        return totals

    def presence_matrix(self) -> np.ndarray:
        """Dense boolean D x V term-presence matrix."""
        out = np.zeros((self.n_docs, self.n_terms), dtype=bool)
        for d, (idx, _) in enumerate(self.docs):
            out[d, idx] = True
        return out

    def counts_dense(self) -> np.ndarray:
        out = np.zeros((self.n_docs, self.n_terms), dtype=np.int64)
        for d, (idx, cts) in enumerate(self.docs):
            out[d, idx] = cts
        return out

    def subset(self, indices: np.ndarray | list[int]) -> "Corpus":
        """Row subset sharing the vocabulary (used for per-analysis drops)."""
        idx = list(int(i) for i in indices)
        return Corpus(vocabulary=self.vocabulary,
                      doc_ids=[self.doc_ids[i] for i in idx],
                      docs=[self.docs[i] for i in idx],
                      covariates=[self.covariates[i] for i in idx],
                      years=[self.years[i] for i in idx])

    def covariate_table(self) -> dict[str, list]:
        """Column view of covariates plus doc year, for design building."""
        table: dict[str, list] = {k: [] for k in
                                  ("doc_id", "gdp_pc", "population", "oda",
                                   "polity", "conflict", "region", "year")}
        for rec, year in zip(self.covariates, self.years):
            d = rec.as_dict()
            d["conflict"] = None if rec.conflict is None else int(rec.conflict)
            d["year"] = year
            for k in table:
                table[k].append(d[k])
        return table

    # -- serialization -----------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "vocabulary": list(self.vocabulary),
            "docs": [{"id": did,
                      "year": year,
                      "terms": [[int(i), int(c)] for i, c in zip(idx, cts)]}
                     for did, year, (idx, cts) in
                     zip(self.doc_ids, self.years, self.docs)],
            "covariates": [rec.as_dict() for rec in self.covariates],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Corpus":
        docs = []
        doc_ids = []
        years = []
        for entry in obj["docs"]:
            doc_ids.append(entry["id"])
            years.append(int(entry["year"]))
            pairs = entry["terms"]
            idx = np.array([p[0] for p in pairs], dtype=np.int64)
            cts = np.array([p[1] for p in pairs], dtype=np.int64)
            docs.append((idx, cts))
        covs = []
        for c in obj["covariates"]:
            covs.append(CovariateRecord(
                doc_id=c["doc_id"], gdp_pc=c["gdp_pc"],
                population=c["population"], oda=c["oda"],
                polity=c["polity"],
                conflict=None if c["conflict"] is None else bool(c["conflict"]),
                region=c["region"]))
        return cls(vocabulary=list(obj["vocabulary"]), doc_ids=doc_ids,
                   docs=docs, covariates=covs, years=years)

    def save(self, path: str | Path) -> Path:
        return write_json(path, self.to_json_obj())

    @classmethod
    def load(cls, path: str | Path) -> "Corpus":
        return cls.from_json_obj(read_json(path))


def tokenize(text: str, config: PreprocessConfig) -> list[str]:
    """Lowercase, strip punctuation/digits, drop stopwords, Porter-stem.

    Stems shorter than ``min_term_len`` are removed; order is preserved.
    """
    stopwords = config.stopword_set()
    out = []
    for match in _WORD_RE.finditer(text.lower()):
        token = match.group()
        if token in stopwords:
            continue
        stemmed = porter.stem(token)
        if len(stemmed) < config.min_term_len:
            continue
        out.append(stemmed)
    return out


def build_corpus(docs: list[RawDocument], covs: list[CovariateRecord],
                 config: PreprocessConfig) -> tuple[Corpus, BuildReport]:
    """Tokenize documents, apply the document-frequency threshold, and
    inner-join covariates by doc_id.

    Documents emptied by preprocessing or lacking a covariate row are
    dropped and listed in the returned report.
    """
    seen: set[str] = set()
    for doc in docs:
        if doc.doc_id in seen:
            raise DuplicateDocId(doc.doc_id)
        seen.add(doc.doc_id)
    cov_by_id: dict[str, CovariateRecord] = {}
    for rec in covs:
        if rec.doc_id in cov_by_id:
            raise DuplicateDocId(rec.doc_id)
        cov_by_id[rec.doc_id] = rec

    token_lists = [tokenize(doc.text, config) for doc in docs]

    doc_freq: Counter[str] = Counter()
    for terms in token_lists:
        doc_freq.update(set(terms))
    vocabulary = sorted(t for t, df in doc_freq.items() if df >= config.min_doc_freq)
    term_index = {t: i for i, t in enumerate(vocabulary)}

    report = BuildReport()
    kept_ids: list[str] = []
    kept_docs: list[tuple[np.ndarray, np.ndarray]] = []
    kept_covs: list[CovariateRecord] = []
    kept_years: list[int] = []
    matched_cov_ids: set[str] = set()
    for doc, terms in zip(docs, token_lists):
        counts = Counter(term_index[t] for t in terms if t in term_index)
        if not counts:
            report.emptied_docs.append(doc.doc_id)
            continue
        rec = cov_by_id.get(doc.doc_id)
        if rec is None:
            report.docs_without_covariates.append(doc.doc_id)
            continue
        matched_cov_ids.add(doc.doc_id)
        idx = np.array(sorted(counts), dtype=np.int64)
        cts = np.array([counts[i] for i in idx], dtype=np.int64)
        kept_ids.append(doc.doc_id)
        kept_docs.append((idx, cts))
        kept_covs.append(rec)
        kept_years.append(doc.year)

    report.unmatched_covariates = sorted(set(cov_by_id) - matched_cov_ids)
    if not kept_ids:
        raise AllDocumentsEmpty("no document survived preprocessing")
    return (Corpus(vocabulary=vocabulary, doc_ids=kept_ids, docs=kept_docs,
                   covariates=kept_covs, years=kept_years), report)


def _parse_optional(raw: str, kind, what: str, row: int):
    raw = raw.strip()
    if raw == "":
        return None
    try:
        return kind(raw)
    except ValueError:
        raise MetadataParseError(row, f"bad {what}: {raw!r}") from None


def read_metadata(path: str | Path) -> list[CovariateRecord]:
    """Parse the covariate table (CSV, empty field = missing)."""
    records: list[CovariateRecord] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in _METADATA_COLUMNS if c not in header]
        if missing:
            raise MetadataParseError(1, f"missing columns: {', '.join(missing)}")
        for row_no, row in enumerate(reader, start=2):
            doc_id = (row["doc_id"] or "").strip()
            if not doc_id:
                raise MetadataParseError(row_no, "empty doc_id")
            conflict_raw = (row["conflict"] or "").strip()
            if conflict_raw not in ("", "0", "1"):
                raise MetadataParseError(row_no, f"conflict must be 0 or 1, got {conflict_raw!r}")
            region = (row["region"] or "").strip()
            try:
                rec = CovariateRecord(
                    doc_id=doc_id,
                    gdp_pc=_parse_optional(row["gdp_pc"], float, "gdp_pc", row_no),
                    population=_parse_optional(row["population"], float, "population", row_no),
                    oda=_parse_optional(row["oda"], float, "oda", row_no),
                    polity=_parse_optional(row["polity"], int, "polity", row_no),
                    conflict=None if conflict_raw == "" else conflict_raw == "1",
                    region=region)
            except ValueError as exc:
                raise MetadataParseError(row_no, str(exc)) from None
            records.append(rec)
    return records


def load_ungdc_layout(directory: str | Path, meta: str | Path,
                      ) -> tuple[list[RawDocument], list[CovariateRecord], list[tuple[str, str]]]:
    """Load speeches laid out as ``{ISO3}_{session}_{year}.txt`` plus a
    covariate CSV.

    Non-conforming or unreadable files are skipped, not fatal; they come
    back as (filename, reason) pairs.
    """
    directory = Path(directory)
    files = sorted(p for p in directory.glob("*.txt") if p.is_file())
    if not files:
        raise EmptyDirectory(f"no .txt files under {directory}")
    docs: list[RawDocument] = []
    skipped: list[tuple[str, str]] = []
    for path in files:
        match = _FILENAME_RE.match(path.stem)
        if match is None:
            logger.warning("skipping non-conforming file name: %s", path.name)
            skipped.append((path.name, "file name does not match {ISO3}_{session}_{year}.txt"))
            continue
        country, _session, year = match.group(1), match.group(2), int(match.group(3))
        try:
            text = path.read_text(encoding="utf-8")
            docs.append(RawDocument(doc_id=path.stem, country=country,
                                    year=year, text=text))
        except (ValueError, UnicodeDecodeError) as exc:
            logger.warning("skipping %s: %s", path.name, exc)
            skipped.append((path.name, str(exc)))
    covs = read_metadata(meta)
    return docs, covs, skipped
