"""Cited-references analysis workbench.

Pipeline: ingest bibliographic exports, standardize and cluster cited
references, compute per-year reference spectra with median-deviation peaks
and per-cluster indicators, fit growth segments, and curate clusters through
versioned sessions exposed over a CLI and an HTTP API.
"""

from .cluster import (DecisionKind, MergeDecision, RefCluster, apply_decision,
                      cluster_refs)
from .config import Config
from .corpus import (Corpus, Publication, RawCitedRef, SourceFormat,
                     detect_format, parse_scopus_csv, parse_wos_export)
from .refparse import (ParsedCitedRef, levenshtein, levenshtein_sim,
                       normalize_field, parse_corpus_refs, parse_cr_string,
                       ref_similarity)
from .segments import (Scale, Segment, SegmentFit, fit_fixed_k,
                       segment_landmarks, select_k)
from .session import (SessionSnapshot, advance, create_session,
                      export_clusters_csv, export_spectrum_csv, load, save,
                      session_series, session_spectrum)
from .spectrum import (ClusterIndicators, Peak, SpectrumPoint,
                       attach_top_clusters, cluster_ncr, compute_indicators,
                       compute_spectrum, detect_peaks, median_deviations,
                       top_clusters_for_year)

__version__ = "0.1.0"

__all__ = [
    "Config",
    "Corpus", "Publication", "RawCitedRef", "SourceFormat",
    "detect_format", "parse_wos_export", "parse_scopus_csv",
    "ParsedCitedRef", "parse_cr_string", "parse_corpus_refs",
    "normalize_field", "levenshtein", "levenshtein_sim", "ref_similarity",
    "RefCluster", "MergeDecision", "DecisionKind",
    "cluster_refs", "apply_decision",
    "SpectrumPoint", "Peak", "ClusterIndicators",
    "compute_spectrum", "median_deviations", "detect_peaks",
    "top_clusters_for_year", "attach_top_clusters", "compute_indicators",
    "cluster_ncr",
    "Scale", "Segment", "SegmentFit",
    "fit_fixed_k", "select_k", "segment_landmarks",
    "SessionSnapshot", "create_session", "advance",
    "session_spectrum", "session_series",
    "export_spectrum_csv", "export_clusters_csv", "save", "load",
    "__version__",
]
