"""Norms, seeded corpora, verifiers and the parameter sweep."""
from .norms import lp_norm, weak_norm
from .corpus import Corpus, CorpusSpec, Instance, corpus_generate, parse_corpus_spec
from .checks import (VERIFIERS, VerificationReport, default_family, endpoint_parameters,
                     make_report, verify_carleson, verify_cor14, verify_cor16a, verify_cz,
                     verify_endpoint, verify_fs, verify_lemma41, verify_lp, verify_rdf,
                     verify_reverse_holder, verify_two_weight_max)

__all__ = [
    "lp_norm", "weak_norm", "Corpus", "CorpusSpec", "Instance", "corpus_generate",
    "parse_corpus_spec", "VERIFIERS", "VerificationReport", "default_family",
    "endpoint_parameters", "make_report", "verify_carleson", "verify_cor14", "verify_cor16a",
    "verify_cz", "verify_endpoint", "verify_fs", "verify_lemma41", "verify_lp", "verify_rdf",
    "verify_reverse_holder", "verify_two_weight_max",
]
