"""Lexical retrieval engine for precedent-case search over long court cases.

Case collections are segmented into passages, indexed into a two-field
inverted index (body terms and statute-section terms), scored with BM25 or
Jelinek-Mercer language models, and fused back to case level with boosted
Reciprocal Rank Fusion. Includes an evaluation harness (micro-averaged
P/R/F1 over rank cutoffs) and a random-search hyperparameter tuner.
"""

__version__ = "0.1.0"
