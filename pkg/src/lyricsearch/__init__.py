"""Lyrics search engine and recommender.

Hybrid lexical (BM25) + vector (TF-IDF cosine) retrieval over a song
corpus, with offset-exact snippet highlighting, diversity-aware
recommendations, corpus analytics, and a JSON HTTP API.
"""

__version__ = "0.1.0"
