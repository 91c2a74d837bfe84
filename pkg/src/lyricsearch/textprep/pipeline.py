"""Configurable text preprocessing pipeline.

Stages operate either on text (noise removal, normalization) or on token
streams (lowercasing, stopword removal, stemming, lemmatization). Every
token carries character offsets into the ORIGINAL input string, surviving
all transformations, which is what makes exact snippet highlighting
possible downstream. Text-level stages therefore track a per-character
mapping from transformed positions back to source positions.
"""

from __future__ import annotations

import difflib
import hashlib
import json
import re
import unicodedata
from dataclasses import dataclass, field

from . import porter
from .resources import default_lemmas, default_stopwords

STAGE_NOISE = "noise_removal"
STAGE_NORMALIZE = "normalize"
STAGE_TOKENIZE = "tokenize"
STAGE_SEGMENT = "segment"
STAGE_LOWERCASE = "lowercase"
STAGE_STOPWORDS = "stop_removal"
STAGE_STEM = "stem"
STAGE_LEMMATIZE = "lemmatize"

ALL_STAGES = (
    STAGE_NOISE,
    STAGE_NORMALIZE,
    STAGE_TOKENIZE,
    STAGE_SEGMENT,
    STAGE_LOWERCASE,
    STAGE_STOPWORDS,
    STAGE_STEM,
    STAGE_LEMMATIZE,
)

DEFAULT_STAGES = (
    STAGE_NOISE,
    STAGE_NORMALIZE,
    STAGE_TOKENIZE,
    STAGE_SEGMENT,
    STAGE_LOWERCASE,
    STAGE_STOPWORDS,
    STAGE_STEM,
)

_TEXT_STAGES = frozenset({STAGE_NOISE, STAGE_NORMALIZE})
_TOKEN_STAGES = frozenset(
    {STAGE_SEGMENT, STAGE_LOWERCASE, STAGE_STOPWORDS, STAGE_STEM, STAGE_LEMMATIZE}
)

# Noise patterns stripped wholesale: HTML tags and bracketed section
# annotations like "[Chorus]" or "[Verse 2]" common in scraped lyrics.
DEFAULT_NOISE_PATTERNS = (r"<[^>]+>", r"\[[^\]]*\]")

_TOKEN_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)?")
_SPACE_RUN_RE = re.compile(r"  +")

_QUOTE_FOLD = {"‘": "'", "’": "'", "“": '"', "”": '"'}


class ConfigError(ValueError):
    """Raised for pipeline configurations that violate stage constraints."""


@dataclass(frozen=True, slots=True)
class Token:
    """One token: current surface plus offsets into the original text."""

    surface: str
    start: int
    end: int
    position: int


@dataclass(frozen=True)
class TokenStream:
    tokens: tuple[Token, ...]
    segments: tuple[tuple[int, int], ...]

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def to_dict(self) -> dict:
        return {
            "tokens": [[t.surface, t.start, t.end, t.position] for t in self.tokens],
            "segments": [list(s) for s in self.segments],
        }


@dataclass
class PipelineConfig:
    """Ordered stage selection plus the resources the stages need."""

    stages: tuple[str, ...] = DEFAULT_STAGES
    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    lemmas: dict[str, str] = field(default_factory=dict)
    noise_patterns: tuple[str, ...] = DEFAULT_NOISE_PATTERNS

    def __post_init__(self) -> None:
        self.stages = tuple(self.stages)
        self.stopwords = frozenset(self.stopwords)
        self.noise_patterns = tuple(self.noise_patterns)

    def validate(self) -> None:
        unknown = [s for s in self.stages if s not in ALL_STAGES]
        if unknown:
            raise ConfigError(f"unknown stages: {unknown}")
        if len(set(self.stages)) != len(self.stages):
            raise ConfigError("duplicate stages in pipeline")
        if STAGE_STEM in self.stages and STAGE_LEMMATIZE in self.stages:
            raise ConfigError("stem and lemmatize are mutually exclusive")
        token_stages = [s for s in self.stages if s in _TOKEN_STAGES]
        if STAGE_TOKENIZE not in self.stages:
            if token_stages:
                raise ConfigError("token-level stages require the tokenize stage")
            raise ConfigError("a pipeline must include the tokenize stage")
        tok_at = self.stages.index(STAGE_TOKENIZE)
        for s in self.stages:
            at = self.stages.index(s)
            if s in _TEXT_STAGES and at > tok_at:
                raise ConfigError(f"text stage {s!r} must precede tokenize")
            if s in _TOKEN_STAGES and at < tok_at:
                raise ConfigError(f"token stage {s!r} must follow tokenize")

    def to_dict(self) -> dict:
        return {
            "stages": list(self.stages),
            "stopwords": sorted(self.stopwords),
            "lemmas": {k: self.lemmas[k] for k in sorted(self.lemmas)},
            "noise_patterns": list(self.noise_patterns),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        return cls(
            stages=tuple(data.get("stages", DEFAULT_STAGES)),
            stopwords=frozenset(data.get("stopwords", [])),
            lemmas=dict(data.get("lemmas", {})),
            noise_patterns=tuple(data.get("noise_patterns", DEFAULT_NOISE_PATTERNS)),
        )

    def fingerprint(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def default_config() -> PipelineConfig:
    return PipelineConfig(
        stages=DEFAULT_STAGES,
        stopwords=default_stopwords(),
        lemmas={},
        noise_patterns=DEFAULT_NOISE_PATTERNS,
    )


def lemmatizing_config() -> PipelineConfig:
    """Default stages with the shipped lemma table in place of stemming."""
    stages = tuple(
        STAGE_LEMMATIZE if s == STAGE_STEM else s for s in DEFAULT_STAGES
    )
    return PipelineConfig(stages=stages, lemmas=default_lemmas())


class _MappedText:
    """A transformed string plus per-character source spans.

    For output character i, the half-open source range is
    [src_start[i], src_end[i]); multi-character expansions share one span.
    src arrays of None mean the text is untransformed (identity mapping),
    which keeps the common clean-text case allocation free.
    """

    __slots__ = ("text", "src_start", "src_end")

    def __init__(
        self,
        text: str,
        src_start: list[int] | None = None,
        src_end: list[int] | None = None,
    ):
        self.text = text
        self.src_start = src_start
        self.src_end = src_end

    @classmethod
    def identity(cls, text: str) -> "_MappedText":
        return cls(text)

    def materialized(self) -> tuple[list[int], list[int]]:
        if self.src_start is None:
            return list(range(len(self.text))), list(range(1, len(self.text) + 1))
        return self.src_start, self.src_end

    def span(self, lo: int, hi: int) -> tuple[int, int]:
        """Map a half-open output span back to a source span."""
        if self.src_start is None:
            return (lo, hi) if lo < hi else (lo, lo)
        if lo >= hi:
            at = self.src_start[lo] if lo < len(self.src_start) else (
                self.src_end[-1] if self.src_end else 0
            )
            return (at, at)
        return (self.src_start[lo], self.src_end[hi - 1])


def _rebuild(pieces: list[tuple[str, int, int]]) -> _MappedText:
    """Assemble a new _MappedText from (text, src_start, src_end) pieces."""
    chars: list[str] = []
    starts: list[int] = []
    ends: list[int] = []
    for text, s, e in pieces:
        for ch in text:
            chars.append(ch)
        if len(text) == 1:
            starts.append(s)
            ends.append(e)
        else:
            starts.extend([s] * len(text))
            ends.extend([e] * len(text))
    return _MappedText("".join(chars), starts, ends)


_CONTROL_RE = re.compile(r"[\t\v\f]|[\x00-\x08\x0e-\x1f\x7f-\x9f]|  ")


def _delete_spans(mt: _MappedText, pattern: re.Pattern) -> _MappedText:
    if not pattern.search(mt.text):
        return mt
    src_start, src_end = mt.materialized()
    out_chars: list[str] = []
    out_s: list[int] = []
    out_e: list[int] = []
    last = 0
    for m in pattern.finditer(mt.text):
        for i in range(last, m.start()):
            out_chars.append(mt.text[i])
            out_s.append(src_start[i])
            out_e.append(src_end[i])
        last = m.end()
    for i in range(last, len(mt.text)):
        out_chars.append(mt.text[i])
        out_s.append(src_start[i])
        out_e.append(src_end[i])
    return _MappedText("".join(out_chars), out_s, out_e)


def _noise_mapped(mt: _MappedText, patterns: tuple[str, ...]) -> _MappedText:
    for pat in patterns:
        mt = _delete_spans(mt, re.compile(pat))
    if not _CONTROL_RE.search(mt.text):
        return mt
    # drop control characters except line breaks; tab-like whitespace
    # becomes a plain space so word boundaries survive
    src_start, src_end = mt.materialized()
    out_chars: list[str] = []
    out_s: list[int] = []
    out_e: list[int] = []
    for i, ch in enumerate(mt.text):
        if ch in "\t\v\f":
            ch = " "
        elif ch not in "\n\r" and unicodedata.category(ch) == "Cc":
            continue
        out_chars.append(ch)
        out_s.append(src_start[i])
        out_e.append(src_end[i])
    # collapse space runs, keeping the first space's source position
    text = "".join(out_chars)
    keep_chars: list[str] = []
    keep_s: list[int] = []
    keep_e: list[int] = []
    prev_space = False
    for i, ch in enumerate(text):
        if ch == " " and prev_space:
            continue
        prev_space = ch == " "
        keep_chars.append(ch)
        keep_s.append(out_s[i])
        keep_e.append(out_e[i])
    return _MappedText("".join(keep_chars), keep_s, keep_e)


def _nfc_mapped(mt: _MappedText) -> _MappedText:
    text = mt.text
    if unicodedata.is_normalized("NFC", text):
        return mt
    full = unicodedata.normalize("NFC", text)
    src_start, src_end = mt.materialized()
    mt = _MappedText(text, src_start, src_end)
    # normalize chunk-wise (base char + trailing combining marks) so the
    # source mapping stays tight; verified against full NFC below
    pieces: list[tuple[str, int, int]] = []
    i, n = 0, len(text)
    while i < n:
        j = i + 1
        while j < n and unicodedata.combining(text[j]) > 0:
            j += 1
        chunk = unicodedata.normalize("NFC", text[i:j])
        pieces.append((chunk, src_start[i], src_end[j - 1]))
        i = j
    cand = _rebuild(pieces)
    if cand.text == full:
        return cand
    # exotic composition across chunk boundaries (e.g. Hangul jamo):
    # realign against the fully normalized string
    pieces = []
    matcher = difflib.SequenceMatcher(a=text, b=full, autojunk=False)
    for op, a0, a1, b0, b1 in matcher.get_opcodes():
        if op == "equal":
            for k in range(b1 - b0):
                pieces.append((full[b0 + k], src_start[a0 + k], src_end[a0 + k]))
        elif op in ("replace", "insert"):
            s, e = mt.span(a0, max(a0, a1))
            pieces.append((full[b0:b1], s, e))
        # 'delete': source chars with no output
    return _rebuild(pieces)


_NEEDS_NORMALIZE_RE = re.compile("[\r‘’“”]")


def _normalize_mapped(mt: _MappedText) -> _MappedText:
    if not _NEEDS_NORMALIZE_RE.search(mt.text):
        return _nfc_mapped(mt)
    src_start, src_end = mt.materialized()
    out_chars: list[str] = []
    out_s: list[int] = []
    out_e: list[int] = []
    i, n = 0, len(mt.text)
    while i < n:
        ch = mt.text[i]
        if ch == "\r":
            if i + 1 < n and mt.text[i + 1] == "\n":
                out_chars.append("\n")
                out_s.append(src_start[i])
                out_e.append(src_end[i + 1])
                i += 2
                continue
            ch = "\n"
        else:
            ch = _QUOTE_FOLD.get(ch, ch)
        out_chars.append(ch)
        out_s.append(src_start[i])
        out_e.append(src_end[i])
        i += 1
    return _nfc_mapped(_MappedText("".join(out_chars), out_s, out_e))


def remove_noise(raw: str, patterns: tuple[str, ...] = DEFAULT_NOISE_PATTERNS) -> str:
    """Strip markup, bracketed annotations, control chars, and space runs."""
    return _noise_mapped(_MappedText.identity(raw), patterns).text


def normalize(text: str) -> str:
    """Fold to NFC, straighten curly quotes, unify newlines to LF."""
    return _normalize_mapped(_MappedText.identity(text)).text


def _tokenize_mapped(mt: _MappedText) -> TokenStream:
    tokens = []
    for pos, m in enumerate(_TOKEN_RE.finditer(mt.text)):
        start, end = mt.span(m.start(), m.end())
        tokens.append(Token(m.group(), start, end, pos))
    whole = mt.span(0, len(mt.text))
    return TokenStream(tuple(tokens), (whole,) if mt.text else ())


def _segment_mapped(stream: TokenStream, mt: _MappedText) -> TokenStream:
    segments = []
    lo = 0
    text = mt.text
    while lo <= len(text):
        hi = text.find("\n", lo)
        if hi == -1:
            hi = len(text)
            segments.append(mt.span(lo, hi))
            break
        segments.append(mt.span(lo, hi))
        lo = hi + 1
    return TokenStream(stream.tokens, tuple(segments))


def tokenize(text: str) -> TokenStream:
    """Split into letter/digit runs (one internal apostrophe allowed)."""
    return _tokenize_mapped(_MappedText.identity(text))


def lowercase(stream: TokenStream) -> TokenStream:
    tokens = tuple(
        Token(t.surface.lower(), t.start, t.end, t.position) for t in stream.tokens
    )
    return TokenStream(tokens, stream.segments)


def remove_stopwords(stream: TokenStream, stopwords: frozenset[str]) -> TokenStream:
    # positions keep their gaps so phrase logic still sees adjacency
    tokens = tuple(t for t in stream.tokens if t.surface not in stopwords)
    return TokenStream(tokens, stream.segments)


def stem(stream: TokenStream) -> TokenStream:
    tokens = tuple(
        Token(porter.stem(t.surface), t.start, t.end, t.position)
        for t in stream.tokens
    )
    return TokenStream(tokens, stream.segments)


def lemmatize(stream: TokenStream, lemmas: dict[str, str]) -> TokenStream:
    tokens = tuple(
        Token(lemmas.get(t.surface, t.surface), t.start, t.end, t.position)
        for t in stream.tokens
    )
    return TokenStream(tokens, stream.segments)


def run_pipeline(raw: str, config: PipelineConfig) -> TokenStream:
    """Apply the configured stages in order; offsets reference ``raw``."""
    config.validate()
    mt = _MappedText.identity(raw)
    stream: TokenStream | None = None
    for stage in config.stages:
        if stage == STAGE_NOISE:
            mt = _noise_mapped(mt, config.noise_patterns)
        elif stage == STAGE_NORMALIZE:
            mt = _normalize_mapped(mt)
        elif stage == STAGE_TOKENIZE:
            stream = _tokenize_mapped(mt)
        elif stage == STAGE_SEGMENT:
            stream = _segment_mapped(stream, mt)
        elif stage == STAGE_LOWERCASE:
            stream = lowercase(stream)
        elif stage == STAGE_STOPWORDS:
            stream = remove_stopwords(stream, config.stopwords)
        elif stage == STAGE_STEM:
            stream = stem(stream)
        elif stage == STAGE_LEMMATIZE:
            stream = lemmatize(stream, config.lemmas)
    return stream


def process_query_text(raw: str, config: PipelineConfig) -> list[str]:
    """Run ``raw`` through the pipeline and return the term surfaces."""
    return run_pipeline(raw, config).surfaces()
