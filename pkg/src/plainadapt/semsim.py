"""BERTScore-style semantic similarity: greedy max-cosine token matching.

Embeddings come from a pluggable provider. The default offline provider
hashes character trigrams into a fixed 256-dim vector per token, which keeps
the whole suite runnable with no network or model weights; it is not meant
to reproduce published BERTScore numbers. An HTTP provider speaks the
`POST {model, input} -> {vectors}` wire contract for real embedding models.
"""

import hashlib
import os
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np
import requests

from .errors import ProtocolError, TransportError, ValidationError
from .readability import tokenize_words

EMBED_DIM = 256


@dataclass(frozen=True)
class TokenEmbeddings:
    tokens: tuple[str, ...]
    vectors: np.ndarray  # shape (len(tokens), dim), rows L2-normalized

    def __post_init__(self):
        if self.vectors.shape[0] != len(self.tokens):
            raise ProtocolError(
                f"{self.vectors.shape[0]} vectors for {len(self.tokens)} tokens"
            )
        if np.isnan(self.vectors).any():
            raise ProtocolError("NaN in embedding vectors")


@dataclass(frozen=True)
class SemSimScore:
    precision: float
    recall: float
    f1: float


class EmbeddingProvider(Protocol):
    def embed_tokens(self, tokens: Sequence[str]) -> np.ndarray: ...


class HashEmbedder:
    """Deterministic fallback: character trigrams hashed into EMBED_DIM bins."""

    def embed_tokens(self, tokens: Sequence[str]) -> np.ndarray:
        out = np.zeros((len(tokens), EMBED_DIM))
        for i, tok in enumerate(tokens):
            padded = f"#{tok.lower()}#"
            for j in range(len(padded) - 2):
                tri = padded[j : j + 3]
                h = hashlib.blake2s(tri.encode("utf-8"), digest_size=4).digest()
                out[i, int.from_bytes(h, "little") % EMBED_DIM] += 1.0
        return out


class HttpEmbedder:
    """Embedding provider over the JSON wire contract; key via env var."""

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key_env: str = "EMBEDDING_API_KEY",
        timeout: float = 30.0,
        max_attempts: int = 3,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = os.environ.get(api_key_env, "")
        self.timeout = timeout
        self.max_attempts = max_attempts

    def embed_tokens(self, tokens: Sequence[str]) -> np.ndarray:
        last_exc: Exception | None = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                resp = requests.post(
                    f"{self.base_url}/embeddings",
                    json={"model": self.model, "input": list(tokens)},
                    headers={"Authorization": f"Bearer {self.api_key}"},
                    timeout=self.timeout,
                )
                resp.raise_for_status()
                body = resp.json()
                break
            except (requests.ConnectionError, requests.Timeout, requests.HTTPError) as exc:
                last_exc = exc
        else:
            raise TransportError(
                f"embedding provider failed after {self.max_attempts} attempts: {last_exc}",
                attempts=self.max_attempts,
            )
        if "vectors" not in body:
            raise ProtocolError("embedding response missing 'vectors'")
        return np.asarray(body["vectors"], dtype=float)


def _normalize_rows(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return vectors / norms


def embed(text: str, provider: EmbeddingProvider) -> TokenEmbeddings:
    """Tokenize, embed, and L2-normalize; empty text yields empty embeddings."""
    tokens = tuple(tokenize_words(text))
    if not tokens:
        return TokenEmbeddings(tokens=(), vectors=np.zeros((0, 1)))
    raw = np.asarray(provider.embed_tokens(tokens), dtype=float)
    if raw.ndim != 2 or raw.shape[0] != len(tokens):
        raise ProtocolError(
            f"provider returned shape {raw.shape} for {len(tokens)} tokens"
        )
    return TokenEmbeddings(tokens=tokens, vectors=_normalize_rows(raw))


def greedy_match(candidate: TokenEmbeddings, reference: TokenEmbeddings) -> SemSimScore:
    """Precision: mean over candidate tokens of the best cosine in the
    reference; recall symmetric; f1 harmonic mean."""
    if len(candidate.tokens) == 0 or len(reference.tokens) == 0:
        raise ValidationError("greedy match undefined for empty token sequences")
    sims = candidate.vectors @ reference.vectors.T
    precision = float(sims.max(axis=1).mean())
    recall = float(sims.max(axis=0).mean())
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return SemSimScore(precision=precision, recall=recall, f1=f1)


def semsim(
    candidate: str, references: Sequence[str], provider: EmbeddingProvider
) -> SemSimScore:
    """Score against the best reference (maximum f1)."""
    if not references:
        raise ValidationError("semsim needs at least one reference")
    cand = embed(candidate, provider)
    best: SemSimScore | None = None
    for ref_text in references:
        score = greedy_match(cand, embed(ref_text, provider))
        if best is None or score.f1 > best.f1:
            best = score
    assert best is not None
    return best
