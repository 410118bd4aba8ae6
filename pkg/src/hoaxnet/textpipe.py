"""Dataset ingestion, vocabulary building, fixed-length integer encoding.

Sequence length follows the mean-plus-two-sigma rule over token counts.
Label convention: 0 = fake, 1 = true. Vocabulary ids 0 and 1 are reserved
for PAD and OOV; real tokens start at 2.
"""

from __future__ import annotations

import csv
import hashlib
import math
import string
from collections import Counter
from dataclasses import dataclass

import numpy as np

PAD_ID = 0
OOV_ID = 1

LABEL_MAP = {"fake": 0, "true": 1}

_STRIP_CHARS = string.punctuation + "‘’“”"


class DatasetError(ValueError):
    """Ingestion failure, carrying the offending row where known."""


@dataclass
class Article:
    id: str
    title: str
    body: str
    label: int  # 0 = fake, 1 = true


class Vocabulary:
    """Dense token->id map; ids 0 (PAD) and 1 (OOV) are reserved."""

    def __init__(self, tokens):
        self._tokens = list(tokens)
        self._ids = {tok: i + 2 for i, tok in enumerate(self._tokens)}
        if len(self._ids) != len(self._tokens):
            raise ValueError("duplicate tokens in vocabulary")

    @classmethod
    def from_token_lists(cls, token_lists, max_size: int = 50_000) -> "Vocabulary":
        """Most-frequent-first over the given token lists; ties break
        lexicographically so construction is deterministic."""
        counts = Counter()
        for tokens in token_lists:
            counts.update(tokens)
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        return cls([tok for tok, _ in ranked[:max_size]])

    def __len__(self) -> int:
        return len(self._tokens) + 2

    def __contains__(self, token: str) -> bool:
        return token in self._ids

    @property
    def tokens(self):
        return tuple(self._tokens)

    def id_of(self, token: str) -> int:
        return self._ids.get(token, OOV_ID)

    def token_of(self, token_id: int) -> str:
        if token_id < 2 or token_id >= len(self):
            raise KeyError(f"no token for reserved or out-of-range id {token_id}")
        return self._tokens[token_id - 2]

    def fingerprint(self) -> str:
        digest = hashlib.sha256("\n".join(self._tokens).encode("utf-8"))
        return digest.hexdigest()

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for tok in self._tokens:
                fh.write(tok + "\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        with open(path, encoding="utf-8") as fh:
            return cls([line.rstrip("\n") for line in fh if line.rstrip("\n")])


def tokenize_basic(text: str) -> list[str]:
    """Lowercase, split on whitespace, strip boundary punctuation.

    Internal punctuation (don't, e.g. hyphens) survives; tokens that are
    all punctuation vanish.
    """
    out = []
    for raw in text.lower().split():
        tok = raw.strip(_STRIP_CHARS)
        if tok:
            out.append(tok)
    return out


def compute_max_len(lengths) -> int:
    """round(mean + 2 * population std), floored at 1."""
    lengths = list(lengths)
    if not lengths:
        raise ValueError("compute_max_len needs at least one length")
    mu = sum(lengths) / len(lengths)
    var = sum((x - mu) ** 2 for x in lengths) / len(lengths)
    return max(1, round(mu + 2 * math.sqrt(var)))


def encode(tokens, vocab: Vocabulary, length: int) -> np.ndarray:
    """Fixed-length id vector: OOV -> 1, head-truncated, zero-padded."""
    ids = np.zeros(length, dtype=np.int32)
    for i, tok in enumerate(tokens[:length]):
        ids[i] = vocab.id_of(tok)
    return ids


def decode(ids, vocab: Vocabulary) -> list[str]:
    """Tokens for the non-pad prefix; inverse of `encode` when no OOV."""
    out = []
    for token_id in ids:
        if token_id == PAD_ID:
            break
        out.append(vocab.token_of(int(token_id)))
    return out


_EXPECTED_HEADER = ["id", "title", "text", "label"]


def load_dataset_csv(path) -> list[Article]:
    """Read a `id,title,text,label` CSV (RFC-4180, UTF-8) into Articles."""
    articles = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        if header != _EXPECTED_HEADER:
            raise DatasetError(
                f"{path}: expected header {','.join(_EXPECTED_HEADER)!r}, "
                f"got {','.join(header)!r}")
        for row_num, row in enumerate(reader, start=1):
            try:
                if len(row) != 4:
                    raise DatasetError(
                        f"row {row_num}: expected 4 columns, got {len(row)}")
                art_id, title, body, label_str = row
                if label_str not in LABEL_MAP:
                    raise DatasetError(
                        f"row {row_num}: unknown label {label_str!r} "
                        f"(expected one of {sorted(LABEL_MAP)})")
                articles.append(Article(art_id, title, body,
                                        LABEL_MAP[label_str]))
            except csv.Error as exc:
                raise DatasetError(f"row {row_num}: malformed CSV ({exc})") from exc
    return articles


def load_embeddings(path, vocab: Vocabulary):
    """Load a whitespace-separated embedding file into a (V, M) matrix.

    One line per token: the token then M reals. An optional first line
    holding just two integers ("V M") is skipped. Vocab tokens missing
    from the file keep zero rows, as do PAD and OOV. Returns the matrix
    and the number of vocab tokens found.
    """
    rows = {}
    dim = None
    with open(path, encoding="utf-8") as fh:
        for line_num, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if line_num == 1 and len(parts) == 2:
                try:
                    int(parts[0]), int(parts[1])
                    continue  # header line
                except ValueError:
                    pass
            token, values = parts[0], parts[1:]
            if dim is None:
                dim = len(values)
                if dim == 0:
                    raise ValueError(f"{path}:{line_num}: no values on line")
            elif len(values) != dim:
                raise ValueError(
                    f"{path}:{line_num}: expected {dim} values, "
                    f"got {len(values)}")
            if token in vocab:
                rows[token] = np.array(values, dtype=np.float32)
    if dim is None:
        raise ValueError(f"{path}: no embedding rows")
    matrix = np.zeros((len(vocab), dim), dtype=np.float32)
    for token, vec in rows.items():
        matrix[vocab.id_of(token)] = vec
    return matrix, len(rows)
