# --- embeddings.py ---
"""
Text-to-vector backends and the normalization pipeline applied on top of them.

Backends:
    hashing      deterministic signed feature hashing (no model required)
    precomputed  vectors read from an embeddings exchange file
    remote       JSON-over-HTTP client for an external encoder service

Normalization is L2 per row followed by a z-score scaler fitted on training rows.
"""

import hashlib
import json
import logging
import urllib.error
import urllib.request
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from constants import (
    DEFAULT_ENCODER_DIM,
    DEFAULT_HASH_DIM,
    DEFAULT_HASH_SEED,
    DEFAULT_MAX_TOKENS,
    EMBEDDER_BACKENDS,
    FLOAT_SIG_DIGITS,
    REMOTE_BATCH_SIZE,
    REMOTE_EMBED_PATH,
    REMOTE_TIMEOUT,
)
from emotion_data import Dataset
from errors import (
    ConfigError,
    DimMismatch,
    DuplicateKey,
    EmptyText,
    IoError,
    MissingEmbedding,
    NetworkError,
    ParseError,
    RemoteError,
    TooFewRows,
    ZeroVector,
)
from utils import safe_read_file, safe_write_file

logger = logging.getLogger(__name__)

# A fixed-length float64 row; finite entries only.
EmbeddingVector = np.ndarray


def as_vector(values) -> EmbeddingVector:
    vec = np.asarray(values, dtype=np.float64)
    if vec.ndim != 1:
        raise DimMismatch(f"expected a 1-D vector, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise DimMismatch("embedding contains NaN or Inf")
    return vec


# --- Config ---
@dataclass(frozen=True)
class EmbedderConfig:
    backend: str = "hashing"
    dim: int | None = None  # None picks the backend default
    max_tokens: int = DEFAULT_MAX_TOKENS
    endpoint: str | None = None
    seed: int = DEFAULT_HASH_SEED
    timeout: float = REMOTE_TIMEOUT
    batch_size: int = REMOTE_BATCH_SIZE

    def __post_init__(self):
        if self.backend not in EMBEDDER_BACKENDS:
            raise ConfigError(f"unknown embedder backend '{self.backend}'")
        if self.dim is None:
            object.__setattr__(self, "dim", DEFAULT_HASH_DIM if self.backend == "hashing" else DEFAULT_ENCODER_DIM)
        if self.dim < 2:
            raise ConfigError(f"dim must be >= 2, got {self.dim}")
        if self.max_tokens < 1:
            raise ConfigError(f"max_tokens must be >= 1, got {self.max_tokens}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.backend == "remote" and not self.endpoint:
            raise ConfigError("remote backend requires an endpoint")

    @property
    def fingerprint(self) -> str:
        """Identifies the text-to-vector mapping; stored in models and stores."""
        if self.backend == "hashing":
            return f"hashing:dim={self.dim}:max_tokens={self.max_tokens}:seed={self.seed}"
        if self.backend == "remote":
            return f"remote:dim={self.dim}:max_tokens={self.max_tokens}"
        return f"precomputed:dim={self.dim}"


def config_from_fingerprint(fingerprint: str, endpoint: str | None = None) -> EmbedderConfig:
    """Rebuilds the embedder config a model was trained with."""
    backend, _, rest = fingerprint.partition(":")
    params = {}
    for part in rest.split(":") if rest else []:
        name, _, value = part.partition("=")
        params[name] = value
    try:
        if backend == "hashing":
            return EmbedderConfig(
                backend="hashing",
                dim=int(params["dim"]),
                max_tokens=int(params["max_tokens"]),
                seed=int(params["seed"]),
            )
        if backend == "remote":
            if not endpoint:
                raise ConfigError("model was trained on remote embeddings; pass --endpoint")
            return EmbedderConfig(
                backend="remote", dim=int(params["dim"]), max_tokens=int(params["max_tokens"]), endpoint=endpoint
            )
    except (KeyError, ValueError) as e:
        raise ConfigError(f"malformed embedder fingerprint '{fingerprint}'") from e
    raise ConfigError(f"embedder '{fingerprint}' cannot embed new text")


# --- Normalization ---
def l2_normalize(v) -> EmbeddingVector:
    v = np.asarray(v, dtype=np.float64)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ZeroVector("cannot L2-normalize an all-zero vector")
    return v / norm


def l2_normalize_rows(matrix) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        row = int(np.flatnonzero(norms[:, 0] == 0.0)[0])
        raise ZeroVector(f"row {row} is an all-zero vector")
    return matrix / norms


@dataclass(frozen=True)
class ScalerParams:
    mean: np.ndarray
    std: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.mean.shape[0])


def _as_matrix(rows) -> np.ndarray:
    if isinstance(rows, np.ndarray):
        matrix = rows.astype(np.float64, copy=False)
    else:
        rows = [np.asarray(r, dtype=np.float64) for r in rows]
        if rows and len({r.shape for r in rows}) > 1:
            raise DimMismatch(f"rows have differing shapes: {sorted({r.shape for r in rows})}")
        matrix = np.stack(rows) if rows else np.empty((0, 0))
    if matrix.ndim != 2:
        raise DimMismatch(f"expected a 2-D matrix, got shape {matrix.shape}")
    return matrix


def fit_scaler(matrix) -> ScalerParams:
    """Per-dimension mean and population std; constant columns get std exactly 0."""
    X = _as_matrix(matrix)
    if X.shape[0] < 2:
        raise TooFewRows(f"fit_scaler needs at least 2 rows, got {X.shape[0]}")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    constant = X.max(axis=0) == X.min(axis=0)
    mean[constant] = X[0, constant]
    std[constant] = 0.0
    return ScalerParams(mean=mean, std=std)


def transform_scaler(params: ScalerParams, matrix) -> np.ndarray:
    X = _as_matrix(matrix)
    if X.shape[1] != params.dim:
        raise DimMismatch(f"matrix has dim {X.shape[1]}, scaler expects {params.dim}")
    centered = X - params.mean
    out = np.zeros_like(centered)
    np.divide(centered, params.std, out=out, where=params.std > 0)
    return out


# --- Hashing Backend ---
def _blake_int(token: str, seed: int, person: bytes) -> int:
    digest = hashlib.blake2b(
        token.encode("utf-8"),
        digest_size=8,
        key=str(seed).encode("ascii"),
        person=person,
    ).digest()
    return int.from_bytes(digest, "little", signed=False)


def embed_hashing(text: str, config: EmbedderConfig) -> EmbeddingVector:
    """
    Signed feature hashing of whitespace tokens, truncated to max_tokens, then L2-normalized.

    Uses BLAKE2b rather than hash() so vectors are identical across processes
    and platforms.
    """
    tokens = text.split()[: config.max_tokens]
    if not tokens:
        raise EmptyText("cannot embed empty text")
    vec = np.zeros(config.dim, dtype=np.float64)
    for tok in tokens:
        bucket = _blake_int(tok, config.seed, b"bucket") % config.dim
        sign = 1.0 if _blake_int(tok, config.seed, b"sign") & 1 == 0 else -1.0
        vec[bucket] += sign
    if not vec.any():
        # Every feature cancelled out
        vec[_blake_int(" ".join(tokens), config.seed, b"bucket") % config.dim] = 1.0
    return l2_normalize(vec)


# --- Remote Backend ---
def _post_json(url: str, payload: dict, timeout: float) -> dict:
    body = json.dumps(payload).encode("utf-8")
    request = urllib.request.Request(
        url, data=body, headers={"Content-Type": "application/json"}, method="POST"
    )
    try:
        with urllib.request.urlopen(request, timeout=timeout) as response:
            raw = response.read()
    except urllib.error.HTTPError as e:
        message = e.read().decode("utf-8", errors="replace").strip() or str(e.reason)
        raise RemoteError(e.code, message) from e
    except (urllib.error.URLError, TimeoutError, ConnectionError) as e:
        raise NetworkError(f"could not reach {url}: {e}") from e
    try:
        return json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise DimMismatch(f"malformed response from {url}: {e}") from e


def embed_remote(texts: Sequence[str], config: EmbedderConfig) -> list[EmbeddingVector]:
    """
    POSTs texts to `<endpoint>/embed` in batches; vectors come back in request order.

    Request body: {"texts": [...], "max_tokens": N}
    Response body: {"dim": D, "vectors": [[...], ...]}
    """
    if config.backend != "remote" or not config.endpoint:
        raise ConfigError("embed_remote requires a remote backend with an endpoint")
    for i, text in enumerate(texts):
        if not text.strip():
            raise EmptyText(f"text {i} is empty")
    url = config.endpoint.rstrip("/") + REMOTE_EMBED_PATH
    vectors = []
    for start in range(0, len(texts), config.batch_size):
        batch = list(texts[start : start + config.batch_size])
        logger.debug("POST %s with %d texts", url, len(batch))
        reply = _post_json(url, {"texts": batch, "max_tokens": config.max_tokens}, config.timeout)
        raw_vectors = reply.get("vectors") if isinstance(reply, dict) else None
        if not isinstance(raw_vectors, list) or len(raw_vectors) != len(batch):
            raise DimMismatch(f"expected {len(batch)} vectors from {url}")
        if reply.get("dim", config.dim) != config.dim:
            raise DimMismatch(f"server reports dim {reply.get('dim')}, expected {config.dim}")
        for raw in raw_vectors:
            try:
                vec = as_vector(raw)
            except (TypeError, ValueError) as e:
                raise DimMismatch(f"non-numeric vector from {url}") from e
            if vec.shape[0] != config.dim:
                raise DimMismatch(f"vector of length {vec.shape[0]}, expected {config.dim}")
            vectors.append(vec)
    return vectors


# --- Embedders ---
class Embedder:
    """Base for backends that embed free text."""

    def __init__(self, config: EmbedderConfig):
        self.config = config

    @property
    def fingerprint(self) -> str:
        return self.config.fingerprint

    @property
    def dim(self) -> int:
        return self.config.dim

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        raise NotImplementedError


class HashingEmbedder(Embedder):
    def embed(self, texts: Sequence[str]) -> np.ndarray:
        return np.stack([embed_hashing(t, self.config) for t in texts]) if texts else np.empty((0, self.dim))


class RemoteEmbedder(Embedder):
    def embed(self, texts: Sequence[str]) -> np.ndarray:
        return np.stack(embed_remote(texts, self.config)) if texts else np.empty((0, self.dim))


def make_embedder(config: EmbedderConfig) -> Embedder:
    if config.backend == "hashing":
        return HashingEmbedder(config)
    if config.backend == "remote":
        return RemoteEmbedder(config)
    raise ConfigError("precomputed embeddings are read with load_store, not embedded")


# --- Store ---
@dataclass
class EmbeddingStore:
    dim: int
    entries: dict[str, EmbeddingVector] = field(default_factory=dict)
    fingerprint: str = ""

    def __post_init__(self):
        if not self.fingerprint:
            self.fingerprint = f"precomputed:dim={self.dim}"

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def __getitem__(self, key: str) -> EmbeddingVector:
        try:
            return self.entries[key]
        except KeyError:
            raise MissingEmbedding(key) from None

    def add(self, key: str, vector) -> None:
        if key in self.entries:
            raise DuplicateKey(key)
        vec = as_vector(vector)
        if vec.shape[0] != self.dim:
            raise DimMismatch(f"vector for '{key}' has length {vec.shape[0]}, store dim is {self.dim}")
        self.entries[key] = vec

    def matrix(self, keys: Iterable[str]) -> np.ndarray:
        rows = [self[k] for k in keys]
        return np.stack(rows) if rows else np.empty((0, self.dim))


def build_store(keys: Sequence[str], vectors, fingerprint: str = "") -> EmbeddingStore:
    vectors = list(vectors)
    dim = int(np.asarray(vectors[0]).shape[0]) if vectors else 0
    store = EmbeddingStore(dim=dim, fingerprint=fingerprint)
    for key, vec in zip(keys, vectors, strict=True):
        store.add(key, vec)
    return store


def store_to_text(store: EmbeddingStore) -> str:
    lines = [f"dim={store.dim} count={len(store)} embedder={store.fingerprint}"]
    for key, vec in store.entries.items():
        if "\t" in key or "\n" in key or "\r" in key:
            raise ParseError(len(lines), "key", f"key {key!r} contains a tab or newline")
        lines.append("\t".join([key, *(format(float(v), f".{FLOAT_SIG_DIGITS}g") for v in vec)]))
    return "\n".join(lines) + "\n"


def save_store(store: EmbeddingStore, path: Path) -> None:
    ok, error = safe_write_file(Path(path), store_to_text(store))
    if not ok:
        raise IoError(error)


def load_store(path: Path) -> EmbeddingStore:
    """Reads an embeddings exchange file (`dim=<D> count=<N>` header, then key<TAB>floats rows)."""
    content, error = safe_read_file(Path(path))
    if error:
        raise IoError(error)
    lines = content.splitlines()
    if not lines:
        raise ParseError(1, "header", f"{path} is empty")
    header = {}
    for token in lines[0].split():
        name, sep, value = token.partition("=")
        if sep:
            header[name] = value
    try:
        dim = int(header["dim"])
        count = int(header["count"])
    except (KeyError, ValueError):
        raise ParseError(1, "header", f"bad header line: {lines[0]!r}") from None

    store = EmbeddingStore(dim=dim, fingerprint=header.get("embedder", ""))
    rows = [line for line in lines[1:] if line.strip()]
    for line_no, line in enumerate(rows, start=2):
        key, *cells = line.split("\t")
        if len(cells) != dim:
            raise DimMismatch(f"{path} line {line_no}: {len(cells)} values, header declares dim={dim}")
        try:
            values = [float(c) for c in cells]
        except ValueError:
            raise ParseError(line_no, "value", f"non-numeric value in row '{key}'") from None
        try:
            store.add(key, values)
        except DimMismatch as e:
            raise ParseError(line_no, "value", str(e)) from e
    if len(store) != count:
        raise ParseError(len(lines), "count", f"header declares {count} rows, found {len(store)}")
    return store


# --- Dataset Join ---
@dataclass(frozen=True)
class EmbeddedSplit:
    """A dataset's label matrix aligned row-for-row with its embeddings."""

    keys: tuple[str, ...]
    X: np.ndarray  # N x D
    Y: np.ndarray  # N x L, int
    fingerprint: str

    def __len__(self) -> int:
        return len(self.keys)


def attach_embeddings(dataset: Dataset, source) -> EmbeddedSplit:
    """
    Joins a dataset with vectors from an EmbeddingStore (by key) or an embedder (by text).

    Raises:
        MissingEmbedding: the store has no vector for one of the sample keys.
    """
    if isinstance(source, EmbeddingStore):
        X = source.matrix(dataset.keys)
    else:
        X = source.embed(dataset.texts)
    Y = np.asarray(dataset.label_matrix(), dtype=np.int64).reshape(len(dataset), len(dataset.schema))
    return EmbeddedSplit(keys=tuple(dataset.keys), X=X, Y=Y, fingerprint=source.fingerprint)
