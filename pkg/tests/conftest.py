import csv
import io

import numpy as np
import pytest

from constants import EMOTION_LABELS
from embeddings import EmbedderConfig, _blake_int

HINDI_HEADER = ["id", "text", *EMOTION_LABELS]
ENGLISH_HEADER = ["id", "text", "anger", "fear", "joy", "sadness", "surprise"]

HINDI_ROWS = [
    ["hin_train_0001", "अरे वाह! आज तो मेरी बेटी ने अपने कमरे की ही नह...", "0", "0", "0", "1", "0", "1"],
    ["hin_train_0002", "वह अपने दोस्तों के साथ मूवी देखने गई थी।", "0", "0", "0", "0", "0", "0"],
    ["hin_train_0003", "मेरे खेत में खरपतवार हटाने का काम जारी है, और...", "0", "0", "0", "0", "0", "0"],
]
ENGLISH_ROWS = [
    ["eng_train_0001", "Colorado, middle of nowhere.", "0", "1", "0", "0", "1"],
    ["eng_train_0002", "It was one of my most shameful experiences.", "0", "1", "0", "1", "0"],
    ["eng_train_0003", "After all, I had vegetables coming out my ears...", "0", "0", "0", "0", "0"],
]

# Each keyword pair drives two labels: (anger, disgust), (fear, joy), (sadness, surprise)
SEPARABLE_DIM = 256
SEPARABLE_SPLITS = {"train": 300, "dev": 50, "test": 50}


def csv_text(header, rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def write_csv(path, header, rows):
    path.write_bytes(csv_text(header, rows).encode("utf-8"))
    return path


@pytest.fixture
def hindi_csv(tmp_path):
    return write_csv(tmp_path / "hin_train.csv", HINDI_HEADER, HINDI_ROWS)


@pytest.fixture
def english_csv(tmp_path):
    return write_csv(tmp_path / "eng_train.csv", ENGLISH_HEADER, ENGLISH_ROWS)


@pytest.fixture
def make_split_csv(tmp_path):
    """Writes a CSV of n rows cycling through simple label patterns."""

    def _make(name, n, header=HINDI_HEADER):
        width = len(header) - 2
        rows = [[f"{name}-{i}", f"sample text {i}", *(str((i >> j) & 1) for j in range(width))] for i in range(n)]
        return write_csv(tmp_path / f"{name}.csv", header, rows)

    return _make


def distinct_bucket_tokens(count: int, dim: int = SEPARABLE_DIM, seed: int = 0) -> list[str]:
    """Tokens whose hashing buckets do not collide."""
    tokens, used = [], set()
    k = 0
    while len(tokens) < count:
        token = f"kw{k}"
        bucket = _blake_int(token, seed, b"bucket") % dim
        if bucket not in used:
            used.add(bucket)
            tokens.append(token)
        k += 1
    return tokens


def separable_rows(split: str, n: int, keywords: list[str]) -> list[list[str]]:
    """Row i carries bit pattern i % 8; every split covers all eight patterns."""
    rows = []
    for i in range(n):
        bits = [((i % 8) >> j) & 1 for j in range(3)]
        words = [keywords[2 * j] if bit else keywords[2 * j + 1] for j, bit in enumerate(bits)]
        labels = [str(bit) for bit in bits for _ in range(2)]
        rows.append([f"{split}-{i:04d}", " ".join(words), *labels])
    return rows


@pytest.fixture
def separable_corpus(tmp_path):
    """Linearly separable train/dev/test CSVs under the hashing embedder."""
    keywords = distinct_bucket_tokens(6)
    paths = {}
    for split, n in SEPARABLE_SPLITS.items():
        paths[split] = write_csv(tmp_path / f"{split}.csv", HINDI_HEADER, separable_rows(split, n, keywords))
    return paths


@pytest.fixture
def hash_config():
    return EmbedderConfig(backend="hashing", dim=SEPARABLE_DIM)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
