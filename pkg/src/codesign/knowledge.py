"""Lexical retrieval over safety-practice documentation.

A deterministic TF-IDF style index stands in for a vector store; the
retrieval surface is small enough to swap an embedding backend in later
without touching callers.
"""

from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path

log = logging.getLogger(__name__)

MAX_CHUNK_CHARS = 1000
INDEX_VERSION = 1

_TOKEN = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class DocChunk:
    doc_id: str
    title: str
    text: str
    source_path: str

    def to_json_dict(self) -> dict:
        return {"doc_id": self.doc_id, "title": self.title, "text": self.text}


class KnowledgeIndex:
    """Inverted index with term frequencies over document chunks."""

    def __init__(self, chunks: list[DocChunk]):
        self.chunks = list(chunks)
        self._tf: list[dict[str, int]] = []
        self._df: dict[str, int] = {}
        for chunk in self.chunks:
            counts: dict[str, int] = {}
            for token in tokenize(chunk.text) + tokenize(chunk.title):
                counts[token] = counts.get(token, 0) + 1
            self._tf.append(counts)
            for token in counts:
                self._df[token] = self._df.get(token, 0) + 1

    def __len__(self) -> int:
        return len(self.chunks)

    def idf(self, term: str) -> float:
        n = len(self.chunks)
        return math.log((n + 1) / (self._df.get(term, 0) + 1)) + 1.0

    def to_json(self) -> str:
        payload = {
            "version": INDEX_VERSION,
            "chunks": [
                {
                    "doc_id": c.doc_id,
                    "title": c.title,
                    "text": c.text,
                    "source_path": c.source_path,
                }
                for c in self.chunks
            ],
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def from_json(cls, text: str) -> "KnowledgeIndex":
        payload = json.loads(text)
        if payload.get("version") != INDEX_VERSION:
            raise ValueError(f"unsupported index version {payload.get('version')!r}")
        chunks = [
            DocChunk(c["doc_id"], c["title"], c["text"], c["source_path"])
            for c in payload["chunks"]
        ]
        return cls(chunks)

    @classmethod
    def load(cls, path: str | Path) -> "KnowledgeIndex":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def build_index(corpus_dir: str | Path) -> KnowledgeIndex:
    """Index every .md/.txt file under the corpus directory.

    Chunking is deterministic: paragraphs are packed greedily into chunks of
    at most MAX_CHUNK_CHARS characters; oversized paragraphs are hard-split.
    """
    corpus = Path(corpus_dir)
    if not corpus.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {corpus}")
    files = sorted(
        p for p in corpus.rglob("*") if p.is_file() and p.suffix in (".md", ".txt")
    )
    chunks: list[DocChunk] = []
    for path in files:
        rel = path.relative_to(corpus).as_posix()
        text = path.read_text(encoding="utf-8")
        title = _doc_title(text, path)
        for i, piece in enumerate(_chunk_text(text)):
            chunks.append(DocChunk(f"{rel}#{i}", title, piece, str(path)))
    if not chunks:
        log.warning("empty corpus at %s: queries will return no hits", corpus)
    return KnowledgeIndex(chunks)


def _doc_title(text: str, path: Path) -> str:
    for line in text.splitlines():
        if line.startswith("#"):
            return line.lstrip("#").strip()
    return path.stem


def _chunk_text(text: str) -> list[str]:
    paragraphs = [p.strip() for p in re.split(r"\n\s*\n", text) if p.strip()]
    pieces: list[str] = []
    for para in paragraphs:
        while len(para) > MAX_CHUNK_CHARS:
            cut = para.rfind(" ", 0, MAX_CHUNK_CHARS)
            if cut <= 0:
                cut = MAX_CHUNK_CHARS
            pieces.append(para[:cut].strip())
            para = para[cut:].strip()
        if para:
            pieces.append(para)

    chunks: list[str] = []
    current: list[str] = []
    size = 0
    for piece in pieces:
        extra = len(piece) + (2 if current else 0)
        if current and size + extra > MAX_CHUNK_CHARS:
            chunks.append("\n\n".join(current))
            current, size = [], 0
        current.append(piece)
        size += len(piece) + (2 if len(current) > 1 else 0)
    if current:
        chunks.append("\n\n".join(current))
    return chunks


def retrieve(index: KnowledgeIndex, query: str, k: int) -> list[DocChunk]:
    """Top-k chunks for the query.

    The primary score is the summed idf of the distinct query terms a chunk
    contains, so covering more of the query always outranks raw term
    repetition; repetition only breaks ties, then the doc id does.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    terms = sorted(set(tokenize(query)))
    scored: list[tuple[float, float, str, DocChunk]] = []
    for i, chunk in enumerate(index.chunks):
        tf = index._tf[i]
        coverage = 0.0
        weight = 0.0
        for term in terms:
            count = tf.get(term, 0)
            if count:
                idf = index.idf(term)
                coverage += idf
                weight += idf * math.log(1 + count)
        if coverage > 0:
            scored.append((coverage, weight, chunk.doc_id, chunk))
    scored.sort(key=lambda item: (-item[0], -item[1], item[2]))
    return [chunk for _, _, _, chunk in scored[:k]]
