"""Streaming ingestion of Stack Exchange ``Posts.xml`` dumps, plus archive fetch.

The parser is built on expat directly so no element tree is ever materialised;
memory is bounded by the read chunk plus the rows decoded from that chunk.
"""

from __future__ import annotations

import enum
import http.client
import os
import re
import tempfile
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import BinaryIO, Iterator
from xml.parsers import expat

DEFAULT_ARCHIVE_BASE = "https://archive.org/download/stackexchange"
ARCHIVE_BASE_ENV = "QRNET_ARCHIVE_BASE"

_CHUNK_SIZE = 1 << 16
_SLUG_RE = re.compile(r"[a-z0-9.-]+")


class PostType(enum.IntEnum):
    QUESTION = 1
    ANSWER = 2


class DumpParseError(Exception):
    """Top-level XML error; ``offset`` is the byte position reported by expat."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class FetchError(Exception):
    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


@dataclass(frozen=True)
class PostRecord:
    post_id: int
    post_type: PostType
    parent_id: int | None
    owner_user_id: int | None
    creation_time: datetime

    def __post_init__(self):
        if self.post_id <= 0:
            raise ValueError(f"post_id must be positive, got {self.post_id}")
        if self.post_type is PostType.ANSWER and self.parent_id is None:
            raise ValueError(f"answer {self.post_id} has no parent_id")
        if self.post_type is PostType.QUESTION and self.parent_id is not None:
            raise ValueError(f"question {self.post_id} carries a parent_id")

    def to_attributes(self) -> dict[str, str]:
        """Row attributes in dump form; ``parse_row`` inverts this."""
        attrs = {
            "Id": str(self.post_id),
            "PostTypeId": str(int(self.post_type)),
            "CreationDate": format_timestamp(self.creation_time),
        }
        if self.parent_id is not None:
            attrs["ParentId"] = str(self.parent_id)
        if self.owner_user_id is not None:
            attrs["OwnerUserId"] = str(self.owner_user_id)
        return attrs


@dataclass
class IngestStats:
    rows_read: int = 0
    questions: int = 0
    answers: int = 0
    skipped_malformed: int = 0
    skipped_missing_owner: int = 0
    skipped_other_type: int = 0

    def is_balanced(self) -> bool:
        return self.rows_read == (
            self.questions
            + self.answers
            + self.skipped_malformed
            + self.skipped_missing_owner
            + self.skipped_other_type
        )


def parse_timestamp(text: str) -> datetime:
    """Parse ``YYYY-MM-DDThh:mm:ss.fff`` as UTC (dumps carry no zone)."""
    if len(text) != 23 or text[10] != "T" or text[19] != ".":
        raise ValueError(f"not a dump timestamp: {text!r}")
    return datetime.fromisoformat(text).replace(tzinfo=timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.strftime("%Y-%m-%dT%H:%M:%S.") + f"{ts.microsecond // 1000:03d}"


class _RowRejected(Exception):
    def __init__(self, bucket: str):
        self.bucket = bucket


def _parse_int(text: str | None) -> int:
    if text is None:
        raise _RowRejected("skipped_malformed")
    try:
        return int(text)
    except ValueError:
        raise _RowRejected("skipped_malformed") from None


def parse_row(attrs: dict[str, str]) -> PostRecord:
    """Validate one ``row`` attribute dict.

    Raises ``_RowRejected`` carrying the IngestStats bucket to charge.
    """
    post_id = _parse_int(attrs.get("Id"))
    type_id = _parse_int(attrs.get("PostTypeId"))
    try:
        created = parse_timestamp(attrs.get("CreationDate", ""))
    except ValueError:
        raise _RowRejected("skipped_malformed") from None
    if post_id <= 0:
        raise _RowRejected("skipped_malformed")
    if type_id not in (PostType.QUESTION, PostType.ANSWER):
        raise _RowRejected("skipped_other_type")
    post_type = PostType(type_id)

    parent_text = attrs.get("ParentId")
    if post_type is PostType.ANSWER:
        parent_id = _parse_int(parent_text)
        if parent_id <= 0:
            raise _RowRejected("skipped_malformed")
    else:
        if parent_text is not None:
            raise _RowRejected("skipped_malformed")
        parent_id = None

    owner_text = attrs.get("OwnerUserId")
    if owner_text is None or owner_text == "":
        raise _RowRejected("skipped_missing_owner")
    owner = _parse_int(owner_text)
    return PostRecord(post_id, post_type, parent_id, owner, created)


def iter_posts(stream: BinaryIO, stats: IngestStats | None = None) -> Iterator[PostRecord]:
    """Yield PostRecords from a Posts XML byte stream, updating ``stats`` in place.

    Only ``row`` elements directly under the root are considered. Malformed XML
    raises DumpParseError carrying the byte offset of the failure.
    """
    if stats is None:
        stats = IngestStats()
    parser = expat.ParserCreate()
    pending: list[PostRecord] = []
    depth = 0

    def start(name, attrs):
        nonlocal depth
        depth += 1
        if depth != 2 or name != "row":
            return
        stats.rows_read += 1
        try:
            rec = parse_row(attrs)
        except _RowRejected as rej:
            setattr(stats, rej.bucket, getattr(stats, rej.bucket) + 1)
            return
        if rec.post_type is PostType.QUESTION:
            stats.questions += 1
        else:
            stats.answers += 1
        pending.append(rec)

    def end(name):
        nonlocal depth
        depth -= 1

    parser.StartElementHandler = start
    parser.EndElementHandler = end

    def feed(data: bytes, final: bool):
        try:
            parser.Parse(data, final)
        except expat.ExpatError as exc:
            raise DumpParseError(expat.ErrorString(exc.code), parser.ErrorByteIndex) from None

    while True:
        chunk = stream.read(_CHUNK_SIZE)
        if not chunk:
            break
        feed(chunk, False)
        if pending:
            yield from pending
            pending.clear()
    feed(b"", True)
    yield from pending


@dataclass
class ParsedPosts:
    posts: list[PostRecord] = field(default_factory=list)
    stats: IngestStats = field(default_factory=IngestStats)


def parse_posts(stream: BinaryIO) -> ParsedPosts:
    """Materialising convenience wrapper around :func:`iter_posts`."""
    out = ParsedPosts()
    out.posts.extend(iter_posts(stream, out.stats))
    return out


def archive_url(site_slug: str, base: str | None = None) -> str:
    if base is None:
        base = os.environ.get(ARCHIVE_BASE_ENV, DEFAULT_ARCHIVE_BASE)
    return f"{base.rstrip('/')}/{site_slug}.7z"


def validate_slug(site_slug: str) -> str:
    if not _SLUG_RE.fullmatch(site_slug) or site_slug.strip(".") != site_slug:
        raise ValueError(f"invalid site slug: {site_slug!r}")
    return site_slug


def fetch_dump(site_slug: str, destination: str | os.PathLike, *, base: str | None = None,
               timeout: float = 60.0) -> tuple[Path, int]:
    """Download ``<slug>.7z`` into ``destination`` (a directory) and return (path, length).

    The body is streamed to a temporary sibling file and renamed into place only
    after the byte count matches the server's Content-Length, so a failed or
    interrupted transfer never leaves a file at the final path. The archive is
    not decompressed.
    """
    validate_slug(site_slug)
    dest_dir = Path(destination)
    dest_dir.mkdir(parents=True, exist_ok=True)
    target = dest_dir / f"{site_slug}.7z"
    url = archive_url(site_slug, base)

    try:
        resp = urllib.request.urlopen(url, timeout=timeout)
    except urllib.error.HTTPError as exc:
        reason = "not found" if exc.code == 404 else exc.reason
        raise FetchError(f"{url}: HTTP {exc.code} {reason}", status=exc.code) from None

    fd, tmp_name = tempfile.mkstemp(prefix=f".{site_slug}.", suffix=".part", dir=dest_dir)
    tmp = Path(tmp_name)
    try:
        with resp, os.fdopen(fd, "wb") as out:
            expected = resp.headers.get("Content-Length")
            written = 0
            while True:
                try:
                    block = resp.read(_CHUNK_SIZE)
                except http.client.IncompleteRead as exc:
                    raise FetchError(f"{url}: transfer interrupted after {written} bytes") from exc
                if not block:
                    break
                out.write(block)
                written += len(block)
        if expected is not None and written != int(expected):
            raise FetchError(f"{url}: length mismatch, got {written} of {expected} bytes")
        if written == 0:
            raise FetchError(f"{url}: empty response body")
        os.replace(tmp, target)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    return target, written
