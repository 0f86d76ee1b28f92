"""Read mbox, eml and JSON-lines corpora into decoded email records.

Structural problems with a single message never abort a corpus run: each
skipped message yields one :class:`IngestError` and parsing continues.
"""
from __future__ import annotations

import base64
import binascii
import codecs
import email
import json
import quopri
import re
from dataclasses import dataclass, field
from email.message import Message
from email.utils import getaddresses
from typing import BinaryIO, Iterable, Iterator, Union

FORMATS = ("mbox", "eml", "jsonl")

ERROR_KINDS = ("malformed-message", "undecodable-header", "undecodable-body", "missing-sender")

_IDENTITY_ENCODINGS = {"", "7bit", "8bit", "binary"}


@dataclass(frozen=True)
class RawEmail:
    headers: tuple[tuple[str, str], ...]
    body: bytes
    transfer_encoding: str = "none"
    content_type: str = "text/plain"
    source_offset: int = 0
    source_id: str = ""
    envelope: str = ""  # mbox "From " line, without the newline

    def get(self, name: str, default: str | None = None) -> str | None:
        """First value of header ``name`` (case-insensitive)."""
        name = name.lower()
        for key, value in self.headers:
            if key.lower() == name:
                return value
        return default


@dataclass(frozen=True)
class EmailDocument:
    sender: str
    receiver: str
    subject: str
    body: str
    source_id: str = ""
    label: str | None = field(default=None, compare=False)

    @property
    def receiver_domain(self) -> str:
        if "@" not in self.receiver:
            return ""
        return self.receiver.rsplit("@", 1)[1].strip().lower()


@dataclass(frozen=True)
class IngestError:
    source_id: str
    kind: str
    detail: str

    def to_dict(self) -> dict:
        return {"source_id": self.source_id, "kind": self.kind, "detail": self.detail}


class DecodingError(ValueError):
    kind = "malformed-message"


class MalformedMessage(DecodingError):
    kind = "malformed-message"


class HeaderDecodeError(DecodingError):
    kind = "undecodable-header"


class BodyDecodeError(DecodingError):
    kind = "undecodable-body"


class MissingSender(DecodingError):
    kind = "missing-sender"


# ---------------------------------------------------------------------------
# decoding

_ENCODED_WORD = re.compile(r"=\?([^?\s]+)\?([BbQq])\?([^?\s]*)\?=")
_Q_ESCAPE = re.compile(rb"=([0-9A-Fa-f]{2})")


def _decode_bytes(data: bytes, charset: str | None) -> str:
    charset = (charset or "utf-8").strip().strip('"').lower() or "utf-8"
    try:
        codecs.lookup(charset)
    except LookupError:
        return data.decode("latin-1")
    try:
        return data.decode(charset)
    except (UnicodeDecodeError, ValueError):
        return data.decode("latin-1")


def _b_payload(payload: str) -> bytes:
    if len(payload) % 4 == 1:
        raise HeaderDecodeError(f"truncated base64 payload {payload!r}")
    payload += "=" * (-len(payload) % 4)
    try:
        return base64.b64decode(payload, validate=True)
    except binascii.Error as exc:
        raise HeaderDecodeError(f"invalid base64 payload {payload!r}: {exc}") from None


def _q_payload(payload: str) -> bytes:
    data = payload.replace("_", " ").encode("latin-1", "replace")
    stray = _Q_ESCAPE.sub(b"", data)
    if b"=" in stray:
        raise HeaderDecodeError(f"malformed quoted-printable payload {payload!r}")
    return _Q_ESCAPE.sub(lambda m: bytes([int(m.group(1), 16)]), data)


def decode_header_value(raw: str) -> str:
    """Replace every RFC 2047 encoded-word in ``raw`` with its decoded text.

    Text outside encoded-words is kept verbatim, except that whitespace
    separating two adjacent encoded-words is dropped. Raises
    :class:`HeaderDecodeError` on a malformed payload.
    """
    if "=?" not in raw:
        return raw
    out = []
    pos = 0
    prev_was_word = False
    for m in _ENCODED_WORD.finditer(raw):
        gap = raw[pos:m.start()]
        if not (prev_was_word and gap.strip() == ""):
            out.append(gap)
        charset, enc, payload = m.groups()
        charset = charset.split("*", 1)[0]  # RFC 2231 language suffix
        data = _b_payload(payload) if enc in "Bb" else _q_payload(payload)
        out.append(_decode_bytes(data, charset))
        pos = m.end()
        prev_was_word = True
    out.append(raw[pos:])
    return "".join(out)


_TAG = re.compile(r"<[^>]*>")
_ENTITY = re.compile(r"&(amp|lt|gt|quot|apos);")
_ENTITIES = {"amp": "&", "lt": "<", "gt": ">", "quot": '"', "apos": "'"}


def strip_html(html: str) -> str:
    """Drop ``<...>`` spans, decode the five XML entities, collapse whitespace."""
    text = _TAG.sub(" ", html)
    text = _ENTITY.sub(lambda m: _ENTITIES[m.group(1)], text)
    return " ".join(text.split())


def _normalize_encoding(value: str | None) -> str:
    value = (value or "").strip().lower()
    if value in _IDENTITY_ENCODINGS:
        return "none"
    return value


def _content_type_message(content_type: str) -> Message:
    msg = Message()
    msg["Content-Type"] = content_type or "text/plain"
    return msg


def _transfer_decode(raw: bytes, encoding: str) -> bytes:
    encoding = _normalize_encoding(encoding)
    if encoding == "base64":
        compact = b"".join(raw.split())
        if len(compact) % 4:
            raise BodyDecodeError(f"base64 body length {len(compact)} is not a multiple of 4")
        try:
            return base64.b64decode(compact, validate=True)
        except binascii.Error as exc:
            raise BodyDecodeError(f"invalid base64 body: {exc}") from None
    if encoding == "quoted-printable":
        return quopri.decodestring(raw)
    return raw


def _decode_multipart(raw: bytes, content_type: str) -> str:
    ctype = "Content-Type: " + content_type.replace("\r", " ").replace("\n", " ")
    msg = email.message_from_bytes(ctype.encode("utf-8", "surrogateescape") + b"\n\n" + raw)
    pieces = []
    for part in msg.walk():
        if part.is_multipart() or part.get_content_maintype() != "text":
            continue
        payload = part.get_payload()
        if not isinstance(payload, str):
            continue
        pieces.append(
            decode_body(
                payload.encode("ascii", "surrogateescape"),
                part.get("Content-Transfer-Encoding", "none"),
                part.get_content_charset(),
                part.get_content_type(),
            )
        )
    return "\n".join(p for p in pieces if p)


def decode_body(
    raw: bytes,
    encoding: str = "none",
    charset: str | None = None,
    content_type: str = "text/plain",
) -> str:
    """Reverse the transfer encoding of a message body and decode it to text.

    Multipart bodies have every ``text/*`` part decoded and joined in order;
    HTML is reduced to its text content.
    """
    ctype = _content_type_message(content_type)
    if ctype.get_content_maintype() == "multipart":
        return _decode_multipart(raw, content_type)
    text = _decode_bytes(_transfer_decode(raw, encoding), charset)
    if ctype.get_content_type() == "text/html":
        text = strip_html(text)
    return text


# ---------------------------------------------------------------------------
# message structure

def _header_text(line: bytes) -> str:
    try:
        return line.decode("utf-8")
    except UnicodeDecodeError:
        return line.decode("latin-1")


def parse_message(data: bytes, source_id: str = "", offset: int = 0, envelope: str = "") -> RawEmail:
    """Split one RFC 822-style message into headers and body bytes."""
    lines = data.splitlines(keepends=True)
    headers: list[list[str]] = []
    i = 0
    for i, line in enumerate(lines):
        stripped = line.rstrip(b"\r\n")
        if not stripped:
            i += 1
            break
        if stripped[:1] in (b" ", b"\t"):
            if not headers:
                raise MalformedMessage("continuation line before first header")
            headers[-1][1] += _header_text(stripped)
            continue
        name, sep, value = stripped.partition(b":")
        name = name.strip()
        if not sep or not name or b" " in name:
            raise MalformedMessage(f"bad header line {stripped[:60]!r}")
        headers.append([_header_text(name), _header_text(value).lstrip()])
    else:
        i = len(lines)
    if not headers:
        raise MalformedMessage("message has no headers")
    body = b"".join(lines[i:])
    pairs = tuple((n, v.strip()) for n, v in headers)
    raw = RawEmail(pairs, body, source_offset=offset, source_id=source_id, envelope=envelope)
    ctype = raw.get("Content-Type") or "text/plain"
    return RawEmail(
        pairs,
        body,
        transfer_encoding=_normalize_encoding(raw.get("Content-Transfer-Encoding")),
        content_type=ctype,
        source_offset=offset,
        source_id=source_id,
        envelope=envelope,
    )


_ANGLE_ADDR = re.compile(r"<([^<>]*)>")


def extract_envelope(msg: RawEmail) -> EmailDocument:
    """Decode sender, first receiver, subject and body of ``msg``.

    Raises a :class:`DecodingError` subclass when the message cannot be scored.
    """
    from_value = msg.get("From")
    if from_value is None or not from_value.strip():
        raise MissingSender("no From header")
    from_value = decode_header_value(from_value)
    m = _ANGLE_ADDR.search(from_value)
    sender = (m.group(1) if m else from_value).strip()
    if not sender:
        raise MissingSender(f"empty sender address in {from_value!r}")

    receiver = ""
    to_value = msg.get("To")
    if to_value:
        for _, addr in getaddresses([decode_header_value(to_value)]):
            if addr:
                receiver = addr
                break

    subject = decode_header_value(msg.get("Subject", ""))
    charset = _content_type_message(msg.content_type).get_content_charset()
    body = decode_body(msg.body, msg.transfer_encoding, charset, msg.content_type)
    return EmailDocument(sender, receiver, subject, body, msg.source_id)


# ---------------------------------------------------------------------------
# corpus readers

def _is_delimiter(line: bytes) -> bool:
    return line.startswith(b"From ")


_ESCAPED_FROM = re.compile(rb"^>(>*From )")


def _mbox_chunks(stream: BinaryIO) -> Iterator[tuple[int, bytes, list[bytes]]]:
    """Yield (offset, envelope line, body lines) per mbox message."""
    offset = 0
    start = None
    envelope = b""
    lines: list[bytes] = []
    prev_blank = True
    preamble: list[bytes] = []
    for line in stream:
        if _is_delimiter(line) and prev_blank:
            if start is not None:
                yield start, envelope, lines
            elif any(p.strip() for p in preamble):
                yield -1, b"", preamble
            start, envelope, lines = offset, line.rstrip(b"\r\n"), []
        elif start is None:
            preamble.append(line)
        else:
            lines.append(_ESCAPED_FROM.sub(rb"\1", line))
        prev_blank = not line.strip()
        offset += len(line)
    if start is not None:
        yield start, envelope, lines
    elif any(p.strip() for p in preamble):
        yield -1, b"", preamble


def _strip_separator(lines: list[bytes]) -> bytes:
    # the writer adds one blank line after every message
    if lines and not lines[-1].strip():
        lines = lines[:-1]
    return b"".join(lines)


Record = Union[RawEmail, EmailDocument, IngestError]


def _iter_mbox(stream: BinaryIO, name: str) -> Iterator[Record]:
    for offset, envelope, lines in _mbox_chunks(stream):
        if offset < 0:
            yield IngestError(f"{name}:0", "malformed-message", "content before first 'From ' line")
            continue
        sid = f"{name}:{offset}"
        try:
            yield parse_message(_strip_separator(lines), sid, offset, _header_text(envelope))
        except DecodingError as exc:
            yield IngestError(sid, exc.kind, str(exc))


def _iter_eml(stream: BinaryIO, name: str) -> Iterator[Record]:
    data = stream.read()
    envelope = ""
    if _is_delimiter(data):
        first, _, data = data.partition(b"\n")
        envelope = _header_text(first.rstrip(b"\r"))
    try:
        yield parse_message(data, name, 0, envelope)
    except DecodingError as exc:
        yield IngestError(name, exc.kind, str(exc))


_JSONL_FIELDS = ("sender", "receiver", "subject", "body")


def _iter_jsonl(stream: BinaryIO, name: str) -> Iterator[Record]:
    for lineno, line in enumerate(stream, 1):
        if not line.strip():
            continue
        sid = f"{name}:{lineno}"
        try:
            obj = json.loads(line)
        except (ValueError, UnicodeDecodeError) as exc:
            yield IngestError(sid, "malformed-message", f"invalid JSON: {exc}")
            continue
        if not isinstance(obj, dict):
            yield IngestError(sid, "malformed-message", "JSON line is not an object")
            continue
        values = {k: obj.get(k, "") for k in _JSONL_FIELDS}
        bad = [k for k, v in values.items() if not isinstance(v, str)]
        if bad:
            yield IngestError(sid, "malformed-message", f"non-string fields: {', '.join(bad)}")
            continue
        if not values["sender"].strip():
            yield IngestError(sid, "missing-sender", "empty or absent sender")
            continue
        label = obj.get("label")
        yield EmailDocument(
            values["sender"].strip(),
            values["receiver"].strip(),
            values["subject"],
            values["body"],
            sid,
            label=label if isinstance(label, str) else None,
        )


def iter_corpus(stream: BinaryIO, format: str, name: str = "<stream>") -> Iterator[Record]:
    """Stream records from ``stream`` in source order.

    mbox and eml yield :class:`RawEmail`; jsonl yields already-decoded
    :class:`EmailDocument`. Per-message failures yield :class:`IngestError`.
    """
    if format == "mbox":
        return _iter_mbox(stream, name)
    if format == "eml":
        return _iter_eml(stream, name)
    if format == "jsonl":
        return _iter_jsonl(stream, name)
    raise ValueError(f"unknown corpus format {format!r}; expected one of {', '.join(FORMATS)}")


def parse_corpus(stream: BinaryIO, format: str, name: str = "<stream>"):
    """Parse a whole corpus; returns ``(records, errors)``."""
    records, errors = [], []
    for rec in iter_corpus(stream, format, name):
        (errors if isinstance(rec, IngestError) else records).append(rec)
    return records, errors


def iter_documents(stream: BinaryIO, format: str, name: str = "<stream>") -> Iterator[EmailDocument | IngestError]:
    """Like :func:`iter_corpus` but every message comes out decoded or as an error."""
    for rec in iter_corpus(stream, format, name):
        if isinstance(rec, RawEmail):
            try:
                yield extract_envelope(rec)
            except DecodingError as exc:
                yield IngestError(rec.source_id, exc.kind, str(exc))
        else:
            yield rec


# ---------------------------------------------------------------------------
# writers (fixtures and round-trip checks)

_FROM_LINE = re.compile(rb"^(>*From )", re.MULTILINE)


def format_message(msg: RawEmail) -> bytes:
    head = "".join(f"{name}: {value}\n" for name, value in msg.headers)
    return head.encode("utf-8") + b"\n" + msg.body


def dump_mbox(messages: Iterable[RawEmail]) -> bytes:
    """Serialize messages as mboxrd, escaping body ``From `` lines."""
    out = []
    for msg in messages:
        envelope = msg.envelope or "From MAILER-DAEMON Thu Jan  1 00:00:00 1970"
        body = format_message(msg)
        if not body.endswith(b"\n"):
            body += b"\n"
        out.append(envelope.encode("utf-8") + b"\n" + _FROM_LINE.sub(rb">\1", body) + b"\n")
    return b"".join(out)
