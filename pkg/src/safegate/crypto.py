"""Authenticated symmetric tokens for camera-to-gateway transport.

Token layout: version byte 0x80, big-endian 64-bit timestamp (seconds),
16-byte IV, AES-128-CBC ciphertext with PKCS7 padding, then an
HMAC-SHA256 over everything before it; the whole token is url-safe
base64.  The 32-byte key (url-safe base64 encoded) splits into a
signing half (first 16 bytes) and an encryption half (last 16).  The
MAC is verified before any decryption happens.
"""

from __future__ import annotations

import base64
import hmac
import os
import struct
import time

from cryptography.hazmat.primitives import padding
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

VERSION = 0x80
_HEADER = struct.Struct(">BQ")
_MAC_LEN = 32
_IV_LEN = 16
_MIN_TOKEN_LEN = _HEADER.size + _IV_LEN + 16 + _MAC_LEN


class TokenError(Exception):
    """Base class for token failures."""


class MalformedKeyError(TokenError):
    """Key is not 32 url-safe-base64 bytes."""


class InvalidTokenError(TokenError):
    """Token failed parsing or authentication."""


class ExpiredTokenError(TokenError):
    """Token is older than the allowed ttl."""


def generate_key() -> bytes:
    """Fresh random key, url-safe base64 of 32 bytes."""
    return base64.urlsafe_b64encode(os.urandom(32))


def _split_key(key) -> tuple[bytes, bytes]:
    if isinstance(key, str):
        key = key.encode("ascii", errors="replace")
    try:
        raw = base64.urlsafe_b64decode(key)
    except Exception as exc:
        raise MalformedKeyError("key is not valid url-safe base64") from exc
    if len(raw) != 32:
        raise MalformedKeyError(f"key must decode to 32 bytes, got {len(raw)}")
    return raw[:16], raw[16:]


def encrypt_token(plaintext: bytes, key, now: float | None = None) -> bytes:
    """Encrypt and sign a payload; returns the url-safe base64 token."""
    signing_key, enc_key = _split_key(key)
    timestamp = int(time.time() if now is None else now)
    iv = os.urandom(_IV_LEN)
    padder = padding.PKCS7(128).padder()
    padded = padder.update(bytes(plaintext)) + padder.finalize()
    encryptor = Cipher(algorithms.AES(enc_key), modes.CBC(iv)).encryptor()
    ciphertext = encryptor.update(padded) + encryptor.finalize()
    body = _HEADER.pack(VERSION, timestamp) + iv + ciphertext
    mac = hmac.new(signing_key, body, "sha256").digest()
    return base64.urlsafe_b64encode(body + mac)


def decrypt_token(token, key, ttl: float | None = None, now: float | None = None) -> bytes:
    """Verify and decrypt a token.

    Raises InvalidTokenError for anything unauthentic (bad base64, bad
    version, truncation, MAC mismatch) and ExpiredTokenError when ttl is
    given and exceeded.  Plaintext is only touched after the MAC checks.
    """
    signing_key, enc_key = _split_key(key)
    if isinstance(token, str):
        token = token.encode("ascii", errors="replace")
    try:
        raw = base64.urlsafe_b64decode(token)
    except Exception as exc:
        raise InvalidTokenError("token is not valid url-safe base64") from exc
    if len(raw) < _MIN_TOKEN_LEN:
        raise InvalidTokenError("token too short")
    body, mac = raw[:-_MAC_LEN], raw[-_MAC_LEN:]
    expected = hmac.new(signing_key, body, "sha256").digest()
    if not hmac.compare_digest(mac, expected):
        raise InvalidTokenError("token authentication failed")
    version, timestamp = _HEADER.unpack_from(body)
    if version != VERSION:
        raise InvalidTokenError(f"unsupported token version {version:#x}")
    if ttl is not None:
        current = time.time() if now is None else now
        if timestamp + ttl < current:
            raise ExpiredTokenError("token expired")
        if timestamp > current + 60:
            raise ExpiredTokenError("token timestamp is in the future")
    iv = body[_HEADER.size : _HEADER.size + _IV_LEN]
    ciphertext = body[_HEADER.size + _IV_LEN :]
    if len(ciphertext) == 0 or len(ciphertext) % 16 != 0:
        raise InvalidTokenError("ciphertext length is not a block multiple")
    decryptor = Cipher(algorithms.AES(enc_key), modes.CBC(iv)).decryptor()
    padded = decryptor.update(ciphertext) + decryptor.finalize()
    unpadder = padding.PKCS7(128).unpadder()
    try:
        return unpadder.update(padded) + unpadder.finalize()
    except ValueError as exc:
        raise InvalidTokenError("bad padding") from exc
