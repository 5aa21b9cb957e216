"""Tokenizer and masked-LM example generation backed by the native blurbkit core."""

from collections import namedtuple

from ._blurbkit import (
    ConfigError,
    DataError,
    Error,
    FormatError,
    IoError,
    Tokenizer,
    __version__,
    derive_seed,
    masking_rate,
)

Encoded = namedtuple("Encoded", "pieces ids segments word_index")


def load(vocab_path, config=None):
    """Load a vocab.txt; `config` may set casing, max_seq_len, strip_accents, protected_tokens."""
    return BoundTokenizer(Tokenizer(str(vocab_path), **(config or {})))


class BoundTokenizer:
    __slots__ = ("_native",)

    def __init__(self, native):
        self._native = native

    @property
    def vocab_size(self):
        return self._native.vocab_size

    @property
    def max_seq_len(self):
        return self._native.max_seq_len

    def encode(self, text, max_len=None):
        return Encoded(*self._native.encode(text, max_len))

    def encode_pair(self, a, b, max_len=None):
        return Encoded(*self._native.encode_pair(a, b, max_len))

    def mask(self, ids, word_index, rate=0.15, wwm=False, *, seed):
        return self._native.mask(list(ids), list(word_index), rate, wwm, seed)

    def token(self, token_id):
        return self._native.token(token_id)

    def token_id(self, token):
        return self._native.token_id(token)


__all__ = [
    "BoundTokenizer",
    "ConfigError",
    "DataError",
    "Encoded",
    "Error",
    "FormatError",
    "IoError",
    "Tokenizer",
    "__version__",
    "derive_seed",
    "load",
    "masking_rate",
]
