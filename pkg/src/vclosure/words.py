"""Free group words over a ranked alphabet.

A letter is a nonzero integer: ``i`` stands for the generator ``f_i`` and
``-i`` for its inverse. In text, ``a..z`` are generators and ``A..Z`` their
inverses; the empty string or ``"1"`` is the identity.

Words are freely reduced on construction and never mutated afterwards.
"""

from __future__ import annotations

import string
from typing import Iterable, Sequence

from .errors import AlphabetMismatch, EmptyWordNoRoot, InvalidLetter

MAX_RANK = 26

# [u, v] = u^-1 v^-1 u v everywhere in the package, the nilpotent module included.
COMMUTATOR_CONVENTION = "u^-1 v^-1 u v"


def _check_rank(rank: int) -> None:
    if not isinstance(rank, int) or not 1 <= rank <= MAX_RANK:
        raise AlphabetMismatch(f"rank must be an integer in 1..{MAX_RANK}, got {rank!r}")


def letter_key(letter: int) -> tuple[int, int]:
    # a < A < b < B < ...
    return (abs(letter), 0 if letter > 0 else 1)


def letter_to_char(letter: int) -> str:
    ch = string.ascii_lowercase[abs(letter) - 1]
    return ch if letter > 0 else ch.upper()


class Word:
    """A freely reduced word in the free group of the given rank."""

    __slots__ = ("letters", "rank", "_hash")

    def __init__(self, letters: Iterable[int] = (), rank: int = 2):
        _check_rank(rank)
        out: list[int] = []
        for pos, x in enumerate(letters):
            if not isinstance(x, int) or x == 0 or abs(x) > rank:
                raise InvalidLetter(f"letter {x!r} at position {pos} is outside rank {rank}", pos)
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        self.letters: tuple[int, ...] = tuple(out)
        self.rank = rank
        self._hash = None

    @classmethod
    def _trusted(cls, letters: tuple[int, ...], rank: int) -> "Word":
        w = object.__new__(cls)
        w.letters = letters
        w.rank = rank
        w._hash = None
        return w

    @classmethod
    def parse(cls, text: str, rank: int) -> "Word":
        _check_rank(rank)
        text = text.strip()
        if text in ("", "1"):
            return cls((), rank)
        letters = []
        for pos, ch in enumerate(text):
            if not ch.isascii() or not ch.isalpha():
                raise InvalidLetter(f"unexpected character {ch!r} at position {pos}", pos)
            idx = ord(ch.lower()) - ord("a") + 1
            if idx > rank:
                raise InvalidLetter(f"letter {ch!r} at position {pos} is outside rank {rank}", pos)
            letters.append(idx if ch.islower() else -idx)
        return cls(letters, rank)

    @classmethod
    def identity(cls, rank: int) -> "Word":
        return cls((), rank)

    @classmethod
    def generator(cls, i: int, rank: int) -> "Word":
        """The generator ``f_i`` (1-based)."""
        return cls((i,), rank)

    def __str__(self):
        return "".join(letter_to_char(x) for x in self.letters)

    def __repr__(self):
        return f"Word({str(self)!r}, rank={self.rank})"

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __bool__(self):
        return bool(self.letters)

    def __eq__(self, other):
        if isinstance(other, Word):
            return self.rank == other.rank and self.letters == other.letters
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rank, self.letters))
        return self._hash

    def shortlex_key(self) -> tuple:
        return (len(self.letters), tuple(letter_key(x) for x in self.letters))

    def __lt__(self, other: "Word"):
        return self.shortlex_key() < other.shortlex_key()

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __pow__(self, n: int) -> "Word":
        return power(self, n)

    def is_cyclically_reduced(self) -> bool:
        return len(self.letters) < 2 or self.letters[0] != -self.letters[-1]

    def cyclic_decomposition(self) -> tuple["Word", "Word"]:
        """Return ``(c, core)`` with ``self = c^-1 * core * c`` and ``core`` cyclically reduced."""
        xs = self.letters
        i, j = 0, len(xs) - 1
        while i < j and xs[i] == -xs[j]:
            i += 1
            j -= 1
        core = Word._trusted(xs[i:j + 1], self.rank)
        conj = Word._trusted(xs[j + 1:], self.rank)
        return conj, core


def reduce(raw: Sequence[int], rank: int) -> Word:
    """Freely reduce a raw letter sequence."""
    return Word(raw, rank)


def _same_rank(*words: Word) -> int:
    rank = words[0].rank
    for w in words[1:]:
        if w.rank != rank:
            raise AlphabetMismatch(f"words over ranks {rank} and {w.rank}")
    return rank


def multiply(u: Word, v: Word) -> Word:
    rank = _same_rank(u, v)
    a, b = u.letters, v.letters
    k = 0
    n = min(len(a), len(b))
    while k < n and a[len(a) - 1 - k] == -b[k]:
        k += 1
    return Word._trusted(a[:len(a) - k] + b[k:], rank)


def multiply_all(words: Iterable[Word], rank: int) -> Word:
    out = Word.identity(rank)
    for w in words:
        out = multiply(out, w)
    return out


def invert(u: Word) -> Word:
    return Word._trusted(tuple(-x for x in reversed(u.letters)), u.rank)


def power(u: Word, n: int) -> Word:
    if n < 0:
        return power(invert(u), -n)
    out = Word.identity(u.rank)
    base = u
    while n:
        if n & 1:
            out = multiply(out, base)
        base = multiply(base, base)
        n >>= 1
    return out


def conjugate(u: Word, s: Word) -> Word:
    """``s^-1 u s``."""
    return multiply(multiply(invert(s), u), s)


def commutator(u: Word, v: Word) -> Word:
    """``[u, v] = u^-1 v^-1 u v``."""
    return multiply(multiply(invert(u), invert(v)), multiply(u, v))


class Substitution:
    """Images of the generators ``f_1..f_n`` of a rank-``n`` free group.

    The images live in a free group of rank ``target_rank``.
    """

    __slots__ = ("images", "target_rank")

    def __init__(self, images: Sequence[Word], target_rank: int | None = None):
        images = tuple(images)
        if not images:
            raise AlphabetMismatch("a substitution needs at least one image")
        if target_rank is None:
            target_rank = images[0].rank
        for w in images:
            if w.rank != target_rank:
                raise AlphabetMismatch(f"image {w} is over rank {w.rank}, expected {target_rank}")
        self.images = images
        self.target_rank = target_rank

    @classmethod
    def identity(cls, rank: int) -> "Substitution":
        return cls([Word.generator(i, rank) for i in range(1, rank + 1)], rank)

    @classmethod
    def parse(cls, texts: Sequence[str], rank: int) -> "Substitution":
        return cls([Word.parse(t, rank) for t in texts], rank)

    @property
    def source_rank(self) -> int:
        return len(self.images)

    def __call__(self, w: Word) -> Word:
        return apply(self, w)

    def __eq__(self, other):
        if isinstance(other, Substitution):
            return self.images == other.images
        return NotImplemented

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        body = ", ".join(f"{letter_to_char(i + 1)}->{str(w) or '1'}" for i, w in enumerate(self.images))
        return f"Substitution({body})"

    def to_dict(self) -> dict[str, str]:
        return {letter_to_char(i + 1): str(w) for i, w in enumerate(self.images)}


def apply(s: Substitution, w: Word) -> Word:
    """Evaluate ``w`` at the images of ``s``: the homomorphism ``f_i -> s.images[i-1]``."""
    if w.rank != s.source_rank:
        raise AlphabetMismatch(f"word over rank {w.rank} but substitution has {s.source_rank} images")
    inverses: dict[int, Word] = {}
    out: list[int] = []
    for x in w.letters:
        if x > 0:
            piece = s.images[x - 1].letters
        else:
            img = inverses.get(x)
            if img is None:
                img = inverses[x] = invert(s.images[-x - 1])
            piece = img.letters
        for y in piece:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return Word._trusted(tuple(out), s.target_rank)


def primitive_root(w: Word) -> tuple[Word, int]:
    """Return ``(root, n)`` with ``root ** n == w`` and ``root`` not a proper power."""
    if not w:
        raise EmptyWordNoRoot("the identity has no primitive root")
    conj, core = w.cyclic_decomposition()
    xs = core.letters
    n = len(xs)
    for d in range(1, n + 1):
        if n % d == 0 and xs == xs[:d] * (n // d):
            root_core = Word._trusted(xs[:d], w.rank)
            return conjugate(root_core, conj), n // d
    raise AssertionError("unreachable: the full core is always a period")


def all_words(rank: int, max_len: int):
    """Every reduced word of length <= max_len, shortlex order."""
    _check_rank(rank)
    alphabet = sorted([i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)], key=letter_key)
    layer = [()]
    yield Word._trusted((), rank)
    for _ in range(max_len):
        nxt = []
        for prefix in layer:
            for x in alphabet:
                if prefix and prefix[-1] == -x:
                    continue
                nxt.append(prefix + (x,))
        for letters in nxt:
            yield Word._trusted(letters, rank)
        layer = nxt
