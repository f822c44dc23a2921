"""Phonetic and table-based token encoders.

Soundex, NYSIIS, and Metaphone follow the classic algorithm family used by
name-matching toolkits (American Soundex with the H/W separator rule, the
1970 NYSIIS rules, Lawrence Philips' original 1990 Metaphone). All three
are many-to-one: distinct words may share a code, and the same word always
gets the same code.

Pinyin and Wubi are table-driven per-character lookups backed by TSV files
(see ``load_code_table``); characters missing from the table pass through
unchanged.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyTable, MalformedTableLine, NonAlphabeticToken

__all__ = [
    "CodeTable",
    "fold_to_ascii_letters",
    "soundex_encode",
    "nysiis_encode",
    "metaphone_encode",
    "load_code_table",
    "bundled_table_path",
    "table_encode",
]

_VOWELS = frozenset("AEIOU")

# letter -> soundex digit class; H and W are handled separately
_SOUNDEX_MAP = {c: d for c, d in zip("ABCDEFGHIJKLMNOPQRSTUVWXYZ",
                                     "01230120022455012623010202")}


def fold_to_ascii_letters(token: str) -> str:
    """Uppercase ASCII letters of ``token`` after stripping diacritics.

    NFKD-decomposes, drops combining marks, keeps A-Z only. Returns ""
    when nothing alphabetic survives.
    """
    folded = unicodedata.normalize("NFKD", token)
    out = []
    for ch in folded:
        if unicodedata.combining(ch):
            continue
        ch = ch.upper()
        if "A" <= ch <= "Z":
            out.append(ch)
    return "".join(out)


def _clean(token: str) -> str:
    word = fold_to_ascii_letters(token)
    if not word:
        raise NonAlphabeticToken(f"no alphabetic content in {token!r}")
    return word


def soundex_encode(token: str) -> str:
    """American Soundex code: first letter plus three digit classes.

    Vowels reset the previous digit; H and W are transparent, so equal
    digits separated only by H/W collapse. Output always matches
    ``[A-Z][0-9]{3}``.
    """
    word = _clean(token)
    code = [word[0], "0", "0", "0"]
    count = 1
    previous = _SOUNDEX_MAP[word[0]]
    for ch in word[1:]:
        if count >= 4:
            break
        if ch in ("H", "W"):
            continue
        digit = _SOUNDEX_MAP[ch]
        if digit != "0" and digit != previous:
            code[count] = digit
            count += 1
        previous = digit
    return "".join(code)


def nysiis_encode(token: str, max_length: int | None = None) -> str:
    """NYSIIS code (1970 rules), uncapped by default.

    ``max_length=6`` gives the traditional strict variant.
    """
    word = _clean(token)

    if word.startswith("MAC"):
        word = "MCC" + word[3:]
    if word.startswith("KN"):
        word = "NN" + word[2:]
    if word.startswith("K"):
        word = "C" + word[1:]
    if word.startswith(("PH", "PF")):
        word = "FF" + word[2:]
    if word.startswith("SCH"):
        word = "SSS" + word[3:]

    if word.endswith(("EE", "IE")):
        word = word[:-2] + "Y"
    if word.endswith(("DT", "RT", "RD", "NT", "ND")):
        word = word[:-2] + "D"

    chars = list(word)
    key = [chars[0]]
    for i in range(1, len(chars)):
        cur = chars[i]
        nxt = chars[i + 1] if i + 1 < len(chars) else None
        nxt2 = chars[i + 2] if i + 2 < len(chars) else None
        prev = chars[i - 1]

        if cur == "E" and nxt == "V":
            transcoded = "AF"
        elif cur in _VOWELS:
            transcoded = "A"
        elif cur == "Q":
            transcoded = "G"
        elif cur == "Z":
            transcoded = "S"
        elif cur == "M":
            transcoded = "N"
        elif cur == "K":
            transcoded = "NN" if nxt == "N" else "C"
        elif cur == "S" and nxt == "C" and nxt2 == "H":
            transcoded = "SSS"
        elif cur == "P" and nxt == "H":
            transcoded = "FF"
        elif cur == "H" and (prev not in _VOWELS or nxt is None or nxt not in _VOWELS):
            transcoded = prev
        elif cur == "W" and prev in _VOWELS:
            transcoded = prev
        else:
            transcoded = cur

        # overwrite the working buffer so later rules see rewritten text
        for j, c in enumerate(transcoded):
            if i + j < len(chars):
                chars[i + j] = c

        if chars[i - 1] != chars[i]:
            key.append(chars[i])

    result = "".join(key)
    if len(result) > 1:
        if result.endswith("S"):
            result = result[:-1]
        if len(result) > 2 and result.endswith("AY"):
            result = result[:-2] + "Y"
        if result.endswith("A"):
            result = result[:-1]
        if not result:
            result = "".join(key)

    if max_length is not None:
        result = result[:max_length]
    return result


_FRONTV = frozenset("EIY")
_VARSON = frozenset("CSPTG")  # consonants that silence a following H


def _mt_vowel(word: str, i: int) -> bool:
    return 0 <= i < len(word) and word[i] in _VOWELS


def _mt_region(word: str, i: int, what: str) -> bool:
    return word[i:i + len(what)] == what


def metaphone_encode(token: str, max_length: int | None = None) -> str:
    """Original Metaphone code ('0' stands for the TH sound).

    No length cap by default; pass ``max_length=4`` for the traditional
    truncated form.
    """
    word = _clean(token)
    if len(word) == 1:
        return word

    two = word[:2]
    if two in ("KN", "GN", "PN", "AE", "WR"):
        word = word[1:]
    elif two == "WH":
        word = "W" + word[2:]
    elif word[0] == "X":
        word = "S" + word[1:]

    # collapse doubled consonants up front so digraph rules see the collapsed
    # form, e.g. -SSIO- behaves like -SIO-; C and G are exempt (CC is a real
    # cluster as in "accede", GG must stay hard as in "maggie")
    deduped = [word[0]]
    for ch in word[1:]:
        if ch == deduped[-1] and ch not in _VOWELS and ch not in ("C", "G"):
            continue
        deduped.append(ch)
    word = "".join(deduped)

    n_last = len(word) - 1
    code: list[str] = []
    i = 0
    while i < len(word):
        if max_length is not None and len(code) >= max_length:
            break
        ch = word[i]
        if ch != "C" and i > 0 and word[i - 1] == ch:
            i += 1
            continue

        if ch in _VOWELS:
            if i == 0:
                code.append(ch)
        elif ch == "B":
            if not (i == n_last and i > 0 and word[i - 1] == "M"):
                code.append("B")
        elif ch == "C":
            nxt = word[i + 1] if i < n_last else ""
            if i > 0 and word[i - 1] == "S" and i < n_last and nxt in _FRONTV:
                pass  # -SCE-, -SCI-, -SCY-: C is silent
            elif _mt_region(word, i, "CIA"):
                code.append("X")
            elif i < n_last and nxt in _FRONTV:
                code.append("S")
            elif i > 0 and word[i - 1] == "S" and nxt == "H":
                code.append("K")
            elif nxt == "H":
                if i == 0 and len(word) > 3 and _mt_vowel(word, 2):
                    code.append("K")
                else:
                    code.append("X")
            else:
                code.append("K")
        elif ch == "D":
            if i + 2 <= n_last and word[i + 1] == "G" and word[i + 2] in _FRONTV:
                code.append("J")
                i += 3
                continue
            code.append("T")
        elif ch == "G":
            silent = False
            if i + 1 == n_last and word[i + 1:i + 2] == "H":
                silent = True
            elif i + 1 < n_last and word[i + 1:i + 2] == "H" and not _mt_vowel(word, i + 2):
                silent = True
            elif i > 0 and (_mt_region(word, i, "GN") or _mt_region(word, i, "GNED")):
                silent = True
            if not silent:
                hard = i > 0 and word[i - 1] == "G"
                if i < n_last and word[i + 1] in _FRONTV and not hard:
                    code.append("J")
                else:
                    code.append("K")
        elif ch == "H":
            if i == n_last or (i > 0 and word[i - 1] in _VARSON):
                pass
            elif _mt_vowel(word, i + 1):
                code.append("H")
        elif ch in "FJLMNR":
            code.append(ch)
        elif ch == "K":
            if i == 0 or word[i - 1] != "C":
                code.append("K")
        elif ch == "P":
            code.append("F" if word[i + 1:i + 2] == "H" else "P")
        elif ch == "Q":
            code.append("K")
        elif ch == "S":
            if (_mt_region(word, i, "SH") or _mt_region(word, i, "SIO")
                    or _mt_region(word, i, "SIA")):
                code.append("X")
            else:
                code.append("S")
        elif ch == "T":
            if _mt_region(word, i, "TIA") or _mt_region(word, i, "TIO"):
                code.append("X")
            elif _mt_region(word, i, "TCH"):
                pass
            elif _mt_region(word, i, "TH"):
                code.append("0")
            else:
                code.append("T")
        elif ch == "V":
            code.append("F")
        elif ch in ("W", "Y"):
            if i < n_last and _mt_vowel(word, i + 1):
                code.append(ch)
        elif ch == "X":
            code.append("K")
            code.append("S")
        elif ch == "Z":
            code.append("S")
        i += 1

    result = "".join(code)
    if max_length is not None:
        result = result[:max_length]
    return result


@dataclass(frozen=True)
class CodeTable:
    """Immutable character -> ordered code list lookup (Pinyin or Wubi)."""

    entries: dict[str, tuple[str, ...]]
    kind: str

    def default_code(self, char: str) -> str | None:
        codes = self.entries.get(char)
        return codes[0] if codes else None


def load_code_table(path: str | Path, kind: str) -> CodeTable:
    """Read a TSV code table: ``character<TAB>code`` per line, ``#`` comments.

    Duplicate characters keep all codes in file order; the first listed
    code is the default.
    """
    if kind not in ("pinyin", "wubi"):
        raise ValueError(f"unknown table kind {kind!r}")
    path = Path(path)
    entries: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or len(parts[0]) != 1 or not parts[1]:
                raise MalformedTableLine(str(path), lineno, line)
            entries.setdefault(parts[0], []).append(parts[1])
    if not entries:
        raise EmptyTable(f"no entries in {path}")
    return CodeTable(
        entries={k: tuple(v) for k, v in entries.items()},
        kind=kind,
    )


def bundled_table_path(kind: str) -> Path:
    """Path of the pinyin.tsv / wubi.tsv file shipped with the package."""
    if kind not in ("pinyin", "wubi"):
        raise ValueError(f"unknown table kind {kind!r}")
    return Path(__file__).parent / "data" / f"{kind}.tsv"


def table_encode(token: str, table: CodeTable, granularity: str = "per_character") -> list[str]:
    """Encode ``token`` one character at a time via ``table``.

    ``per_character`` yields the default code per character; ``letters``
    additionally splits each code into single-character pieces (so
    ``xiao4`` becomes ``x i a o 4``). Characters absent from the table
    pass through unchanged.
    """
    if granularity not in ("per_character", "letters"):
        raise ValueError(f"unknown granularity {granularity!r}")
    codes = []
    for ch in token:
        code = table.default_code(ch)
        codes.append(code if code is not None else ch)
    if granularity == "per_character":
        return codes
    return [piece for code in codes for piece in code]
